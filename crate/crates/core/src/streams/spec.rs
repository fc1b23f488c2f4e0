//! The source mini-language:
//!
//! ```text
//! zeros | ones | periodic:WORD | finite:WORD | flip:N:SPEC
//! | interleave(SPEC,SPEC) | columns(FILE)
//! ```
//!
//! A columns file has lines `N SPEC` (column `N`) and `default SPEC`, with
//! `#` comments. Relative paths resolve against the directory of the file
//! that names them, or the working directory at top level.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::bitcore::{strip_comment, BitString};
use crate::error::{Error, Result};

use super::BitSource;

pub fn parse_source(spec: &str) -> Result<BitSource> {
    parse_source_in(spec, Path::new("."))
}

pub fn parse_source_in(spec: &str, base: &Path) -> Result<BitSource> {
    let s = spec.trim();
    match s {
        "zeros" => return Ok(BitSource::zeros()),
        "ones" => return Ok(BitSource::ones()),
        _ => {}
    }
    if let Some(word) = s.strip_prefix("periodic:") {
        return BitSource::periodic(word.parse()?);
    }
    if let Some(word) = s.strip_prefix("finite:") {
        return Ok(BitSource::finite(word.parse()?));
    }
    if let Some(rest) = s.strip_prefix("flip:") {
        let (pos, inner) = rest
            .split_once(':')
            .ok_or_else(|| Error::parse(format!("expected flip:N:SPEC, got {s:?}")))?;
        let pos: u64 = pos
            .parse()
            .map_err(|_| Error::parse(format!("bad flip position {pos:?}")))?;
        return Ok(parse_source_in(inner, base)?.flipped(pos));
    }
    if let Some(args) = call_args(s, "interleave")? {
        let (a, b) = split_top_level_comma(args)
            .ok_or_else(|| Error::parse(format!("interleave needs two arguments: {s:?}")))?;
        return Ok(BitSource::interleave(
            parse_source_in(a, base)?,
            parse_source_in(b, base)?,
        ));
    }
    if let Some(file) = call_args(s, "columns")? {
        return load_columns(&resolve(base, file.trim()));
    }
    Err(Error::parse(format!("unknown source spec {s:?}")))
}

fn call_args<'a>(s: &'a str, name: &str) -> Result<Option<&'a str>> {
    let Some(rest) = s.strip_prefix(name) else {
        return Ok(None);
    };
    let Some(inner) = rest.strip_prefix('(') else {
        return Ok(None);
    };
    inner
        .strip_suffix(')')
        .map(Some)
        .ok_or_else(|| Error::parse(format!("unbalanced parentheses in {s:?}")))
}

fn split_top_level_comma(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

pub(crate) fn resolve(base: &Path, file: &str) -> PathBuf {
    let p = Path::new(file);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn load_columns(path: &Path) -> Result<BitSource> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut columns = BTreeMap::new();
    let mut default = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let (key, spec) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::parse("expected `N SPEC` or `default SPEC`").at_line(lineno + 1))?;
        let src = parse_source_in(spec, base).map_err(|e| e.at_line(lineno + 1))?;
        if key == "default" {
            if default.replace(src).is_some() {
                return Err(Error::parse("default given twice").at_line(lineno + 1));
            }
            continue;
        }
        let n: u64 = key
            .parse()
            .map_err(|_| Error::parse(format!("bad column index {key:?}")).at_line(lineno + 1))?;
        if columns.insert(n, Arc::new(src)).is_some() {
            return Err(Error::parse(format!("column {n} given twice")).at_line(lineno + 1));
        }
    }
    Ok(BitSource::Columns {
        columns,
        default: Arc::new(default.unwrap_or_else(BitSource::zeros)),
    })
}

/// Parses a plain 0/1 word, mapping the error into the parse family.
pub fn parse_word(s: &str) -> Result<BitString> {
    s.trim().parse()
}
