//! Construction spec strings:
//!
//! ```text
//! simple:ENUM | surj:ENUM | bitselect:double|shift|identity
//! | inj:ENUM:DECIDED | two1:ENUM | two2:ENUM:UFILE
//! ```
//!
//! `ENUM` is an enumeration file or the built-in `collatz(M,S)`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use crate::enumeration::{collatz_toy, DecidedSet, StagedEnumeration, StagedStringEnumeration};
use crate::error::{Error, Result};
use crate::streams::RealFunction;

use super::{
    one_way_surjection, partial_injection, two_to_one_v1, two_to_one_v2, BitSelect, Double,
    IdentitySelection, Selection, Shift, SimpleOneWay,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnumSpec {
    File(PathBuf),
    Collatz { max_element: u64, max_stage: u64 },
}

impl EnumSpec {
    pub fn load(&self) -> Result<StagedEnumeration> {
        match self {
            EnumSpec::File(p) => StagedEnumeration::load(p),
            EnumSpec::Collatz {
                max_element,
                max_stage,
            } => Ok(collatz_toy(*max_element, *max_stage)),
        }
    }
}

impl FromStr for EnumSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(args) = s.strip_prefix("collatz(").and_then(|r| r.strip_suffix(')')) {
            let (m, st) = args
                .split_once(',')
                .ok_or_else(|| Error::parse(format!("expected collatz(M,S), got {s:?}")))?;
            let num = |v: &str| {
                v.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::parse(format!("bad number {v:?} in {s:?}")))
            };
            return Ok(EnumSpec::Collatz {
                max_element: num(m)?,
                max_stage: num(st)?,
            });
        }
        if s.is_empty() {
            return Err(Error::parse("missing enumeration"));
        }
        Ok(EnumSpec::File(PathBuf::from(s)))
    }
}

impl fmt::Display for EnumSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnumSpec::File(p) => write!(f, "{}", p.display()),
            EnumSpec::Collatz {
                max_element,
                max_stage,
            } => write!(f, "collatz({max_element},{max_stage})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionKind {
    Identity,
    Double,
    Shift,
}

impl SelectionKind {
    pub fn selection(self) -> Arc<dyn Selection> {
        match self {
            SelectionKind::Identity => Arc::new(IdentitySelection),
            SelectionKind::Double => Arc::new(Double),
            SelectionKind::Shift => Arc::new(Shift),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstructionSpec {
    Simple(EnumSpec),
    Surjection(EnumSpec),
    BitSelect(SelectionKind),
    Injection(EnumSpec, PathBuf),
    TwoToOneV1(EnumSpec),
    TwoToOneV2(EnumSpec, PathBuf),
}

/// A built construction together with the enumerations it was built from.
#[derive(Debug, Clone)]
pub struct Construction {
    pub spec: ConstructionSpec,
    pub function: Arc<dyn RealFunction>,
    pub enumeration: Option<Arc<StagedEnumeration>>,
    pub strings: Option<Arc<StagedStringEnumeration>>,
}

impl ConstructionSpec {
    pub fn build(&self) -> Result<Construction> {
        let mut strings = None;
        let (function, enumeration): (Arc<dyn RealFunction>, _) = match self {
            ConstructionSpec::Simple(e) => {
                let w = Arc::new(e.load()?);
                (Arc::new(SimpleOneWay::new(w.clone())), Some(w))
            }
            ConstructionSpec::Surjection(e) => {
                let w = Arc::new(e.load()?);
                (Arc::new(one_way_surjection(w.clone())), Some(w))
            }
            ConstructionSpec::BitSelect(k) => (Arc::new(BitSelect::new(k.selection())), None),
            ConstructionSpec::Injection(e, d) => {
                let w = Arc::new(e.load()?);
                let d = Arc::new(DecidedSet::load(d)?);
                (Arc::new(partial_injection(w.clone(), d)?), Some(w))
            }
            ConstructionSpec::TwoToOneV1(e) => {
                let w = Arc::new(e.load()?);
                (Arc::new(two_to_one_v1(w.clone())), Some(w))
            }
            ConstructionSpec::TwoToOneV2(e, u) => {
                let w = Arc::new(e.load()?);
                let u = Arc::new(StagedStringEnumeration::load(u)?);
                strings = Some(u.clone());
                (Arc::new(two_to_one_v2(w.clone(), u)), Some(w))
            }
        };
        Ok(Construction {
            spec: self.clone(),
            function,
            enumeration,
            strings,
        })
    }
}

impl FromStr for ConstructionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::parse(format!("expected FAMILY:ARGS, got {s:?}")))?;
        let two = || {
            rest.rsplit_once(':')
                .filter(|(a, b)| !a.is_empty() && !b.is_empty())
                .ok_or_else(|| Error::parse(format!("{family} needs two arguments: {s:?}")))
        };
        Ok(match family {
            "simple" => ConstructionSpec::Simple(rest.parse()?),
            "surj" => ConstructionSpec::Surjection(rest.parse()?),
            "bitselect" => ConstructionSpec::BitSelect(match rest {
                "identity" => SelectionKind::Identity,
                "double" => SelectionKind::Double,
                "shift" => SelectionKind::Shift,
                _ => return Err(Error::parse(format!("unknown selection {rest:?}"))),
            }),
            "inj" => {
                let (e, d) = two()?;
                ConstructionSpec::Injection(e.parse()?, PathBuf::from(d))
            }
            "two1" => ConstructionSpec::TwoToOneV1(rest.parse()?),
            "two2" => {
                let (e, u) = two()?;
                ConstructionSpec::TwoToOneV2(e.parse()?, PathBuf::from(u))
            }
            _ => return Err(Error::parse(format!("unknown construction family {family:?}"))),
        })
    }
}

impl fmt::Display for ConstructionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstructionSpec::Simple(e) => write!(f, "simple:{e}"),
            ConstructionSpec::Surjection(e) => write!(f, "surj:{e}"),
            ConstructionSpec::BitSelect(k) => write!(
                f,
                "bitselect:{}",
                match k {
                    SelectionKind::Identity => "identity",
                    SelectionKind::Double => "double",
                    SelectionKind::Shift => "shift",
                }
            ),
            ConstructionSpec::Injection(e, d) => write!(f, "inj:{e}:{}", d.display()),
            ConstructionSpec::TwoToOneV1(e) => write!(f, "two1:{e}"),
            ConstructionSpec::TwoToOneV2(e, u) => write!(f, "two2:{e}:{}", u.display()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs_round_trip() {
        for s in [
            "simple:w.enum",
            "surj:collatz(128,10000)",
            "bitselect:double",
            "bitselect:shift",
            "bitselect:identity",
            "inj:w.enum:d.set",
            "two1:collatz(16,500)",
            "two2:w.enum:u.strings",
        ] {
            let spec: ConstructionSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
    }

    #[test]
    fn bad_specs_are_parse_errors() {
        for s in ["", "simple", "bitselect:triple", "inj:w.enum", "two2:u", "nope:x", "surj:collatz(1)"] {
            assert!(s.parse::<ConstructionSpec>().unwrap_err().is_parse(), "{s}");
        }
    }

    #[test]
    fn builds_from_files() {
        let dir = tempfile::tempdir().unwrap();
        let e = dir.path().join("w.enum");
        let d = dir.path().join("d.set");
        let u = dir.path().join("u.strings");
        std::fs::write(&e, "horizon 50\n1 2\n").unwrap();
        std::fs::write(&d, "2\nbound 20\n").unwrap();
        std::fs::write(&u, "horizon 50\n3 01\n").unwrap();
        let specs = [
            format!("simple:{}", e.display()),
            format!("inj:{}:{}", e.display(), d.display()),
            format!("two2:{}:{}", e.display(), u.display()),
        ];
        for s in specs {
            let c = s.parse::<ConstructionSpec>().unwrap().build().unwrap();
            assert_eq!(c.enumeration.unwrap().entry_stage(2), Some(1));
        }
        let missing = format!("simple:{}", dir.path().join("nope").display());
        assert!(matches!(
            missing.parse::<ConstructionSpec>().unwrap().build(),
            Err(Error::Io { .. })
        ));
    }
}
