use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::bitcore::{pair, BitString};
use crate::error::{Error, Result};

/// A source whose bits are given by a formula, for reals that the fixed
/// kinds cannot express (marker traps, preimage witnesses).
pub trait SourceFn: Send + Sync + fmt::Debug {
    fn bit(&self, pos: u64) -> bool;
    fn describe(&self) -> String;
}

/// A total, deterministic infinite bit sequence.
#[derive(Clone)]
pub enum BitSource {
    /// The word followed by `0^ω`.
    EventuallyZero(BitString),
    /// `word^ω`; the word is never empty.
    Periodic(BitString),
    /// The base with one bit flipped.
    FlippedAt(Arc<BitSource>, u64),
    /// `even ⊕ odd`.
    Interleaved(Arc<BitSource>, Arc<BitSource>),
    /// Column `n` (positions `⟨n,i⟩`) taken from `columns[n]` where present,
    /// everything else from `default`.
    Columns {
        columns: BTreeMap<u64, Arc<BitSource>>,
        default: Arc<BitSource>,
    },
    /// The `n`th column of a source: bit `i` is `source(⟨n,i⟩)`.
    Column(Arc<BitSource>, u64),
    Computed(Arc<dyn SourceFn>),
}

impl BitSource {
    pub fn zeros() -> Self {
        BitSource::EventuallyZero(BitString::new())
    }

    pub fn ones() -> Self {
        BitSource::Periodic(BitString::repeat(true, 1))
    }

    pub fn finite(prefix: BitString) -> Self {
        BitSource::EventuallyZero(prefix)
    }

    pub fn periodic(word: BitString) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::parse("periodic source needs a non-empty word"));
        }
        Ok(BitSource::Periodic(word))
    }

    pub fn flipped(self, pos: u64) -> Self {
        BitSource::FlippedAt(Arc::new(self), pos)
    }

    pub fn interleave(even: BitSource, odd: BitSource) -> Self {
        BitSource::Interleaved(Arc::new(even), Arc::new(odd))
    }

    pub fn computed<F: SourceFn + 'static>(f: F) -> Self {
        BitSource::Computed(Arc::new(f))
    }

    pub fn column(&self, n: u64) -> BitSource {
        BitSource::Column(Arc::new(self.clone()), n)
    }

    pub fn bit(&self, pos: u64) -> bool {
        match self {
            BitSource::EventuallyZero(w) => pos < w.len() as u64 && w.bits()[pos as usize],
            BitSource::Periodic(w) => w.bits()[(pos % w.len() as u64) as usize],
            BitSource::FlippedAt(base, at) => base.bit(pos) ^ (pos == *at),
            BitSource::Interleaved(even, odd) => {
                if pos.is_multiple_of(2) {
                    even.bit(pos / 2)
                } else {
                    odd.bit(pos / 2)
                }
            }
            BitSource::Columns { columns, default } => {
                let (n, i) = crate::bitcore::unpair(pos);
                match columns.get(&n) {
                    Some(c) => c.bit(i),
                    None => default.bit(pos),
                }
            }
            BitSource::Column(src, n) => src.bit(pair(*n, pos)),
            BitSource::Computed(f) => f.bit(pos),
        }
    }

    /// The first `n` bits.
    pub fn prefix(&self, n: usize) -> BitString {
        (0..n as u64).map(|i| self.bit(i)).collect()
    }
}

impl fmt::Display for BitSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BitSource::EventuallyZero(w) if w.is_empty() => f.write_str("zeros"),
            BitSource::EventuallyZero(w) => write!(f, "finite:{w}"),
            BitSource::Periodic(w) if w.len() == 1 && w.get(0) == Some(true) => {
                f.write_str("ones")
            }
            BitSource::Periodic(w) => write!(f, "periodic:{w}"),
            BitSource::FlippedAt(base, at) => write!(f, "flip:{at}:{base}"),
            BitSource::Interleaved(a, b) => write!(f, "interleave({a},{b})"),
            BitSource::Columns { columns, default } => {
                write!(f, "columns[")?;
                for (n, c) in columns {
                    write!(f, "{n}={c};")?;
                }
                write!(f, "default={default}]")
            }
            BitSource::Column(src, n) => write!(f, "column:{n}:{src}"),
            BitSource::Computed(c) => f.write_str(&c.describe()),
        }
    }
}

impl fmt::Debug for BitSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSource({self})")
    }
}
