//! Staged enumerations of c.e. sets (stand-ins for the halting set) and of
//! prefix-free word sets (stand-ins for a Martin-Löf test member).
//!
//! Every enumeration carries a horizon. Stage queries beyond it are errors.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::bitcore::{strip_comment, BitString, PrefixFreeSet};
use crate::error::{Error, Result};
use crate::streams::BitSource;

/// A c.e. set given stage by stage, at most one new element per stage and no
/// element enumerated twice.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StagedEnumeration {
    by_stage: BTreeMap<u64, u64>,
    entry: BTreeMap<u64, u64>,
    horizon: u64,
}

impl StagedEnumeration {
    pub fn empty(horizon: u64) -> Self {
        Self {
            horizon,
            ..Self::default()
        }
    }

    /// Builds an enumeration from `(stage, element)` pairs.
    pub fn from_pairs<I: IntoIterator<Item = (u64, u64)>>(pairs: I, horizon: u64) -> Result<Self> {
        let mut e = Self::empty(horizon);
        for (stage, element) in pairs {
            if stage > horizon {
                return Err(Error::BeyondHorizon { stage, horizon });
            }
            if let Some(&first) = e.entry.get(&element) {
                return Err(Error::RepeatedElement {
                    element,
                    first,
                    second: stage,
                });
            }
            if let Some(&first) = e.by_stage.get(&stage) {
                return Err(Error::RepeatedStage {
                    stage,
                    first,
                    second: element,
                });
            }
            e.by_stage.insert(stage, element);
            e.entry.insert(element, stage);
        }
        Ok(e)
    }

    /// Parses lines `s n`, with `#` comments and an optional `horizon N`
    /// line. Without one the horizon is the largest listed stage.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut horizon = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| {
                s.parse::<u64>()
                    .map_err(|_| Error::parse(format!("expected a natural, got {s:?}")).at_line(lineno + 1))
            };
            match fields.as_slice() {
                ["horizon", h] => {
                    if horizon.replace(num(h)?).is_some() {
                        return Err(Error::parse("horizon given twice").at_line(lineno + 1));
                    }
                }
                [s, n] => pairs.push((num(s)?, num(n)?, lineno + 1)),
                _ => return Err(Error::parse("expected `STAGE ELEMENT`").at_line(lineno + 1)),
            }
        }
        let horizon = horizon.unwrap_or_else(|| pairs.iter().map(|p| p.0).max().unwrap_or(0));
        let mut e = Self::empty(horizon);
        for (stage, element, line) in pairs {
            e = Self::from_pairs(e.pairs().chain([(stage, element)]), horizon)
                .map_err(|err| err.at_line(line))?;
        }
        Ok(e)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// The file format accepted by [`Self::parse`].
    pub fn to_text(&self) -> String {
        let mut s = format!("horizon {}\n", self.horizon);
        for (st, n) in self.pairs() {
            s.push_str(&format!("{st} {n}\n"));
        }
        s
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.by_stage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_stage.is_empty()
    }

    /// `(stage, element)` in stage order.
    pub fn pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.by_stage.iter().map(|(&s, &n)| (s, n))
    }

    fn check(&self, s: u64) -> Result<()> {
        if s > self.horizon {
            return Err(Error::BeyondHorizon {
                stage: s,
                horizon: self.horizon,
            });
        }
        Ok(())
    }

    /// The element entering at stage `s`, if any.
    pub fn new_element_at(&self, s: u64) -> Result<Option<u64>> {
        self.check(s)?;
        Ok(self.by_stage.get(&s).copied())
    }

    /// `n ∈ W_s`.
    pub fn member_at_stage(&self, n: u64, s: u64) -> Result<bool> {
        self.check(s)?;
        Ok(self.entry.get(&n).is_some_and(|&t| t <= s))
    }

    /// The stage at which `n` enters, if it does within the horizon.
    pub fn entry_stage(&self, n: u64) -> Option<u64> {
        self.entry.get(&n).copied()
    }

    /// `n` enters exactly at stage `s` (`n ∈ W_s − W_{s−1}`).
    pub fn enters_at(&self, n: u64, s: u64) -> Result<bool> {
        self.check(s)?;
        Ok(self.by_stage.get(&s) == Some(&n))
    }

    /// Membership at `min(s, horizon)`, with a flag telling whether the
    /// stage was clamped. Past the horizon nothing is enumerated, which is
    /// how the toy sets model non-halting.
    pub fn settled_membership(&self, n: u64, s: u64) -> (bool, bool) {
        let clamped = s > self.horizon;
        let s = s.min(self.horizon);
        (self.entry.get(&n).is_some_and(|&t| t <= s), clamped)
    }

    /// `W_s`.
    pub fn members_at(&self, s: u64) -> Result<BTreeSet<u64>> {
        self.check(s)?;
        Ok(self.by_stage.range(..=s).map(|(_, &n)| n).collect())
    }

    /// Every element enumerated within the horizon.
    pub fn members(&self) -> BTreeSet<u64> {
        self.entry.keys().copied().collect()
    }
}

/// Number of Collatz steps from `n` to 1, if it is at most `limit`.
fn collatz_length(n: u64, limit: u64) -> Option<u64> {
    if n == 0 {
        return None;
    }
    let mut x = n as u128;
    let mut steps = 0;
    while x != 1 {
        if steps >= limit {
            return None;
        }
        x = if x.is_multiple_of(2) { x / 2 } else { 3 * x + 1 };
        steps += 1;
    }
    Some(steps)
}

/// A deterministic toy halting set on the elements `n < max_element`.
///
/// `n` enters at stage `len(n)·max_element + n`, where `len(n)` is the number
/// of Collatz steps from `n` to 1, so elements are ordered by trajectory
/// length with ties going to the smaller element. Elements whose stage would
/// exceed `max_stage` are never enumerated, and neither is 0, whose
/// trajectory never reaches 1. The horizon is `max_stage`.
pub fn collatz_toy(max_element: u64, max_stage: u64) -> StagedEnumeration {
    let limit = max_stage / max_element.max(1) + 1;
    let pairs = (1..max_element).filter_map(|n| {
        let len = collatz_length(n, limit)?;
        let stage = len * max_element + n;
        (stage <= max_stage).then_some((stage, n))
    });
    StagedEnumeration::from_pairs(pairs, max_stage).expect("collatz stages are distinct")
}

/// A set with total membership on `0..bound`, for constructions that need
/// absolute membership rather than membership at a stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecidedSet {
    members: BTreeSet<u64>,
    bound: u64,
}

impl DecidedSet {
    pub fn new<I: IntoIterator<Item = u64>>(members: I, bound: u64) -> Result<Self> {
        let members: BTreeSet<u64> = members.into_iter().collect();
        if let Some(&m) = members.iter().find(|&&m| m >= bound) {
            return Err(Error::parse(format!("member {m} not below bound {bound}")));
        }
        Ok(Self { members, bound })
    }

    /// The closed-world reading of an enumeration: members are exactly the
    /// elements enumerated within the horizon.
    pub fn from_enumeration(w: &StagedEnumeration, bound: u64) -> Self {
        Self {
            members: w.members().into_iter().filter(|&n| n < bound).collect(),
            bound,
        }
    }

    /// Parses one natural per line, `#` comments, optional `bound N` line
    /// (default: largest member plus one).
    pub fn parse(text: &str) -> Result<Self> {
        let mut members = Vec::new();
        let mut bound = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| {
                s.parse::<u64>()
                    .map_err(|_| Error::parse(format!("expected a natural, got {s:?}")).at_line(lineno + 1))
            };
            match fields.as_slice() {
                ["bound", b] => bound = Some(num(b)?),
                [n] => members.push(num(n)?),
                _ => return Err(Error::parse("expected one natural").at_line(lineno + 1)),
            }
        }
        let bound = bound.unwrap_or_else(|| members.iter().max().map_or(0, |m| m + 1));
        Self::new(members, bound)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn contains(&self, n: u64) -> Result<bool> {
        if n >= self.bound {
            return Err(Error::BeyondHorizon {
                stage: n,
                horizon: self.bound,
            });
        }
        Ok(self.members.contains(&n))
    }

    /// Every element enumerated by `w` (below the bound) must be a member.
    pub fn check_consistent(&self, w: &StagedEnumeration) -> Result<()> {
        match w
            .members()
            .into_iter()
            .find(|&n| n < self.bound && !self.members.contains(&n))
        {
            Some(n) => Err(Error::InconsistentDecidedSet(n)),
            None => Ok(()),
        }
    }
}

/// A prefix-free set of non-empty words given stage by stage, one word per
/// stage at most.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StagedStringEnumeration {
    by_stage: BTreeMap<u64, BitString>,
    horizon: u64,
}

impl StagedStringEnumeration {
    pub fn empty(horizon: u64) -> Self {
        Self {
            by_stage: BTreeMap::new(),
            horizon,
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (u64, BitString)>>(
        pairs: I,
        horizon: u64,
    ) -> Result<Self> {
        let mut by_stage = BTreeMap::new();
        for (stage, word) in pairs {
            if stage > horizon {
                return Err(Error::BeyondHorizon { stage, horizon });
            }
            if word.is_empty() {
                return Err(Error::EmptyWord(stage));
            }
            if by_stage.contains_key(&stage) {
                return Err(Error::RepeatedStage {
                    stage,
                    first: 0,
                    second: 0,
                });
            }
            by_stage.insert(stage, word);
        }
        // U_s only grows, so prefix-freeness of the final set covers every stage
        PrefixFreeSet::new(by_stage.values().cloned())?;
        Ok(Self { by_stage, horizon })
    }

    /// Parses lines `s WORD`, `#` comments, optional `horizon N`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut horizon = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let at = |e: Error| e.at_line(lineno + 1);
            match fields.as_slice() {
                ["horizon", h] => {
                    horizon = Some(
                        h.parse::<u64>()
                            .map_err(|_| at(Error::parse(format!("bad horizon {h:?}"))))?,
                    )
                }
                [s, word] => {
                    let s = s
                        .parse::<u64>()
                        .map_err(|_| at(Error::parse(format!("bad stage {s:?}"))))?;
                    pairs.push((s, word.parse::<BitString>().map_err(at)?));
                }
                _ => return Err(at(Error::parse("expected `STAGE WORD`"))),
            }
        }
        let horizon = horizon.unwrap_or_else(|| pairs.iter().map(|p| p.0).max().unwrap_or(0));
        Self::from_pairs(pairs, horizon)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u64, &BitString)> + '_ {
        self.by_stage.iter().map(|(&s, w)| (s, w))
    }

    /// `U_s` as a prefix-free set.
    pub fn set_at(&self, s: u64) -> Result<PrefixFreeSet> {
        self.check(s)?;
        PrefixFreeSet::new(self.by_stage.range(..=s).map(|(_, w)| w.clone()))
    }

    fn check(&self, s: u64) -> Result<()> {
        if s > self.horizon {
            return Err(Error::BeyondHorizon {
                stage: s,
                horizon: self.horizon,
            });
        }
        Ok(())
    }

    /// Whether some word of `U_s` is a prefix of the column read through
    /// `read`. Each column bit is read at most once, and only as far as some
    /// word still matches.
    pub fn column_hit_with<E, F>(&self, s: u64, mut read: F) -> Result<bool, E>
    where
        E: From<Error>,
        F: FnMut(u64) -> Result<bool, E>,
    {
        self.check(s)?;
        let mut seen: Vec<bool> = Vec::new();
        'words: for (_, word) in self.by_stage.range(..=s) {
            for (i, b) in word.iter().enumerate() {
                if i == seen.len() {
                    seen.push(read(i as u64)?);
                }
                if seen[i] != b {
                    continue 'words;
                }
            }
            return Ok(true);
        }
        Ok(false)
    }

    /// [`Self::column_hit_with`] on an explicit column source.
    pub fn column_hit(&self, col: &BitSource, s: u64) -> Result<bool> {
        self.column_hit_with(s, |i| Ok::<_, Error>(col.bit(i)))
    }
}
