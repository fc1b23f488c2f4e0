#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use cantor_oneway::bitcore::{pair, BitString};
use cantor_oneway::constructions::{MarkerTrace, Permission};
use cantor_oneway::enumeration::{StagedEnumeration, StagedStringEnumeration};
use cantor_oneway::streams::{run_bit, BitSource, RealFunction, SourceFn, TapeInput};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn w(s: &str) -> BitString {
    s.parse().unwrap()
}

/// A seeded pseudo-random real with a given density of ones.
#[derive(Debug, Clone)]
pub struct RandomBits {
    pub seed: u64,
    /// Probability of a one, in 1/256ths.
    pub density: u8,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl SourceFn for RandomBits {
    fn bit(&self, pos: u64) -> bool {
        (mix(self.seed ^ mix(pos)) & 0xff) < self.density as u64
    }

    fn describe(&self) -> String {
        format!("random({},{})", self.seed, self.density)
    }
}

pub fn random_source(seed: u64, density: u8) -> BitSource {
    BitSource::computed(RandomBits { seed, density })
}

pub fn random_word(r: &mut ChaCha8Rng, len: usize) -> BitString {
    (0..len).map(|_| r.random_bool(0.5)).collect()
}

/// A schedule of at most `max_elements` elements below `element_bound`, at
/// distinct stages in `0..=horizon`.
pub fn random_schedule(
    r: &mut ChaCha8Rng,
    max_elements: usize,
    element_bound: u64,
    horizon: u64,
) -> Vec<(u64, u64)> {
    let count = r.random_range(0..=max_elements);
    let mut elements = BTreeSet::new();
    let mut stages = BTreeSet::new();
    let mut pairs = Vec::new();
    while pairs.len() < count && elements.len() < element_bound as usize {
        let n = r.random_range(0..element_bound);
        let s = r.random_range(0..=horizon);
        if elements.contains(&n) || stages.contains(&s) {
            continue;
        }
        elements.insert(n);
        stages.insert(s);
        pairs.push((s, n));
    }
    pairs
}

pub fn enumeration(pairs: &[(u64, u64)], horizon: u64) -> Arc<StagedEnumeration> {
    Arc::new(StagedEnumeration::from_pairs(pairs.iter().copied(), horizon).unwrap())
}

/// Up to `max_words` non-empty words of length at most 4, prefix-free, at
/// distinct stages.
pub fn random_strings(r: &mut ChaCha8Rng, max_words: usize, horizon: u64) -> Vec<(u64, BitString)> {
    let count = r.random_range(0..=max_words);
    let mut out: Vec<(u64, BitString)> = Vec::new();
    for _ in 0..count * 4 {
        if out.len() == count {
            break;
        }
        let len = r.random_range(1..=4);
        let word = random_word(r, len);
        let s = r.random_range(0..=horizon);
        let clash = out
            .iter()
            .any(|(t, v)| *t == s || v.is_prefix_of(&word) || word.is_prefix_of(v));
        if !clash {
            out.push((s, word));
        }
    }
    out
}

pub fn strings(pairs: &[(u64, BitString)], horizon: u64) -> Arc<StagedStringEnumeration> {
    Arc::new(StagedStringEnumeration::from_pairs(pairs.iter().cloned(), horizon).unwrap())
}

/// Which permission clause the literal recursion uses.
#[derive(Debug, Clone)]
pub enum Rule {
    V1,
    V2(Vec<(u64, BitString)>),
}

/// The marker recursion written out directly from its definition, with `W_s`
/// as "entered at a stage at most s" over an explicit pair list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiteralStage {
    pub k: u64,
    pub d: u64,
    pub p: u64,
    pub permission: Permission,
}

pub fn literal_marker(w_pairs: &[(u64, u64)], rule: &Rule, z: &BitSource, stages: u64) -> Vec<LiteralStage> {
    literal_marker_reads(w_pairs, rule, z, stages).0
}

/// [`literal_marker`] together with one more than the largest `z` position
/// read.
pub fn literal_marker_reads(
    w_pairs: &[(u64, u64)],
    rule: &Rule,
    z: &BitSource,
    stages: u64,
) -> (Vec<LiteralStage>, u64) {
    let in_w = |n: u64, s: u64| w_pairs.iter().any(|&(t, m)| m == n && t <= s);
    let mut z_use = 0;
    let mut read = |j: u64| {
        z_use = z_use.max(j + 1);
        z.bit(j)
    };
    let mut k = 0;
    let mut d = 0;
    let mut out = Vec::new();
    for s in 0..stages {
        let permission = match rule {
            Rule::V1 if in_w(k, s) => Permission::Halting,
            Rule::V1 if read(pair(k, s)) => Permission::Z,
            Rule::V1 => Permission::None,
            Rule::V2(_) if in_w(d, s) => Permission::Halting,
            Rule::V2(u) => {
                let mut hit = false;
                for (_, word) in u.iter().filter(|(t, _)| *t <= s) {
                    let col: BitString = (0..word.len() as u64).map(|i| read(pair(d, i))).collect();
                    hit |= col == *word;
                }
                if hit {
                    Permission::Z
                } else {
                    Permission::None
                }
            }
        };
        let next_k = if permission == Permission::None { k } else { s + 1 };
        let p = if next_k == k { s + 1 } else { k };
        out.push(LiteralStage { k, d, p, permission });
        if next_k != k {
            d += 1;
        }
        k = next_k;
    }
    (out, z_use)
}

/// Checks every trace invariant of the marker blueprint, returning a
/// description of the first violation.
pub fn check_marker_invariants(trace: &MarkerTrace) -> Result<(), String> {
    let rs = &trace.records;
    for (s, r) in rs.iter().enumerate() {
        if r.s != s as u64 {
            return Err(format!("record {s} labelled {}", r.s));
        }
    }
    let ks: Vec<u64> = (0..=trace.stages()).map(|s| trace.k(s)).collect();
    let ds: Vec<u64> = (0..=trace.stages()).map(|s| trace.d(s)).collect();
    for s in 0..trace.stages() as usize {
        if ks[s + 1] < ks[s] || ds[s + 1] < ds[s] {
            return Err(format!("k or d decreased at stage {s}"));
        }
        if ks[s + 1] != ks[s] && ks[s + 1] != s as u64 + 1 {
            return Err(format!("k jumped to {} at stage {s}", ks[s + 1]));
        }
        if ds[s + 1] - ds[s] > 1 {
            return Err(format!("d jumped by {} at stage {s}", ds[s + 1] - ds[s]));
        }
        if (ds[s + 1] - ds[s] == 1) != (ks[s + 1] != ks[s]) {
            return Err(format!("d does not count the update at stage {s}"));
        }
    }
    let mut seen = BTreeSet::new();
    for r in rs {
        if !seen.insert(r.p) {
            return Err(format!("p repeats {} at stage {}", r.p, r.s));
        }
    }
    let mut range = BTreeSet::new();
    for big_s in 0..=trace.stages() {
        if big_s > 0 {
            range.insert(rs[big_s as usize - 1].p);
        }
        let expected: BTreeSet<u64> = (0..=big_s).filter(|&i| i != ks[big_s as usize]).collect();
        if range != expected {
            return Err(format!("range of p below {big_s} is {range:?}, expected {expected:?}"));
        }
    }
    Ok(())
}

/// Length of output prefix of a two-to-one map that pins every `z` position
/// the marker reads in stages below `s_min`: twice the least `T ≥ s_min`
/// above all those reads.
pub fn pinning_length(w_pairs: &[(u64, u64)], rule: &Rule, z: &BitSource, s_min: u64) -> usize {
    let (_, z_use) = literal_marker_reads(w_pairs, rule, z, s_min);
    2 * z_use.max(s_min) as usize
}

/// Positions of `x` below `limit` that the selection skips during the first
/// `stages` stages.
pub fn unused_positions(trace: &[LiteralStage], stages: usize, limit: u64) -> Vec<u64> {
    let used: BTreeSet<u64> = trace[..stages].iter().map(|r| r.p).collect();
    (0..limit).filter(|i| !used.contains(i)).collect()
}

/// The dovetail done the slow way: for each length `L`, the words of length
/// `L` on which output bit `bit` of `g` is defined using only those `L`
/// bits. Returns the least `t ≤ max_len` at which those words fill more than
/// half of the space, and the longest minimal halting word up to `t`.
pub fn literal_dovetail(g: &dyn RealFunction, bit: usize, max_len: usize, budget: u64) -> Option<(usize, usize)> {
    let mut halts_prev: BTreeMap<BitString, bool> = BTreeMap::new();
    let mut longest_minimal = 0;
    for len in 0..=max_len {
        let mut halts = BTreeMap::new();
        let mut count = 0u64;
        for x in BitString::all_of_length(len) {
            let h = run_bit(g, TapeInput::Word(&x), bit, budget).bit.is_some();
            if h {
                count += 1;
                let parent_halts = len > 0 && halts_prev[&x.prefix(len - 1)];
                if !parent_halts {
                    longest_minimal = len;
                }
            }
            halts.insert(x, h);
        }
        if 2 * count > 1u64 << len {
            return Some((len, longest_minimal));
        }
        halts_prev = halts;
    }
    None
}

/// Exact branch count at joint depth `2·s_min` for a two-to-one map on
/// `x⊕z`, with the target prefix `f(x⊕z)↾2·t_pin`, worked out from the marker
/// definition.
///
/// Every `x` position below `s_min` other than `k = k_{s_min}` is selected
/// before stage `s_min` and so pinned. Each extension either releases the
/// marker at some stage `t ∈ [s_min, t_pin)`, pinning `x(k)` to the target bit
/// `2t`, or leaves it free. `z` is pinned below `t_pin` and free above.
pub fn fiber_oracle(
    w_pairs: &[(u64, u64)],
    rule: &Rule,
    z: &BitSource,
    x: &BitSource,
    s_min: u64,
    t_pin: u64,
) -> u64 {
    let trace = literal_marker(w_pairs, rule, z, t_pin);
    let (prefix, z_use) = literal_marker_reads(w_pairs, rule, z, s_min);
    assert!(z_use <= t_pin, "target prefix does not pin the reads below stage {s_min}");
    let (k, d) = match prefix.last() {
        None => (0, 0),
        Some(r) if r.permission == Permission::None => (r.k, r.d),
        Some(r) => (s_min, r.d + 1),
    };
    if k >= s_min {
        return 1;
    }
    let target = |t: u64| x.bit(trace[t as usize].p);
    let in_w = |n: u64, s: u64| w_pairs.iter().any(|&(t, m)| m == n && t <= s);
    // for each way of filling the free z bits: the release stage, if any
    let mut outcomes: BTreeSet<Option<u64>> = BTreeSet::new();
    match rule {
        Rule::V1 => {
            let mut t = s_min;
            loop {
                if t >= t_pin {
                    outcomes.insert(None);
                    break;
                }
                let j = pair(k, t);
                if in_w(k, t) || (j < t_pin && z.bit(j)) {
                    outcomes.insert(Some(t));
                    break;
                }
                if j >= t_pin {
                    outcomes.insert(Some(t));
                }
                t += 1;
            }
        }
        Rule::V2(u) => {
            let halting = (s_min..t_pin).find(|&t| in_w(d, t));
            for col in BitString::all_of_length(4) {
                let consistent = (0..4u64).all(|i| pair(d, i) >= t_pin || z.bit(pair(d, i)) == col.get(i as usize).unwrap());
                if !consistent {
                    continue;
                }
                let hit = (s_min..t_pin).find(|&t| u.iter().any(|(st, word)| *st <= t && word.is_prefix_of(&col)));
                let release = match (hit, halting) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                };
                outcomes.insert(release);
            }
        }
    }
    if outcomes.contains(&None) {
        return 2;
    }
    let values: BTreeSet<bool> = outcomes.into_iter().flatten().map(target).collect();
    values.len() as u64
}
