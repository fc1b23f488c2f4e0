//! The movable-marker blueprint for two-to-one maps `f(x⊕z) = h^z(x) ⊕ z`.
//!
//! At each stage `s` a permission rule looks at the marker `k_s` and the
//! update counter `d_s`. On permission the marker jumps to `s+1` and output
//! bit `s` of `h` copies the position the marker was guarding; otherwise the
//! output copies `s+1`. All positions except the final marker are used.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::bitcore::{pair, unpair, BitString};
use crate::enumeration::{StagedEnumeration, StagedStringEnumeration};
use crate::error::{Error, Result};
use crate::streams::{halt_error, BitSource, Halt, Machine, RealFunction, SourceFn};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Permission {
    None,
    /// From the enumeration. Takes priority when both clauses hold.
    Halting,
    /// From the real `z`.
    Z,
}

impl fmt::Display for Permission {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Permission::None => "-",
            Permission::Halting => "halting",
            Permission::Z => "z",
        })
    }
}

/// One stage of a marker run: the state at stage `s` and the decision taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageRecord {
    pub s: u64,
    pub k: u64,
    pub d: u64,
    pub p: u64,
    pub permission: Permission,
}

/// A permission predicate `E^z_s`. Reads of `z` go through the callback so
/// that machines can account for them.
pub trait PermissionRule: Send + Sync + fmt::Debug {
    fn permission(
        &self,
        s: u64,
        k: u64,
        d: u64,
        z: &mut dyn FnMut(u64) -> Result<bool, Halt>,
    ) -> Result<Permission, Halt>;

    /// Last stage the rule can decide.
    fn horizon(&self) -> u64;

    fn label(&self) -> String;
}

/// Permission when `k_s ∈ W_s` or `z(⟨k_s,s⟩) = 1`.
#[derive(Debug, Clone)]
pub struct MarkerV1 {
    pub w: Arc<StagedEnumeration>,
}

impl PermissionRule for MarkerV1 {
    fn permission(
        &self,
        s: u64,
        k: u64,
        _d: u64,
        z: &mut dyn FnMut(u64) -> Result<bool, Halt>,
    ) -> Result<Permission, Halt> {
        if self.w.member_at_stage(k, s)? {
            return Ok(Permission::Halting);
        }
        Ok(if z(pair(k, s))? { Permission::Z } else { Permission::None })
    }

    fn horizon(&self) -> u64 {
        self.w.horizon()
    }

    fn label(&self) -> String {
        "v1".into()
    }
}

/// Permission when `d_s ∈ W_s` or column `d_s` of `z` extends a word of `U_s`.
#[derive(Debug, Clone)]
pub struct MarkerV2 {
    pub w: Arc<StagedEnumeration>,
    pub u: Arc<StagedStringEnumeration>,
}

impl PermissionRule for MarkerV2 {
    fn permission(
        &self,
        s: u64,
        _k: u64,
        d: u64,
        z: &mut dyn FnMut(u64) -> Result<bool, Halt>,
    ) -> Result<Permission, Halt> {
        if self.w.member_at_stage(d, s)? {
            return Ok(Permission::Halting);
        }
        let hit = self.u.column_hit_with(s, |i| z(pair(d, i)))?;
        Ok(if hit { Permission::Z } else { Permission::None })
    }

    fn horizon(&self) -> u64 {
        self.w.horizon().min(self.u.horizon())
    }

    fn label(&self) -> String {
        "v2".into()
    }
}

/// Marker state at the start of stage `s`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MarkerState {
    pub s: u64,
    pub k: u64,
    pub d: u64,
}

impl MarkerState {
    /// Runs stage `s` and moves to `s+1`.
    pub fn step(
        &mut self,
        rule: &dyn PermissionRule,
        z: &mut dyn FnMut(u64) -> Result<bool, Halt>,
    ) -> Result<StageRecord, Halt> {
        let permission = rule.permission(self.s, self.k, self.d, z)?;
        let rec = StageRecord {
            s: self.s,
            k: self.k,
            d: self.d,
            p: if permission == Permission::None { self.s + 1 } else { self.k },
            permission,
        };
        if permission != Permission::None {
            self.k = self.s + 1;
            self.d += 1;
        }
        self.s += 1;
        Ok(rec)
    }
}

/// Records for stages `0..stages` plus the state after the last one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkerTrace {
    pub records: Vec<StageRecord>,
    pub last: MarkerState,
    /// One more than the largest position of `z` read.
    pub z_use: u64,
}

impl MarkerTrace {
    pub fn stages(&self) -> u64 {
        self.records.len() as u64
    }

    /// `k_s` for `s ≤ stages`.
    pub fn k(&self, s: u64) -> u64 {
        self.records.get(s as usize).map_or(self.last.k, |r| r.k)
    }

    /// `d_s` for `s ≤ stages`.
    pub fn d(&self, s: u64) -> u64 {
        self.records.get(s as usize).map_or(self.last.d, |r| r.d)
    }

    pub fn selection(&self) -> impl Iterator<Item = u64> + '_ {
        self.records.iter().map(|r| r.p)
    }
}

/// Runs `rule` on `z` for `stages` stages.
pub fn marker_run(rule: &dyn PermissionRule, z: &BitSource, stages: u64) -> Result<MarkerTrace> {
    let mut state = MarkerState::default();
    let mut z_use = 0;
    let mut read = |j: u64| {
        z_use = z_use.max(j + 1);
        Ok(z.bit(j))
    };
    let mut records = Vec::with_capacity(stages as usize);
    for _ in 0..stages {
        records.push(state.step(rule, &mut read).map_err(|h| halt_error(h, 0))?);
    }
    Ok(MarkerTrace {
        records,
        last: state,
        z_use,
    })
}

pub fn marker_run_v1(w: Arc<StagedEnumeration>, z: &BitSource, stages: u64) -> Result<MarkerTrace> {
    marker_run(&MarkerV1 { w }, z, stages)
}

pub fn marker_run_v2(
    w: Arc<StagedEnumeration>,
    u: Arc<StagedStringEnumeration>,
    z: &BitSource,
    stages: u64,
) -> Result<MarkerTrace> {
    marker_run(&MarkerV2 { w, u }, z, stages)
}

/// `f(x⊕z) = h^z(x) ⊕ z` with `h^z(x;s) = x(p^z_s)`, on the joint input.
#[derive(Debug, Clone)]
pub struct TwoToOne {
    rule: Arc<dyn PermissionRule>,
}

impl TwoToOne {
    pub fn new(rule: Arc<dyn PermissionRule>) -> Self {
        Self { rule }
    }

    pub fn rule(&self) -> &Arc<dyn PermissionRule> {
        &self.rule
    }

    fn stage(&self, m: &mut Machine<'_>, state: &mut MarkerState) -> Result<StageRecord, Halt> {
        m.tick(1)?;
        state.step(self.rule.as_ref(), &mut |j| m.read(2 * j + 1))
    }
}

impl RealFunction for TwoToOne {
    fn name(&self) -> String {
        format!("two-to-one({})", self.rule.label())
    }

    fn run(&self, m: &mut Machine<'_>) -> Result<(), Halt> {
        let mut state = MarkerState::default();
        while !m.done() {
            let b = m.position() as u64;
            let bit = if b % 2 == 1 {
                m.read(b)?
            } else {
                let rec = self.stage(m, &mut state)?;
                m.read(2 * rec.p)?
            };
            m.emit(bit);
        }
        Ok(())
    }

    fn bit_at(&self, m: &mut Machine<'_>, n: usize) -> Option<Result<bool, Halt>> {
        let n = n as u64;
        if n % 2 == 1 {
            return Some(m.read(n));
        }
        let mut state = MarkerState::default();
        Some((|| loop {
            let rec = self.stage(m, &mut state)?;
            if rec.s == n / 2 {
                return m.read(2 * rec.p);
            }
        })())
    }
}

pub fn two_to_one_v1(w: Arc<StagedEnumeration>) -> TwoToOne {
    TwoToOne::new(Arc::new(MarkerV1 { w }))
}

pub fn two_to_one_v2(w: Arc<StagedEnumeration>, u: Arc<StagedStringEnumeration>) -> TwoToOne {
    TwoToOne::new(Arc::new(MarkerV2 { w, u }))
}

#[derive(Debug)]
struct ZBuilder {
    n: u64,
    zeta: BitString,
}

impl SourceFn for ZBuilder {
    fn bit(&self, j: u64) -> bool {
        match self.zeta.get(j as usize) {
            Some(b) => b,
            None => unpair(j).0 != self.n,
        }
    }

    fn describe(&self) -> String {
        format!("zbuilder({},{})", self.n, self.zeta)
    }
}

/// `ζ` followed by `z(⟨i,s⟩) = 0` if `i = n`, 1 otherwise: the marker is
/// released everywhere except on `n`.
pub fn z_builder_v1(n: u64, zeta: BitString) -> BitSource {
    BitSource::computed(ZBuilder { n, zeta })
}

/// `w` with column `n` replaced by `y`.
pub fn replace_column(w: BitSource, n: u64, y: BitSource) -> BitSource {
    BitSource::Columns {
        columns: BTreeMap::from([(n, Arc::new(y))]),
        default: Arc::new(w),
    }
}

/// Least `s` with `d^z_s = n` under the second marker rule.
pub fn stage_where_counter_reaches(
    w: Arc<StagedEnumeration>,
    u: Arc<StagedStringEnumeration>,
    z: &BitSource,
    n: u64,
) -> Result<u64> {
    let rule = MarkerV2 { w, u };
    let horizon = rule.horizon();
    let mut state = MarkerState::default();
    let mut read = |j: u64| Ok(z.bit(j));
    loop {
        if state.d == n {
            return Ok(state.s);
        }
        if state.s > horizon {
            return Err(Error::CounterStalled { target: n, horizon });
        }
        state.step(&rule, &mut read).map_err(|h| halt_error(h, 0))?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcore::deinterleave;
    use crate::streams::{evaluate, run_bit, TapeInput};

    fn w(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn empty(h: u64) -> Arc<StagedEnumeration> {
        Arc::new(StagedEnumeration::empty(h))
    }

    #[test]
    fn v1_examples() {
        let t = marker_run_v1(empty(50), &BitSource::ones(), 20).unwrap();
        for r in &t.records {
            assert_eq!((r.k, r.p), (r.s, r.s));
        }
        let t = marker_run_v1(empty(50), &BitSource::zeros(), 20).unwrap();
        for r in &t.records {
            assert_eq!((r.k, r.p, r.permission), (0, r.s + 1, Permission::None));
        }
        let e = Arc::new(StagedEnumeration::from_pairs([(3, 0)], 50).unwrap());
        let t = marker_run_v1(e, &BitSource::zeros(), 6).unwrap();
        let ks: Vec<u64> = (0..=6).map(|s| t.k(s)).collect();
        assert_eq!(ks, vec![0, 0, 0, 0, 4, 4, 4]);
        assert_eq!(t.records[3].permission, Permission::Halting);
        assert_eq!(t.records[3].p, 0);
    }

    #[test]
    fn halting_permission_does_not_read_z() {
        let e = Arc::new(StagedEnumeration::from_pairs([(0, 0)], 50).unwrap());
        let t = marker_run_v1(e, &BitSource::zeros(), 1).unwrap();
        assert_eq!(t.z_use, 0);
        assert_eq!(t.records[0].permission, Permission::Halting);
    }

    #[test]
    fn v2_examples() {
        let u = Arc::new(StagedStringEnumeration::empty(50));
        let t = marker_run_v2(empty(50), u, &BitSource::ones(), 30).unwrap();
        assert!(t.records.iter().all(|r| r.k == 0 && r.d == 0));

        let u = Arc::new(StagedStringEnumeration::from_pairs([(2, w("1"))], 50).unwrap());
        // only column 0 starts with a 1
        let z = replace_column(BitSource::zeros(), 0, BitSource::ones());
        let t = marker_run_v2(empty(50), u.clone(), &z, 6).unwrap();
        let ds: Vec<u64> = (0..=6).map(|s| t.d(s)).collect();
        assert_eq!(ds, vec![0, 0, 0, 1, 1, 1, 1]);
        assert_eq!(t.k(3), 3);
        assert_eq!(stage_where_counter_reaches(empty(50), u.clone(), &z, 0).unwrap(), 0);
        assert_eq!(stage_where_counter_reaches(empty(50), u.clone(), &z, 1).unwrap(), 3);
        assert_eq!(
            stage_where_counter_reaches(empty(50), u, &z, 2),
            Err(Error::CounterStalled { target: 2, horizon: 50 })
        );
    }

    #[test]
    fn z_builder_traps_the_marker() {
        let z = z_builder_v1(0, BitString::new());
        for j in 0..200 {
            assert_eq!(z.bit(j), unpair(j).0 != 0);
        }
        for n in 1..12 {
            let t = marker_run_v1(empty(100), &z_builder_v1(n, BitString::new()), 60).unwrap();
            assert!((n..=60).all(|s| t.k(s) == n), "n={n}");
            let e = Arc::new(StagedEnumeration::from_pairs([(n + 7, n)], 100).unwrap());
            let t = marker_run_v1(e, &z_builder_v1(n, BitString::new()), 60).unwrap();
            assert_eq!(t.k(n + 7), n);
            assert_eq!(t.k(n + 8), n + 8);
        }
    }

    #[test]
    fn two_to_one_v1_examples() {
        let f = two_to_one_v1(empty(100));
        let x = BitSource::periodic(w("0110")).unwrap();
        let joint = BitSource::interleave(x.clone(), BitSource::ones());
        assert_eq!(evaluate(&f, &joint, 40).unwrap().bits, joint.prefix(40));

        let a = BitSource::interleave(BitSource::finite(w("0101")), BitSource::zeros());
        let b = BitSource::interleave(BitSource::finite(w("1101")), BitSource::zeros());
        let ya = evaluate(&f, &a, 40).unwrap().bits;
        assert_eq!(ya, evaluate(&f, &b, 40).unwrap().bits);
        let (h, z) = deinterleave(&ya).unwrap();
        assert_eq!(h, w("10100000000000000000"));
        assert_eq!(z, BitString::repeat(false, 20));
    }

    #[test]
    fn direct_bits_match_sequential_output() {
        let e = Arc::new(StagedEnumeration::from_pairs([(2, 0), (5, 3)], 100).unwrap());
        let u = Arc::new(StagedStringEnumeration::from_pairs([(1, w("0")), (4, w("11"))], 100).unwrap());
        let x = BitSource::interleave(
            BitSource::periodic(w("0111010")).unwrap(),
            BitSource::periodic(w("1001")).unwrap(),
        );
        for f in [two_to_one_v1(e.clone()), two_to_one_v2(e, u)] {
            let seq = evaluate(&f, &x, 50).unwrap().bits;
            for b in 0..50 {
                assert_eq!(run_bit(&f, TapeInput::Source(&x), b, 1 << 20).bit, seq.get(b));
            }
        }
    }

    #[test]
    fn replace_column_examples() {
        let base = BitSource::periodic(w("0010111")).unwrap();
        let same = replace_column(base.clone(), 2, base.column(2));
        assert_eq!(same.prefix(300), base.prefix(300));
        let y = BitSource::periodic(w("110")).unwrap();
        let r = replace_column(base.clone(), 2, y.clone());
        assert_eq!(r.column(2).prefix(30), y.prefix(30));
        for m in [0, 1, 3, 4] {
            assert_eq!(r.column(m).prefix(30), base.column(m).prefix(30));
        }
    }
}
