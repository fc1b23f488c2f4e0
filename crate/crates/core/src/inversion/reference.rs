//! Inverters that know the toy enumeration. They exist to drive the
//! extraction procedures end to end; no computable inverter exists for the
//! real halting set.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::bitcore::{pair, unpair};
use crate::constructions::{Construction, ConstructionSpec, MarkerState, MarkerV1, MarkerV2, PermissionRule};
use crate::enumeration::StagedEnumeration;
use crate::error::{Error, Result};
use crate::streams::{
    use_soundness_check, BitSource, Constant, Halt, Machine, RealFunction, UseVerdict,
    DEFAULT_STEP_BUDGET,
};

/// A candidate inverter with its step budget.
#[derive(Debug, Clone)]
pub struct InverterUnderTest {
    pub g: Arc<dyn RealFunction>,
    pub declared_total: bool,
    pub budget: u64,
}

impl InverterUnderTest {
    pub fn new(g: Arc<dyn RealFunction>) -> Self {
        Self {
            g,
            declared_total: true,
            budget: DEFAULT_STEP_BUDGET,
        }
    }

    pub fn partial(g: Arc<dyn RealFunction>) -> Self {
        Self {
            declared_total: false,
            ..Self::new(g)
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Seeded mutations beyond the reported use must not change the first
    /// `n` output bits on `x`.
    pub fn check_use(&self, x: &BitSource, n: usize, trials: usize, seed: u64) -> Result<()> {
        match use_soundness_check(self.g.as_ref(), x, n, trials, seed)? {
            UseVerdict::Pass { .. } => Ok(()),
            UseVerdict::Fail { original, mutated, .. } => Err(Error::InverterRefuted {
                bit: original.common_prefix_len(&mutated),
            }),
        }
    }
}

/// `g(y;n) = y(⟨n,s⟩)` if `n` enters at `s`, else 0. Inverts the simple
/// one-way map on its range.
#[derive(Debug, Clone)]
pub struct ReferenceSimple {
    w: Arc<StagedEnumeration>,
}

impl ReferenceSimple {
    pub fn new(w: Arc<StagedEnumeration>) -> Self {
        Self { w }
    }

    fn compute(&self, m: &mut Machine<'_>, n: u64) -> Result<bool, Halt> {
        m.tick(1)?;
        match self.w.entry_stage(n) {
            Some(s) => m.read(pair(n, s)),
            None => Ok(false),
        }
    }
}

impl RealFunction for ReferenceSimple {
    fn name(&self) -> String {
        "reference-simple".into()
    }

    fn run(&self, m: &mut Machine<'_>) -> Result<(), Halt> {
        while !m.done() {
            let b = self.compute(m, m.position() as u64)?;
            m.emit(b);
        }
        Ok(())
    }

    fn bit_at(&self, m: &mut Machine<'_>, n: usize) -> Option<Result<bool, Halt>> {
        Some(self.compute(m, n as u64))
    }
}

/// Binary inverter of the one-way surjection over `y⊕r`; ignores `r`.
#[derive(Debug, Clone)]
pub struct ReferenceSurjection {
    w: Arc<StagedEnumeration>,
}

impl ReferenceSurjection {
    pub fn new(w: Arc<StagedEnumeration>) -> Self {
        Self { w }
    }

    fn compute(&self, m: &mut Machine<'_>, pos: u64) -> Result<bool, Halt> {
        m.tick(1)?;
        let y = |j: u64| 2 * j;
        if pos.is_multiple_of(2) {
            let n = pos / 2;
            match self.w.entry_stage(n) {
                Some(s) => m.read(y(pair(n, s))),
                None => Ok(false),
            }
        } else {
            let j = pos / 2;
            let (n, s) = unpair(j);
            if self.w.entry_stage(n) == Some(s) {
                Ok(false)
            } else {
                m.read(y(j))
            }
        }
    }
}

impl RealFunction for ReferenceSurjection {
    fn name(&self) -> String {
        "reference-surjection".into()
    }

    fn run(&self, m: &mut Machine<'_>) -> Result<(), Halt> {
        while !m.done() {
            let b = self.compute(m, m.position() as u64)?;
            m.emit(b);
        }
        Ok(())
    }

    fn bit_at(&self, m: &mut Machine<'_>, n: usize) -> Option<Result<bool, Halt>> {
        Some(self.compute(m, n as u64))
    }
}

/// Inverter of a marker-based two-to-one map over `y⊕z`: `x(m)` is `y(t)`
/// for the stage `t` with `p_t = m`, found by running the marker up to the
/// rule's horizon; positions never used come out as 0.
#[derive(Debug, Clone)]
pub struct MarkerInverter {
    rule: Arc<dyn PermissionRule>,
}

/// Marker scan shared across the output bits of one run.
struct Scan {
    state: MarkerState,
    used_at: HashMap<u64, u64>,
}

impl MarkerInverter {
    pub fn new(rule: Arc<dyn PermissionRule>) -> Self {
        Self { rule }
    }

    fn stage_using(&self, m: &mut Machine<'_>, scan: &mut Scan, pos: u64) -> Result<Option<u64>, Halt> {
        while !scan.used_at.contains_key(&pos) && scan.state.s <= self.rule.horizon() {
            m.tick(1)?;
            let rec = scan
                .state
                .step(self.rule.as_ref(), &mut |j| m.read(2 * j + 1))?;
            scan.used_at.insert(rec.p, rec.s);
        }
        Ok(scan.used_at.get(&pos).copied())
    }

    fn compute(&self, m: &mut Machine<'_>, scan: &mut Scan, b: u64) -> Result<bool, Halt> {
        if b % 2 == 1 {
            return m.read(b);
        }
        match self.stage_using(m, scan, b / 2)? {
            Some(t) => m.read(2 * t),
            None => Ok(false),
        }
    }

    fn scan() -> Scan {
        Scan {
            state: MarkerState::default(),
            used_at: HashMap::new(),
        }
    }
}

impl RealFunction for MarkerInverter {
    fn name(&self) -> String {
        format!("reference-marker({})", self.rule.label())
    }

    fn run(&self, m: &mut Machine<'_>) -> Result<(), Halt> {
        let mut scan = Self::scan();
        while !m.done() {
            let b = self.compute(m, &mut scan, m.position() as u64)?;
            m.emit(b);
        }
        Ok(())
    }

    fn bit_at(&self, m: &mut Machine<'_>, n: usize) -> Option<Result<bool, Halt>> {
        Some(self.compute(m, &mut Self::scan(), n as u64))
    }
}

/// Another inverter with output bit `k` flipped.
#[derive(Debug, Clone)]
pub struct FlipBit {
    pub inner: Arc<dyn RealFunction>,
    pub k: usize,
}

impl RealFunction for FlipBit {
    fn name(&self) -> String {
        format!("flip({},{})", self.k, self.inner.name())
    }

    fn run(&self, m: &mut Machine<'_>) -> Result<(), Halt> {
        let (bits, halt) = m.subrun(self.inner.as_ref(), m.target());
        for (i, b) in bits.iter().enumerate() {
            m.emit(b ^ (i == self.k));
        }
        halt.map_or(Ok(()), Err)
    }

    fn bit_at(&self, m: &mut Machine<'_>, n: usize) -> Option<Result<bool, Halt>> {
        self.inner
            .bit_at(m, n)
            .map(|r| r.map(|b| b ^ (n == self.k)))
    }
}

/// Inverter choices for the CLI: `reference`, `flip:K`, `zeros`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InverterSpec {
    Reference,
    Flip(usize),
    Zeros,
}

impl FromStr for InverterSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reference" => Ok(InverterSpec::Reference),
            "zeros" => Ok(InverterSpec::Zeros),
            _ => s
                .strip_prefix("flip:")
                .and_then(|k| k.parse().ok())
                .map(InverterSpec::Flip)
                .ok_or_else(|| Error::parse(format!("unknown inverter {s:?}"))),
        }
    }
}

impl fmt::Display for InverterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InverterSpec::Reference => f.write_str("reference"),
            InverterSpec::Flip(k) => write!(f, "flip:{k}"),
            InverterSpec::Zeros => f.write_str("zeros"),
        }
    }
}

/// The reference inverter for a construction, where one exists.
pub fn reference_inverter(c: &Construction) -> Result<Arc<dyn RealFunction>> {
    let w = c.enumeration.clone();
    Ok(match (&c.spec, w) {
        (ConstructionSpec::Simple(_), Some(w)) => Arc::new(ReferenceSimple::new(w)),
        (ConstructionSpec::Surjection(_), Some(w)) => Arc::new(ReferenceSurjection::new(w)),
        (ConstructionSpec::TwoToOneV1(_), Some(w)) => {
            Arc::new(MarkerInverter::new(Arc::new(MarkerV1 { w })))
        }
        (ConstructionSpec::TwoToOneV2(..), Some(w)) => {
            let u = c.strings.clone().expect("two2 carries its string enumeration");
            Arc::new(MarkerInverter::new(Arc::new(MarkerV2 { w, u })))
        }
        (spec, _) => {
            return Err(Error::Usage(format!("no reference inverter for {spec}")));
        }
    })
}

impl InverterSpec {
    pub fn build(self, c: &Construction) -> Result<InverterUnderTest> {
        let g: Arc<dyn RealFunction> = match self {
            InverterSpec::Reference => reference_inverter(c)?,
            InverterSpec::Flip(k) => Arc::new(FlipBit {
                inner: reference_inverter(c)?,
                k,
            }),
            InverterSpec::Zeros => Arc::new(Constant(BitSource::zeros())),
        };
        Ok(InverterUnderTest::new(g))
    }
}
