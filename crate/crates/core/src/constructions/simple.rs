use std::sync::Arc;

use crate::bitcore::unpair;
use crate::enumeration::{DecidedSet, StagedEnumeration};
use crate::streams::{Halt, InterleaveOutputs, Machine, RealFunction};

/// `f(x;⟨n,s⟩) = x(n)` if `n` enters at stage `s`, 0 otherwise.
#[derive(Debug, Clone)]
pub struct SimpleOneWay {
    w: Arc<StagedEnumeration>,
}

impl SimpleOneWay {
    pub fn new(w: Arc<StagedEnumeration>) -> Self {
        Self { w }
    }

    pub fn enumeration(&self) -> &Arc<StagedEnumeration> {
        &self.w
    }

    fn compute(&self, m: &mut Machine<'_>, pos: u64) -> Result<bool, Halt> {
        let (n, s) = unpair(pos);
        m.tick(1)?;
        if self.w.enters_at(n, s)? {
            m.read(n)
        } else {
            Ok(false)
        }
    }
}

impl RealFunction for SimpleOneWay {
    fn name(&self) -> String {
        "simple".into()
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

/// The partial component `q(x;n)`: 0 while every 1-bit of `x` at a position
/// at most `n` lies in the decided set, undefined from the first bit that
/// does not.
#[derive(Debug, Clone)]
pub struct SubsetGuard {
    d: Arc<DecidedSet>,
}

impl SubsetGuard {
    pub fn new(d: Arc<DecidedSet>) -> Self {
        Self { d }
    }

    fn check(&self, m: &mut Machine<'_>, i: u64) -> Result<(), Halt> {
        if m.read(i)? && !self.d.contains(i)? {
            return Err(m.spin());
        }
        Ok(())
    }
}

impl RealFunction for SubsetGuard {
    fn name(&self) -> String {
        "subset-guard".into()
    }

    fn run(&self, m: &mut Machine<'_>) -> Result<(), Halt> {
        while !m.done() {
            self.check(m, m.position() as u64)?;
            m.emit(false);
        }
        Ok(())
    }

    fn bit_at(&self, m: &mut Machine<'_>, n: usize) -> Option<Result<bool, Halt>> {
        Some((0..=n as u64).try_for_each(|i| self.check(m, i)).map(|_| false))
    }
}

/// `x ↦ p(x) ⊕ q(x)` with `p` the simple one-way map and `q` the subset
/// guard; defined exactly on the subsets of the decided set, and injective
/// there.
pub fn partial_injection(
    w: Arc<StagedEnumeration>,
    d: Arc<DecidedSet>,
) -> crate::Result<InterleaveOutputs> {
    d.check_consistent(&w)?;
    Ok(InterleaveOutputs::new(
        Arc::new(SimpleOneWay::new(w)),
        Arc::new(SubsetGuard::new(d)),
    ))
}
