use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::bitcore::{pair, unpair, BitString, PartialAssignment, PrefixFreeSet};
use crate::enumeration::StagedEnumeration;
use crate::error::{Error, Result};
use crate::streams::{BitSource, Halt, Machine, RealFunction, SourceFn};

/// An injective map `p: ℕ → ℕ` choosing which input bit feeds each output bit.
pub trait Selection: Send + Sync + fmt::Debug {
    fn select(&self, n: u64) -> Result<u64>;

    /// The `n` with `p(n) = m`, if any.
    fn preimage(&self, m: u64) -> Option<u64>;

    fn label(&self) -> String;
}

/// `p(n) = n`.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentitySelection;

impl Selection for IdentitySelection {
    fn select(&self, n: u64) -> Result<u64> {
        Ok(n)
    }
    fn preimage(&self, m: u64) -> Option<u64> {
        Some(m)
    }
    fn label(&self) -> String {
        "identity".into()
    }
}

/// `p(n) = 2n`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Double;

impl Selection for Double {
    fn select(&self, n: u64) -> Result<u64> {
        Ok(2 * n)
    }
    fn preimage(&self, m: u64) -> Option<u64> {
        m.is_multiple_of(2).then_some(m / 2)
    }
    fn label(&self) -> String {
        "double".into()
    }
}

/// `p(n) = n + 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Shift;

impl Selection for Shift {
    fn select(&self, n: u64) -> Result<u64> {
        Ok(n + 1)
    }
    fn preimage(&self, m: u64) -> Option<u64> {
        m.checked_sub(1)
    }
    fn label(&self) -> String {
        "shift".into()
    }
}

/// A finite table; undefined past its end. Injectivity is not checked here
/// so that [`BitSelect`] can be seen rejecting bad tables.
#[derive(Debug, Clone)]
pub struct Table(pub Vec<u64>);

impl Selection for Table {
    fn select(&self, n: u64) -> Result<u64> {
        self.0
            .get(n as usize)
            .copied()
            .ok_or(Error::SelectionUndefined(n))
    }
    fn preimage(&self, m: u64) -> Option<u64> {
        self.0.iter().position(|&v| v == m).map(|i| i as u64)
    }
    fn label(&self) -> String {
        let items: Vec<String> = self.0.iter().map(u64::to_string).collect();
        format!("table[{}]", items.join(","))
    }
}

/// `p(⟨n,s⟩) = 2n` if `n` enters at stage `s`, `2⟨n,s⟩+1` otherwise.
/// Injective because each element enters at most once.
#[derive(Debug, Clone)]
pub struct SurjectionSelection {
    w: Arc<StagedEnumeration>,
}

impl SurjectionSelection {
    pub fn new(w: Arc<StagedEnumeration>) -> Self {
        Self { w }
    }
}

impl Selection for SurjectionSelection {
    fn select(&self, m: u64) -> Result<u64> {
        let (n, s) = unpair(m);
        Ok(if self.w.enters_at(n, s)? { 2 * n } else { 2 * m + 1 })
    }

    fn preimage(&self, m: u64) -> Option<u64> {
        if m.is_multiple_of(2) {
            let n = m / 2;
            self.w.entry_stage(n).map(|s| pair(n, s))
        } else {
            let j = m / 2;
            let (n, s) = unpair(j);
            (self.w.entry_stage(n) != Some(s)).then_some(j)
        }
    }

    fn label(&self) -> String {
        "surjection".into()
    }
}

/// `f(x;n) = x(p(n))`. Each run checks that `p` is injective on the output
/// positions it produces.
#[derive(Debug, Clone)]
pub struct BitSelect {
    p: Arc<dyn Selection>,
}

impl BitSelect {
    pub fn new(p: Arc<dyn Selection>) -> Self {
        Self { p }
    }

    pub fn selection(&self) -> &Arc<dyn Selection> {
        &self.p
    }
}

impl RealFunction for BitSelect {
    fn name(&self) -> String {
        format!("bitselect({})", self.p.label())
    }

    fn run(&self, m: &mut Machine<'_>) -> Result<(), Halt> {
        let mut seen = BTreeMap::new();
        while !m.done() {
            let n = m.position() as u64;
            let pos = self.p.select(n)?;
            if let Some(first) = seen.insert(pos, n) {
                return Err(Error::NotInjective {
                    first,
                    second: n,
                    image: pos,
                }
                .into());
            }
            let b = m.read(pos)?;
            m.emit(b);
        }
        Ok(())
    }

    fn bit_at(&self, m: &mut Machine<'_>, n: usize) -> Option<Result<bool, Halt>> {
        Some(self.p.select(n as u64).map_err(Halt::from).and_then(|pos| m.read(pos)))
    }
}

/// The total surjection with selection [`SurjectionSelection`].
pub fn one_way_surjection(w: Arc<StagedEnumeration>) -> BitSelect {
    BitSelect::new(Arc::new(SurjectionSelection::new(w)))
}

#[derive(Debug)]
struct Witness {
    p: Arc<dyn Selection>,
    y: BitSource,
}

impl SourceFn for Witness {
    fn bit(&self, m: u64) -> bool {
        self.p.preimage(m).is_some_and(|n| self.y.bit(n))
    }

    fn describe(&self) -> String {
        format!("witness({},{})", self.p.label(), self.y)
    }
}

/// `x(m) = y(n)` if `m = p(n)`, 0 otherwise; `bitselect(p)` maps it to `y`.
pub fn preimage_witness(p: Arc<dyn Selection>, y: BitSource) -> BitSource {
    BitSource::computed(Witness { p, y })
}

/// The preimage of `⟦τ⟧` under `bitselect(p)`: `{p(i) ↦ τ(i) : i < |τ|}`.
pub fn transport(p: &dyn Selection, tau: &BitString) -> Result<PartialAssignment> {
    let mut a = PartialAssignment::new();
    for (i, b) in tau.iter().enumerate() {
        a.insert(p.select(i as u64)?, b)?;
    }
    Ok(a)
}

/// [`transport`] applied to every member of `v`.
pub fn transport_set(p: &dyn Selection, v: &PrefixFreeSet) -> Result<Vec<PartialAssignment>> {
    v.members().map(|tau| transport(p, tau)).collect()
}
