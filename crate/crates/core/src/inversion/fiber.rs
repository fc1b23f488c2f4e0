use std::cell::RefCell;
use std::collections::BTreeSet;
use std::sync::Arc;

use crate::bitcore::{BitString, PartialAssignment};
use crate::error::Result;
use crate::streams::{representation_of, run_bit_logged, Halt, RealFunction, TapeInput, DEFAULT_STEP_BUDGET};

/// Branch counts of a fiber at one depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiberCount {
    /// Depth-`d` words whose cylinder contains some `x` with `f(x)`
    /// extending the target prefix.
    pub branches: u64,
    /// Depth-`d` words whose own image is compatible with the target prefix.
    pub surviving: u64,
    /// Words whose existence search ran out of nodes; not counted in
    /// `branches`.
    pub undetermined: u64,
}

/// Search nodes allowed per existence question.
pub const DEFAULT_SEARCH_NODES: usize = 200_000;

enum Outcome {
    Found,
    /// No extension works; the failure depends only on these decided
    /// positions.
    Conflict(BTreeSet<u64>),
    GaveUp,
}

struct Search<'a> {
    f: &'a dyn RealFunction,
    target: &'a BitString,
    /// Positions below this are fixed by the word under test.
    fixed: u64,
    nodes: usize,
    max_nodes: usize,
}

impl Search<'_> {
    /// Whether some extension of `a` maps into the target cylinder. Output
    /// bits are evaluated one at a time from `from`; a failed bit blames only
    /// the decided positions it read, so the search jumps straight back over
    /// decisions that played no part.
    fn extend(&mut self, a: &PartialAssignment, from: usize) -> Result<Outcome> {
        let log = RefCell::new(Vec::new());
        for bit in from..self.target.len() {
            log.borrow_mut().clear();
            let r = run_bit_logged(self.f, TapeInput::Assignment(a), bit, DEFAULT_STEP_BUDGET, &log);
            let blame = || -> BTreeSet<u64> {
                log.borrow().iter().copied().filter(|&p| p >= self.fixed).collect()
            };
            match (r.bit, r.halt) {
                (Some(b), _) if Some(b) == self.target.get(bit) => continue,
                (Some(_), _) => return Ok(Outcome::Conflict(blame())),
                (None, Some(Halt::NeedBit(p))) => {
                    self.nodes += 1;
                    if self.nodes > self.max_nodes {
                        return Ok(Outcome::GaveUp);
                    }
                    let mut nogood = BTreeSet::new();
                    for v in [false, true] {
                        match self.extend(&a.with(p, v), bit)? {
                            Outcome::Conflict(c) if c.contains(&p) => {
                                nogood.extend(c.into_iter().filter(|&q| q != p))
                            }
                            other => return Ok(other),
                        }
                    }
                    return Ok(Outcome::Conflict(nogood));
                }
                (None, Some(Halt::Domain(e))) => return Err(e),
                (None, _) => return Ok(Outcome::Conflict(blame())),
            }
        }
        Ok(Outcome::Found)
    }

    fn exists(&mut self, tau: &BitString) -> Result<Option<bool>> {
        self.fixed = tau.len() as u64;
        self.nodes = 0;
        Ok(match self.extend(&PartialAssignment::from_word(tau), 0)? {
            Outcome::Found => Some(true),
            Outcome::Conflict(_) => Some(false),
            Outcome::GaveUp => None,
        })
    }

    fn count(&mut self, tau: BitString, depth: usize, out: &mut FiberCount) -> Result<()> {
        match self.exists(&tau)? {
            Some(false) => {}
            None => out.undetermined += 1,
            Some(true) if tau.len() == depth => out.branches += 1,
            Some(true) => {
                self.count(tau.child(false), depth, out)?;
                self.count(tau.child(true), depth, out)?;
            }
        }
        Ok(())
    }
}

/// Counts the depth-`depth` input words consistent with `y_prefix`, both as
/// genuine branches of the fiber and as the plain level of the
/// representation tree.
pub fn fiber_branch_count(f: Arc<dyn RealFunction>, y_prefix: &BitString, depth: usize) -> Result<FiberCount> {
    fiber_branch_count_with(f, y_prefix, depth, DEFAULT_SEARCH_NODES)
}

pub fn fiber_branch_count_with(
    f: Arc<dyn RealFunction>,
    y_prefix: &BitString,
    depth: usize,
    max_nodes: usize,
) -> Result<FiberCount> {
    let mut out = FiberCount {
        branches: 0,
        surviving: 0,
        undetermined: 0,
    };
    let mut search = Search {
        f: f.as_ref(),
        target: y_prefix,
        fixed: 0,
        nodes: 0,
        max_nodes,
    };
    search.count(BitString::new(), depth, &mut out)?;

    let rep = representation_of(f.clone(), depth).with_output_cap(y_prefix.len());
    let mut stack = vec![BitString::new()];
    while let Some(s) = stack.pop() {
        if !rep.image(&s).is_compatible(y_prefix) {
            continue;
        }
        if s.len() == depth {
            out.surviving += 1;
        } else {
            stack.push(s.child(false));
            stack.push(s.child(true));
        }
    }
    Ok(out)
}
