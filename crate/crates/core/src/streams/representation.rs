use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitcore::BitString;
use crate::error::Result;

use super::{evaluate, run, BitSource, RealFunction, TapeInput, DEFAULT_STEP_BUDGET};

/// The read-barrier representation of a function: `σ` maps to the longest
/// output the machine writes while reading only inside `σ`.
///
/// Monotone by construction. Images are capped at `output_cap` bits so that
/// functions which never read (constants) still have finite images.
#[derive(Clone, Debug)]
pub struct Representation {
    f: Arc<dyn RealFunction>,
    depth: usize,
    output_cap: usize,
    budget: u64,
}

pub fn representation_of(f: Arc<dyn RealFunction>, depth: usize) -> Representation {
    Representation {
        f,
        depth,
        output_cap: 2 * depth + 64,
        budget: DEFAULT_STEP_BUDGET,
    }
}

impl Representation {
    pub fn with_output_cap(mut self, cap: usize) -> Self {
        self.output_cap = cap;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn output_cap(&self) -> usize {
        self.output_cap
    }

    pub fn function(&self) -> &Arc<dyn RealFunction> {
        &self.f
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// `f̂(σ)`.
    pub fn image(&self, sigma: &BitString) -> BitString {
        run(self.f.as_ref(), TapeInput::Word(sigma), self.output_cap, self.budget).bits
    }

    /// The full table on all words of length at most `depth`.
    pub fn materialize(&self) -> BTreeMap<BitString, BitString> {
        (0..=self.depth)
            .flat_map(BitString::all_of_length)
            .map(|s| {
                let img = self.image(&s);
                (s, img)
            })
            .collect()
    }
}

/// Whether `word` is a prefix of the real `y`.
pub fn is_prefix_of_source(word: &BitString, y: &BitSource) -> bool {
    word.iter().enumerate().all(|(i, b)| y.bit(i as u64) == b)
}

/// `{σ : |σ| ≤ depth, f̂(σ) ≺ y}`, which is prefix-closed.
pub fn preimage_tree(rep: &Representation, y: &BitSource, depth: usize) -> BTreeSet<BitString> {
    let mut tree = BTreeSet::new();
    let mut frontier = vec![BitString::new()];
    while let Some(sigma) = frontier.pop() {
        if !is_prefix_of_source(&rep.image(&sigma), y) {
            continue;
        }
        if sigma.len() < depth {
            frontier.push(sigma.child(true));
            frontier.push(sigma.child(false));
        }
        tree.insert(sigma);
    }
    tree
}

/// Outcome of [`use_soundness_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UseVerdict {
    Pass { used: u64, trials: usize },
    Fail {
        used: u64,
        flipped: Vec<u64>,
        original: BitString,
        mutated: BitString,
    },
}

impl UseVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, UseVerdict::Pass { .. })
    }
}

/// Re-evaluates `f` on `trials` seeded mutations of `x` that only touch
/// positions at or beyond the reported oracle-use, and reports the first
/// mutation that changes the output.
pub fn use_soundness_check(
    f: &dyn RealFunction,
    x: &BitSource,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<UseVerdict> {
    let base = evaluate(f, x, n)?;
    let used = base.used;
    let window = used.max(64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let count = rng.random_range(1..=3usize);
        let mut flipped: Vec<u64> = (0..count)
            .map(|_| used + rng.random_range(0..window))
            .collect();
        flipped.sort_unstable();
        flipped.dedup();
        let mutated_src = flipped
            .iter()
            .fold(x.clone(), |src, &p| src.flipped(p));
        let out = evaluate(f, &mutated_src, n)?;
        if out.bits != base.bits {
            return Ok(UseVerdict::Fail {
                used,
                flipped,
                original: base.bits,
                mutated: out.bits,
            });
        }
    }
    Ok(UseVerdict::Pass { used, trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streams::{Constant, Halt, Identity, Machine};

    fn w(s: &str) -> BitString {
        s.parse().unwrap()
    }

    /// Output bit n is input bit 2n.
    #[derive(Debug)]
    struct Evens;

    impl RealFunction for Evens {
        fn name(&self) -> String {
            "evens".into()
        }
        fn run(&self, m: &mut Machine<'_>) -> std::result::Result<(), Halt> {
            while !m.done() {
                let b = m.read(2 * m.position() as u64)?;
                m.emit(b);
            }
            Ok(())
        }
    }

    /// Reports honest use for bit n but also peeks at position n+1.
    #[derive(Debug)]
    struct Peeker;

    impl RealFunction for Peeker {
        fn name(&self) -> String {
            "peeker".into()
        }
        fn run(&self, m: &mut Machine<'_>) -> std::result::Result<(), Halt> {
            while !m.done() {
                let i = m.position() as u64;
                let b = m.read(i)?;
                let sneak = m.tape().read_unaccounted(i + 1).unwrap_or(false);
                m.emit(b ^ sneak);
            }
            Ok(())
        }
    }

    #[test]
    fn evaluate_bit_select_use() {
        let x = BitSource::periodic(w("10")).unwrap();
        let e = evaluate(&Evens, &x, 3).unwrap();
        assert_eq!(e.bits, w("111"));
        assert_eq!(e.used, 5);
    }

    #[test]
    fn representation_examples() {
        let id = representation_of(Arc::new(Identity), 4);
        assert_eq!(id.image(&w("01")), w("01"));
        let ev = representation_of(Arc::new(Evens), 4);
        assert_eq!(ev.image(&w("0")), w("0"));
        assert_eq!(ev.image(&w("011")), w("01"));
        assert_eq!(ev.image(&w("")), w(""));
    }

    #[test]
    fn preimage_tree_examples() {
        let id = representation_of(Arc::new(Identity), 2);
        let t = preimage_tree(&id, &BitSource::zeros(), 2);
        assert_eq!(t.into_iter().collect::<Vec<_>>(), vec![w(""), w("0"), w("00")]);

        let c = representation_of(Arc::new(Constant(BitSource::zeros())), 1);
        let t = preimage_tree(&c, &BitSource::zeros(), 1);
        assert_eq!(t.into_iter().collect::<Vec<_>>(), vec![w(""), w("0"), w("1")]);

        let ev = representation_of(Arc::new(Evens), 2);
        let t = preimage_tree(&ev, &BitSource::ones(), 2);
        assert_eq!(
            t.into_iter().collect::<Vec<_>>(),
            vec![w(""), w("1"), w("10"), w("11")]
        );
    }

    #[test]
    fn use_soundness_examples() {
        let v = use_soundness_check(&Evens, &BitSource::zeros(), 2, 10, 1).unwrap();
        assert_eq!(v, UseVerdict::Pass { used: 3, trials: 10 });
        let v = use_soundness_check(&Identity, &BitSource::zeros(), 3, 10, 2).unwrap();
        assert!(v.passed());
    }

    #[test]
    fn peeking_evaluator_is_caught() {
        // the peek at position n sits exactly at the reported use
        let v = use_soundness_check(&Peeker, &BitSource::zeros(), 3, 200, 3).unwrap();
        match v {
            UseVerdict::Fail {
                used,
                flipped,
                original,
                mutated,
            } => {
                assert_eq!(used, 3);
                assert!(flipped.contains(&3));
                assert_ne!(original, mutated);
            }
            UseVerdict::Pass { .. } => panic!("peeker not detected"),
        }
    }

    #[test]
    fn materialized_table_is_monotone() {
        let rep = representation_of(Arc::new(Evens), 6);
        let table = rep.materialize();
        assert_eq!(table.len(), (1 << 7) - 1);
        for (s, img) in &table {
            if let Some(parent) = s.len().checked_sub(1).map(|l| s.prefix(l)) {
                assert!(table[&parent].is_prefix_of(img));
            }
        }
    }
}
