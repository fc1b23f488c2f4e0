use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::bitcore::{pair, BitString, CylinderPattern, PartialAssignment, PatternSet, Rational};
use crate::constructions::{two_to_one_v1, z_builder_v1, MarkerState, MarkerV1, SimpleOneWay};
use crate::enumeration::StagedEnumeration;
use crate::error::{Error, Result};
use crate::streams::{
    halt_error, run, run_bit, BitSource, Halt, RealFunction, TapeInput, DEFAULT_STEP_BUDGET,
};

use super::InverterUnderTest;

/// Outcome of checking `f(g(y)) = y` on a finite prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InversionCheck {
    Consistent,
    /// First output bit where `f(g(y))` and `y` disagree.
    Refuted { bit: usize },
    /// First output bit of `f(g(y))` that could not be computed.
    Diverged { bit: usize },
}

/// Longest prefix of `g(y)` ever materialized while checking a round trip.
const MAX_INVERTER_BITS: usize = 1 << 26;

/// Whether `f(g(input))` agrees with `target` on the first `n` bits. `g` is
/// run on prefixes of doubling length until `f` has what it needs.
pub fn check_round_trip(
    f: &dyn RealFunction,
    g: &InverterUnderTest,
    input: &BitSource,
    target: &BitSource,
    n: usize,
) -> Result<InversionCheck> {
    let mut len = n.max(1);
    loop {
        let gx = run(g.g.as_ref(), TapeInput::Source(input), len, g.budget);
        let r = run(f, TapeInput::Word(&gx.bits), n, DEFAULT_STEP_BUDGET);
        if let Some(bit) = (0..r.bits.len()).find(|&i| r.bits.get(i) != Some(target.bit(i as u64))) {
            return Ok(InversionCheck::Refuted { bit });
        }
        let diverged = Ok(InversionCheck::Diverged { bit: r.bits.len() });
        match r.halt {
            None => return Ok(InversionCheck::Consistent),
            Some(Halt::NeedBit(p)) => {
                if let Some(h) = gx.halt {
                    if let Halt::Domain(e) = h {
                        return Err(e);
                    }
                    return diverged;
                }
                len = (2 * len).max(p as usize + 1);
                if len > MAX_INVERTER_BITS {
                    return diverged;
                }
            }
            Some(Halt::Budget) => return diverged,
            Some(Halt::Domain(e)) => return Err(e),
        }
    }
}

/// Finite-stage membership of `y` in the inversion domain of `g`: does
/// `f(g(y))` reproduce `y` on `n` bits?
pub fn inverts_at_finite_stage(
    f: &dyn RealFunction,
    g: &InverterUnderTest,
    y: &BitSource,
    n: usize,
) -> Result<InversionCheck> {
    check_round_trip(f, g, y, y, n)
}

fn require_inverse(check: InversionCheck) -> Result<()> {
    match check {
        InversionCheck::Consistent => Ok(()),
        InversionCheck::Refuted { bit } => Err(Error::InverterRefuted { bit }),
        InversionCheck::Diverged { bit } => Err(Error::InverterDiverged { bit }),
    }
}

/// What an extraction consulted besides the use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// The inverter's bit `n` on `0^ω`.
    InverterBit(bool),
    /// Dovetailing stopped at word length `stage` with `patterns` cylinder
    /// patterns of total measure `measure` inside `⟦σ⟧`.
    Dovetail {
        stage: u64,
        patterns: usize,
        measure: Rational,
    },
    /// The marker reached `n` at `stage`.
    Marker { stage: u64, bit: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub used: u64,
    /// Stage at which membership was read off.
    pub stage_bound: u64,
    /// The stage bound exceeded the enumeration's horizon, so membership was
    /// read at the horizon.
    pub clamped: bool,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionVerdict {
    pub element: u64,
    pub member: bool,
    pub certificate: Certificate,
}

impl fmt::Display for ExtractionVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} member={} use={} stagebound={}",
            self.element, self.member, self.certificate.used, self.certificate.stage_bound
        )
    }
}

fn verdict(w: &StagedEnumeration, n: u64, used: u64, bound: u64, witness: Witness) -> ExtractionVerdict {
    let (member, clamped) = w.settled_membership(n, bound);
    ExtractionVerdict {
        element: n,
        member,
        certificate: Certificate {
            used,
            stage_bound: bound,
            clamped,
            witness,
        },
    }
}

fn bit_or_error(g: &InverterUnderTest, input: TapeInput<'_>, n: usize) -> Result<(bool, u64)> {
    let r = run_bit(g.g.as_ref(), input, n, g.budget);
    match (r.bit, r.halt) {
        (Some(b), _) => Ok((b, r.used)),
        (None, Some(h)) => Err(halt_error(h, n)),
        (None, None) => Err(Error::Divergence { bit: n }),
    }
}

/// Decides `n ∈ W` from an inverter of the simple one-way map: if
/// `g(0^ω;n) = 1` then `n` never entered, otherwise `n ∈ W` iff it entered
/// by the use of that bit.
pub fn extract_simple(g: &InverterUnderTest, w: &Arc<StagedEnumeration>, n: u64) -> Result<ExtractionVerdict> {
    let f = SimpleOneWay::new(w.clone());
    let zeros = BitSource::zeros();
    // every output position of stage at most the horizon
    let limit = pair(0, w.horizon() + 1);
    let depth = (pair(n, n) + 1).min(limit);
    require_inverse(inverts_at_finite_stage(&f, g, &zeros, depth as usize)?)?;
    let (bit, used) = bit_or_error(g, TapeInput::Source(&zeros), n as usize)?;
    if bit {
        return Ok(ExtractionVerdict {
            element: n,
            member: false,
            certificate: Certificate {
                used,
                stage_bound: used,
                clamped: false,
                witness: Witness::InverterBit(true),
            },
        });
    }
    Ok(verdict(w, n, used, used, Witness::InverterBit(false)))
}

/// Result of dovetailing a binary inverter.
#[derive(Debug, Clone)]
pub struct RandomizedExtraction {
    pub verdict: ExtractionVerdict,
    /// The collected halting set at the stopping stage.
    pub collected: PatternSet,
    /// Round trip of `f` and `g` on the sample `σ0^ω`, for information.
    pub sample: InversionCheck,
}

/// Dovetailing limits for [`extract_randomized`].
#[derive(Debug, Clone, Copy)]
pub struct DovetailLimits {
    pub max_nodes: usize,
}

impl Default for DovetailLimits {
    fn default() -> Self {
        Self { max_nodes: 1 << 20 }
    }
}

enum Item {
    Open(PartialAssignment),
    Halted(PartialAssignment),
}

/// Decides `n ∈ W` from a binary inverter `g(y⊕r)` of `f` that is total on
/// `⟦σ⟧`.
///
/// Computations of `g(·;2n)` inside `⟦σ⟧` are explored by branching on the
/// positions they read. A computation that halts with use `u` stands for
/// every word of length `max(u,|σ|)` consistent with what it read, and
/// enters the collected set at that length. The search stops at the least
/// length `t` where the collected set covers more than half of `⟦σ⟧`, and
/// answers membership at the longest collected length.
pub fn extract_randomized(
    g: &InverterUnderTest,
    f: &dyn RealFunction,
    sigma: &BitString,
    w: &StagedEnumeration,
    n: u64,
    limits: DovetailLimits,
) -> Result<RandomizedExtraction> {
    let sample_input = BitSource::finite(sigma.clone());
    let sample_target = BitSource::computed(EvenHalf(sample_input.clone()));
    let sample = check_round_trip(f, g, &sample_input, &sample_target, n as usize + 1)
        .unwrap_or(InversionCheck::Diverged { bit: 0 });

    let base = sigma.len() as u64;
    let threshold = Rational::dyadic(base).half();
    let mut queue: BTreeMap<(u64, u64), Item> = BTreeMap::new();
    let mut seq = 0u64;
    queue.insert((base, seq), Item::Open(PartialAssignment::from_word(sigma)));
    let mut collected = PatternSet::new();
    let mut reached: Option<(u64, Rational)> = None;
    let mut explored = 0usize;
    while let Some(((key, _), item)) = queue.pop_first() {
        if reached.as_ref().is_some_and(|(t, _)| key > *t) {
            break;
        }
        match item {
            Item::Halted(a) => {
                collected.push(CylinderPattern::new(key, a));
                if reached.is_none() {
                    let covered = collected.intersect_measure(sigma);
                    if covered > threshold {
                        reached = Some((key, covered));
                    }
                }
            }
            Item::Open(a) => {
                explored += 1;
                if explored > limits.max_nodes {
                    break;
                }
                let r = run_bit(g.g.as_ref(), TapeInput::Assignment(&a), 2 * n as usize, g.budget);
                seq += 1;
                match (r.bit, r.halt) {
                    (Some(_), _) => {
                        queue.insert((r.used.max(base), seq), Item::Halted(a));
                    }
                    (None, Some(Halt::NeedBit(p))) => {
                        let k = key.max(p + 1);
                        queue.insert((k, seq), Item::Open(a.with(p, false)));
                        seq += 1;
                        queue.insert((k, seq), Item::Open(a.with(p, true)));
                    }
                    (None, Some(Halt::Domain(e))) => return Err(e),
                    // diverges on every extension of this branch
                    (None, _) => {}
                }
            }
        }
    }
    let Some((stage, covered)) = reached else {
        return Err(Error::ThresholdUnreachable {
            reached: collected.intersect_measure(sigma).to_string(),
            needed: threshold.to_string(),
            explored,
        });
    };
    let k = collected.max_length().unwrap_or(base);
    let witness = Witness::Dovetail {
        stage,
        patterns: collected.len(),
        measure: covered,
    };
    Ok(RandomizedExtraction {
        verdict: verdict(w, n, k, k, witness),
        collected,
        sample,
    })
}

/// The `y` half of a joint input `y⊕r`.
#[derive(Debug)]
struct EvenHalf(BitSource);

impl crate::streams::SourceFn for EvenHalf {
    fn bit(&self, pos: u64) -> bool {
        self.0.bit(2 * pos)
    }
    fn describe(&self) -> String {
        format!("even({})", self.0)
    }
}

/// Decides `n ∈ W` from an inverter of the first two-to-one map, relativized
/// to the cylinder given by `υ` (output side) and `ζ` (the `z` side).
///
/// `z` traps the marker on `n` from stage `s` on, unless `n` enters `W`; the
/// inverter's use `u` on bit `2n` of `υ0^ω ⊕ z` then bounds the entry stage.
pub fn extract_two_to_one(
    g: &InverterUnderTest,
    w: &Arc<StagedEnumeration>,
    n: u64,
    upsilon: &BitString,
    zeta: &BitString,
) -> Result<ExtractionVerdict> {
    if !zeta.is_empty() && n <= zeta.len() as u64 {
        return Err(Error::ZetaTooLong {
            n,
            zeta_len: zeta.len(),
        });
    }
    let z = z_builder_v1(n, zeta.clone());
    let rule = MarkerV1 { w: w.clone() };
    let mut state = MarkerState::default();
    let mut read = |j: u64| Ok(z.bit(j));
    while state.k != n {
        if state.s > w.horizon() {
            return Err(Error::CounterStalled {
                target: n,
                horizon: w.horizon(),
            });
        }
        state.step(&rule, &mut read).map_err(|h| halt_error(h, 0))?;
    }
    let s = state.s;

    let input = BitSource::interleave(BitSource::finite(upsilon.clone()), z);
    let f = two_to_one_v1(w.clone());
    require_inverse(inverts_at_finite_stage(&f, g, &input, 2 * n as usize + 2)?)?;
    let (bit, used) = bit_or_error(g, TapeInput::Source(&input), 2 * n as usize)?;
    Ok(verdict(w, n, used, used.max(s), Witness::Marker { stage: s, bit }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::one_way_surjection;
    use crate::inversion::{FlipBit, MarkerInverter, ReferenceSimple, ReferenceSurjection};
    use crate::streams::Constant;

    fn en(pairs: &[(u64, u64)], h: u64) -> Arc<StagedEnumeration> {
        Arc::new(StagedEnumeration::from_pairs(pairs.iter().copied(), h).unwrap())
    }

    #[test]
    fn extract_simple_examples() {
        let e = en(&[], 100);
        let g = InverterUnderTest::new(Arc::new(ReferenceSimple::new(e.clone())));
        for n in 0..64 {
            assert!(!extract_simple(&g, &e, n).unwrap().member);
        }
        let e = en(&[(1, 2)], 100);
        let g = InverterUnderTest::new(Arc::new(ReferenceSimple::new(e.clone())));
        for n in 0..64 {
            let v = extract_simple(&g, &e, n).unwrap();
            assert_eq!(v.member, n == 2, "n={n}");
        }
        let v = extract_simple(&g, &e, 2).unwrap();
        assert_eq!(v.certificate.used, pair(2, 1) + 1);
        assert_eq!(v.to_string(), format!("n=2 member=true use={} stagebound={}", pair(2, 1) + 1, pair(2, 1) + 1));
    }

    #[test]
    fn wrong_inverters_are_caught() {
        let e = en(&[(1, 2)], 100);
        let flip = InverterUnderTest::new(Arc::new(FlipBit {
            inner: Arc::new(ReferenceSimple::new(e.clone())),
            k: 2,
        }));
        assert!(matches!(extract_simple(&flip, &e, 2), Err(Error::InverterRefuted { .. })));
        let zeros = InverterUnderTest::new(Arc::new(Constant(BitSource::zeros())));
        // the zero map inverts on 0^ω, so the verdict itself is wrong
        assert!(!extract_simple(&zeros, &e, 2).unwrap().member);
    }

    #[test]
    fn inverts_at_finite_stage_examples() {
        let e = en(&[(1, 2)], 100);
        let f = SimpleOneWay::new(e.clone());
        let g = InverterUnderTest::new(Arc::new(ReferenceSimple::new(e.clone())));
        let y = BitSource::zeros().flipped(pair(2, 1));
        assert_eq!(inverts_at_finite_stage(&f, &g, &y, 64).unwrap(), InversionCheck::Consistent);
        let zeros = InverterUnderTest::new(Arc::new(Constant(BitSource::zeros())));
        assert_eq!(
            inverts_at_finite_stage(&f, &zeros, &y, 64).unwrap(),
            InversionCheck::Refuted { bit: pair(2, 1) as usize }
        );
        let starved = InverterUnderTest::new(Arc::new(ReferenceSimple::new(e))).with_budget(0);
        assert!(matches!(
            inverts_at_finite_stage(&f, &starved, &y, 64).unwrap(),
            InversionCheck::Diverged { .. }
        ));
    }

    #[test]
    fn extract_randomized_examples() {
        let e = en(&[(1, 2)], 100);
        let f = one_way_surjection(e.clone());
        let g = InverterUnderTest::new(Arc::new(ReferenceSurjection::new(e.clone())));
        for n in 0..4 {
            let r = extract_randomized(&g, &f, &BitString::new(), &e, n, DovetailLimits::default()).unwrap();
            assert_eq!(r.verdict.member, n == 2, "n={n}");
            assert!(r.collected.is_prefix_free());
            assert_eq!(r.sample, InversionCheck::Consistent);
        }
        let r = extract_randomized(&g, &f, &BitString::new(), &e, 2, DovetailLimits::default()).unwrap();
        assert_eq!(r.verdict.certificate.used, 2 * pair(2, 1) + 1);
    }

    /// Reads position `u0 - 1` and nothing else.
    #[derive(Debug)]
    struct FixedUse(u64);

    impl RealFunction for FixedUse {
        fn name(&self) -> String {
            "fixed-use".into()
        }
        fn run(&self, m: &mut crate::streams::Machine<'_>) -> Result<(), Halt> {
            while !m.done() {
                let b = m.read(self.0 - 1)?;
                m.emit(b);
            }
            Ok(())
        }
    }

    #[test]
    fn constant_use_collects_all_words_of_that_length() {
        let e = en(&[], 100);
        let g = InverterUnderTest::new(Arc::new(FixedUse(5)));
        let r = extract_randomized(&g, &Constant(BitSource::zeros()), &BitString::new(), &e, 1, DovetailLimits::default()).unwrap();
        assert_eq!(r.verdict.certificate.stage_bound, 5);
        let words = r.collected.expand(1 << 10).unwrap().unwrap();
        assert_eq!(words.len(), 32);
        assert!(words.members().all(|w| w.len() == 5));
    }

    #[test]
    fn threshold_unreachable_when_g_diverges() {
        let e = en(&[], 100);
        let g = InverterUnderTest::new(Arc::new(crate::constructions::SubsetGuard::new(Arc::new(
            crate::enumeration::DecidedSet::new([], 100).unwrap(),
        ))))
        .with_budget(100);
        // bit 2 diverges whenever one of x(0..=2) is 1, so 1/8 of the space halts
        let err = extract_randomized(&g, &Constant(BitSource::zeros()), &BitString::new(), &e, 1, DovetailLimits::default()).unwrap_err();
        assert!(matches!(err, Error::ThresholdUnreachable { .. }), "{err}");
    }

    #[test]
    fn extract_two_to_one_examples() {
        let e = en(&[(5, 3)], 400);
        let g = InverterUnderTest::new(Arc::new(MarkerInverter::new(Arc::new(MarkerV1 { w: e.clone() }))));
        for n in 0..12 {
            let v = extract_two_to_one(&g, &e, n, &BitString::new(), &BitString::new()).unwrap();
            assert_eq!(v.member, n == 3, "n={n}");
        }
        let ups: BitString = "1101".parse().unwrap();
        let zeta: BitString = "011".parse().unwrap();
        for n in 4..12 {
            let v = extract_two_to_one(&g, &e, n, &ups, &zeta).unwrap();
            assert!(!v.member);
        }
        assert_eq!(
            extract_two_to_one(&g, &e, 3, &ups, &zeta),
            Err(Error::ZetaTooLong { n: 3, zeta_len: 3 })
        );
    }
}
