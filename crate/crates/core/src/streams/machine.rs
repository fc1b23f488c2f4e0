use std::cell::RefCell;
use std::fmt;

use crate::bitcore::{BitString, PartialAssignment};
use crate::error::{Error, Result};

use super::BitSource;

/// Default number of elementary steps allowed per output bit.
pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000;

/// Why a computation stopped before producing the requested bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Halt {
    /// The input cannot answer a read at this position (read barrier or an
    /// unassigned position).
    NeedBit(u64),
    /// The step budget for the current output bit ran out.
    Budget,
    /// The construction itself failed (horizon overrun, bad selection).
    Domain(Error),
}

impl From<Error> for Halt {
    fn from(e: Error) -> Self {
        Halt::Domain(e)
    }
}

/// What an oracle tape reads from.
#[derive(Clone, Copy)]
pub enum TapeInput<'a> {
    Source(&'a BitSource),
    /// A finite prefix; reads at or beyond its length fail.
    Word(&'a BitString),
    /// Only the constrained positions are readable.
    Assignment(&'a PartialAssignment),
}

impl<'a> TapeInput<'a> {
    fn fetch(&self, pos: u64) -> Option<bool> {
        match self {
            TapeInput::Source(s) => Some(s.bit(pos)),
            TapeInput::Word(w) => w.get(pos as usize),
            TapeInput::Assignment(a) => a.get(pos),
        }
    }
}

/// Read-tracking access to an input real.
///
/// `use` is one more than the largest position successfully read, so it is 0
/// before any read and never decreases.
#[derive(Clone, Copy)]
pub struct OracleTape<'a> {
    input: TapeInput<'a>,
    used: u64,
    log: Option<&'a RefCell<Vec<u64>>>,
}

impl<'a> OracleTape<'a> {
    pub fn new(input: TapeInput<'a>) -> Self {
        Self {
            input,
            used: 0,
            log: None,
        }
    }

    /// A tape that also records every successfully read position.
    pub fn logged(input: TapeInput<'a>, log: &'a RefCell<Vec<u64>>) -> Self {
        Self {
            input,
            used: 0,
            log: Some(log),
        }
    }

    pub fn read(&mut self, pos: u64) -> Result<bool, Halt> {
        let bit = self.input.fetch(pos).ok_or(Halt::NeedBit(pos))?;
        self.used = self.used.max(pos + 1);
        if let Some(log) = self.log {
            log.borrow_mut().push(pos);
        }
        Ok(bit)
    }

    /// Oracle-use so far.
    pub fn used(&self) -> u64 {
        self.used
    }

    /// Reads without recording use. Exists only so that tests can build
    /// evaluators that violate the use contract on purpose.
    #[doc(hidden)]
    pub fn read_unaccounted(&self, pos: u64) -> Option<bool> {
        self.input.fetch(pos)
    }
}

/// The execution context of a [`RealFunction`]: an oracle tape, the one-way
/// output tape, and a per-output-bit step budget.
pub struct Machine<'a> {
    tape: OracleTape<'a>,
    out: BitString,
    target: usize,
    budget: u64,
    spent: u64,
}

impl<'a> Machine<'a> {
    pub fn new(input: TapeInput<'a>, target: usize, budget: u64) -> Self {
        Self::on_tape(OracleTape::new(input), target, budget)
    }

    pub fn on_tape(tape: OracleTape<'a>, target: usize, budget: u64) -> Self {
        Self {
            tape,
            out: BitString::new(),
            target,
            budget,
            spent: 0,
        }
    }

    /// Oracle-use so far.
    pub fn used(&self) -> u64 {
        self.tape.used
    }

    pub fn read(&mut self, pos: u64) -> Result<bool, Halt> {
        self.tick(1)?;
        self.tape.read(pos)
    }

    /// Charges `steps` elementary steps against the current bit's budget.
    pub fn tick(&mut self, steps: u64) -> Result<(), Halt> {
        self.spent = self.spent.saturating_add(steps);
        if self.spent > self.budget {
            return Err(Halt::Budget);
        }
        Ok(())
    }

    /// Appends an output bit. Bits past the target are dropped.
    pub fn emit(&mut self, bit: bool) {
        if !self.done() {
            self.out.push(bit);
            self.spent = 0;
        }
    }

    pub fn done(&self) -> bool {
        self.out.len() >= self.target
    }

    /// Index of the next output bit.
    pub fn position(&self) -> usize {
        self.out.len()
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn output(&self) -> &BitString {
        &self.out
    }

    /// An unbounded search that never succeeds: the budget is consumed.
    pub fn spin(&mut self) -> Halt {
        self.spent = self.budget.saturating_add(1);
        Halt::Budget
    }

    #[doc(hidden)]
    pub fn tape(&self) -> &OracleTape<'a> {
        &self.tape
    }

    /// Runs `f` for `n` output bits on the same input, charging reads to this
    /// machine's tape. Returns the bits produced and the reason for stopping
    /// early, if any.
    pub fn subrun(&mut self, f: &dyn RealFunction, n: usize) -> (BitString, Option<Halt>) {
        let mut sub = Machine {
            tape: self.tape,
            out: BitString::new(),
            target: n,
            budget: self.budget,
            spent: 0,
        };
        let halt = f.run(&mut sub).err();
        self.tape.used = self.tape.used.max(sub.tape.used);
        (sub.out, halt)
    }

    fn finish(self, halt: Option<Halt>) -> Run {
        Run {
            bits: self.out,
            used: self.tape.used,
            halt,
        }
    }
}

/// A computable (possibly partial) function on Cantor space, given by a
/// machine that writes its output bits in order.
pub trait RealFunction: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    /// Emits output bits until [`Machine::done`] holds or the computation
    /// halts early.
    fn run(&self, m: &mut Machine<'_>) -> Result<(), Halt>;

    /// Computes output bit `n` on its own, reading only what that bit needs.
    /// `None` means the function has no direct access and callers fall back
    /// to a sequential run of `n + 1` bits.
    fn bit_at(&self, m: &mut Machine<'_>, n: usize) -> Option<Result<bool, Halt>> {
        let _ = (m, n);
        None
    }
}

/// Result of computing a single output bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitRun {
    pub bit: Option<bool>,
    pub used: u64,
    pub halt: Option<Halt>,
}

/// Output bit `n` of `f` on `input`, through [`RealFunction::bit_at`] when
/// available.
pub fn run_bit(f: &dyn RealFunction, input: TapeInput<'_>, n: usize, budget: u64) -> BitRun {
    run_bit_on(f, OracleTape::new(input), n, budget)
}

/// [`run_bit`] with every read position appended to `log`.
pub fn run_bit_logged(
    f: &dyn RealFunction,
    input: TapeInput<'_>,
    n: usize,
    budget: u64,
    log: &RefCell<Vec<u64>>,
) -> BitRun {
    run_bit_on(f, OracleTape::logged(input, log), n, budget)
}

fn run_bit_on(f: &dyn RealFunction, tape: OracleTape<'_>, n: usize, budget: u64) -> BitRun {
    let mut m = Machine::on_tape(tape, 1, budget);
    if let Some(r) = f.bit_at(&mut m, n) {
        let used = m.used();
        return match r {
            Ok(b) => BitRun {
                bit: Some(b),
                used,
                halt: None,
            },
            Err(h) => BitRun {
                bit: None,
                used,
                halt: Some(h),
            },
        };
    }
    let mut m = Machine::on_tape(tape, n + 1, budget);
    let halt = f.run(&mut m).err();
    BitRun {
        bit: m.out.get(n),
        used: m.used(),
        halt,
    }
}

/// Raw result of running a machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub bits: BitString,
    pub used: u64,
    pub halt: Option<Halt>,
}

/// Runs `f` on `input` for up to `n` bits.
pub fn run(f: &dyn RealFunction, input: TapeInput<'_>, n: usize, budget: u64) -> Run {
    let mut m = Machine::new(input, n, budget);
    let halt = f.run(&mut m).err();
    debug_assert!(
        halt.is_some() || m.done(),
        "{} returned without producing {n} bits",
        f.name()
    );
    m.finish(halt)
}

/// First `n` output bits together with the exact oracle-use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub bits: BitString,
    pub used: u64,
}

pub fn evaluate(f: &dyn RealFunction, x: &BitSource, n: usize) -> Result<Evaluation> {
    evaluate_with_budget(f, x, n, DEFAULT_STEP_BUDGET)
}

pub fn evaluate_with_budget(
    f: &dyn RealFunction,
    x: &BitSource,
    n: usize,
    budget: u64,
) -> Result<Evaluation> {
    let r = run(f, TapeInput::Source(x), n, budget);
    match r.halt {
        None => Ok(Evaluation {
            bits: r.bits,
            used: r.used,
        }),
        Some(h) => Err(halt_error(h, r.bits.len())),
    }
}

pub(crate) fn halt_error(h: Halt, produced: usize) -> Error {
    match h {
        Halt::Budget => Error::Divergence { bit: produced },
        Halt::Domain(e) => e,
        Halt::NeedBit(p) => Error::ReadBeyondInput(p),
    }
}
