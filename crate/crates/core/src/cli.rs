//! The `cantor-oneway` command line.
//!
//! Every command is a pure function of its argument list: [`run`] returns the
//! exit code and both output streams instead of printing, so the binary and
//! the tests drive the same code.

use std::fmt::Write as _;
use std::ops::Range;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bitcore::{BitString, PrefixFreeSet};
use crate::constructions::{ConstructionSpec, EnumSpec};
use crate::enumeration::StagedEnumeration;
use crate::error::{Error, Result};
use crate::inversion::{
    extract_randomized, extract_simple, extract_two_to_one, fiber_branch_count, unique_path_invert,
    DovetailLimits, ExtractionVerdict, InverterSpec, InverterUnderTest,
};
use crate::streams::{evaluate_with_budget, parse_source, representation_of, DEFAULT_STEP_BUDGET};

/// Toy enumeration used by the demos.
pub const DEMO_ENUMERATION: &str = "collatz(96,10000)";

#[derive(Debug, Parser)]
#[command(name = "cantor-oneway", version, about = "One-way functions on Cantor space at desk scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the first N output bits of a construction and their oracle-use.
    Eval {
        #[arg(long = "fn")]
        function: ConstructionSpec,
        #[arg(long)]
        input: String,
        #[arg(long)]
        bits: usize,
        #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
        budget: u64,
    },
    /// Recover preimage bits along the unique path of the preimage tree.
    InvertTree {
        #[arg(long = "fn")]
        function: ConstructionSpec,
        #[arg(long)]
        target: String,
        #[arg(long)]
        bits: usize,
        #[arg(long)]
        depth: usize,
    },
    /// Decide membership in the enumerated set from an inverter.
    Extract {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long = "fn")]
        function: ConstructionSpec,
        #[arg(long, default_value = "reference")]
        inverter: InverterSpec,
        /// An element `K` or a half-open range `A..B`.
        #[arg(long = "n")]
        elements: Elements,
        /// Cylinder for the randomized mode.
        #[arg(long, default_value = "")]
        sigma: BitString,
        /// Output-side cylinder for the two-to-one mode.
        #[arg(long, default_value = "")]
        upsilon: BitString,
        /// Initial segment of `z` for the two-to-one mode.
        #[arg(long, default_value = "")]
        zeta: BitString,
    },
    /// Exact measure of a prefix-free set, optionally inside a cylinder.
    Measure {
        #[arg(long)]
        prefixset: PathBuf,
        #[arg(long)]
        sigma: Option<BitString>,
    },
    /// Count depth-D input words consistent with an output prefix.
    Fiber {
        #[arg(long = "fn")]
        function: ConstructionSpec,
        #[arg(long)]
        target: BitString,
        #[arg(long)]
        depth: usize,
    },
    /// Run a scripted reduction against the reference inverter.
    Demo {
        #[arg(value_enum)]
        name: Demo,
        #[arg(long, default_value = DEMO_ENUMERATION)]
        enumeration: EnumSpec,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Simple,
    Randomized,
    Two1,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Demo {
    PropSimple,
    ThmSurjection,
    ThmTwo1,
}

#[derive(Debug, Clone)]
struct Elements(Range<u64>);

impl FromStr for Elements {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let num = |v: &str| {
            v.trim()
                .parse::<u64>()
                .map_err(|_| Error::parse(format!("bad element {v:?}")))
        };
        match s.split_once("..") {
            Some((a, b)) => Ok(Elements(num(a)?..num(b)?)),
            None => {
                let k = num(s)?;
                Ok(Elements(k..k + 1))
            }
        }
    }
}

/// Outcome of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the command line `argv` (including the program name).
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 1,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let mut out = String::new();
    match dispatch(cli.command, &mut out) {
        Ok(code) => Outcome {
            code,
            stdout: out,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: exit_code(&e),
            stdout: out,
            stderr: format!("error: {e}\n"),
        },
    }
}

/// 1 for malformed arguments or inputs, 2 for failures of the computation.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_parse() || matches!(e, Error::Io { .. }) {
        1
    } else {
        2
    }
}

fn dispatch(cmd: Command, out: &mut String) -> Result<i32> {
    match cmd {
        Command::Eval {
            function,
            input,
            bits,
            budget,
        } => {
            let c = function.build()?;
            let x = parse_source(&input)?;
            let e = evaluate_with_budget(c.function.as_ref(), &x, bits, budget)?;
            let _ = writeln!(out, "{} use={}", e.bits, e.used);
        }
        Command::InvertTree {
            function,
            target,
            bits,
            depth,
        } => {
            let c = function.build()?;
            let y = parse_source(&target)?;
            let rep = representation_of(c.function.clone(), depth);
            let x = unique_path_invert(&rep, &y, bits, depth)?;
            let _ = writeln!(out, "{x}");
        }
        Command::Extract {
            mode,
            function,
            inverter,
            elements,
            sigma,
            upsilon,
            zeta,
        } => {
            let c = function.build()?;
            let w = c
                .enumeration
                .clone()
                .ok_or_else(|| Error::Usage(format!("{function} has no enumeration to decide")))?;
            let expected = match mode {
                Mode::Simple => matches!(function, ConstructionSpec::Simple(_)),
                Mode::Randomized => matches!(function, ConstructionSpec::Surjection(_)),
                Mode::Two1 => matches!(function, ConstructionSpec::TwoToOneV1(_)),
            };
            if !expected {
                return Err(Error::Usage(format!("mode {mode:?} does not apply to {function}")));
            }
            let g = inverter.build(&c)?;
            for n in elements.0 {
                let v = match mode {
                    Mode::Simple => extract_simple(&g, &w, n)?,
                    Mode::Randomized => {
                        extract_randomized(&g, c.function.as_ref(), &sigma, &w, n, DovetailLimits::default())?.verdict
                    }
                    Mode::Two1 => extract_two_to_one(&g, &w, n, &upsilon, &zeta)?,
                };
                let _ = writeln!(out, "{v}");
            }
        }
        Command::Measure { prefixset, sigma } => {
            let text = std::fs::read_to_string(&prefixset).map_err(|e| Error::io(&prefixset, e))?;
            let v = PrefixFreeSet::parse(&text)?;
            let m = match sigma {
                Some(s) => v.intersect_measure(&s),
                None => v.measure(),
            };
            let _ = writeln!(out, "{m}");
        }
        Command::Fiber {
            function,
            target,
            depth,
        } => {
            let c = function.build()?;
            let r = fiber_branch_count(c.function.clone(), &target, depth)?;
            let _ = writeln!(
                out,
                "branches={} surviving={} undetermined={}",
                r.branches, r.surviving, r.undetermined
            );
        }
        Command::Demo { name, enumeration } => {
            let passed = demo(name, enumeration, out)?;
            return Ok(if passed { 0 } else { 2 });
        }
    }
    Ok(0)
}

fn demo(name: Demo, e: EnumSpec, out: &mut String) -> Result<bool> {
    let (spec, count) = match name {
        Demo::PropSimple => (ConstructionSpec::Simple(e), 64),
        Demo::ThmSurjection => (ConstructionSpec::Surjection(e), 32),
        Demo::ThmTwo1 => (ConstructionSpec::TwoToOneV1(e), 32),
    };
    let c = spec.build()?;
    let w = c.enumeration.clone().expect("demo constructions carry an enumeration");
    let g = InverterSpec::Reference.build(&c)?;
    let _ = writeln!(out, "construction {spec}");
    let _ = writeln!(out, "{:>4} {:>8} {:>8} {:>10} {:>10}  ok", "n", "truth", "verdict", "use", "stagebound");
    let mut all = true;
    for n in 0..count {
        let v = demo_verdict(name, &g, &c, &w, n)?;
        let truth = w.members().contains(&n);
        let ok = truth == v.member;
        all &= ok;
        let _ = writeln!(
            out,
            "{:>4} {:>8} {:>8} {:>10} {:>10}  {}",
            n,
            truth,
            v.member,
            v.certificate.used,
            v.certificate.stage_bound,
            if ok { "yes" } else { "NO" }
        );
    }
    let _ = writeln!(out, "{}", if all { "PASS" } else { "FAIL" });
    Ok(all)
}

fn demo_verdict(
    name: Demo,
    g: &InverterUnderTest,
    c: &crate::constructions::Construction,
    w: &Arc<StagedEnumeration>,
    n: u64,
) -> Result<ExtractionVerdict> {
    match name {
        Demo::PropSimple => extract_simple(g, w, n),
        Demo::ThmSurjection => Ok(extract_randomized(
            g,
            c.function.as_ref(),
            &BitString::new(),
            w,
            n,
            DovetailLimits::default(),
        )?
        .verdict),
        Demo::ThmTwo1 => extract_two_to_one(g, w, n, &BitString::new(), &BitString::new()),
    }
}
