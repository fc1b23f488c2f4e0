//! Infinite bit sources, oracle tapes with use accounting, machines for
//! computable functions on Cantor space, and their representations.

mod function;
mod machine;
mod representation;
mod source;
mod spec;

pub use function::{Constant, Identity, InterleaveOutputs, ShiftRight};
pub use machine::{
    evaluate, evaluate_with_budget, run, run_bit, run_bit_logged, BitRun, Evaluation, Halt, Machine, OracleTape, RealFunction, Run,
    TapeInput, DEFAULT_STEP_BUDGET,
};
pub(crate) use machine::halt_error;
pub use representation::{
    is_prefix_of_source, preimage_tree, representation_of, use_soundness_check, Representation,
    UseVerdict,
};
pub use source::{BitSource, SourceFn};
pub use spec::{parse_source, parse_source_in, parse_word};
