//! Inverters and adversaries: the unique-path tree inverter, reference
//! inverters for the toy enumerations, the extraction procedures that turn an
//! inverter into a membership test, fiber branch counting, and finite-stage
//! inversion checks.

mod extract;
mod fiber;
mod reference;
mod tree;

pub use extract::{
    check_round_trip, extract_randomized, extract_simple, extract_two_to_one,
    inverts_at_finite_stage, Certificate, DovetailLimits, ExtractionVerdict, InversionCheck,
    RandomizedExtraction, Witness,
};
pub use fiber::{fiber_branch_count, fiber_branch_count_with, FiberCount, DEFAULT_SEARCH_NODES};
pub use reference::{
    reference_inverter, FlipBit, InverterSpec, InverterUnderTest, MarkerInverter,
    ReferenceSimple, ReferenceSurjection,
};
pub use tree::{unique_path_invert, TreeInverter, DEFAULT_WIDTH_CAP};
