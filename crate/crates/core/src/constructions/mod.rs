//! The one-way maps: bit selections, the simple and surjective maps over a
//! staged enumeration, the partial injection, and the marker-based
//! two-to-one maps.

mod marker;
mod selection;
mod simple;
mod spec;

pub use marker::{
    marker_run, marker_run_v1, marker_run_v2, replace_column, stage_where_counter_reaches,
    two_to_one_v1, two_to_one_v2, z_builder_v1, MarkerState, MarkerTrace, MarkerV1, MarkerV2,
    Permission, PermissionRule, StageRecord, TwoToOne,
};
pub use selection::{
    one_way_surjection, preimage_witness, transport, transport_set, BitSelect, Double,
    IdentitySelection, Selection, Shift, SurjectionSelection, Table,
};
pub use simple::{partial_injection, SimpleOneWay, SubsetGuard};
pub use spec::{Construction, ConstructionSpec, EnumSpec, SelectionKind};
