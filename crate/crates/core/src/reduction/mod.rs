//! Capacitated Dominating Set to ½-PDD: widgets, the reduction itself,
//! forward witnesses and backward extraction.

mod cds;
mod reduce;
mod widgets;

pub use cds::{
    assign_dominated, is_vertex_name, solve_cds_bruteforce, CdsError, CdsInstance, CdsSolution, CDS_BRUTE_LIMIT,
};
pub use reduce::{
    derive_params, extract_cds_solution, forward_witness, recover_reduction, reduce_cds, ReductionMap,
    ReductionParams, VertexWidgets,
};
pub use widgets::{
    build_quota, build_selector, quota_size, selector_size, WebBuilder, WidgetKind, WidgetSpec, MAX_REDUCED_SPECIES,
};

use crate::foodweb::InvalidInstance;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error("arithmetic overflow while deriving reduction parameters")]
    Overflow,
    #[error("reduced instance would exceed {0} species")]
    TooLarge(u64),
    #[error("bad widget parameters: {0}")]
    Parameter(String),
    #[error(transparent)]
    Cds(#[from] CdsError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("forward witness failed: {0}")]
    WitnessFailed(String),
    #[error("extraction failed: {0}")]
    ExtractionFailed(String),
    #[error("not a reduction output: {0}")]
    NotReduced(String),
    #[error(transparent)]
    Instance(#[from] InvalidInstance),
}
