//! Circuit and branching-program transformations.
//!
//! Every pass returns its result together with a [`PassReport`] holding the
//! input and output statistics and one check per bound the pass promises.

mod boolean;
mod collapse;
mod depth4;
mod homogenize;
mod logdepth;
mod nosub;
mod pipeline;
mod polylog;
mod to_abp;
mod weakly_skew;

use thiserror::Error;

use crate::abp::{abp_stats, Abp, AbpError};
use crate::circuit::{circuit_stats, Circuit, GateId};
use crate::poly::OracleError;
use crate::report::ObjectStats;

pub use boolean::{reduce_boolean, truth_table, TruthTable, MAX_TRUTH_TABLE_VARS};
pub use collapse::{collapse_additions, collapse_additions_with, AdditionSemantics};
pub use depth4::{abp_to_depth4, abp_to_depth4_with, abp_to_depth_2delta, Depth4Mode};
pub use homogenize::{
    constant_size_check, homogenize, homogenize_components, homogenize_with, HomogenizeMode, HomogenizeOptions,
    Homogenized,
};
pub use logdepth::{abp_to_logdepth, logdepth_into};
pub use nosub::eliminate_subtractions;
pub use pipeline::{circuit_to_abp, reduce_to_depth4, run_pipeline, PipelineConfig, Target, Verify};
pub use polylog::{degree_layers, reduce_to_polylog, POLYLOG_DEPTH_CONSTANT};
pub use to_abp::{weakly_skew_to_abp, weakly_skew_to_multi_abp, MultiAbp};
pub use weakly_skew::to_weakly_skew;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PassError {
    #[error("{pass}: precondition violated: {reason}")]
    PreconditionViolated { pass: &'static str, reason: String },
    #[error("circuit is not weakly skew: multiplication gate {0} has no independent input")]
    NotWeaklySkew(GateId),
    #[error("addition gate {0} has an input that is neither a leaf nor a multiplication")]
    AddInputCondition(GateId),
    #[error("true degree {degree} exceeds the configured limit {limit}")]
    DegreeOverflow { degree: u64, limit: u64 },
    #[error("degree layer {layer} is not skew at gate {gate}")]
    LayerNotSkew { layer: u32, gate: GateId },
    #[error("depth parameter must be at least 2, got {0}")]
    InvalidDelta(usize),
    #[error("structure mismatch: {0}")]
    StructureMismatch(String),
    #[error(transparent)]
    Abp(#[from] AbpError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

pub(crate) fn precondition(pass: &'static str, reason: impl Into<String>) -> PassError {
    PassError::PreconditionViolated {
        pass,
        reason: reason.into(),
    }
}

pub(crate) fn cstats(c: &Circuit) -> ObjectStats {
    ObjectStats::Circuit(circuit_stats(c))
}

pub(crate) fn astats(g: &Abp) -> ObjectStats {
    ObjectStats::Abp(abp_stats(g))
}
