//! Frobenius/monodromy pairs (X, N) over F_q[[u]], the defining congruence
//! and its chart form, stratification by relative position, convolution
//! chains with the stability conditions at each level, explicit generator
//! families for the fiber components, genericity, the failure-of-monodromy
//! witness search, and the degeneration move between torus-fixed chains.

mod chain;
mod chart;
mod degeneration;
mod mv;
mod pair;
mod witness;

pub use chain::{
    check_a, check_b, conv_fiber_dim_formula, conv_fiber_enumerate, n0phi_matrix, ConvChain,
};
pub use chart::{
    chart_residual, chart_residual_zero, chart_to_pair, compare_chart_vs_pair, ChartCompare,
    ChartPoint,
};
pub use degeneration::{degeneration_family, extremal_check, DegenerationFamily};
pub use mv::{mv_generator_families, mv_membership, MvEntry, MvFamily};
pub use pair::{
    check_c, is_bk_point, monodromy_residual, solve_monodromy, stratum, BkPair, StratumDescriptor,
};
pub use witness::{failure_witness, genericity_check, GenericityFlavor, Witness, WitnessFamily};

use crate::grassmann::GrassmannError;
use crate::ring::RingError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BkError {
    /// Relative position leaves the allowed cone.
    NotInCone(String),
    /// A level-(i-1) stability condition failed before a level-i check.
    PreconditionFailed(String),
    /// Enumeration would exceed the configured budget.
    BudgetExceeded(String),
    /// No witness in the allowed families despite genericity.
    NoWitnessFound,
    /// The degeneration move does not apply at the requested position.
    MoveNotApplicable(String),
    /// Unsupported coweight for the generator catalog.
    UnsupportedDelta(String),
    Ring(RingError),
    Grassmann(GrassmannError),
}

impl From<RingError> for BkError {
    fn from(e: RingError) -> Self {
        BkError::Ring(e)
    }
}

impl From<GrassmannError> for BkError {
    fn from(e: GrassmannError) -> Self {
        BkError::Grassmann(e)
    }
}

impl std::fmt::Display for BkError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BkError::NotInCone(s) => write!(f, "not in the allowed cone: {s}"),
            BkError::PreconditionFailed(s) => write!(f, "precondition failed: {s}"),
            BkError::BudgetExceeded(s) => write!(f, "budget exceeded: {s}"),
            BkError::NoWitnessFound => write!(f, "no witness found"),
            BkError::MoveNotApplicable(s) => write!(f, "move not applicable: {s}"),
            BkError::UnsupportedDelta(s) => write!(f, "unsupported coweight: {s}"),
            BkError::Ring(e) => write!(f, "{e}"),
            BkError::Grassmann(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for BkError {}
