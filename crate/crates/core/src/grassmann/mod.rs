//! Lattices in V_h = (F_q[u]/u^h)^d, Schubert membership via elementary
//! divisors, Pluecker vectors with the loop-rotation weight grading, and the
//! derivation loci cut out on them.

mod coweight;
mod lattice;
mod slocus;
mod wedge;

pub use coweight::Coweight;
pub use lattice::{enumerate_subspaces, enumerate_ustable_lattices, Lattice};
pub use slocus::{
    derivation_act_wedge, eigenvector_check, s_locus_check, s_locus_check_full,
    s_locus_equation_d3, s_locus_weight_flag, stabilization_check, DerivationData,
};
pub use wedge::WedgeVector;

use crate::ring::RingError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GrassmannError {
    /// A coweight entry left the interval [0, h].
    OutOfRange(String),
    /// A lattice had the wrong dimension or was not u-stable.
    RankMismatch(String),
    Ring(RingError),
}

impl From<RingError> for GrassmannError {
    fn from(e: RingError) -> Self {
        GrassmannError::Ring(e)
    }
}

impl std::fmt::Display for GrassmannError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GrassmannError::OutOfRange(s) => write!(f, "out of range: {s}"),
            GrassmannError::RankMismatch(s) => write!(f, "rank mismatch: {s}"),
            GrassmannError::Ring(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for GrassmannError {}
