//! Exact mod-p computation kernels: truncated power series over small finite
//! fields, lattices in truncated affine Grassmannians, Frobenius/monodromy
//! pairs with their stability conditions, graded elimination for the chart
//! equations, and small finite-group character checks.
//!
//! Everything is exact: no floats, explicit precision on every series, and
//! congruence checks that refuse to answer when the precision cannot support
//! them.

pub mod bk;
pub mod chars;
pub mod elim;
pub mod grassmann;
pub mod ring;
pub mod util;
