//! Finite combinatorics on the group side: Galois orbit counts of primitive
//! elements, the selection of torus parameters, and the rank check that
//! induced characters from maximal tori span the modular Grothendieck group
//! on p-regular classes.

mod group;
mod induction;
mod orbits;

pub use group::GroupTable;
pub use induction::{spanning_rank, SpanningReport};
pub use orbits::{enumerate_orbit_count, moebius_orbit_count, select_sequence, SelectedSequence};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CharsError {
    /// The auxiliary modulus violates its congruence or divisibility rules.
    BadModulus(String),
    /// Field towers beyond the supported table size.
    TooLarge(String),
}

impl std::fmt::Display for CharsError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CharsError::BadModulus(s) => write!(f, "bad modulus: {s}"),
            CharsError::TooLarge(s) => write!(f, "too large: {s}"),
        }
    }
}

impl std::error::Error for CharsError {}
