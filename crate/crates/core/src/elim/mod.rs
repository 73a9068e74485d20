//! The symbolic equation family of the chart, its Type I/II substitution
//! engine with degree control, leading-term degenerations, the polynomial
//! congruence counting oracle, and exact fiber point counts.

mod abcd;
mod bounds;
mod fiber;
mod plan;
mod poly;
mod system;

pub use abcd::{abcd_count, abcd_pack, AbcdCount, AbcdShape};
pub use bounds::{bound_formula, claim_parts, verify_claim_inequalities};
pub use fiber::{brute_force_count, fiber_count, FiberCount};
pub use plan::{
    apply_substitutions, default_plan, remaining_variable_count, ExprTable, ReducedSystem,
    SubstitutionPlan,
};
pub use poly::{leading_terms, Monomial, Poly, Var, VarKind};
pub use system::{build_equations, Delta, Equation, GradedPolySystem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElimError {
    /// A substitution plan tried to solve variables in a circular order.
    CyclicDependency(String),
    /// Enumeration would exceed the configured budget.
    BudgetExceeded(String),
    /// Parameters outside the supported ranges.
    BadParams(String),
}

impl std::fmt::Display for ElimError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ElimError::CyclicDependency(s) => write!(f, "cyclic dependency: {s}"),
            ElimError::BudgetExceeded(s) => write!(f, "budget exceeded: {s}"),
            ElimError::BadParams(s) => write!(f, "bad parameters: {s}"),
        }
    }
}

impl std::error::Error for ElimError {}
