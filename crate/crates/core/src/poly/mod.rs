//! Exact and randomized polynomial semantics used as ground truth.

mod oracle;
mod semiring;
mod sparse;

pub use oracle::{
    equiv_exact, equiv_random, eval_abp_nodes, eval_gates, eval_semiring, expand_abp_nodes, expand_gates,
    expand_to_poly, monomial_cap, shared_vars, OracleError, PolySource, Verdict, DEFAULT_MONOMIAL_CAP,
};
pub use semiring::{self_test, verify_semiring_laws, Boolean, Integers, ModPrime, Naturals, Semiring};
pub use sparse::{Monomial, SparsePoly};
