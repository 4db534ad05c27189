//! Exact-arithmetic toolkit for finite quadratic modules and their Weil
//! representations, dimension formulas for Jacobi forms of degree one with
//! matrix index, and the associated theta/eta q-expansions.
//!
//! Everything is computed over exact domains: arbitrary-precision rationals
//! ([`rational::Rat`]), cyclotomic fields ([`cyclotomic::CycNum`]) and exact
//! integer linear algebra ([`intmat`]).  Floating point only ever appears in
//! display helpers and numeric spot-checks, never in a result that is asserted
//! exactly.
//!
//! Module map:
//! - [`cyclotomic`]: canonical-form arithmetic in Q(zeta_N)
//! - [`intmat`]: integer matrices, Bareiss determinants, Smith normal form
//! - [`matrix`]: dense matrices over cyclotomic numbers, exact kernels
//! - [`gram`]: half-integral index matrices and their discriminant modules
//! - [`fqm`]: finite quadratic modules, Gauss sums, subgroup machinery
//! - [`weil`]: Weil representation matrices, invariants, eigenspaces
//! - [`dims`]: dimension formulas and Hilbert-Poincare data
//! - [`qseries`]: truncated exact q-expansions (theta, eta, explicit forms)
//! - [`check`]: the named verification batteries driven by the CLI

pub mod check;
pub mod cyclotomic;
pub mod dims;
pub mod error;
pub mod fqm;
pub mod gram;
pub mod intmat;
pub mod matrix;
pub(crate) mod par;
pub mod qseries;
pub mod rational;
pub mod weil;

pub use error::{Error, Result};
