//! Exact arithmetic: sparse integer polynomials, unreduced rational functions,
//! Gaussian-dyadic numbers and modular fingerprints.

pub mod elem;
pub mod gauss;
pub mod modular;
pub mod poly;
pub mod ratfunc;

pub use elem::{Elem, Ground};
pub use gauss::GaussDyadic;
pub use modular::{to_gf5, ModMap};
pub use poly::{poly_arith, ArithKind, MonomialPoly};
pub use ratfunc::{ratfunc_eq, RatFunc};
