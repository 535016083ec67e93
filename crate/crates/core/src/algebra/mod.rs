//! Exact arithmetic: rationals, sparse Laurent polynomials in `x`, the truncated
//! rings `R[t]/(t^n)` over them, derivations, and ring automorphisms.

mod auto;
mod laurent;
pub mod rational;
mod trunc;

pub use auto::TruncAuto;
pub use laurent::{Derivation, LaurentPoly};
pub use rational::Rational;
pub use trunc::{trunc_arith, TruncElem, TruncOp};
