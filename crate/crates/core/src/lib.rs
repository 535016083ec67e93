//! Exact Čech calculus for primitive multiple schemes over the projective
//! line: truncated-ring automorphisms, cochains and their cohomology classes,
//! gluing cocycles, bundle extensions, and the closed-form surface layer.

pub mod algebra;
pub mod bundles;
pub mod error;

pub use error::{Error, Result};
pub mod cech;
pub mod linalg;
pub mod multischeme;
pub mod random;
pub mod selftest;
pub mod surface;
