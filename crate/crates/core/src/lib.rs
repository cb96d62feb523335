//! Scaled complex-number structures and the lattice gauge machinery built on them.
//!
//! A scaled structure is a copy of the complex field whose values are read
//! with a positive real factor `r` relative to a reference structure. The
//! multiplicative operations are compensated (`×/r`, `r÷`) so the field axioms
//! hold in every structure. Attaching one structure to each lattice site and
//! letting neighbouring structures differ by `exp(A_μ(x)Δ)` introduces a real
//! gauge field `A`, which then enters covariant derivatives, transported
//! integrals, scaled Hilbert spaces and Abelian / SU(2) gauge theories.
//!
//! Every algebraic identity in the crate is exposed as a checkable quantity so
//! it can be verified numerically (see the `scaledgauge` CLI).

pub mod convergence;
pub mod error;
pub mod field_calculus;
pub mod gauge_field;
pub mod gauge_theory;
pub mod lattice;
pub mod rng;
pub mod scaled_hilbert;
pub mod scaled_numbers;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// A plain complex number value.
pub type ComplexValue = Complex64;
