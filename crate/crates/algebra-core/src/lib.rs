//! Generic computer algebra over recursively constructed rings.
//!
//! The crate is `no_std` (with `alloc`): rings are runtime parent handles
//! that can be stacked freely (integers, rationals, residue rings,
//! univariate and multivariate polynomials, fraction fields, finite fields,
//! number fields), and every element knows its parent. On top of the element
//! arithmetic sit dense and sparse polynomial kernels, generic dense matrix
//! algorithms, number-field ideal arithmetic, and certified ball arithmetic.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod ball;
pub mod dense;
pub mod error;
pub mod float;
pub mod ideal;
pub mod matrix;
pub mod numfield;
pub mod primes;
pub mod ring;
pub mod rng;
pub mod roots;
pub mod sparse;
pub mod sparse_gcd;
pub mod text;

pub use dense::DensePoly;
pub use error::{Error, Result};
pub use matrix::{DenseMatrix, DivisionStats, FFLUResult, KrylovBasis};
pub use ring::{Elem, Ring, RingHandle, RingKind};
