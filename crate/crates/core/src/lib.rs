//! Numerical core for diagonal Bergman and Szegő kernels of tube domains
//! `Im z2 > f(Im z1)` in C² over a flat convex profile `f(x) = x^{2m} g(x)`.
//!
//! Builds without `std` (with `alloc`) when default features are disabled.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

extern crate alloc;

pub mod asymptotics;
pub mod blowup;
pub mod domain;
pub mod experiments;
pub mod error;
pub mod math;
pub mod quadrature;
pub mod roots;

pub use error::{Error, Result};
