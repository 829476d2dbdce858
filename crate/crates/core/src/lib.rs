//! Numerical kernels for tilted statistics of `log|Z|` over the circular
//! unitary ensemble and of `log|ζ(1/2 + it)|`: exact moment formulas, CUE
//! sampling, importance-sampling estimators, zeta evaluation and the
//! shifted-moment recipe.
//!
//! `no_std` with `alloc`; float math goes through `libm`.

#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bell;
pub mod cue;
pub mod error;
pub mod estimator;
pub mod primes;
pub mod quad;
pub mod rmt_exact;
pub mod scan;
pub mod shift;
pub mod special;
pub mod sum;
pub mod zeta;

pub use error::{Error, Result};
