//! Partition (complete Bell polynomial) expansion of derivatives of `exp(P)`.
//!
//! For `P(x) = Σ_i c_i x^i` the `n`-th derivative of `exp(P(x) - P(0))` at
//! zero is
//!
//! ```text
//!   Σ_{m_1 + 2 m_2 + ... + n m_n = n}  n! / (m_1! ... m_n!)  Π_i c_i^{m_i}
//! ```
//!
//! The tilted-moment formulas and the Gaussian exponent of the shifted moment
//! recipe both go through this one routine.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul};

use num_traits::{FromPrimitive, One, Zero};

use crate::error::{Error, Result};

/// Largest order supported; `12!` still fits comfortably in `u64`.
pub const MAX_ORDER: usize = 12;

/// All multiplicity vectors `(m_1, .., m_n)` with `Σ i m_i = n`.
pub fn partitions(n: usize) -> Result<Vec<Vec<u32>>> {
    if n > MAX_ORDER {
        return Err(Error::Guard {
            op: "partitions",
            limit: MAX_ORDER,
            got: n,
        });
    }
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    fill(n, n, &mut current, &mut out);
    Ok(out)
}

// Distribute `remaining` among parts of size <= `largest`.
fn fill(remaining: usize, largest: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if remaining == 0 {
        out.push(current.clone());
        return;
    }
    if largest == 0 {
        return;
    }
    let max_count = remaining / largest;
    for count in (0..=max_count).rev() {
        current[largest - 1] = count as u32;
        fill(remaining - count * largest, largest - 1, current, out);
    }
    current[largest - 1] = 0;
}

fn factorial_u64(n: u32) -> u64 {
    (1..=n as u64).product()
}

/// `n! / (m_1! ... m_n!)` with `n = Σ i m_i`, exact.
pub fn multinomial(multiplicities: &[u32]) -> u64 {
    let n: u32 = multiplicities
        .iter()
        .enumerate()
        .map(|(i, &m)| (i as u32 + 1) * m)
        .sum();
    let denom: u64 = multiplicities.iter().map(|&m| factorial_u64(m)).product();
    factorial_u64(n) / denom
}

/// `d^n/dx^n exp(P(x) - P(0))` at `x = 0`, where `coeffs[i - 1]` is the
/// Taylor coefficient `c_i = P^{(i)}(0) / i!`. Coefficients beyond the slice
/// are taken as zero.
pub fn exp_derivative<T>(coeffs: &[T], n: usize) -> Result<T>
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T> + FromPrimitive,
{
    let mut total = T::zero();
    for parts in partitions(n)? {
        let mut term = match T::from_u64(multinomial(&parts)) {
            Some(t) => t,
            None => return Err(Error::Numerical("multinomial not representable")),
        };
        let mut skip = false;
        for (i, &m) in parts.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let c = match coeffs.get(i) {
                Some(c) => c.clone(),
                None => {
                    skip = true;
                    break;
                }
            };
            for _ in 0..m {
                term = term * c.clone();
            }
        }
        if !skip {
            total = total + term;
        }
    }
    Ok(total)
}
