//! Primes, Dirichlet polynomials over prime windows, and Mertens-type sums.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sum::neumaier;
#[allow(unused_imports)] // std float methods take precedence when std is linked
use num_traits::Float;

/// Sieve limit guard; `T^0.3` windows stay well below it at desk scale.
pub const SIEVE_LIMIT: u64 = 1 << 32;
/// Cap on the number of primes in a default window.
pub const DEFAULT_PRIME_CAP: usize = 10_000_000;

/// All primes `<= limit`; empty for `limit < 2`. Odd-only Eratosthenes.
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    // index i stands for 2i + 1
    let half = ((limit - 1) / 2 + 1) as usize;
    let mut composite = vec![false; half];
    composite[0] = true;
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = Vec::with_capacity(half / 8 + 1);
    out.push(2);
    out.extend(
        composite
            .iter()
            .enumerate()
            .filter(|(_, c)| !**c)
            .map(|(i, _)| 2 * i as u64 + 1),
    );
    out
}

/// The primes in `(lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PrimeWindow {
    lo: f64,
    hi: f64,
    #[cfg_attr(feature = "serde", serde(skip))]
    primes: Vec<u64>,
}

impl PrimeWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::domain("PrimeWindow", "0 <= lo < hi < inf"));
        }
        if hi >= SIEVE_LIMIT as f64 {
            return Err(Error::Unsupported {
                op: "PrimeWindow",
                reason: alloc::format!("hi = {hi:e} exceeds the sieve limit {SIEVE_LIMIT}"),
            });
        }
        let primes = sieve_primes(libm::floor(hi) as u64)
            .into_iter()
            .filter(|&p| p as f64 > lo)
            .collect();
        Ok(PrimeWindow { lo, hi, primes })
    }

    /// `(log T, T^0.3]`, shrunk if needed to hold at most
    /// `DEFAULT_PRIME_CAP` primes.
    pub fn default_for(t: f64) -> Result<Self> {
        if !(t >= 10.0 && t.is_finite()) {
            return Err(Error::domain("PrimeWindow::default_for", "T >= 10"));
        }
        let lo = t.ln();
        let hi = libm::pow(t, 0.3).max(lo + 1.0);
        let mut w = PrimeWindow::new(lo, hi)?;
        if w.primes.len() > DEFAULT_PRIME_CAP {
            w.primes.truncate(DEFAULT_PRIME_CAP);
            w.hi = *w.primes.last().unwrap_or(&0) as f64;
        }
        Ok(w)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
}

/// `P(t) = Σ_{p in window} p^{-1/2 - it}`.
pub fn dirichlet_poly(t: f64, window: &PrimeWindow) -> Complex64 {
    let mut re = Vec::with_capacity(window.len());
    let mut im = Vec::with_capacity(window.len());
    for &p in window.primes() {
        let lp = (p as f64).ln();
        let amp = 1.0 / (p as f64).sqrt();
        let (s, c) = (t * lp).sin_cos();
        re.push(amp * c);
        im.push(-amp * s);
    }
    Complex64::new(neumaier(re), neumaier(im))
}

/// `Σ_{p in window} 1/p`.
pub fn mertens_l(window: &PrimeWindow) -> f64 {
    neumaier(window.primes().iter().map(|&p| 1.0 / p as f64))
}

/// `μ_α = Σ_{p in window} cos(α log p) / p`.
pub fn mu_alpha(window: &PrimeWindow, alpha: f64) -> f64 {
    neumaier(
        window
            .primes()
            .iter()
            .map(|&p| (alpha * (p as f64).ln()).cos() / p as f64),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn small_sieves() {
        assert_eq!(sieve_primes(10), [2, 3, 5, 7]);
        assert!(sieve_primes(1).is_empty());
        assert_eq!(sieve_primes(2), [2]);
        assert_eq!(sieve_primes(3), [2, 3]);
        for limit in 0..400 {
            let expect: Vec<u64> = (0..=limit).filter(|&n| trial_division(n)).collect();
            assert_eq!(sieve_primes(limit), expect, "limit {limit}");
        }
        assert_eq!(sieve_primes(100).len(), 25);
    }

    #[test]
    fn four_term_window() {
        let w = PrimeWindow::new(1.0, 10.0).unwrap();
        let l = mertens_l(&w);
        assert!((l - (0.5 + 1.0 / 3.0 + 0.2 + 1.0 / 7.0)).abs() < 1e-15);
        assert_eq!(mu_alpha(&w, 0.0), l);
    }

    #[test]
    fn window_excludes_lower_end() {
        let w = PrimeWindow::new(2.0, 7.0).unwrap();
        assert_eq!(w.primes(), [3, 5, 7]);
        assert!(PrimeWindow::new(5.0, 5.0).is_err());
    }

    #[test]
    fn empty_window_polynomial() {
        let w = PrimeWindow::new(24.0, 28.0).unwrap();
        assert!(w.is_empty());
        assert_eq!(dirichlet_poly(3.0, &w), Complex64::new(0.0, 0.0));
    }
}
