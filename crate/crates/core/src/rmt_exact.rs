//! Closed-form moments of `log|Z|` over `U(N)`, plain and tilted by `|Z|^{2k}`.
//!
//! The Haar moments of `|Z|` are
//! `M_N(s) = Π_{j=1}^N Γ(j) Γ(j+s) / Γ(j+s/2)^2`, so the tilted law of
//! `log|Z|` has cumulant generating function `x ↦ log M_N(2k+x) - log M_N(2k)`
//! and its cumulants are sums of polygamma values. Everything is kept in
//! log-space; `M_N(2k)` itself overflows long before `N = 10^4, k = 3`.

use alloc::vec::Vec;

use crate::bell;
use crate::error::{Error, Result};
use crate::special::{self, AccuracyBudget};
use crate::sum::neumaier;
#[allow(unused_imports)] // std float methods take precedence when std is linked
use num_traits::Float;

/// Parameters of one exact tilted-moment computation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TiltSpec {
    /// Matrix size `N`.
    pub n: u64,
    /// Tilt exponent: the weight is `|Z|^{2k}`.
    pub k: f64,
    /// Highest central moment order.
    pub n_max: usize,
}

impl TiltSpec {
    pub fn new(n: u64, k: f64, n_max: usize) -> Result<Self> {
        let spec = TiltSpec { n, k, n_max };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_size("TiltSpec", self.n)?;
        check_tilt("TiltSpec", self.k)?;
        if self.n_max > bell::MAX_ORDER {
            return Err(Error::Guard {
                op: "TiltSpec",
                limit: bell::MAX_ORDER,
                got: self.n_max,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExactMomentReport {
    pub spec: TiltSpec,
    /// `log M_N(2k)`, the log of the tilt normalizer.
    pub log_mn: f64,
    /// Weighted mean of `log|Z|`.
    pub mu_weighted: f64,
    /// Weighted central moments, orders `0..=n_max`.
    pub central_moments: Vec<f64>,
    /// `Σ_j f_j^{(i)}(0)` for `i = 1..=n_max`: the tilted cumulants.
    pub cumulant_sums: Vec<f64>,
    /// `central_moments[n] / central_moments[2]^{n/2}`.
    pub standardized: Vec<f64>,
}

fn check_size(op: &'static str, n: u64) -> Result<()> {
    if n < 1 {
        Err(Error::domain(op, "matrix size N >= 1"))
    } else {
        Ok(())
    }
}

fn check_tilt(op: &'static str, k: f64) -> Result<()> {
    if k >= 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, "tilt exponent k >= 0"))
    }
}

/// `log M_N(s) = Σ_{j=1}^N [log Γ(j) + log Γ(j+s) - 2 log Γ(j+s/2)]`.
pub fn log_moment_mn(n: u64, s: f64) -> Result<f64> {
    check_size("log_moment_mn", n)?;
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::domain("log_moment_mn", "s >= 0"));
    }
    let b = AccuracyBudget::default();
    Ok(neumaier((1..=n).map(|j| special::log_gamma_combo(j as f64, s, &b))))
}

/// Leading asymptotic `k^2 log N + 2 log G(1+k) - log G(1+2k)` of `log M_N(2k)`;
/// integer `k` only.
pub fn asymptotic_mn(n: u64, k: f64) -> Result<f64> {
    check_size("asymptotic_mn", n)?;
    check_tilt("asymptotic_mn", k)?;
    if k.fract() != 0.0 {
        return Err(Error::Unsupported {
            op: "asymptotic_mn",
            reason: "Barnes G is only evaluated at integers; use log_moment_mn for real k".into(),
        });
    }
    let ki = k as u64;
    Ok(k * k * (n as f64).ln() + 2.0 * special::log_barnes_g(1 + ki)? - special::log_barnes_g(1 + 2 * ki)?)
}

/// Haar cumulants `Q_1..=Q_{j_max}` of `log|Z|`:
/// `Q_m = (1 - 2^{1-m}) Σ_{i=1}^N ψ^{(m-1)}(i)`.
pub fn cumulants(n: u64, j_max: usize) -> Result<Vec<f64>> {
    check_size("cumulants", n)?;
    if j_max < 1 || j_max > bell::MAX_ORDER {
        return Err(Error::Guard {
            op: "cumulants",
            limit: bell::MAX_ORDER,
            got: j_max,
        });
    }
    let b = AccuracyBudget::default();
    let mut out = Vec::with_capacity(j_max);
    out.push(0.0);
    for m in 2..=j_max as u32 {
        let factor = 1.0 - 2f64.powi(1 - m as i32);
        let s = neumaier((1..=n).map(|i| special::polygamma_with(m - 1, i as f64, &b)));
        out.push(factor * s);
    }
    Ok(out)
}

/// Weighted mean of `log|Z|` under `|Z|^{2k} dHaar`:
/// `Σ_{j=1}^N [ψ(j+2k) - ψ(j+k)]`.
pub fn weighted_mean(n: u64, k: f64) -> Result<f64> {
    check_size("weighted_mean", n)?;
    check_tilt("weighted_mean", k)?;
    let b = AccuracyBudget::default();
    Ok(neumaier((1..=n).map(|j| special::digamma_diff(j as f64 + k, k, &b))))
}

/// `Σ_{j=1}^N f_j^{(i)}(0) = Σ_j [ψ^{(i-1)}(j+2k) - 2^{1-i} ψ^{(i-1)}(j+k)]`.
pub fn fj_derivative_sum(n: u64, k: f64, i: u32) -> Result<f64> {
    check_size("fj_derivative_sum", n)?;
    check_tilt("fj_derivative_sum", k)?;
    if i < 1 || i as usize > bell::MAX_ORDER {
        return Err(Error::domain("fj_derivative_sum", "1 <= i <= 12"));
    }
    if i == 1 {
        return weighted_mean(n, k);
    }
    let b = AccuracyBudget::default();
    let half_pow = 2f64.powi(1 - i as i32);
    Ok(neumaier((1..=n).map(|j| {
        let j = j as f64;
        special::polygamma_with(i - 1, j + 2.0 * k, &b) - half_pow * special::polygamma_with(i - 1, j + k, &b)
    })))
}

/// Cumulant generating function of the tilted law of `log|Z|`:
/// `log M_N(2k + x) - log M_N(2k)`, defined for `2k + x > -1`.
pub fn tilted_log_mgf(n: u64, k: f64, x: f64) -> Result<f64> {
    check_size("tilted_log_mgf", n)?;
    check_tilt("tilted_log_mgf", k)?;
    let s = 2.0 * k + x;
    if !(s > -1.0) {
        return Err(Error::domain("tilted_log_mgf", "2k + x > -1"));
    }
    let b = AccuracyBudget::default();
    Ok(neumaier((1..=n).map(|j| {
        let j = j as f64;
        special::log_gamma_combo(j, s, &b) - special::log_gamma_combo(j, 2.0 * k, &b)
    })))
}

/// Weighted central moments of `log|Z|` through the partition expansion,
/// with `c_1 = 0` (centering at the weighted mean) and
/// `c_i = Σ_j f_j^{(i)}(0) / i!` for `i >= 2`.
pub fn weighted_central_moments(spec: &TiltSpec) -> Result<ExactMomentReport> {
    spec.validate()?;
    let log_mn = log_moment_mn(spec.n, 2.0 * spec.k)?;
    let mu = weighted_mean(spec.n, spec.k)?;
    let mut cumulant_sums = Vec::with_capacity(spec.n_max);
    for i in 1..=spec.n_max as u32 {
        cumulant_sums.push(if i == 1 { mu } else { fj_derivative_sum(spec.n, spec.k, i)? });
    }
    let central_moments = central_moments_from_cumulants(&cumulant_sums, spec.n_max)?;
    let standardized = standardize(&central_moments);
    Ok(ExactMomentReport {
        spec: *spec,
        log_mn,
        mu_weighted: mu,
        central_moments,
        cumulant_sums,
        standardized,
    })
}

/// Central moments `0..=n_max` from cumulants `κ_1, κ_2, ..`; `κ_1` is ignored.
pub fn central_moments_from_cumulants(cumulants: &[f64], n_max: usize) -> Result<Vec<f64>> {
    let mut coeffs = Vec::with_capacity(cumulants.len());
    let mut fact = 1.0;
    for (idx, &kappa) in cumulants.iter().enumerate() {
        let i = idx + 1;
        fact *= i as f64;
        coeffs.push(if i == 1 { 0.0 } else { kappa / fact });
    }
    (0..=n_max).map(|order| bell::exp_derivative(&coeffs, order)).collect()
}

pub(crate) fn standardize(central: &[f64]) -> Vec<f64> {
    let var = central.get(2).copied().unwrap_or(f64::NAN);
    central
        .iter()
        .enumerate()
        .map(|(n, &m)| match n {
            0 => 1.0,
            1 => 0.0,
            _ => m / var.powf(n as f64 / 2.0),
        })
        .collect()
}
