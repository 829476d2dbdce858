//! Real special functions: log-Gamma, digamma, polygamma, Barnes G at the
//! integers and Gaussian central moments.
//!
//! Every kernel shifts its argument upward with the functional recurrence
//! until it reaches `series_cutoff`, then switches to the Stirling-type
//! asymptotic series. The combinations used by the moment formulas
//! (`log_gamma_combo`, `digamma_diff`) are evaluated without forming the
//! individual large values, so the sums over `j = 1..N` keep absolute
//! accuracy near the double-precision floor.

use crate::error::{Error, Result};
#[allow(unused_imports)] // std float methods take precedence when std is linked
use num_traits::Float;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `B_{2k}` for `k = 1..=15`.
pub(crate) const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// Accuracy contract of the scalar kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AccuracyBudget {
    pub abs_tol: f64,
    /// Arguments at or above this value go straight to the asymptotic series.
    pub series_cutoff: f64,
}

impl Default for AccuracyBudget {
    fn default() -> Self {
        AccuracyBudget {
            abs_tol: 1e-12,
            series_cutoff: 12.0,
        }
    }
}

impl AccuracyBudget {
    pub fn new(abs_tol: f64, series_cutoff: f64) -> Result<Self> {
        if !(abs_tol > 0.0) {
            return Err(Error::domain("AccuracyBudget", "abs_tol > 0"));
        }
        if !(series_cutoff >= 8.0) {
            return Err(Error::domain("AccuracyBudget", "series_cutoff >= 8"));
        }
        Ok(AccuracyBudget {
            abs_tol,
            series_cutoff,
        })
    }
}

fn check_positive(op: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, "argument must be a finite positive real"))
    }
}

/// Stirling series for `log Γ(x) - [(x - 1/2) ln x - x + ln(2π)/2]`, valid for large `x`.
fn stirling_tail(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut pow = inv;
    let mut sum = 0.0;
    for (i, b) in BERNOULLI_EVEN.iter().take(10).enumerate() {
        let k = (i + 1) as f64;
        let term = b / (2.0 * k * (2.0 * k - 1.0)) * pow;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        pow *= inv2;
    }
    sum
}

/// `log Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_positive("log_gamma", x)?;
    Ok(log_gamma_with(x, &AccuracyBudget::default()))
}

pub(crate) fn log_gamma_with(x: f64, budget: &AccuracyBudget) -> f64 {
    if x.fract() == 0.0 && x <= 30.0 {
        // exact factorial
        let fact = (2..x as u64).fold(1.0, |acc, i| acc * i as f64);
        return fact.ln();
    }
    let mut x = x;
    let mut prod = 1.0;
    let mut log_prod = 0.0;
    while x < budget.series_cutoff {
        prod *= x;
        if prod > 1e280 {
            log_prod += prod.ln();
            prod = 1.0;
        }
        x += 1.0;
    }
    log_prod += prod.ln();
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + stirling_tail(x) - log_prod
}

/// `log Γ(j) + log Γ(j + s) - 2 log Γ(j + s/2)` without forming the three
/// large terms. Requires `j > 0` and `j + s > 0`.
pub(crate) fn log_gamma_combo(j: f64, s: f64, budget: &AccuracyBudget) -> f64 {
    let half = 0.5 * s;
    let target = budget.series_cutoff.max(8.0 * s.abs());
    let mut x = j;
    let mut shift = 0.0;
    // log Γ(x) + log Γ(x+s) - 2 log Γ(x+s/2) changes by
    // -log((x)(x+s)/(x+s/2)^2) = -log1p(-(s/2)^2/(x+s/2)^2) per unit step.
    while x < target {
        let r = half / (x + half);
        shift += (-r * r).ln_1p();
        x += 1.0;
    }
    log_gamma_combo_series(x, s) - shift
}

// Large-x form of `log_gamma_combo`: the closed-form main part expanded in
// powers of s/x, so no O(s) terms cancel down to the O(s²/x) result.
fn log_gamma_combo_series(x: f64, s: f64) -> f64 {
    // p-th coefficient of x^{-p}:
    // (-1)^p s^{p+1} (1 - 2^{-p})/(p+1) - (-1)^p s^p [(s - 1/2) - (s - 1) 2^{-p}]/p
    let mut sum = 0.0;
    let mut s_pow = s; // s^p
    let mut x_pow = 1.0 / x; // x^{-p}
    let mut sign = -1.0; // (-1)^p
    let mut two_pow = 0.5; // 2^{-p}
    for p in 1..=60 {
        let pf = p as f64;
        let c = sign * s_pow * (s * (1.0 - two_pow) / (pf + 1.0) - ((s - 0.5) - (s - 1.0) * two_pow) / pf);
        let term = c * x_pow;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        s_pow *= s;
        x_pow /= x;
        sign = -sign;
        two_pow *= 0.5;
    }
    let half = 0.5 * s;
    sum + stirling_tail(x) + stirling_tail(x + s) - 2.0 * stirling_tail(x + half)
}

/// Asymptotic digamma for large `x`.
fn digamma_asymptotic(x: f64) -> f64 {
    let inv2 = 1.0 / (x * x);
    let mut pow = inv2;
    let mut sum = 0.0;
    for (i, b) in BERNOULLI_EVEN.iter().take(10).enumerate() {
        let k = (i + 1) as f64;
        let term = b / (2.0 * k) * pow;
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
        pow *= inv2;
    }
    x.ln() - 0.5 / x - sum
}

/// Digamma `ψ(x) = Γ'(x)/Γ(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive("digamma", x)?;
    Ok(digamma_with(x, &AccuracyBudget::default()))
}

pub(crate) fn digamma_with(x: f64, budget: &AccuracyBudget) -> f64 {
    let mut x = x;
    let mut acc = 0.0;
    while x < budget.series_cutoff {
        acc += 1.0 / x;
        x += 1.0;
    }
    digamma_asymptotic(x) - acc
}

/// `ψ(x + h) - ψ(x)` for `x > 0`, `x + h > 0`, accurate when the two values
/// are close.
pub(crate) fn digamma_diff(x: f64, h: f64, budget: &AccuracyBudget) -> f64 {
    let mut a = x;
    let mut b = x + h;
    let mut acc = 0.0;
    while a.min(b) < budget.series_cutoff {
        acc += 1.0 / a - 1.0 / b;
        a += 1.0;
        b += 1.0;
    }
    // ψ(b) - ψ(a) with b = a + h.
    let inv_a2 = 1.0 / (a * a);
    let inv_b2 = 1.0 / (b * b);
    let mut pa = inv_a2;
    let mut pb = inv_b2;
    let mut series = 0.0;
    for (i, c) in BERNOULLI_EVEN.iter().take(10).enumerate() {
        let k = (i + 1) as f64;
        series += c / (2.0 * k) * (pb - pa);
        pa *= inv_a2;
        pb *= inv_b2;
    }
    (h / a).ln_1p() - 0.5 * (1.0 / b - 1.0 / a) - series + acc
}

fn factorial(m: u32) -> f64 {
    (1..=m).fold(1.0, |acc, i| acc * i as f64)
}

/// Asymptotic polygamma of order `m >= 1` for large `x`.
fn polygamma_asymptotic(m: u32, x: f64) -> f64 {
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    let mf = m as f64;
    let inv = 1.0 / x;
    // (m-1)!/x^m + m!/(2 x^{m+1}) + Σ B_2k (2k+m-1)!/((2k)! x^{2k+m})
    let mut lead = factorial(m - 1) * inv.powi(m as i32);
    lead += 0.5 * factorial(m) * inv.powi(m as i32 + 1);
    let mut sum = 0.0;
    // ratio (2k+m-1)!/(2k)! built incrementally
    let mut ratio = factorial(m + 1) / 2.0; // k = 1: (m+1)!/2!
    let mut pow = inv.powi(m as i32 + 2);
    for (i, b) in BERNOULLI_EVEN.iter().enumerate() {
        let k = (i + 1) as f64;
        let term = b * ratio * pow;
        sum += term;
        if term.abs() < 1e-17 * (lead + sum).abs() {
            break;
        }
        // advance k -> k+1: multiply by (2k+m)(2k+m+1)/((2k+1)(2k+2))
        ratio *= (2.0 * k + mf) * (2.0 * k + mf + 1.0) / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
        pow *= inv * inv;
    }
    sign * (lead + sum)
}

/// Polygamma `ψ^{(m)}(x)` for `m >= 1`, `x > 0`.
pub fn polygamma(m: u32, x: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("polygamma", "order m >= 1 (use digamma for m = 0)"));
    }
    if m > 20 {
        return Err(Error::domain("polygamma", "order m <= 20"));
    }
    check_positive("polygamma", x)?;
    Ok(polygamma_with(m, x, &AccuracyBudget::default()))
}

pub(crate) fn polygamma_with(m: u32, x: f64, budget: &AccuracyBudget) -> f64 {
    if m == 0 {
        return digamma_with(x, budget);
    }
    let target = budget.series_cutoff + 2.0 * m as f64;
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    let mf = factorial(m);
    let mut x = x;
    let mut acc = 0.0;
    // ψ^{(m)}(x) = ψ^{(m)}(x+1) + (-1)^{m+1} m!/x^{m+1}
    while x < target {
        acc += sign * mf / x.powi(m as i32 + 1);
        x += 1.0;
    }
    polygamma_asymptotic(m, x) + acc
}

/// `log G(n)` for the Barnes G-function at a positive integer, from
/// `G(n + 1) = Γ(n) G(n)`, `G(1) = 1`.
pub fn log_barnes_g(n: u64) -> Result<f64> {
    if n < 1 {
        return Err(Error::domain("log_barnes_g", "n >= 1"));
    }
    let budget = AccuracyBudget::default();
    Ok((1..n).map(|i| log_gamma_with(i as f64, &budget)).sum())
}

/// `E[X^n]` for `X ~ N(0, variance)`: zero for odd `n`, `(n-1)!! v^{n/2}` otherwise.
pub fn gaussian_central_moment(n: u32, variance: f64) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    let mut acc = 1.0;
    let mut i = 1;
    while i < n {
        acc *= i as f64 * variance;
        i += 2;
    }
    acc
}

/// `(n-1)!!` for even `n`, zero for odd `n`.
pub fn gaussian_standardized_moment(n: u32) -> f64 {
    gaussian_central_moment(n, 1.0)
}
