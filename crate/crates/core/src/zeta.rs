//! The Riemann zeta function near the critical line.
//!
//! Two evaluators:
//! - Euler–Maclaurin for arbitrary complex `s != 1`, cost `O(|s|)`;
//! - Riemann–Siegel with corrections `C_0..C_4` for `Z(t)` on the line,
//!   cost `O(√t)`.
//!
//! `ζ(1/2 + it) = e^{-iθ(t)} Z(t)`. Derivatives in `s` come from the Cauchy
//! integral on a small circle, with all nodes sharing one batched
//! Euler–Maclaurin main sum.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::BERNOULLI_EVEN;
#[allow(unused_imports)] // std float methods take precedence when std is linked
use num_traits::Float;

/// Euler–Maclaurin correction terms.
const EM_TERMS: usize = 25;
/// Default largest `t` accepted on the critical line.
pub const DEFAULT_CEILING: f64 = 1e8;
/// Largest `t` where the Euler–Maclaurin path is used by default.
pub const DEFAULT_EM_LIMIT: f64 = 1e3;
/// Largest `t` for derivatives; the circle nodes go through Euler–Maclaurin.
pub const DERIVATIVE_CEILING: f64 = 1e7;
pub const MAX_DERIVATIVE: u32 = 4;
pub const CAUCHY_RADIUS: f64 = 1e-2;
pub const CAUCHY_NODES: usize = 64;
// Taylor order of `n^{-s}` around the circle center.
const MOMENT_ORDER: usize = 12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `B_{2k} / (2k)!` for `k = 1..=EM_TERMS`.
fn em_coefficients() -> [f64; EM_TERMS] {
    let mut out = [0.0; EM_TERMS];
    let mut fact = 1.0;
    for (i, slot) in out.iter_mut().enumerate() {
        let k = i + 1;
        fact *= ((2 * k - 1) * (2 * k)) as f64;
        *slot = if k <= BERNOULLI_EVEN.len() {
            BERNOULLI_EVEN[i] / fact
        } else {
            // B_{2k}/(2k)! = (-1)^{k+1} 2 ζ(2k) / (2π)^{2k}
            let zeta_2k = 1.0 + libm::pow(2.0, -2.0 * k as f64) + libm::pow(3.0, -2.0 * k as f64);
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sign * 2.0 * zeta_2k / libm::pow(2.0 * PI, 2.0 * k as f64)
        };
    }
    out
}

fn em_cutoff(s: Complex64) -> usize {
    libm::ceil((s.norm() + 2.0 * EM_TERMS as f64) / PI) as usize + 5
}

/// `n^{1-s}/(s-1) + n^{-s}/2 + Σ_k B_{2k}/(2k)! (s)_{2k-1} n^{-s-2k+1}`.
fn em_tail(s: Complex64, n: usize, coeffs: &[f64; EM_TERMS]) -> Complex64 {
    let nf = n as f64;
    let ln_n = nf.ln();
    let n_pow = (-s * ln_n).exp();
    let mut total = n_pow * nf / (s - 1.0) + n_pow * 0.5;
    let inv_n2 = 1.0 / (nf * nf);
    let mut rising = s;
    let mut power = n_pow / nf;
    for (k, &b) in coeffs.iter().enumerate() {
        let k = k + 1;
        total += rising * power * b;
        rising *= (s + (2 * k - 1) as f64) * (s + (2 * k) as f64);
        power *= inv_n2;
    }
    total
}

/// `ζ(s)` by Euler–Maclaurin summation, `s != 1`.
pub fn euler_maclaurin(s: Complex64) -> Result<Complex64> {
    if (s - 1.0).norm() < 1e-12 {
        return Err(Error::domain("euler_maclaurin", "s != 1"));
    }
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::domain("euler_maclaurin", "finite s"));
    }
    let n = em_cutoff(s);
    let coeffs = em_coefficients();
    let mut head = c(0.0, 0.0);
    for j in 1..n {
        head += (-s * (j as f64).ln()).exp();
    }
    Ok(head + em_tail(s, n, &coeffs))
}

/// `θ(t)` of the Riemann–Siegel function, asymptotic series; accurate
/// to double precision for `t >= 10`.
pub fn theta(t: f64) -> f64 {
    let inv = 1.0 / t;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 48.0
            + inv2 * (7.0 / 5760.0 + inv2 * (31.0 / 80640.0 + inv2 * (127.0 / 430080.0 + inv2 * 511.0 / 1216512.0))));
    0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t - PI / 8.0 + series
}

fn psi(p: Complex64) -> Complex64 {
    let two_pi = 2.0 * PI;
    (two_pi * (p * p - p - 1.0 / 16.0)).cos() / (two_pi * p).cos()
}

/// `Ψ^{(j)}(p)` for `j = 0..=12`. Trapezoid rule on a circle of radius 1/2;
/// nodes are offset by half a step so none lands on the removable
/// singularities of `Ψ` on the real axis.
fn psi_derivatives(p: f64) -> [f64; 13] {
    const NODES: usize = 64;
    const RADIUS: f64 = 0.5;
    let mut acc = [c(0.0, 0.0); 13];
    for j in 0..NODES {
        let phi = 2.0 * PI * (j as f64 + 0.5) / NODES as f64;
        let e = c(phi.cos(), phi.sin());
        let f = psi(c(p, 0.0) + e * RADIUS);
        let mut rot = c(1.0, 0.0);
        let inv_e = e.conj();
        for slot in acc.iter_mut() {
            *slot += f * rot;
            rot *= inv_e;
        }
    }
    let mut out = [0.0; 13];
    let mut fact = 1.0;
    let mut r_pow = 1.0;
    for (m, slot) in out.iter_mut().enumerate() {
        if m > 0 {
            fact *= m as f64;
            r_pow *= RADIUS;
        }
        *slot = (acc[m] * (fact / (NODES as f64 * r_pow))).re;
    }
    out
}

/// Hardy's `Z(t)` by the Riemann–Siegel formula, for `t >= 10`.
pub fn riemann_siegel_z(t: f64) -> Result<f64> {
    if !(t >= 10.0 && t.is_finite()) {
        return Err(Error::domain("riemann_siegel_z", "t >= 10"));
    }
    let a = (t / (2.0 * PI)).sqrt();
    let n = libm::floor(a) as usize;
    let p = a - n as f64;
    let th = theta(t);
    let mut main = 0.0;
    for k in 1..=n {
        let kf = k as f64;
        main += (th - t * kf.ln()).cos() / kf.sqrt();
    }
    main *= 2.0;
    let d = psi_derivatives(p);
    let (pi2, pi4, pi6, pi8) = (PI * PI, PI.powi(4), PI.powi(6), PI.powi(8));
    let c0 = d[0];
    let c1 = -d[3] / (96.0 * pi2);
    let c2 = d[2] / (64.0 * pi2) + d[6] / (18432.0 * pi4);
    let c3 = -d[1] / (64.0 * pi2) - d[5] / (3840.0 * pi4) - d[9] / (5308416.0 * pi6);
    let c4 = d[0] / (128.0 * pi2) + 19.0 * d[4] / (24576.0 * pi4) + 11.0 * d[8] / (5898240.0 * pi6)
        + d[12] / (2038431744.0 * pi8);
    let tau = 1.0 / a;
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let remainder = sign * tau.sqrt() * (c0 + tau * (c1 + tau * (c2 + tau * (c3 + tau * c4))));
    Ok(main + remainder)
}

/// `ζ(1/2 + it)` by the Riemann–Siegel formula, `t >= 10`.
pub fn riemann_siegel(t: f64) -> Result<Complex64> {
    let z = riemann_siegel_z(t)?;
    let th = theta(t);
    Ok(c(th.cos(), -th.sin()) * z)
}

/// Hardy's `Z(t) = e^{iθ(t)} ζ(1/2 + it)` through Euler–Maclaurin, `t >= 10`.
pub fn hardy_z_em(t: f64) -> Result<f64> {
    if !(t >= 10.0) {
        return Err(Error::domain("hardy_z_em", "t >= 10"));
    }
    let z = euler_maclaurin(c(0.5, t))?;
    let th = theta(t);
    Ok((c(th.cos(), th.sin()) * z).re)
}

/// Evaluator limits for the critical line.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ZetaEvaluator {
    pub ceiling: f64,
    /// Heights up to this use Euler–Maclaurin, above it Riemann–Siegel.
    pub em_limit: f64,
}

impl Default for ZetaEvaluator {
    fn default() -> Self {
        ZetaEvaluator {
            ceiling: DEFAULT_CEILING,
            em_limit: DEFAULT_EM_LIMIT,
        }
    }
}

impl ZetaEvaluator {
    pub fn check(&self, t: f64) -> Result<()> {
        if t.is_nan() {
            return Err(Error::domain("zeta_half_line", "t is a number"));
        }
        if t.abs() > self.ceiling {
            return Err(Error::Unsupported {
                op: "zeta_half_line",
                reason: alloc::format!("|t| = {:e} above the ceiling {:e}", t.abs(), self.ceiling),
            });
        }
        Ok(())
    }

    /// `ζ(1/2 + it)`; negative `t` by conjugation.
    pub fn zeta_half_line(&self, t: f64) -> Result<Complex64> {
        self.check(t)?;
        if t < 0.0 {
            return Ok(self.zeta_half_line(-t)?.conj());
        }
        if t <= self.em_limit.max(10.0) {
            euler_maclaurin(c(0.5, t))
        } else {
            riemann_siegel(t)
        }
    }

    /// `ζ^{(m)}(1/2 + it)` for `m <= 4`.
    pub fn zeta_derivative(&self, t: f64, m: u32) -> Result<Complex64> {
        if m > MAX_DERIVATIVE {
            return Err(Error::Unsupported {
                op: "zeta_derivative",
                reason: alloc::format!("derivative order {m} > {MAX_DERIVATIVE}"),
            });
        }
        if m == 0 {
            return self.zeta_half_line(t);
        }
        self.check(t)?;
        if t.abs() > DERIVATIVE_CEILING {
            return Err(Error::Unsupported {
                op: "zeta_derivative",
                reason: alloc::format!("|t| = {:e} above the derivative ceiling {DERIVATIVE_CEILING:e}", t.abs()),
            });
        }
        if t < 0.0 {
            return Ok(self.zeta_derivative(-t, m)?.conj());
        }
        Ok(cauchy_derivative(c(0.5, t), m, CAUCHY_RADIUS, CAUCHY_NODES))
    }
}

pub fn zeta_half_line(t: f64) -> Result<Complex64> {
    ZetaEvaluator::default().zeta_half_line(t)
}

pub fn zeta_derivative(t: f64, m: u32) -> Result<Complex64> {
    ZetaEvaluator::default().zeta_derivative(t, m)
}

/// `ζ` at `center + radius e^{iφ_j}`, `φ_j = 2πj/nodes`, sharing one main sum.
pub fn euler_maclaurin_circle(center: Complex64, radius: f64, nodes: usize) -> Vec<Complex64> {
    let n = em_cutoff(center + radius);
    let coeffs = em_coefficients();
    // S_q = Σ_{j<n} j^{-center} (ln j)^q
    let mut moments = [c(0.0, 0.0); MOMENT_ORDER + 1];
    for j in 2..n {
        let lj = (j as f64).ln();
        let mut term = (-center * lj).exp();
        for slot in moments.iter_mut() {
            *slot += term;
            term *= lj;
        }
    }
    moments[0] += 1.0;
    (0..nodes)
        .map(|i| {
            let phi = 2.0 * PI * i as f64 / nodes as f64;
            let delta = c(phi.cos(), phi.sin()) * radius;
            // Σ_q (-δ)^q / q! S_q
            let mut head = c(0.0, 0.0);
            let mut coef = c(1.0, 0.0);
            for (q, s_q) in moments.iter().enumerate() {
                if q > 0 {
                    coef *= -delta / q as f64;
                }
                head += coef * s_q;
            }
            head + em_tail(center + delta, n, &coeffs)
        })
        .collect()
}

/// `ζ^{(m)}(center)` by the trapezoid rule on a circle of the given radius.
pub fn cauchy_derivative(center: Complex64, m: u32, radius: f64, nodes: usize) -> Complex64 {
    let values = euler_maclaurin_circle(center, radius, nodes);
    let mut acc = c(0.0, 0.0);
    for (j, f) in values.iter().enumerate() {
        let phi = 2.0 * PI * (j as f64) * m as f64 / nodes as f64;
        acc += f * c(phi.cos(), -phi.sin());
    }
    let fact: f64 = (1..=m).map(f64::from).product();
    acc * (fact / (nodes as f64 * libm::pow(radius, m as f64)))
}

/// A zero of `Z(t)` in `[lo, hi]` by bisection; `Z` must change sign.
pub fn bisect_zero(lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut za, zb) = (hardy_z_em(a)?, hardy_z_em(b)?);
    if za * zb > 0.0 {
        return Err(Error::Contract("Z(t) has no sign change on the bracket"));
    }
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let zm = hardy_z_em(mid)?;
        if zm == 0.0 {
            return Ok(mid);
        }
        if (zm > 0.0) == (za > 0.0) {
            a = mid;
            za = zm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// The lowest nontrivial zero height.
pub fn first_zero() -> Result<f64> {
    bisect_zero(14.0, 14.3, 1e-12)
}
