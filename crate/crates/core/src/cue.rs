//! Haar-random unitary matrices, their eigenphases and `log|Z(U, θ)|`.
//!
//! Two samplers share the seeding contract:
//!
//! * [`sample_cue`] draws a dense `N×N` Haar unitary (complex Ginibre matrix,
//!   Householder QR, multiply `Q` by the phases of `diag R`) and returns its
//!   eigenphases. Cost `O(N^3)`.
//! * [`sample_log_abs_z`] draws `log|det(I - U)|` directly from the product
//!   representation `det(I - U) = Π_{j=1}^N (1 - γ_j)` with independent
//!   `γ_j`: `γ_1` uniform on the unit circle and, for `j >= 2`,
//!   `γ_j = e^{iω} sqrt(B_j)` with `B_j ~ Beta(1, j-1)`. Because the factors
//!   are independent, the `|Z|^{2k}`-tilted law keeps them independent with
//!   each density multiplied by `|1 - γ_j|^{2k}`, which is sampled exactly by
//!   rejection. Cost `O(N · 4^k)`.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
#[allow(unused_imports)] // std float methods take precedence when std is linked
use num_traits::Float;

/// Below this circular distance between `θ` and an eigenphase the log of the
/// sine is not resolved in double precision.
pub const ANGLE_EPSILON: f64 = 1e-12;

/// Maximum tolerated `‖U^†U - I‖_F` before a dense draw is rejected.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

const MAX_RESAMPLES: usize = 64;

/// Identifies one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        SeedSpec {
            master_seed,
            stream_index,
        }
    }

    /// The stream `offset` positions after this one.
    pub fn offset(self, offset: u64) -> Self {
        SeedSpec {
            master_seed: self.master_seed,
            stream_index: self.stream_index.wrapping_add(offset),
        }
    }

    /// Same stream index under a derived master seed; used for auxiliary
    /// randomness (bootstrap, `t` sampling) that must not overlap the draws.
    pub fn derive(self, tag: u64) -> Self {
        SeedSpec {
            master_seed: splitmix(self.master_seed ^ splitmix(tag)),
            stream_index: self.stream_index,
        }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Eigenphases of one CUE draw, each in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EigenAngles {
    angles: Vec<f64>,
}

impl EigenAngles {
    /// Wraps raw phases into `[0, 2π)`.
    pub fn from_phases(phases: impl IntoIterator<Item = f64>) -> Self {
        EigenAngles {
            angles: phases.into_iter().map(wrap_angle).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }
}

// `x mod 2π` in `[0, 2π]`; the upper end only through rounding.
fn rem_tau(x: f64) -> f64 {
    x - TAU * (x / TAU).floor()
}

fn wrap_angle(a: f64) -> f64 {
    let w = rem_tau(a);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Options of the dense sampler. Disabling the phase correction reproduces
/// the well-known non-Haar output of a bare Householder QR and exists only as
/// a negative control.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DenseOptions {
    pub phase_correction: bool,
}

impl Default for DenseOptions {
    fn default() -> Self {
        DenseOptions {
            phase_correction: true,
        }
    }
}

fn ginibre(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let scale = core::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    })
}

/// Householder QR. Returns `Q` and the diagonal of `R`, or `None` for a
/// numerically rank-deficient input.
fn householder_qr(mut a: DMatrix<Complex64>) -> Option<(DMatrix<Complex64>, Vec<Complex64>)> {
    let n = a.nrows();
    let mut reflectors: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut r_diag = Vec::with_capacity(n);
    for j in 0..n {
        let norm = (j..n).map(|i| a[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 1e-200) {
            return None;
        }
        let x0 = a[(j, j)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let mut v: Vec<Complex64> = (j..n).map(|i| a[(i, j)]).collect();
        v[0] += phase * norm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        // A <- (I - 2 v v^† / v^†v) A on the trailing block
        for c in j..n {
            let dot: Complex64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * a[(j + i, c)]).sum();
            let f = dot * (2.0 / vnorm2);
            for (i, vi) in v.iter().enumerate() {
                a[(j + i, c)] -= vi * f;
            }
        }
        r_diag.push(-phase * norm);
        reflectors.push(v);
    }
    // Q = H_1 H_2 ... H_n, applied to the identity right to left.
    let mut q = DMatrix::<Complex64>::identity(n, n);
    for (j, v) in reflectors.iter().enumerate().rev() {
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        for c in 0..n {
            let dot: Complex64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * q[(j + i, c)]).sum();
            let f = dot * (2.0 / vnorm2);
            for (i, vi) in v.iter().enumerate() {
                q[(j + i, c)] -= vi * f;
            }
        }
    }
    Some((q, r_diag))
}

fn unitarity_drift(u: &DMatrix<Complex64>) -> f64 {
    let n = u.nrows();
    let g = u.adjoint() * u;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            acc += (g[(i, j)] - target).norm_sqr();
        }
    }
    acc.sqrt()
}

fn try_dense(n: usize, rng: &mut ChaCha8Rng, options: DenseOptions) -> Option<DMatrix<Complex64>> {
    let (mut q, r_diag) = householder_qr(ginibre(n, rng))?;
    if options.phase_correction {
        for (c, r) in r_diag.iter().enumerate() {
            let phase = r / r.norm();
            for i in 0..n {
                q[(i, c)] *= phase;
            }
        }
    }
    if unitarity_drift(&q) < UNITARITY_TOLERANCE {
        Some(q)
    } else {
        None
    }
}

/// A dense Haar unitary drawn from the given stream.
pub fn sample_unitary(n: usize, seed: SeedSpec) -> Result<DMatrix<Complex64>> {
    sample_unitary_with(n, seed, DenseOptions::default())
}

pub fn sample_unitary_with(n: usize, seed: SeedSpec, options: DenseOptions) -> Result<DMatrix<Complex64>> {
    if n < 1 {
        return Err(Error::domain("sample_cue", "n >= 1"));
    }
    let mut rng = seed.rng();
    for _ in 0..MAX_RESAMPLES {
        if let Some(u) = try_dense(n, &mut rng, options) {
            return Ok(u);
        }
    }
    Err(Error::Numerical("dense CUE sampler kept producing singular draws"))
}

/// Eigenphases of a unitary matrix.
pub fn eigen_angles(u: &DMatrix<Complex64>) -> Result<EigenAngles> {
    let n = u.nrows();
    if n == 1 {
        return Ok(EigenAngles::from_phases([u[(0, 0)].arg()]));
    }
    let schur = Schur::try_new(u.clone(), 1e-14, 10_000).ok_or(Error::Numerical("Schur iteration did not converge"))?;
    let values = schur.eigenvalues().ok_or(Error::Numerical("Schur form not triangular"))?;
    Ok(EigenAngles::from_phases(values.iter().map(|z| z.arg())))
}

/// Eigenphases of a Haar-distributed `n×n` unitary.
pub fn sample_cue(n: usize, seed: SeedSpec) -> Result<EigenAngles> {
    sample_cue_with(n, seed, DenseOptions::default())
}

pub fn sample_cue_with(n: usize, seed: SeedSpec, options: DenseOptions) -> Result<EigenAngles> {
    let u = sample_unitary_with(n, seed, options)?;
    eigen_angles(&u)
}

/// `log|det(I - U e^{-iθ})| = Σ_j log(2|sin((θ_j - θ)/2)|)`.
pub fn log_abs_char_poly(sample: &EigenAngles, theta: f64) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::domain("log_abs_char_poly", "finite theta"));
    }
    let mut acc = 0.0;
    for (index, &a) in sample.angles.iter().enumerate() {
        let d = rem_tau(a - theta);
        let distance = d.min(TAU - d);
        if distance < ANGLE_EPSILON {
            return Err(Error::NearSingular { index, distance });
        }
        acc += (2.0 * (0.5 * d).sin().abs()).ln();
    }
    Ok(acc)
}

/// Draws `log|Z(U, 0)|` for `U` from `U(n)` tilted by `|Z|^{2·tilt}`
/// (`tilt = 0` is plain Haar), via the independent-factor representation.
pub fn sample_log_abs_z(n: usize, tilt: f64, seed: SeedSpec) -> Result<f64> {
    if n < 1 {
        return Err(Error::domain("sample_log_abs_z", "n >= 1"));
    }
    if !(tilt >= 0.0 && tilt.is_finite()) {
        return Err(Error::domain("sample_log_abs_z", "tilt >= 0"));
    }
    let mut rng = seed.rng();
    let mut acc = 0.0;
    for j in 1..=n {
        acc += 0.5 * draw_factor(j, tilt, &mut rng);
    }
    Ok(acc)
}

// log|1 - γ_j|^2 under the tilted factor law.
fn draw_factor(j: usize, tilt: f64, rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let omega = TAU * rng.random::<f64>();
        let log_sq = if j == 1 {
            // |1 - e^{iω}|^2 = 4 sin^2(ω/2)
            (4.0 * (0.5 * omega).sin().powi(2)).ln()
        } else {
            let u = 1.0 - rng.random::<f64>();
            let r2 = -(u.ln() / (j - 1) as f64).exp_m1();
            let r = r2.sqrt();
            (r2 - 2.0 * r * omega.cos()).ln_1p()
        };
        if tilt == 0.0 {
            return log_sq;
        }
        // acceptance (|1-γ|^2 / 4)^tilt <= 1
        let log_accept = tilt * (log_sq - 4f64.ln());
        if rng.random::<f64>().ln() < log_accept {
            return log_sq;
        }
    }
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut x: Vec<f64> = a.to_vec();
    let mut y: Vec<f64> = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let v = if x[i] <= y[j] { x[i] } else { y[j] };
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Asymptotic two-sample KS critical value at the 1% level.
pub fn ks_critical_1pct(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    1.628 * ((n + m) / (n * m)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RotationCheck {
    pub n: usize,
    pub trials: usize,
    pub phi: f64,
    pub statistic: f64,
    pub critical_value: f64,
    pub pass: bool,
}

/// Compares `{log|Z(U,0)|}` with `{log|Z(U,φ)|}` over `trials` dense draws.
pub fn rotation_invariance_check(n: usize, trials: usize, phi: f64, seed: SeedSpec) -> Result<RotationCheck> {
    rotation_invariance_check_with(n, trials, phi, seed, DenseOptions::default())
}

pub fn rotation_invariance_check_with(
    n: usize,
    trials: usize,
    phi: f64,
    seed: SeedSpec,
    options: DenseOptions,
) -> Result<RotationCheck> {
    if trials < 1000 {
        return Err(Error::domain("rotation_invariance_check", "trials >= 1000"));
    }
    let mut at_zero = Vec::with_capacity(trials);
    let mut at_phi = Vec::with_capacity(trials);
    for t in 0..trials {
        let angles = sample_cue_with(n, seed.offset(t as u64), options)?;
        match (log_abs_char_poly(&angles, 0.0), log_abs_char_poly(&angles, phi)) {
            (Ok(a), Ok(b)) => {
                at_zero.push(a);
                at_phi.push(b);
            }
            (Err(Error::NearSingular { .. }), _) | (_, Err(Error::NearSingular { .. })) => continue,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    let statistic = ks_two_sample(&at_zero, &at_phi);
    let critical_value = ks_critical_1pct(at_zero.len(), at_phi.len());
    Ok(RotationCheck {
        n,
        trials,
        phi,
        statistic,
        critical_value,
        pass: statistic <= critical_value,
    })
}

/// `log|det(I - U e^{-iθ})|` straight from a dense determinant.
pub fn log_abs_det_oracle(u: &DMatrix<Complex64>, theta: f64) -> f64 {
    let n = u.nrows();
    let rot = Complex64::from_polar(1.0, -theta);
    let m = DMatrix::<Complex64>::identity(n, n) - u * rot;
    m.determinant().norm().ln()
}
