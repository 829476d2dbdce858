//! Self-normalized importance sampling for tilted moments of `log|Z|`.
//!
//! A draw is a pair `(v, ℓ)`: the value `v = log|Z|` and the log-weight
//! `ℓ = 2(k - k_p) v`, where `k_p` is the tilt of the proposal (`0` for plain
//! Haar). Expectations under the `|Z|^{2k}` tilt are
//! `Σ e^{ℓ_i - ℓ*} g(v_i) / Σ e^{ℓ_i - ℓ*}` with `ℓ* = max ℓ_i`.
//!
//! Samples are stored in a canonical order (sorted by value, then weight) so
//! that every estimate, including the bootstrap, is a function of the sample
//! multiset alone.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::cue::{self, DenseOptions, SeedSpec};
use crate::error::{Error, Result};
use crate::rmt_exact::{self, TiltSpec};
use crate::special::gaussian_standardized_moment;
#[allow(unused_imports)] // std float methods take precedence when std is linked
use num_traits::Float;

/// ESS below which an estimate is flagged unreliable.
pub const ESS_FLOOR: f64 = 30.0;
pub const DEFAULT_BOOTSTRAP: usize = 200;
/// Highest moment order estimated by Monte Carlo.
pub const MC_MAX_ORDER: usize = 8;

const BOOTSTRAP_TAG: u64 = 0xB007_5742;

/// Weighted draws in canonical order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeightedSample {
    values: Vec<f64>,
    log_weights: Vec<f64>,
}

impl WeightedSample {
    pub fn new(values: Vec<f64>, log_weights: Vec<f64>) -> Result<Self> {
        if values.len() != log_weights.len() {
            return Err(Error::Contract("values and log-weights differ in length"));
        }
        if values.is_empty() {
            return Err(Error::domain("WeightedSample", "at least one draw"));
        }
        if values.iter().any(|v| !v.is_finite()) || log_weights.iter().any(|l| l.is_nan() || *l == f64::INFINITY) {
            return Err(Error::domain("WeightedSample", "finite values and log-weights < +inf"));
        }
        let mut pairs: Vec<(f64, f64)> = values.into_iter().zip(log_weights).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let (values, log_weights) = pairs.into_iter().unzip();
        Ok(WeightedSample { values, log_weights })
    }

    /// Unit weights.
    pub fn unweighted(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        Self::new(values, vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn max_log_weight(&self) -> f64 {
        self.log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `e^{ℓ_i - ℓ*}`.
    pub fn scaled_weights(&self) -> Vec<f64> {
        let top = self.max_log_weight();
        self.log_weights.iter().map(|l| (l - top).exp()).collect()
    }
}

/// `(Σ w)^2 / Σ w^2`, computed from log-weights.
pub fn effective_sample_size(log_weights: &[f64]) -> Result<f64> {
    if log_weights.is_empty() {
        return Err(Error::domain("effective_sample_size", "nonempty weights"));
    }
    let top = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Err(Error::domain("effective_sample_size", "at least one finite log-weight"));
    }
    let (mut s1, mut s2) = (0.0, 0.0);
    for l in log_weights {
        let w = (l - top).exp();
        s1 += w;
        s2 += w * w;
    }
    Ok(s1 * s1 / s2)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentReport {
    pub sample_count: usize,
    pub ess: f64,
    pub weighted_mean: f64,
    pub weighted_mean_se: f64,
    /// Orders `0..=n_max`, centered at the estimated weighted mean.
    pub central_moments: Vec<f64>,
    /// Bootstrap standard errors of `central_moments`.
    pub standard_errors: Vec<f64>,
    /// `m_n / m_2^{n/2}`.
    pub standardized: Vec<f64>,
    pub standardized_se: Vec<f64>,
    /// `log((1/M) Σ e^{ℓ_i})`: estimates the log of the normalizer ratio.
    pub log_mean_weight: f64,
    pub mean_weight: f64,
    pub mean_weight_se: f64,
    pub bootstrap_resamples: usize,
    /// Set when `ess < ESS_FLOOR`.
    pub unreliable: bool,
}

struct Moments {
    mean: f64,
    central: Vec<f64>,
    standardized: Vec<f64>,
}

fn weighted_moments<I>(draws: I, n_max: usize) -> Moments
where
    I: Iterator<Item = (f64, f64)> + Clone,
{
    let (mut sw, mut swv) = (0.0, 0.0);
    for (v, w) in draws.clone() {
        sw += w;
        swv += w * v;
    }
    let mean = swv / sw;
    let mut central = vec![0.0; n_max + 1];
    for (v, w) in draws {
        let d = v - mean;
        let mut p = w;
        for c in central.iter_mut() {
            *c += p;
            p *= d;
        }
    }
    for c in central.iter_mut() {
        *c /= sw;
    }
    if n_max >= 1 {
        central[1] = 0.0;
    }
    central[0] = 1.0;
    let standardized = rmt_exact::standardize(&central);
    Moments {
        mean,
        central,
        standardized,
    }
}

fn std_dev(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    var.sqrt()
}

/// Self-normalized moment estimates with bootstrap standard errors
/// (resampling draws with their weights attached).
pub fn moment_report(sample: &WeightedSample, n_max: usize, bootstrap: usize, seed: SeedSpec) -> Result<MomentReport> {
    if n_max > MC_MAX_ORDER {
        return Err(Error::Guard {
            op: "moment_report",
            limit: MC_MAX_ORDER,
            got: n_max,
        });
    }
    let m = sample.len();
    let weights = sample.scaled_weights();
    let values = sample.values();
    let est = weighted_moments(values.iter().copied().zip(weights.iter().copied()), n_max);
    let ess = effective_sample_size(sample.log_weights())?;

    let mut boot_mean = Vec::with_capacity(bootstrap);
    let mut boot_central = vec![Vec::with_capacity(bootstrap); n_max + 1];
    let mut boot_std = vec![Vec::with_capacity(bootstrap); n_max + 1];
    let mut rng = seed.derive(BOOTSTRAP_TAG).rng();
    let mut idx = vec![0usize; m];
    for _ in 0..bootstrap {
        for slot in idx.iter_mut() {
            *slot = rng.random_range(0..m);
        }
        let b = weighted_moments(idx.iter().map(|&i| (values[i], weights[i])), n_max);
        boot_mean.push(b.mean);
        for (order, (c, s)) in b.central.iter().zip(&b.standardized).enumerate() {
            boot_central[order].push(*c);
            boot_std[order].push(*s);
        }
    }

    let sum_w: f64 = weights.iter().sum();
    let mean_w = sum_w / m as f64;
    let top = sample.max_log_weight();
    let log_mean_weight = top + mean_w.ln();
    let var_w = weights.iter().map(|w| (w - mean_w) * (w - mean_w)).sum::<f64>() / (m.max(2) - 1) as f64;

    Ok(MomentReport {
        sample_count: m,
        ess,
        weighted_mean: est.mean,
        weighted_mean_se: std_dev(&boot_mean),
        central_moments: est.central,
        standard_errors: boot_central.iter().map(|xs| std_dev(xs)).collect(),
        standardized: est.standardized,
        standardized_se: boot_std.iter().map(|xs| std_dev(xs)).collect(),
        log_mean_weight,
        mean_weight: log_mean_weight.exp(),
        mean_weight_se: top.exp() * (var_w / m as f64).sqrt(),
        bootstrap_resamples: bootstrap,
        unreliable: ess < ESS_FLOOR,
    })
}

/// Difference of two self-normalized means over the same draws with
/// different log-weights, and its paired bootstrap standard error.
pub fn paired_mean_difference(
    values: &[f64],
    log_weights_a: &[f64],
    log_weights_b: &[f64],
    bootstrap: usize,
    seed: SeedSpec,
) -> Result<(f64, f64)> {
    let m = values.len();
    if m == 0 || log_weights_a.len() != m || log_weights_b.len() != m {
        return Err(Error::Contract("paired draws must have equal, nonzero length"));
    }
    let scale = |lw: &[f64]| {
        let top = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        lw.iter().map(|l| (l - top).exp()).collect::<Vec<f64>>()
    };
    let (wa, wb) = (scale(log_weights_a), scale(log_weights_b));
    let mean_of = |idx: &mut dyn Iterator<Item = usize>| {
        let (mut sa, mut sva, mut sb, mut svb) = (0.0, 0.0, 0.0, 0.0);
        for i in idx {
            sa += wa[i];
            sva += wa[i] * values[i];
            sb += wb[i];
            svb += wb[i] * values[i];
        }
        sva / sa - svb / sb
    };
    let diff = mean_of(&mut (0..m));
    let mut rng = seed.derive(BOOTSTRAP_TAG).rng();
    let mut boots = Vec::with_capacity(bootstrap);
    for _ in 0..bootstrap {
        let picks: Vec<usize> = (0..m).map(|_| rng.random_range(0..m)).collect();
        boots.push(mean_of(&mut picks.into_iter()));
    }
    Ok((diff, std_dev(&boots)))
}

/// Source of the Monte Carlo draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Proposal {
    /// Plain Haar draws from the independent-factor sampler.
    Haar,
    /// Exact `|Z|^{2k}`-tilted draws from the independent-factor sampler;
    /// the importance weights are then constant.
    Tilted,
    /// Plain Haar draws through dense QR and eigenphases (`O(N^3)` per draw).
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct McConfig {
    /// Matrix size.
    pub n: usize,
    pub k: f64,
    pub n_max: usize,
    pub samples: usize,
    pub seed: SeedSpec,
    pub proposal: Proposal,
    pub bootstrap: usize,
}

impl McConfig {
    pub fn new(n: usize, k: f64, n_max: usize, samples: usize, seed: SeedSpec) -> Self {
        McConfig {
            n,
            k,
            n_max,
            samples,
            seed,
            proposal: Proposal::Haar,
            bootstrap: DEFAULT_BOOTSTRAP,
        }
    }

    pub fn with_proposal(mut self, proposal: Proposal) -> Self {
        self.proposal = proposal;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::domain("tilted_moments_mc", "matrix size n >= 1"));
        }
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return Err(Error::domain("tilted_moments_mc", "k >= 0"));
        }
        if self.samples < 1000 {
            return Err(Error::domain("tilted_moments_mc", "samples >= 1000"));
        }
        if self.n_max > MC_MAX_ORDER {
            return Err(Error::Guard {
                op: "tilted_moments_mc",
                limit: MC_MAX_ORDER,
                got: self.n_max,
            });
        }
        Ok(())
    }

    fn proposal_tilt(&self) -> f64 {
        match self.proposal {
            Proposal::Tilted => self.k,
            Proposal::Haar | Proposal::Dense => 0.0,
        }
    }

    /// Draw `index`: `(log|Z|, log-weight)`. Independent of every other index.
    pub fn draw(&self, index: u64) -> Result<(f64, f64)> {
        let seed = self.seed.offset(index);
        let v = match self.proposal {
            Proposal::Haar | Proposal::Tilted => cue::sample_log_abs_z(self.n, self.proposal_tilt(), seed)?,
            Proposal::Dense => {
                let angles = cue::sample_cue_with(self.n, seed, DenseOptions::default())?;
                // θ = 0 hit an eigenphase: any other θ has the same law.
                match cue::log_abs_char_poly(&angles, 0.0) {
                    Err(Error::NearSingular { .. }) => cue::log_abs_char_poly(&angles, 1.0)?,
                    other => other?,
                }
            }
        };
        Ok((v, 2.0 * (self.k - self.proposal_tilt()) * v))
    }

    pub fn estimate(&self, draws: Vec<(f64, f64)>) -> Result<TiltedRun> {
        let (values, log_weights) = draws.into_iter().unzip();
        let sample = WeightedSample::new(values, log_weights)?;
        let report = moment_report(&sample, self.n_max, self.bootstrap, self.seed)?;
        Ok(TiltedRun {
            config: *self,
            report,
            sample,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TiltedRun {
    pub config: McConfig,
    pub report: MomentReport,
    pub sample: WeightedSample,
}

/// Tilted moments of `log|Z|` by self-normalized importance sampling from Haar.
pub fn tilted_moments_mc(n: usize, k: f64, n_max: usize, samples: usize, seed: SeedSpec) -> Result<TiltedRun> {
    tilted_moments_mc_with(&McConfig::new(n, k, n_max, samples, seed))
}

pub fn tilted_moments_mc_with(config: &McConfig) -> Result<TiltedRun> {
    config.validate()?;
    let draws = (0..config.samples as u64)
        .map(|i| config.draw(i))
        .collect::<Result<Vec<_>>>()?;
    config.estimate(draws)
}

/// `Φ(x)` of the standard normal.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * core::f64::consts::FRAC_1_SQRT_2)
}

/// KS distance between the weighted empirical CDF and `N(mean, variance)`.
pub fn weighted_ks_normal(sample: &WeightedSample, mean: f64, variance: f64) -> f64 {
    let w = sample.scaled_weights();
    let total: f64 = w.iter().sum();
    let sd = variance.sqrt();
    let mut cum = 0.0;
    let mut d: f64 = 0.0;
    let values = sample.values();
    let mut i = 0;
    while i < values.len() {
        let v = values[i];
        let phi = normal_cdf((v - mean) / sd);
        d = d.max((cum / total - phi).abs());
        while i < values.len() && values[i] == v {
            cum += w[i];
            i += 1;
        }
        d = d.max((cum / total - phi).abs());
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StandardizedCheck {
    pub order: usize,
    pub estimate: f64,
    pub standard_error: f64,
    /// Exact finite-`N` standardized moment, when known.
    pub finite_n_target: Option<f64>,
    /// `(n-1)!!` or `0`.
    pub gaussian_target: f64,
    pub z_finite_n: Option<f64>,
    pub z_gaussian: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConformanceRecord {
    pub target_mean: f64,
    pub target_variance: f64,
    /// `(weighted_mean - target_mean) / se`.
    pub mean_z: f64,
    /// `(m_2 - target_variance) / se`.
    pub variance_z: f64,
    /// Orders `3..=n_max`.
    pub standardized: Vec<StandardizedCheck>,
    pub ks_statistic: f64,
}

impl ConformanceRecord {
    pub fn max_abs_z(&self) -> f64 {
        self.standardized
            .iter()
            .map(|s| s.z_gaussian.abs())
            .fold(self.mean_z.abs().max(self.variance_z.abs()), f64::max)
    }
}

fn z_score(delta: f64, se: f64) -> f64 {
    if se > 0.0 {
        delta / se
    } else if delta == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(delta)
    }
}

/// Conformance of a run with `N(mean, variance)`, optionally also against
/// known finite-sample standardized moments (indexed by order).
pub fn conformance_against(
    sample: &WeightedSample,
    report: &MomentReport,
    mean: f64,
    variance: f64,
    finite_n_standardized: Option<&[f64]>,
) -> ConformanceRecord {
    let mut standardized = Vec::new();
    for order in 3..report.standardized.len() {
        let estimate = report.standardized[order];
        let se = report.standardized_se[order];
        let gaussian_target = gaussian_standardized_moment(order as u32);
        let finite_n_target = finite_n_standardized.and_then(|s| s.get(order).copied());
        standardized.push(StandardizedCheck {
            order,
            estimate,
            standard_error: se,
            finite_n_target,
            gaussian_target,
            z_finite_n: finite_n_target.map(|t| z_score(estimate - t, se)),
            z_gaussian: z_score(estimate - gaussian_target, se),
        });
    }
    let variance_estimate = report.central_moments.get(2).copied().unwrap_or(f64::NAN);
    let variance_se = report.standard_errors.get(2).copied().unwrap_or(f64::NAN);
    ConformanceRecord {
        target_mean: mean,
        target_variance: variance,
        mean_z: z_score(report.weighted_mean - mean, report.weighted_mean_se),
        variance_z: z_score(variance_estimate - variance, variance_se),
        standardized,
        ks_statistic: weighted_ks_normal(sample, mean, variance),
    }
}

/// Conformance of a Monte Carlo run with the exact tilted mean and variance
/// for matrix size `n` and tilt `k`.
pub fn gaussian_conformance(run: &TiltedRun, n: u64, k: f64) -> Result<ConformanceRecord> {
    let order = run.report.central_moments.len().saturating_sub(1).max(2);
    let exact = rmt_exact::weighted_central_moments(&TiltSpec::new(n, k, order)?)?;
    Ok(conformance_against(
        &run.sample,
        &run.report,
        exact.mu_weighted,
        exact.central_moments[2],
        Some(&exact.standardized),
    ))
}
