//! Weighted value distribution of `log|ζ(1/2 + it)|` for `t` uniform in
//! `[T, 2T]`, weighted by `|ζ^{(m)}(1/2 + i(t + α))|^{2k}`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::cue::SeedSpec;
use crate::error::{Error, Result};
use crate::estimator::{self, MomentReport, WeightedSample, DEFAULT_BOOTSTRAP};
use crate::primes::{dirichlet_poly, mertens_l, mu_alpha, PrimeWindow};
use crate::zeta::{ZetaEvaluator, MAX_DERIVATIVE};
#[allow(unused_imports)] // std float methods take precedence when std is linked
use num_traits::Float;

pub const HISTOGRAM_BINS: usize = 80;
/// Half-width of the histogram range in units of `√(L/2)`.
pub const HISTOGRAM_SPAN: f64 = 6.0;

/// Fixed-range histogram with explicit underflow and overflow mass.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeightedHistogram {
    pub bin_edges: Vec<f64>,
    pub weighted_counts: Vec<f64>,
    /// Mass below the first edge, including `-inf` values.
    pub underflow: f64,
    pub overflow: f64,
    pub total_weight: f64,
    pub raw_count: usize,
}

impl WeightedHistogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(lo < hi && lo.is_finite() && hi.is_finite()) || bins == 0 {
            return Err(Error::domain("WeightedHistogram", "finite lo < hi and bins >= 1"));
        }
        let width = (hi - lo) / bins as f64;
        let mut bin_edges: Vec<f64> = (0..bins).map(|i| lo + width * i as f64).collect();
        bin_edges.push(hi);
        Ok(WeightedHistogram {
            bin_edges,
            weighted_counts: vec![0.0; bins],
            underflow: 0.0,
            overflow: 0.0,
            total_weight: 0.0,
            raw_count: 0,
        })
    }

    pub fn add(&mut self, value: f64, weight: f64) {
        self.raw_count += 1;
        self.total_weight += weight;
        let lo = self.bin_edges[0];
        let hi = self.bin_edges[self.bin_edges.len() - 1];
        if !(value >= lo) {
            self.underflow += weight;
        } else if value >= hi {
            self.overflow += weight;
        } else {
            let bins = self.weighted_counts.len();
            let i = (((value - lo) / (hi - lo)) * bins as f64) as usize;
            self.weighted_counts[i.min(bins - 1)] += weight;
        }
    }

    /// `|Σ counts + underflow + overflow - total| / total`.
    pub fn mass_defect(&self) -> f64 {
        let inside: f64 = self.weighted_counts.iter().sum();
        ((inside + self.underflow + self.overflow) - self.total_weight).abs() / self.total_weight
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanSpec {
    /// Height `T`; `t` is drawn uniformly from `[T, 2T]`.
    pub t: f64,
    pub samples: usize,
    pub k: u32,
    /// Derivative order of the weight.
    pub m: u32,
    pub alpha: f64,
    pub window: PrimeWindow,
    pub seed: SeedSpec,
    pub bootstrap: usize,
    pub n_max: usize,
}

impl ScanSpec {
    /// Spec with the default prime window for `t`.
    pub fn new(t: f64, samples: usize, k: u32, m: u32, alpha: f64, seed: SeedSpec) -> Result<Self> {
        let spec = ScanSpec {
            t,
            samples,
            k,
            m,
            alpha,
            window: PrimeWindow::default_for(t)?,
            seed,
            bootstrap: DEFAULT_BOOTSTRAP,
            n_max: 4,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t >= 10.0 && self.t.is_finite()) {
            return Err(Error::domain("weighted_scan", "T >= 10"));
        }
        if self.samples < 100 {
            return Err(Error::domain("weighted_scan", "samples >= 100"));
        }
        if !(self.alpha.abs() < 1.0) {
            return Err(Error::domain("weighted_scan", "|alpha| < 1"));
        }
        if self.m > MAX_DERIVATIVE {
            return Err(Error::Unsupported {
                op: "weighted_scan",
                reason: alloc::format!("derivative order {} > {MAX_DERIVATIVE}", self.m),
            });
        }
        if self.n_max > estimator::MC_MAX_ORDER {
            return Err(Error::Guard {
                op: "weighted_scan",
                limit: estimator::MC_MAX_ORDER,
                got: self.n_max,
            });
        }
        let top = 2.0 * self.t + self.alpha.abs();
        ZetaEvaluator::default().check(top)?;
        if self.k > 0 && self.m > 0 && top > crate::zeta::DERIVATIVE_CEILING {
            return Err(Error::Unsupported {
                op: "weighted_scan",
                reason: alloc::format!("2T = {top:e} above the derivative ceiling"),
            });
        }
        Ok(())
    }

    /// Height of sample `index`.
    pub fn sample_t(&self, index: u64) -> f64 {
        let u: f64 = self.seed.offset(index).rng().random();
        self.t + self.t * u
    }

    /// Evaluate sample `index`. Independent of every other index.
    pub fn point(&self, index: u64) -> Result<ScanPoint> {
        let eval = ZetaEvaluator::default();
        let t = self.sample_t(index);
        let value = eval.zeta_half_line(t)?.norm().ln();
        let log_weight = if self.k == 0 {
            0.0
        } else {
            2.0 * self.k as f64 * eval.zeta_derivative(t + self.alpha, self.m)?.norm().ln()
        };
        Ok(ScanPoint {
            t,
            value,
            log_weight,
            proxy: dirichlet_poly(t, &self.window).re,
        })
    }

    /// Gaussian reference: `(k μ_α, L/2)` over the window.
    pub fn overlay(&self) -> (f64, f64) {
        (
            self.k as f64 * mu_alpha(&self.window, self.alpha),
            0.5 * mertens_l(&self.window),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanPoint {
    pub t: f64,
    /// `log|ζ(1/2 + it)|`; `-inf` at an exact zero.
    pub value: f64,
    pub log_weight: f64,
    /// `Re P(t)` over the window.
    pub proxy: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanReport {
    pub histogram: WeightedHistogram,
    pub moments: MomentReport,
    pub overlay_mean: f64,
    pub overlay_variance: f64,
    /// Draws with `log|ζ| = -inf`; in the underflow bin, not in `moments`.
    pub non_finite: usize,
    /// Pearson correlation of `Re P(t)` with `log|ζ|` over finite draws.
    pub proxy_correlation: f64,
    pub points: Vec<ScanPoint>,
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Reduce evaluated points (in index order) to histogram and moments.
pub fn reduce(spec: &ScanSpec, points: Vec<ScanPoint>) -> Result<ScanReport> {
    let (overlay_mean, overlay_variance) = spec.overlay();
    let half_width = HISTOGRAM_SPAN * overlay_variance.sqrt().max(1e-3);
    let mut histogram =
        WeightedHistogram::new(overlay_mean - half_width, overlay_mean + half_width, HISTOGRAM_BINS)?;
    let top = points.iter().map(|p| p.log_weight).fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Err(Error::Numerical("every weight vanished"));
    }
    let raw: Vec<f64> = points.iter().map(|p| (p.log_weight - top).exp()).collect();
    let norm: f64 = raw.iter().sum();
    for (p, w) in points.iter().zip(&raw) {
        histogram.add(p.value, w / norm);
    }

    let finite: Vec<&ScanPoint> = points.iter().filter(|p| p.value.is_finite()).collect();
    let non_finite = points.len() - finite.len();
    let sample = WeightedSample::new(
        finite.iter().map(|p| p.value).collect(),
        finite.iter().map(|p| p.log_weight).collect(),
    )?;
    let moments = estimator::moment_report(&sample, spec.n_max, spec.bootstrap, spec.seed)?;
    let xs: Vec<f64> = finite.iter().map(|p| p.proxy).collect();
    let ys: Vec<f64> = finite.iter().map(|p| p.value).collect();
    Ok(ScanReport {
        histogram,
        moments,
        overlay_mean,
        overlay_variance,
        non_finite,
        proxy_correlation: pearson(&xs, &ys),
        points,
    })
}

pub fn weighted_scan(spec: &ScanSpec) -> Result<ScanReport> {
    spec.validate()?;
    let points = (0..spec.samples as u64)
        .map(|i| spec.point(i))
        .collect::<Result<Vec<_>>>()?;
    reduce(spec, points)
}
