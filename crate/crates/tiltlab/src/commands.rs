use num_complex::Complex64;
use serde_json::{json, Value};
use tiltlab_core::cue::{self, DenseOptions, SeedSpec};
use tiltlab_core::estimator::{self, McConfig, Proposal, ESS_FLOOR};
use tiltlab_core::primes::{mertens_l, mu_alpha, PrimeWindow};
use tiltlab_core::rmt_exact::{self, TiltSpec};
use tiltlab_core::scan::ScanSpec;
use tiltlab_core::shift::{self, ShiftTuple};
use tiltlab_core::Result;

use crate::args::*;
use crate::output::{cell, Table};
use crate::parallel;

/// Results, table and warnings of one subcommand; the config echo is added
/// by the caller.
pub struct Outcome {
    pub results: Value,
    pub table: Table,
    pub warnings: Vec<String>,
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data always serializes")
}

fn low_ess_warning(ess: f64) -> String {
    format!("effective sample size {ess:.1} is below {ESS_FLOOR}; estimates are unreliable")
}

pub fn exact_moments(a: &ExactMomentsArgs) -> Result<Outcome> {
    let report = rmt_exact::weighted_central_moments(&TiltSpec::new(a.n, a.k, a.orders)?)?;
    let mut table = Table::new(vec!["order", "central_moment", "standardized", "cumulant"]);
    for o in 0..=a.orders {
        let cumulant = if o == 0 { 0.0 } else { report.cumulant_sums[o - 1] };
        table.push(vec![cell(o), cell(report.central_moments[o]), cell(report.standardized[o]), cell(cumulant)]);
    }
    Ok(Outcome {
        results: to_value(&report),
        table,
        warnings: Vec::new(),
    })
}

pub fn mc_tilt(a: &McTiltArgs, seed: u64) -> Result<Outcome> {
    let proposal = match a.proposal {
        ProposalArg::Haar => Proposal::Haar,
        ProposalArg::Tilted => Proposal::Tilted,
        ProposalArg::Dense => Proposal::Dense,
    };
    let mut config = McConfig::new(a.n, a.k, a.orders, a.samples, SeedSpec::new(seed, 0)).with_proposal(proposal);
    config.bootstrap = a.bootstrap;
    config.validate()?;
    let exact = rmt_exact::weighted_central_moments(&TiltSpec::new(a.n as u64, a.k, a.orders.max(2))?)?;
    let run = parallel::tilted_moments_mc(&config)?;
    let conformance = estimator::gaussian_conformance(&run, a.n as u64, a.k)?;
    let r = &run.report;
    let mut table = Table::new(vec![
        "order",
        "central_moment",
        "standard_error",
        "standardized",
        "standardized_se",
        "exact_central_moment",
    ]);
    for o in 0..=a.orders {
        table.push(vec![
            cell(o),
            cell(r.central_moments[o]),
            cell(r.standard_errors[o]),
            cell(r.standardized[o]),
            cell(r.standardized_se[o]),
            cell(exact.central_moments[o]),
        ]);
    }
    let mut warnings = Vec::new();
    if r.unreliable {
        warnings.push(low_ess_warning(r.ess));
    }
    Ok(Outcome {
        results: json!({
            "report": r,
            "exact": exact,
            "conformance": conformance,
        }),
        table,
        warnings,
    })
}

pub fn cue_check(a: &CueCheckArgs, seed: u64) -> Result<Outcome> {
    let options = DenseOptions {
        phase_correction: !a.no_phase_correction,
    };
    let check = cue::rotation_invariance_check_with(a.n, a.trials, a.phi, SeedSpec::new(seed, 0), options)?;
    let mut table = Table::new(vec!["n", "trials", "phi", "statistic", "critical_value", "pass"]);
    table.push(vec![
        cell(check.n),
        cell(check.trials),
        cell(check.phi),
        cell(check.statistic),
        cell(check.critical_value),
        cell(check.pass),
    ]);
    let mut warnings = Vec::new();
    if !check.pass {
        warnings.push("rotation invariance rejected at the 1% level".to_string());
    }
    Ok(Outcome {
        results: to_value(&check),
        table,
        warnings,
    })
}

pub fn zeta_scan(a: &ZetaScanArgs, seed: u64) -> Result<Outcome> {
    let mut spec = ScanSpec::new(a.t, a.samples, a.k, a.m, a.alpha, SeedSpec::new(seed, 0))?;
    if a.window_lo.is_some() || a.window_hi.is_some() {
        let lo = a.window_lo.unwrap_or(spec.window.lo());
        let hi = a.window_hi.unwrap_or(spec.window.hi());
        spec.window = PrimeWindow::new(lo, hi)?;
    }
    spec.n_max = a.orders;
    spec.bootstrap = a.bootstrap;
    spec.validate()?;
    let report = parallel::weighted_scan(&spec)?;

    let h = &report.histogram;
    let mut table = Table::new(vec!["bin_lo", "bin_hi", "weighted_count"]);
    let (first, last) = (h.bin_edges[0], h.bin_edges[h.bin_edges.len() - 1]);
    table.push(vec![cell(f64::NEG_INFINITY), cell(first), cell(h.underflow)]);
    for (i, c) in h.weighted_counts.iter().enumerate() {
        table.push(vec![cell(h.bin_edges[i]), cell(h.bin_edges[i + 1]), cell(c)]);
    }
    table.push(vec![cell(last), cell(f64::INFINITY), cell(h.overflow)]);

    let mut warnings = Vec::new();
    if report.moments.unreliable {
        warnings.push(low_ess_warning(report.moments.ess));
    }
    if report.non_finite > 0 {
        warnings.push(format!("{} draws hit a zero of zeta and sit in the underflow bin", report.non_finite));
    }
    Ok(Outcome {
        results: json!({
            "window": {"lo": spec.window.lo(), "hi": spec.window.hi(), "primes": spec.window.len()},
            "mertens_l": mertens_l(&spec.window),
            "mu_alpha": mu_alpha(&spec.window, spec.alpha),
            "overlay_mean": report.overlay_mean,
            "overlay_variance": report.overlay_variance,
            "moments": report.moments,
            "non_finite": report.non_finite,
            "proxy_correlation": report.proxy_correlation,
            "histogram": report.histogram,
        }),
        table,
        warnings,
    })
}

pub fn mu_alpha_table(a: &MuAlphaArgs) -> Result<Outcome> {
    let window = PrimeWindow::new(a.lo, a.hi)?;
    let l = mertens_l(&window);
    let mut table = Table::new(vec!["alpha", "mu_alpha", "minus_log_abs_alpha", "mertens_l", "log_log_hi"]);
    let mut rows = Vec::new();
    for &alpha in &a.alpha {
        let mu = mu_alpha(&window, alpha);
        let reference = -alpha.abs().ln();
        table.push(vec![cell(alpha), cell(mu), cell(reference), cell(l), cell(a.hi.ln().ln())]);
        rows.push(json!({"alpha": alpha, "mu_alpha": mu, "minus_log_abs_alpha": reference}));
    }
    Ok(Outcome {
        results: json!({
            "window": {"lo": a.lo, "hi": a.hi, "primes": window.len()},
            "mertens_l": l,
            "log_log_hi": a.hi.ln().ln(),
            "rows": rows,
        }),
        table,
        warnings: Vec::new(),
    })
}

fn set_label(indices: &[usize]) -> String {
    let inner: Vec<String> = indices.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", inner.join(" "))
}

pub fn shift_table(a: &ShiftTableArgs) -> Result<Outcome> {
    let selections = shift::enumerate_selections(a.k)?;
    let window = PrimeWindow::new(a.window_lo, a.window_hi)?;
    let tuple = if a.k > 0 {
        Some(ShiftTuple::imaginary_pattern(a.k, a.alpha)?)
    } else {
        None
    };
    let mut table = Table::new(vec!["j", "s", "t", "g_sum_re", "g_sum_im"]);
    let mut rows = Vec::new();
    for sel in &selections {
        let g = match &tuple {
            Some(t) => shift::g_sum(&window, sel, t)?,
            None => Complex64::new(0.0, 0.0),
        };
        let (s, t) = (set_label(&sel.s_indices()), set_label(&sel.t_indices()));
        table.push(vec![cell(sel.j()), s.clone(), t.clone(), cell(g.re), cell(g.im)]);
        rows.push(json!({"j": sel.j(), "s": sel.s_indices(), "t": sel.t_indices(), "g_sum": [g.re, g.im]}));
    }
    Ok(Outcome {
        results: json!({
            "k": a.k,
            "selections": selections.len(),
            "mertens_l": mertens_l(&window),
            "mu_alpha": mu_alpha(&window, a.alpha),
            "rows": rows,
        }),
        table,
        warnings: Vec::new(),
    })
}

pub fn recipe_k1(a: &RecipeK1Args) -> Result<Outcome> {
    let (alpha, beta) = (Complex64::new(a.alpha, 0.0), Complex64::new(a.beta, 0.0));
    let recipe = shift::second_moment_recipe_k1(a.t_lo, a.t_hi, alpha, beta)?;
    let quadrature = if a.quadrature {
        Some(shift::second_moment_quadrature(a.t_lo, a.t_hi, alpha, beta)?)
    } else {
        None
    };
    let gap = quadrature.map(|q| (recipe - q).norm() / q.norm());
    let mut table = Table::new(vec![
        "t_lo",
        "t_hi",
        "alpha",
        "beta",
        "recipe_re",
        "recipe_im",
        "quadrature_re",
        "quadrature_im",
        "relative_gap",
    ]);
    let opt = |x: Option<f64>| x.map(cell).unwrap_or_default();
    table.push(vec![
        cell(a.t_lo),
        cell(a.t_hi),
        cell(a.alpha),
        cell(a.beta),
        cell(recipe.re),
        cell(recipe.im),
        opt(quadrature.map(|q| q.re)),
        opt(quadrature.map(|q| q.im)),
        opt(gap),
    ]);
    Ok(Outcome {
        results: json!({
            "recipe": [recipe.re, recipe.im],
            "quadrature": quadrature.map(|q| [q.re, q.im]),
            "relative_gap": gap,
        }),
        table,
        warnings: Vec::new(),
    })
}
