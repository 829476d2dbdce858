use core::f64::consts::TAU;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use tiltlab_core::cue::*;
use tiltlab_core::rmt_exact::{weighted_central_moments, TiltSpec};

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

// One-sample KS distance of `xs` from the uniform law on [0, 2π).
fn ks_uniform(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, x)| {
            let f = x / TAU;
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn u1_phase_is_uniform() {
    let mut xs: Vec<f64> = (0..100_000u64)
        .map(|i| sample_cue(1, SeedSpec::new(11, i)).unwrap().angles()[0])
        .collect();
    assert!(xs.iter().all(|&a| (0.0..TAU).contains(&a)));
    assert!(ks_uniform(&mut xs) < 0.01);
}

#[test]
fn trace_moments_at_n8() {
    let mut re = Vec::new();
    let mut im = Vec::new();
    let mut sq = Vec::new();
    for i in 0..100_000u64 {
        let s = sample_cue(8, SeedSpec::new(12, i)).unwrap();
        assert_eq!(s.n(), 8);
        let tr: Complex64 = s.angles().iter().map(|&a| Complex64::from_polar(1.0, a)).sum();
        re.push(tr.re);
        im.push(tr.im);
        sq.push(tr.norm_sqr());
    }
    for xs in [&re, &im] {
        let (m, se) = mean_and_se(xs);
        assert!(m.abs() < 3.0 * se, "{m} ± {se}");
    }
    let (m, se) = mean_and_se(&sq);
    assert!((m - 1.0).abs() < 3.0 * se, "{m} ± {se}");
}

#[test]
fn trace_square_is_one_at_n1() {
    for i in 0..100u64 {
        let s = sample_cue(1, SeedSpec::new(13, i)).unwrap();
        let tr = Complex64::from_polar(1.0, s.angles()[0]);
        assert!((tr.norm_sqr() - 1.0).abs() < 1e-15);
    }
}

// Determinant by Gaussian elimination with partial pivoting.
fn log_abs_det(mut a: DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[(i, c)].norm().total_cmp(&a[(j, c)].norm())).unwrap();
        a.swap_rows(c, p);
        let d = a[(c, c)];
        acc += d.norm().ln();
        for r in c + 1..n {
            let f = a[(r, c)] / d;
            for cc in c..n {
                let v = a[(c, cc)];
                a[(r, cc)] -= f * v;
            }
        }
    }
    acc
}

#[test]
fn char_poly_matches_determinant() {
    for i in 0..20u64 {
        let u = sample_unitary(6, SeedSpec::new(14, i)).unwrap();
        let angles = eigen_angles(&u).unwrap();
        for theta in [0.0, 0.7, -2.1] {
            let m = DMatrix::<Complex64>::identity(6, 6) - &u * Complex64::from_polar(1.0, -theta);
            let oracle = log_abs_det(m);
            let v = log_abs_char_poly(&angles, theta).unwrap();
            assert!((v - oracle).abs() < 1e-8, "{v} vs {oracle}");
        }
    }
}

#[test]
fn draws_are_unitary_and_deterministic() {
    let seed = SeedSpec::new(15, 3);
    let u = sample_unitary(10, seed).unwrap();
    let drift = (u.adjoint() * &u - DMatrix::<Complex64>::identity(10, 10)).norm();
    assert!(drift < UNITARITY_TOLERANCE);
    assert_eq!(sample_cue(10, seed).unwrap(), sample_cue(10, seed).unwrap());
    assert_ne!(sample_cue(10, seed).unwrap(), sample_cue(10, seed.offset(1)).unwrap());
    assert_eq!(sample_log_abs_z(30, 1.0, seed).unwrap(), sample_log_abs_z(30, 1.0, seed).unwrap());
}

#[test]
fn char_poly_is_permutation_invariant() {
    let s = sample_cue(12, SeedSpec::new(16, 0)).unwrap();
    let mut a = s.angles().to_vec();
    a.reverse();
    a.rotate_left(5);
    let shuffled = EigenAngles::from_phases(a);
    for theta in [0.0, 1.0, 4.0] {
        let x = log_abs_char_poly(&s, theta).unwrap();
        let y = log_abs_char_poly(&shuffled, theta).unwrap();
        assert!((x - y).abs() < 1e-13);
    }
}

#[test]
fn rotation_identity_at_zero_angle() {
    let r = rotation_invariance_check(8, 1000, 0.0, SeedSpec::new(17, 0)).unwrap();
    assert_eq!(r.statistic, 0.0);
    assert!(r.pass);
    assert!(rotation_invariance_check(8, 999, 1.0, SeedSpec::new(17, 0)).is_err());
}

#[test]
fn rotation_invariance_holds() {
    let r = rotation_invariance_check(16, 10_000, 1.0, SeedSpec::new(18, 0)).unwrap();
    assert!(r.pass, "{r:?}");
}

#[test]
fn uncorrected_qr_fails_rotation_check() {
    let off = DenseOptions { phase_correction: false };
    let r = rotation_invariance_check_with(16, 10_000, 1.0, SeedSpec::new(18, 0), off).unwrap();
    assert!(!r.pass, "{r:?}");
}

#[test]
fn factor_sampler_matches_dense() {
    let n = 12;
    let dense: Vec<f64> = (0..4000u64)
        .map(|i| log_abs_char_poly(&sample_cue(n, SeedSpec::new(19, i)).unwrap(), 0.0).unwrap())
        .collect();
    let factor: Vec<f64> = (0..4000u64)
        .map(|i| sample_log_abs_z(n, 0.0, SeedSpec::new(20, i)).unwrap())
        .collect();
    assert!(ks_two_sample(&dense, &factor) < ks_critical_1pct(4000, 4000));
}

#[test]
fn haar_log_z_mean_and_variance_at_n50() {
    let m = 100_000;
    let xs: Vec<f64> = (0..m as u64)
        .map(|i| sample_log_abs_z(50, 0.0, SeedSpec::new(21, i)).unwrap())
        .collect();
    let (mean, se) = mean_and_se(&xs);
    assert!(mean.abs() < 3.0 * se, "{mean} ± {se}");

    let exact = weighted_central_moments(&TiltSpec::new(50, 0.0, 2).unwrap()).unwrap().central_moments[2];
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m as f64;
    // bootstrap SE of the variance
    let mut rng = SeedSpec::new(21, 0).derive(1).rng();
    let reps: Vec<f64> = (0..200)
        .map(|_| {
            let ys: Vec<f64> = (0..m).map(|_| xs[rng.random_range(0..m)]).collect();
            let mu = ys.iter().sum::<f64>() / m as f64;
            ys.iter().map(|y| (y - mu).powi(2)).sum::<f64>() / m as f64
        })
        .collect();
    let var_se = mean_and_se(&reps).1 * (reps.len() as f64).sqrt();
    assert!((var - exact).abs() < 3.0 * var_se, "{var} vs {exact} ± {var_se}");
}

#[test]
fn tilted_factor_draws_shift_the_mean() {
    let m = 20_000;
    let xs: Vec<f64> = (0..m as u64)
        .map(|i| sample_log_abs_z(20, 1.0, SeedSpec::new(22, i)).unwrap())
        .collect();
    let (mean, se) = mean_and_se(&xs);
    let exact = weighted_central_moments(&TiltSpec::new(20, 1.0, 2).unwrap()).unwrap().mu_weighted;
    assert!((mean - exact).abs() < 3.0 * se, "{mean} vs {exact} ± {se}");
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn angles_in_range_and_char_poly_bounded(n in 1usize..24, seed in any::<u64>(), theta in -10.0f64..10.0) {
            let s = sample_cue(n, SeedSpec::new(seed, 0)).unwrap();
            prop_assert_eq!(s.n(), n);
            prop_assert!(s.angles().iter().all(|&a| (0.0..TAU).contains(&a)));
            if let Ok(v) = log_abs_char_poly(&s, theta) {
                // |det(I - U e^{-iθ})| <= 2^n
                prop_assert!(v <= n as f64 * 2f64.ln() + 1e-9);
            }
        }
    }
}
