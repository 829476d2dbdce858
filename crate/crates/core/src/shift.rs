//! Shifted-moment recipe: selection pairs `(S, T)`, the swap rule, per-prime
//! factors `g_p(S, T)`, the Gaussian exponent and the `k = 1` main term.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{FromPrimitive, One, Zero};

use crate::bell;
use crate::error::{Error, Result};
use crate::primes::PrimeWindow;
use crate::quad;
use crate::special::EULER_GAMMA;
use crate::zeta::{self, ZetaEvaluator};
#[allow(unused_imports)] // std float methods take precedence when std is linked
use num_traits::Float;

/// Largest `k` for selection enumeration.
pub const MAX_K: usize = 8;
/// Below this `|α + β|` the main term uses its confluent limit.
pub const CONFLUENT_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShiftTuple {
    alphas: Vec<Complex64>,
    betas: Vec<Complex64>,
}

impl ShiftTuple {
    pub fn new(alphas: Vec<Complex64>, betas: Vec<Complex64>) -> Result<Self> {
        if alphas.is_empty() || alphas.len() != betas.len() {
            return Err(Error::domain("ShiftTuple", "k >= 1 alphas and k betas"));
        }
        if alphas.len() > MAX_K {
            return Err(Error::Guard {
                op: "ShiftTuple",
                limit: MAX_K,
                got: alphas.len(),
            });
        }
        if alphas.iter().chain(&betas).any(|x| !(x.norm() < 1.0)) {
            return Err(Error::domain("ShiftTuple", "all |shift| < 1"));
        }
        Ok(ShiftTuple { alphas, betas })
    }

    /// `α_i = iα`, `β_j = -iα` for all `i, j`.
    pub fn imaginary_pattern(k: usize, alpha: f64) -> Result<Self> {
        Self::new(
            alloc::vec![Complex64::new(0.0, alpha); k],
            alloc::vec![Complex64::new(0.0, -alpha); k],
        )
    }

    pub fn k(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[Complex64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[Complex64] {
        &self.betas
    }
}

/// Subsets `S, T` of `{1..k}` with `|S| = |T|`, stored as bitmasks
/// (bit `i - 1` for index `i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SelectionPair {
    k: u8,
    s: u16,
    t: u16,
}

impl SelectionPair {
    pub fn new(k: usize, s: u16, t: u16) -> Result<Self> {
        if k > MAX_K {
            return Err(Error::Guard {
                op: "SelectionPair",
                limit: MAX_K,
                got: k,
            });
        }
        let full = (1u16 << k) - 1;
        if s & !full != 0 || t & !full != 0 {
            return Err(Error::Contract("selection index outside 1..=k"));
        }
        if s.count_ones() != t.count_ones() {
            return Err(Error::Contract("|S| != |T|"));
        }
        Ok(SelectionPair { k: k as u8, s, t })
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    pub fn j(&self) -> usize {
        self.s.count_ones() as usize
    }

    pub fn s_mask(&self) -> u16 {
        self.s
    }

    pub fn t_mask(&self) -> u16 {
        self.t
    }

    /// One-based indices of `S`, ascending.
    pub fn s_indices(&self) -> Vec<usize> {
        indices(self.s, self.k())
    }

    pub fn t_indices(&self) -> Vec<usize> {
        indices(self.t, self.k())
    }

    fn in_s(&self, i: usize) -> bool {
        self.s >> i & 1 == 1
    }

    fn in_t(&self, i: usize) -> bool {
        self.t >> i & 1 == 1
    }
}

fn indices(mask: u16, k: usize) -> Vec<usize> {
    (0..k).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

/// Every selection pair for `k`, grouped by `j = |S|` ascending, then by
/// `S` and `T` as bitmasks.
pub fn enumerate_selections(k: usize) -> Result<Vec<SelectionPair>> {
    if k > MAX_K {
        return Err(Error::Guard {
            op: "enumerate_selections",
            limit: MAX_K,
            got: k,
        });
    }
    let subsets = 0u16..(1u16 << k);
    let mut out = Vec::new();
    for j in 0..=k as u32 {
        for s in subsets.clone().filter(|m| m.count_ones() == j) {
            for t in subsets.clone().filter(|m| m.count_ones() == j) {
                out.push(SelectionPair { k: k as u8, s, t });
            }
        }
    }
    Ok(out)
}

/// `(α_S; β_T)`: the `r`-th smallest index of `S` is paired with the `r`-th
/// smallest of `T`; `α_{i_r} ← -β_{l_r}` and `β_{l_r} ← -α_{i_r}`.
pub fn swap_shifts(tuple: &ShiftTuple, sel: &SelectionPair) -> Result<ShiftTuple> {
    if sel.k() != tuple.k() {
        return Err(Error::Contract("selection and tuple differ in k"));
    }
    let mut alphas = tuple.alphas.clone();
    let mut betas = tuple.betas.clone();
    for (i, l) in sel.s_indices().into_iter().zip(sel.t_indices()) {
        alphas[i - 1] = -tuple.betas[l - 1];
        betas[l - 1] = -tuple.alphas[i - 1];
    }
    Ok(ShiftTuple { alphas, betas })
}

fn p_pow(ln_p: f64, x: Complex64) -> Complex64 {
    (x * ln_p).exp()
}

/// `Σ_{i∉S} p^{-α_i} + Σ_{j∉T} p^{-β_j} + Σ_{i∈S} p^{α_i} + Σ_{j∈T} p^{β_j}`.
pub fn g_p_factor(p: u64, sel: &SelectionPair, tuple: &ShiftTuple) -> Result<Complex64> {
    if p < 2 {
        return Err(Error::domain("g_p_factor", "p >= 2"));
    }
    if sel.k() != tuple.k() {
        return Err(Error::Contract("selection and tuple differ in k"));
    }
    let lp = (p as f64).ln();
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..tuple.k() {
        let a = tuple.alphas[i];
        total += if sel.in_s(i) { p_pow(lp, a) } else { p_pow(lp, -a) };
        let b = tuple.betas[i];
        total += if sel.in_t(i) { p_pow(lp, b) } else { p_pow(lp, -b) };
    }
    Ok(total)
}

/// `Σ_{p in window} g_p(S, T) / p`.
pub fn g_sum(window: &PrimeWindow, sel: &SelectionPair, tuple: &ShiftTuple) -> Result<Complex64> {
    let mut re = Vec::with_capacity(window.len());
    let mut im = Vec::with_capacity(window.len());
    for &p in window.primes() {
        let g = g_p_factor(p, sel, tuple)? / p as f64;
        re.push(g.re);
        im.push(g.im);
    }
    Ok(Complex64::new(crate::sum::neumaier(re), crate::sum::neumaier(im)))
}

/// `z² L/4 - k z μ + (z/2) g_sum`.
pub fn gaussian_exponent(z: Complex64, l: f64, mu: f64, k: u32, g_sum: Complex64) -> Complex64 {
    z * z * (l / 4.0) - z * (k as f64 * mu) + z * 0.5 * g_sum
}

/// `d^n/dz^n exp(c_1 z + c_2 z²)` at `z = 0`, over any ring with rational
/// constants.
pub fn quadratic_exp_derivative<T>(c1: T, c2: T, n: usize) -> Result<T>
where
    T: Clone + Zero + One + core::ops::Add<Output = T> + core::ops::Mul<Output = T> + FromPrimitive,
{
    bell::exp_derivative(&[c1, c2], n)
}

/// `n`-th `z`-derivative at `0` of `exp(gaussian_exponent(z, ..))`.
pub fn gaussian_exponent_derivative(n: usize, l: f64, mu: f64, k: u32, g_sum: Complex64) -> Result<Complex64> {
    let c1 = g_sum * 0.5 - k as f64 * mu;
    quadratic_exp_derivative(c1, Complex64::new(l / 4.0, 0.0), n)
}

/// Choice of the even mollifier `G(s)` of the approximate functional equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum KernelChoice {
    /// `G(s) = e^{s²}`.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CutoffMode {
    /// `V(x) = 1` for `x <= 1`, else `0`.
    Sharp,
    /// `V(x) = (1/2πi) ∫ G(s) x^{-s} ds/s`.
    Smoothed,
}

/// Kernel of the approximate functional equation. `G(0) = 1` for every
/// choice, so the main terms below do not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RecipeKernelConfig {
    pub g_choice: KernelChoice,
    pub v_cutoff_mode: CutoffMode,
}

impl Default for RecipeKernelConfig {
    fn default() -> Self {
        RecipeKernelConfig {
            g_choice: KernelChoice::Gaussian,
            v_cutoff_mode: CutoffMode::Sharp,
        }
    }
}

impl RecipeKernelConfig {
    pub fn g(&self, s: Complex64) -> Complex64 {
        match self.g_choice {
            KernelChoice::Gaussian => (s * s).exp(),
        }
    }

    /// Cutoff weight at `x > 0`.
    pub fn v(&self, x: f64) -> f64 {
        match (self.v_cutoff_mode, self.g_choice) {
            (CutoffMode::Sharp, _) => {
                if x <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            (CutoffMode::Smoothed, KernelChoice::Gaussian) => 0.5 * libm::erfc(0.5 * x.ln()),
        }
    }
}

fn check_window(op: &'static str, t_lo: f64, t_hi: f64) -> Result<()> {
    if !(t_lo >= 50.0 && t_hi > t_lo) {
        return Err(Error::domain(op, "50 <= t_lo < t_hi"));
    }
    ZetaEvaluator::default().check(t_hi)
}

/// `∫_{t_lo}^{t_hi} [ζ(1+α+β) + (t/2π)^{-α-β} ζ(1-α-β)] dt`, the two
/// selections of the `k = 1` recipe. For `|α + β| <= CONFLUENT_THRESHOLD`
/// this is the limit `∫ [log(t/2π) + 2γ] dt`.
pub fn second_moment_recipe_k1(t_lo: f64, t_hi: f64, alpha: Complex64, beta: Complex64) -> Result<Complex64> {
    check_window("second_moment_recipe_k1", t_lo, t_hi)?;
    let a = alpha + beta;
    if a.norm() <= CONFLUENT_THRESHOLD {
        let antiderivative = |t: f64| t * (t / (2.0 * PI)).ln() - t + 2.0 * EULER_GAMMA * t;
        return Ok(Complex64::new(antiderivative(t_hi) - antiderivative(t_lo), 0.0));
    }
    if (a - 1.0).norm() < 1e-12 || (a + 1.0).norm() < 1e-12 {
        return Err(Error::domain("second_moment_recipe_k1", "α + β != ±1"));
    }
    let one_minus = 1.0 - a;
    let power = |t: f64| (one_minus * (t / (2.0 * PI)).ln()).exp();
    let diagonal = zeta::euler_maclaurin(1.0 + a)? * (t_hi - t_lo);
    let swapped = zeta::euler_maclaurin(1.0 - a)? * (2.0 * PI) / one_minus * (power(t_hi) - power(t_lo));
    Ok(diagonal + swapped)
}

/// `∫_{t_lo}^{t_hi} ζ(1/2 + α + it) ζ(1/2 + β - it) dt` by composite
/// Gauss–Legendre quadrature (16 points per unit-length panel).
pub fn second_moment_quadrature(t_lo: f64, t_hi: f64, alpha: Complex64, beta: Complex64) -> Result<Complex64> {
    check_window("second_moment_quadrature", t_lo, t_hi)?;
    let rule = quad::gauss_legendre(16);
    let panels = libm::ceil(t_hi - t_lo) as usize;
    let eval = ZetaEvaluator::default();
    let unshifted = alpha.norm() == 0.0 && beta.norm() == 0.0;
    let mut re = Vec::new();
    let mut im = Vec::new();
    for (t, w) in quad::composite_nodes(t_lo, t_hi, panels, &rule) {
        let v = if unshifted {
            Complex64::new(eval.zeta_half_line(t)?.norm_sqr(), 0.0)
        } else {
            zeta::euler_maclaurin(Complex64::new(0.5, t) + alpha)?
                * zeta::euler_maclaurin(Complex64::new(0.5, -t) + beta)?
        };
        re.push(w * v.re);
        im.push(w * v.im);
    }
    Ok(Complex64::new(crate::sum::neumaier(re), crate::sum::neumaier(im)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cz(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn selection_counts() {
        assert_eq!(enumerate_selections(0).unwrap().len(), 1);
        assert_eq!(enumerate_selections(1).unwrap().len(), 2);
        let k2 = enumerate_selections(2).unwrap();
        assert_eq!(k2.len(), 6);
        assert_eq!(k2[0].j(), 0);
        assert_eq!(k2[5].j(), 2);
        assert!(enumerate_selections(9).is_err());
    }

    #[test]
    fn single_swap() {
        let tuple = ShiftTuple::new(alloc::vec![cz(0.1, 0.2)], alloc::vec![cz(-0.3, 0.05)]).unwrap();
        let sel = SelectionPair::new(1, 1, 1).unwrap();
        let swapped = swap_shifts(&tuple, &sel).unwrap();
        assert_eq!(swapped.alphas(), [cz(0.3, -0.05)]);
        assert_eq!(swapped.betas(), [cz(-0.1, -0.2)]);
        let empty = SelectionPair::new(1, 0, 0).unwrap();
        assert_eq!(swap_shifts(&tuple, &empty).unwrap(), tuple);
        assert!(SelectionPair::new(2, 0b01, 0b11).is_err());
    }

    #[test]
    fn zero_shift_factor() {
        let tuple = ShiftTuple::new(alloc::vec![cz(0.0, 0.0); 2], alloc::vec![cz(0.0, 0.0); 2]).unwrap();
        for sel in enumerate_selections(2).unwrap() {
            assert_eq!(g_p_factor(7, &sel, &tuple).unwrap(), cz(4.0, 0.0));
        }
    }

    #[test]
    fn cosine_factor() {
        let a0 = 0.37;
        let tuple = ShiftTuple::imaginary_pattern(1, a0).unwrap();
        for sel in enumerate_selections(1).unwrap() {
            let g = g_p_factor(11, &sel, &tuple).unwrap();
            assert!((g - cz(2.0 * (a0 * 11f64.ln()).cos(), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn exponent_basics() {
        assert_eq!(gaussian_exponent(cz(0.0, 0.0), 2.0, 0.7, 3, cz(0.4, 0.1)), cz(0.0, 0.0));
        let mu = 0.9;
        let d2 = gaussian_exponent_derivative(2, 3.0, mu, 2, cz(4.0 * mu, 0.0)).unwrap();
        assert!((d2 - cz(1.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn recipe_symmetric_in_shifts() {
        let a = cz(0.05, 0.0);
        let b = cz(0.02, 0.0);
        let x = second_moment_recipe_k1(1e3, 2e3, a, b).unwrap();
        let y = second_moment_recipe_k1(1e3, 2e3, b, a).unwrap();
        assert_eq!(x, y);
        assert!(second_moment_recipe_k1(10.0, 2e3, a, b).is_err());
    }

    #[test]
    fn smoothed_cutoff_limits() {
        let cfg = RecipeKernelConfig {
            v_cutoff_mode: CutoffMode::Smoothed,
            ..Default::default()
        };
        assert!((cfg.v(1.0) - 0.5).abs() < 1e-15);
        assert!(cfg.v(1e-30) > 1.0 - 1e-12);
        assert!(cfg.v(1e30) < 1e-12);
        assert_eq!(cfg.g(cz(0.0, 0.0)), cz(1.0, 0.0));
    }
}
