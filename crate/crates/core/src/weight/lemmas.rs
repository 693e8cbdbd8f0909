//! Empirical constants of the pointwise estimates behind the weight construction.
//!
//! Each check samples a region, evaluates the ratio `left side / right side` of the
//! estimate and reports its maximum as the fitted constant. For estimates that
//! carry a factor `Λ_j^{−1/2}`, [`lambda_scaling`] compares the fitted constants at
//! `Λ` and `4Λ`, whose ratio should be close to `1/2`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::assembly::{WeightAssembly, WeightParams};
use super::jet::Jet;
use super::sampling::SampleRegion;
use crate::linalg::{kernel, spectral_norm};
use crate::symplectic::{RForms, SystemOfForms};
use crate::{lit, to_f64, Error, Real, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Lemma {
    /// `|Re q_j(W A^{s1} X; W A^{s2} X)| ≤ Re q_j(W A^{s1} X)^{1/2} Re q_j(W A^{s2} X)^{1/2} ≤ r_{k+s1}^{1/2} r_{k+s2}^{1/2}`.
    PolarizedCauchySchwarz,
    /// `|∇r_k|² ≤ 4 ‖G_k‖ r_k`.
    GradientBound,
    /// `|r̃_{m−j−1,p}| / r_{m−j−1}^{(2m−2j−2)/(2m−2j−1)} ≲ Λ_j^{−1/2}`.
    TildeRatio { j: usize },
    /// `|Σ_p H r̃_{m−j−1,p} / r_{m−j−1}^{(2m−2j−2)/(2m−2j−1)} − 2 r_{m−j−1}^{1/(2m−2j−1)}| ≲ Λ_j^{−1/2} r_{m−j−1}^{1/(2m−2j−1)}`.
    BracketTildeR { j: usize },
    /// `|H_{Im q_p} W̃_0| ≲ ⟨X⟩^{2/(2m+1)}`.
    BracketWTilde0,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub lemma: Lemma,
    pub m: usize,
    pub lambda: f64,
    pub samples: usize,
    pub fitted_constant: f64,
    /// Bound the fitted constant is compared against, when the estimate has an explicit one.
    pub bound: Option<f64>,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingReport {
    pub lemma: Lemma,
    pub lambdas: Vec<f64>,
    pub constants: Vec<f64>,
    /// `C(4Λ) / C(Λ)` for each base `Λ`.
    pub ratios: Vec<f64>,
    pub holds: bool,
}

/// Sample region concentrated near `Ker G_{m−j−2}`, where the `Λ_j` hypotheses bite.
pub fn lemma_region<T: Real>(sys: &SystemOfForms<T>, m: usize, j: usize, directions: usize, seed: u64) -> SampleRegion {
    let r = sys.r_forms(m);
    let g = r.gram(m - j - 2).map(|v| to_f64(v));
    let (ker, _) = kernel(&g, 1e-10);
    SampleRegion::log_spaced(24, 1.0, 1e3, directions, seed).with_focus(ker.basis)
}

fn pow<T: Real>(x: T, e: f64) -> T {
    x.powf(lit(e))
}

/// Hypotheses of the `Λ_j` estimates at `X`.
fn in_lambda_region<T: Real>(r: &RForms<T>, m: usize, j: usize, lambda: f64, x: &DVector<T>, upper: bool) -> bool {
    let k = m - j - 1;
    let b = (2 * m - 2 * j - 1) as f64;
    let rk = r.r(k, x);
    let jap = T::one() + x.norm_squared();
    if rk < pow(jap, b / (2 * m + 1) as f64) {
        return false;
    }
    if lit::<T>(lambda) * r.r(k - 1, x) > lit::<T>(2.0) * pow(rk, (b - 2.0) / b) {
        return false;
    }
    !upper || r.r(k + 1, x) <= pow(rk, (b + 2.0) / b)
}

fn words(n_forms: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| (0..n_forms).map(move |l| {
                let mut w = w.clone();
                w.push(l);
                w
            }))
            .collect();
    }
    out
}

pub fn lemma_sampler<T: Real>(
    lemma: Lemma,
    sys: &SystemOfForms<T>,
    m: usize,
    lambda: f64,
    region: &SampleRegion,
) -> Result<LemmaReport> {
    if m == 0 {
        return Err(Error::Input("m must be at least 1".into()));
    }
    let r = sys.r_forms((m + 1).max(m.min(2) + 2));
    let pts: Vec<DVector<T>> = region.points(sys.dim());
    let tiny = lit::<T>(1e-300);
    let mut fitted = T::zero();
    let mut count = 0usize;
    let mut bound = None;
    match lemma {
        Lemma::PolarizedCauchySchwarz => {
            bound = Some(1.0 + 1e-10);
            let maps = &r.im_maps;
            for x in &pts {
                for k in 0..=m.min(2) {
                    for w in words(sys.len(), k) {
                        for p in 0..sys.len() {
                            for q in sys.forms() {
                                for s1 in 0..3 {
                                    for s2 in 0..3 {
                                        let a = word_then_power(maps, &w, p, s1, x);
                                        let b = word_then_power(maps, &w, p, s2, x);
                                        let lhs = a.dot(&(q.re() * &b)).abs();
                                        let qa = a.dot(&(q.re() * &a)).max(T::zero());
                                        let qb = b.dot(&(q.re() * &b)).max(T::zero());
                                        let first = (qa * qb).sqrt();
                                        let second = (r.r(k + s1, x) * r.r(k + s2, x)).max(T::zero()).sqrt();
                                        if first > tiny {
                                            fitted = fitted.max(lhs / first);
                                        }
                                        if second > tiny {
                                            fitted = fitted.max(lhs / second);
                                        }
                                        count += 1;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Lemma::GradientBound => {
            bound = Some(1.0 + 1e-10);
            for k in 0..=m {
                let norm = spectral_norm(r.gram(k));
                for x in &pts {
                    let rk = r.r(k, x);
                    if rk > tiny && norm > tiny {
                        let g = r.grad_r(k, x);
                        fitted = fitted.max(g.norm_squared() / (lit::<T>(4.0) * norm * rk));
                        count += 1;
                    }
                }
            }
        }
        Lemma::TildeRatio { j } | Lemma::BracketTildeR { j } => {
            if j + 2 > m {
                return Err(Error::Input(format!("index j = {j} needs m ≥ {}", j + 2)));
            }
            let upper = matches!(lemma, Lemma::BracketTildeR { .. });
            let k = m - j - 1;
            let b = (2 * m - 2 * j - 1) as f64;
            let tildes: Vec<DMatrix<T>> = (0..sys.len()).map(|p| r.r_tilde_matrix(k, p)).collect();
            for x in &pts {
                if !in_lambda_region(&r, m, j, lambda, x, upper) {
                    continue;
                }
                count += 1;
                let rk = r.r(k, x);
                let den = pow(rk, (b - 1.0) / b);
                if upper {
                    let mut sum = T::zero();
                    for (p, t) in tildes.iter().enumerate() {
                        sum += Jet::quadratic(t, x).bracket(&r.im_maps[p], x);
                    }
                    let gain = pow(rk, 1.0 / b);
                    fitted = fitted.max((sum / den - gain * lit(2.0)).abs() / gain);
                } else {
                    for t in &tildes {
                        fitted = fitted.max(x.dot(&(t * x)).abs() / den);
                    }
                }
            }
        }
        Lemma::BracketWTilde0 => {
            if m < 2 {
                return Err(Error::Input("W̃_0 is used from m = 2 on".into()));
            }
            let asm = WeightAssembly::new(sys.clone(), WeightParams::unit(m, 1.0), None)?;
            let gain = 2.0 / (2 * m + 1) as f64;
            for x in &pts {
                let w = asm.w_tilde0(x);
                let jx = Jet::japanese(x, lit(gain)).v;
                for p in 0..sys.len() {
                    fitted = fitted.max(w.bracket(&r.im_maps[p], x).abs() / jx);
                }
                count += 1;
            }
        }
    }
    let fitted = to_f64(fitted);
    let holds = count > 0 && fitted.is_finite() && bound.is_none_or(|b| fitted <= b);
    Ok(LemmaReport { lemma, m, lambda, samples: count, fitted_constant: fitted, bound, holds })
}

/// `W (Im F_p)^s X` with `W = Im F_{w_1} ⋯ Im F_{w_k}`.
fn word_then_power<T: Real>(maps: &[DMatrix<T>], w: &[usize], p: usize, s: usize, x: &DVector<T>) -> DVector<T> {
    let mut v = x.clone();
    for _ in 0..s {
        v = &maps[p] * v;
    }
    for &l in w.iter().rev() {
        v = &maps[l] * v;
    }
    v
}

/// Fitted constants at each `Λ` and `4Λ`; holds when every ratio `C(4Λ)/C(Λ)` is in `[1/4, 1]`.
pub fn lambda_scaling<T: Real>(
    lemma: Lemma,
    sys: &SystemOfForms<T>,
    m: usize,
    bases: &[f64],
    region: &SampleRegion,
) -> Result<ScalingReport> {
    let mut lambdas = Vec::new();
    let mut constants = Vec::new();
    let mut ratios = Vec::new();
    for &l in bases {
        let c0 = lemma_sampler(lemma, sys, m, l, region)?;
        let c1 = lemma_sampler(lemma, sys, m, 4.0 * l, region)?;
        lambdas.extend([l, 4.0 * l]);
        constants.extend([c0.fitted_constant, c1.fitted_constant]);
        ratios.push(c1.fitted_constant / c0.fitted_constant);
    }
    let holds = ratios.iter().all(|&q| (0.25..=1.0).contains(&q));
    Ok(ScalingReport { lemma, lambdas, constants, ratios, holds })
}
