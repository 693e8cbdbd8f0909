//! Finite-level probe of the subelliptic estimate
//! `‖Λ^s u‖² ≲ Σ_j ‖q_j^w u‖² + ‖u‖²` with `Λ = 1 + (|x|² + |ξ|²)^w`.
//!
//! On the Hermite levels `|α| ≤ D` the best constant is the smallest eigenvalue
//! `c(D)` of the pencil `(Σ_j A_jᴴ A_j + I, W²)`, where `A_j` is `q_j^w` applied to
//! the test space and `W = diag((1 + 2|α| + n)^s)`. The operators are assembled
//! on levels `≤ D + 2`, so that `A_j` restricted to the test space is exact. A
//! bounded `c(D)` as `D` grows supports the estimate; a collapsing `c(D)` refutes it.

use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::{hermitian_eigenvalues, hermitian_min_eigenpair};
use crate::quantization::{quantize_form, Convention, HermiteBasis};
use crate::symplectic::SystemOfForms;
use crate::{lit, to_f64, Error, Real, Result};

pub const DEFAULT_LEVELS: [usize; 4] = [8, 16, 24, 32];
const GUARD: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Stable,
    Decaying,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelConstant {
    pub level: usize,
    pub dim: usize,
    pub c: f64,
}

/// Hermite coefficient of the minimizing `u`.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessComponent {
    pub alpha: Vec<u32>,
    /// `|u_α|²` with `‖u‖ = 1`.
    pub weight: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Probe {
    /// Power `s` of the weight `(1 + 2|α| + n)^s`.
    pub s: f64,
    pub levels: Vec<LevelConstant>,
    pub trend: Trend,
    /// Largest components of the minimizer at the top level.
    pub witness: Vec<WitnessComponent>,
}

const WITNESS_COMPONENTS: usize = 6;

/// Power `s = 1/(2k0+1)`, i.e. the gain `⟨X⟩^{2/(2k0+1)}` left by the loss `δ = 2k0/(2k0+1)`.
pub fn exponent_for(k0: usize) -> f64 {
    1.0 / (2 * k0 + 1) as f64
}

/// `λ_min(W⁻¹ N W⁻¹)` for Hermitian `N` and positive diagonal `W`.
pub fn pencil_min<T: Real>(numerator: &DMatrix<Complex<T>>, w: &[T]) -> T {
    let d = numerator.nrows();
    let scaled = DMatrix::from_fn(d, d, |i, j| numerator[(i, j)] / (w[i] * w[j]));
    hermitian_eigenvalues(&scaled).first().copied().unwrap_or_else(T::zero)
}

/// `Σ_j A_jᴴ A_j + I` on the first `inner` basis vectors.
pub fn normal_matrix<T: Real>(ops: &[DMatrix<Complex<T>>], inner: usize) -> DMatrix<Complex<T>> {
    let mut acc: DMatrix<Complex<T>> = DMatrix::identity(inner, inner);
    for a in ops {
        let cols = a.columns(0, inner);
        acc += cols.adjoint() * cols;
    }
    acc
}

/// Diagonal of `W` on the first `inner` vectors of `basis`.
pub fn weight_diagonal<T: Real>(basis: &HermiteBasis, inner: usize, s: f64) -> Vec<T> {
    let n = basis.n() as f64;
    (0..inner).map(|i| lit::<T>((1.0 + 2.0 * basis.level(i) as f64 + n).powf(s))).collect()
}

pub fn classify(cs: &[f64]) -> Trend {
    if cs.len() < 2 {
        return Trend::Stable;
    }
    let monotone = cs.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-10) + 1e-14);
    if monotone && cs[cs.len() - 1] < 0.5 * cs[0] {
        Trend::Decaying
    } else {
        Trend::Stable
    }
}

/// Quantized forms on levels `≤ max_level + 2`.
pub fn assemble<T: Real>(sys: &SystemOfForms<T>, max_level: usize) -> Result<(HermiteBasis, Vec<DMatrix<Complex<T>>>)> {
    let basis = HermiteBasis::new(sys.n(), max_level + GUARD);
    let ops = sys
        .forms()
        .iter()
        .map(|q| quantize_form(q, &basis, Convention::Body))
        .collect::<Result<Vec<_>>>()?;
    Ok((basis, ops))
}

pub fn estimate_probe<T: Real>(sys: &SystemOfForms<T>, s: f64, levels: &[usize]) -> Result<Probe> {
    if levels.is_empty() {
        return Err(Error::Input("at least one level is required".into()));
    }
    let mut levels = levels.to_vec();
    levels.sort_unstable();
    levels.dedup();
    let top = *levels.last().expect("nonempty");
    let (basis, ops) = assemble(sys, top)?;
    let results: Vec<Result<LevelConstant>> = levels
        .par_iter()
        .map(|&level| {
            let inner = basis.count_up_to(level);
            let num = normal_matrix(&ops, inner);
            let w = weight_diagonal::<T>(&basis, inner, s);
            let c = to_f64(pencil_min(&num, &w));
            if !c.is_finite() {
                return Err(Error::Numerical(format!("non-finite constant at level {level}")));
            }
            Ok(LevelConstant { level, dim: inner, c })
        })
        .collect();
    let levels: Vec<LevelConstant> = results.into_iter().collect::<Result<_>>()?;
    let trend = classify(&levels.iter().map(|l| l.c).collect::<Vec<_>>());
    let witness = minimizer(&basis, &ops, top, s)?;
    Ok(Probe { s, levels, trend, witness })
}

/// `u = W⁻¹ v` for the bottom eigenvector `v` of `W⁻¹ N W⁻¹`, reduced to its largest entries.
fn minimizer<T: Real>(basis: &HermiteBasis, ops: &[DMatrix<Complex<T>>], level: usize, s: f64) -> Result<Vec<WitnessComponent>> {
    let inner = basis.count_up_to(level);
    let num = normal_matrix(ops, inner);
    let w = weight_diagonal::<T>(basis, inner, s);
    let scaled = DMatrix::from_fn(inner, inner, |i, j| num[(i, j)] / (w[i] * w[j]));
    let (_, v) = hermitian_min_eigenpair(&scaled).ok_or_else(|| Error::Numerical("empty test space".into()))?;
    let u: Vec<f64> = (0..inner).map(|i| to_f64(v[i].norm_sqr()) / to_f64(w[i] * w[i])).collect();
    let total: f64 = u.iter().sum();
    let mut order: Vec<usize> = (0..inner).collect();
    order.sort_by(|&a, &b| u[b].partial_cmp(&u[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    Ok(order
        .into_iter()
        .take(WITNESS_COMPONENTS)
        .map(|i| WitnessComponent { alpha: basis.index(i).to_vec(), weight: u[i] / total })
        .collect())
}

/// Probe at the power certified by `k0`.
pub fn probe_for_k0<T: Real>(sys: &SystemOfForms<T>, k0: usize, levels: &[usize]) -> Result<Probe> {
    estimate_probe(sys, exponent_for(k0), levels)
}

pub fn sharpness_scan<T: Real>(sys: &SystemOfForms<T>, powers: &[f64], levels: &[usize]) -> Result<Vec<Probe>> {
    powers.iter().map(|&s| estimate_probe(sys, s, levels)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classifier() {
        assert_eq!(classify(&[1.0, 0.9, 0.8]), Trend::Stable);
        assert_eq!(classify(&[1.0, 0.6, 0.4]), Trend::Decaying);
        assert_eq!(classify(&[1.0, 0.3, 0.4]), Trend::Stable);
    }
}
