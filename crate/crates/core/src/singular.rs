//! Singular spaces and the iterated kernel tower of a system.
//!
//! For one form, `S = ∩_{j=0}^{2n−1} Ker[Re F (Im F)^j]`. For a system the tower is
//! `T_0 = ∩_j Ker Re F_j`, `T_k = T_0 ∩ ∩_l (Im F_l)⁻¹ T_{k−1}`, and `k0` is the first
//! level at which it collapses to `{0}`. The estimate then holds with loss
//! `δ = 2k0/(2k0+1)`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::linalg::{kernel, min_sym_eigenvalue, vstack, RankGap, Subspace};
use crate::symplectic::{hamilton_of_matrix, QuadraticForm, SystemOfForms};
use crate::{lit, to_f64, Error, Real, Result};

pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// `∩_{j=0}^{depth−1} Ker[re · im^j]`.
pub fn iterated_kernel<T: Real>(re: &DMatrix<T>, im: &DMatrix<T>, depth: usize, tol: T) -> Subspace<T> {
    let d = re.ncols();
    let mut blocks = Vec::with_capacity(depth);
    let mut power = DMatrix::<T>::identity(d, d);
    for _ in 0..depth {
        blocks.push(re * &power);
        power = im * power;
    }
    kernel(&vstack(&blocks, d), tol).0
}

/// Singular space of a single form.
pub fn singular_space<T: Real>(q: &QuadraticForm<T>, tol: T) -> Subspace<T> {
    let f = q.hamilton_map();
    iterated_kernel(&f.re, &f.im, q.dim(), tol)
}

/// Kernel tower of a system.
#[derive(Clone, Debug)]
pub struct Tower<T: Real> {
    pub levels: Vec<Subspace<T>>,
    pub gaps: Vec<RankGap>,
    /// First `k` with `T_k = {0}`.
    pub k0: Option<usize>,
    /// Level at which `T_k = T_{k−1} ≠ {0}`, if the tower stalled.
    pub stalled_at: Option<usize>,
}

impl<T: Real> Tower<T> {
    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(|s| s.dim()).collect()
    }
}

/// Builds `T_0 ⊇ T_1 ⊇ …` up to `kmax`, stopping at `{0}` or at a fixed point.
pub fn system_tower<T: Real>(sys: &SystemOfForms<T>, kmax: usize, tol: T) -> Tower<T> {
    let d = sys.dim();
    let re_blocks = sys.re_maps();
    let im_maps = sys.im_maps();
    let (t0, g0) = kernel(&vstack(&re_blocks, d), tol);
    let mut tower = Tower { levels: vec![t0], gaps: vec![g0], k0: None, stalled_at: None };
    if tower.levels[0].dim() == 0 {
        tower.k0 = Some(0);
        return tower;
    }
    for k in 1..=kmax {
        let prev = &tower.levels[k - 1];
        let perp = prev.complement_projector();
        let mut blocks = re_blocks.clone();
        blocks.extend(im_maps.iter().map(|a| &perp * a));
        let (tk, gk) = kernel(&vstack(&blocks, d), tol);
        let (dim, prev_dim) = (tk.dim(), prev.dim());
        tower.levels.push(tk);
        tower.gaps.push(gk);
        if dim == 0 {
            tower.k0 = Some(k);
            break;
        }
        if dim == prev_dim {
            tower.stalled_at = Some(k);
            break;
        }
    }
    tower
}

/// Outcome of the tower analysis.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub k0: Option<usize>,
    pub delta: Option<f64>,
    pub dims: Vec<usize>,
    pub gaps: Vec<RankGap>,
    /// `λ_min(Σ_{k ≤ k0} G_k)` when `k0` exists.
    pub lambda_min: Option<f64>,
    pub tolerance: f64,
    pub satisfied: bool,
}

pub fn loss_exponent(k0: usize) -> f64 {
    2.0 * k0 as f64 / (2.0 * k0 as f64 + 1.0)
}

pub fn certificate<T: Real>(sys: &SystemOfForms<T>, kmax: Option<usize>, tol: T) -> Certificate {
    let kmax = kmax.unwrap_or(sys.dim());
    let tower = system_tower(sys, kmax, tol);
    let lambda_min = tower.k0.map(|k| to_f64(positive_definiteness_check(sys, k)));
    Certificate {
        k0: tower.k0,
        delta: tower.k0.map(loss_exponent),
        dims: tower.dims(),
        gaps: tower.gaps.clone(),
        lambda_min,
        tolerance: to_f64(tol),
        satisfied: tower.k0.is_some(),
    }
}

/// `λ_min(Σ_{k ≤ m} G_k)`; positive exactly when `Σ_{k≤m} r_k` is positive definite.
pub fn positive_definiteness_check<T: Real>(sys: &SystemOfForms<T>, m: usize) -> T {
    min_sym_eigenvalue(&sys.r_forms(m).partial_sum(m))
}

/// Sampled check that `q` does not vanish on the unit sphere of its singular space.
#[derive(Clone, Debug, Serialize)]
pub struct EllipticityCheck {
    pub singular_dim: usize,
    /// Smallest `|q|` found on the unit sphere of `S`.
    pub min_abs: f64,
    pub holds: bool,
    /// The minimum is found by sampling and local descent, not certified.
    pub heuristic: bool,
}

pub fn partial_ellipticity<T: Real>(q: &QuadraticForm<T>, tol: T, seed: u64) -> Result<EllipticityCheck> {
    let s = singular_space(q, lit(DEFAULT_RANK_TOL));
    let d = s.dim();
    if d == 0 {
        return Ok(EllipticityCheck { singular_dim: 0, min_abs: f64::INFINITY, holds: true, heuristic: false });
    }
    let b = &s.basis;
    let br = b.transpose() * q.re() * b;
    let bi = b.transpose() * q.im() * b;
    let eval = |z: &DVector<T>| {
        let (a, c) = (z.dot(&(&br * z)), z.dot(&(&bi * z)));
        a * a + c * c
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(T, DVector<T>)> = None;
    let mut consider = |z: DVector<T>| {
        let nz = z.norm();
        if nz == T::zero() {
            return;
        }
        let z = z / nz;
        let f = eval(&z);
        if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
            best = Some((f, z));
        }
    };
    for i in 0..d {
        let mut z = DVector::zeros(d);
        z[i] = T::one();
        consider(z);
    }
    for _ in 0..10 * d * d {
        consider(crate::weight::sampling::gaussian_vector(d, &mut rng));
    }
    let (mut f, mut z) = best.ok_or_else(|| Error::Numerical("no sample on the singular sphere".into()))?;
    let two = lit::<T>(2.0);
    let mut step = lit::<T>(0.1);
    for _ in 0..50 {
        let (a, c) = (z.dot(&(&br * &z)), z.dot(&(&bi * &z)));
        let g = (&br * &z * a + &bi * &z * c) * (two * two);
        let g = &g - &z * g.dot(&z);
        if g.norm() == T::zero() {
            break;
        }
        let mut moved = false;
        for _ in 0..30 {
            let cand = &z - &g * step;
            let cand = &cand / cand.norm();
            let fc = eval(&cand);
            if fc < f {
                z = cand;
                f = fc;
                step *= lit::<T>(1.5);
                moved = true;
                break;
            }
            step *= lit::<T>(0.5);
        }
        if !moved {
            break;
        }
    }
    let min_abs = f.sqrt();
    let holds = min_abs > tol * q.scale_norm().max(T::one());
    Ok(EllipticityCheck { singular_dim: d, min_abs: to_f64(min_abs), holds, heuristic: true })
}

/// Hamilton maps of the real and imaginary parts of a form, exposed for reports.
pub fn real_imag_maps<T: Real>(q: &QuadraticForm<T>) -> (DMatrix<T>, DMatrix<T>) {
    (hamilton_of_matrix(q.re()), hamilton_of_matrix(q.im()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(re: &[f64], im: &[f64]) -> QuadraticForm<f64> {
        QuadraticForm::new(1, DMatrix::from_row_slice(2, 2, re), DMatrix::from_row_slice(2, 2, im)).unwrap()
    }

    #[test]
    fn model_operator_has_trivial_singular_space() {
        let q = form(&[0.0, 0.0, 0.0, 1.0], &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(singular_space(&q, 1e-10).dim(), 0);
        let cert = certificate(&SystemOfForms::single(q), None, 1e-10);
        assert_eq!(cert.k0, Some(1));
        assert_eq!(cert.dims, vec![1, 0]);
    }

    #[test]
    fn elliptic_form_has_k0_zero() {
        let q = form(&[1.0, 0.0, 0.0, 1.0], &[1.0, 0.0, 0.0, 1.0]);
        let sys = SystemOfForms::single(q);
        assert_eq!(certificate(&sys, None, 1e-10).k0, Some(0));
        assert!((positive_definiteness_check(&sys, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn real_degenerate_form_stalls() {
        let q = form(&[0.0, 0.0, 0.0, 1.0], &[0.0; 4]);
        let t = system_tower(&SystemOfForms::single(q), 2, 1e-10);
        assert_eq!(t.k0, None);
        assert_eq!(t.stalled_at, Some(1));
    }

    #[test]
    fn ellipticity_on_singular_space() {
        // Re q = ξ² vanishes on the x-axis where Im q = x² does not.
        let q = form(&[0.0, 0.0, 0.0, 1.0], &[1.0, 0.0, 0.0, 0.0]);
        assert!(partial_ellipticity(&q, 1e-8, 1).unwrap().holds);
    }
}
