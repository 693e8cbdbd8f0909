//! Rank-revealing helpers: kernels, spans, intersections and subspace distance.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen, SVD};
use serde::Serialize;

use crate::{lit, Real};

/// Linear subspace of `R^d` stored as an orthonormal column basis.
#[derive(Clone, Debug)]
pub struct Subspace<T: Real> {
    pub basis: DMatrix<T>,
}

/// Singular-value gap observed while deciding a numerical rank.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct RankGap {
    pub rank: usize,
    /// Smallest singular value counted in the rank (relative to the largest).
    pub smallest_kept: f64,
    /// Largest singular value treated as zero (relative to the largest).
    pub largest_dropped: f64,
}

impl<T: Real> Subspace<T> {
    pub fn zero(ambient: usize) -> Self {
        Self { basis: DMatrix::zeros(ambient, 0) }
    }

    pub fn whole(ambient: usize) -> Self {
        Self { basis: DMatrix::identity(ambient, ambient) }
    }

    pub fn ambient(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn projector(&self) -> DMatrix<T> {
        &self.basis * self.basis.transpose()
    }

    /// Projector onto the orthogonal complement.
    pub fn complement_projector(&self) -> DMatrix<T> {
        DMatrix::identity(self.ambient(), self.ambient()) - self.projector()
    }

    /// Distance from `v` to the subspace, relative to `|v|`.
    pub fn relative_residual(&self, v: &DVector<T>) -> T {
        let norm = v.norm();
        if norm == T::zero() {
            return T::zero();
        }
        (v - &self.basis * (self.basis.transpose() * v)).norm() / norm
    }

    /// Orthonormal basis of the span of the columns of `cols`.
    pub fn span(cols: &DMatrix<T>, rel_tol: T) -> Self {
        let d = cols.nrows();
        if cols.ncols() == 0 {
            return Self::zero(d);
        }
        let svd = SVD::new(cols.clone(), true, false);
        let u = svd.u.expect("left singular vectors requested");
        let smax = svd.singular_values.iter().fold(T::zero(), |a, &s| a.max(s));
        if smax == T::zero() {
            return Self::zero(d);
        }
        let keep: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&i| svd.singular_values[i] > rel_tol * smax)
            .collect();
        let mut basis = DMatrix::zeros(d, keep.len());
        for (c, &i) in keep.iter().enumerate() {
            basis.set_column(c, &u.column(i));
        }
        Self { basis }
    }
}

/// Right kernel of `a` with rank decided by `σ ≤ rel_tol · σ_max`.
pub fn kernel<T: Real>(a: &DMatrix<T>, rel_tol: T) -> (Subspace<T>, RankGap) {
    let d = a.ncols();
    if d == 0 {
        return (Subspace::zero(0), RankGap::default());
    }
    // Pad so that the thin SVD returns a full d×d right factor.
    let padded = if a.nrows() < d {
        let mut p = DMatrix::zeros(d, d);
        p.view_mut((0, 0), (a.nrows(), d)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = SVD::new(padded, false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let s = &svd.singular_values;
    let smax = s.iter().fold(T::zero(), |acc, &x| acc.max(x));
    if smax == T::zero() {
        let gap = RankGap { rank: 0, smallest_kept: 0.0, largest_dropped: 0.0 };
        return (Subspace::whole(d), gap);
    }
    let mut null = Vec::new();
    let mut smallest_kept = f64::INFINITY;
    let mut largest_dropped = 0.0f64;
    for i in 0..s.len() {
        let rel = crate::to_f64(s[i] / smax);
        if s[i] <= rel_tol * smax {
            null.push(i);
            largest_dropped = largest_dropped.max(rel);
        } else {
            smallest_kept = smallest_kept.min(rel);
        }
    }
    let mut basis = DMatrix::zeros(d, null.len());
    for (c, &i) in null.iter().enumerate() {
        basis.set_column(c, &vt.row(i).transpose());
    }
    let gap = RankGap { rank: d - null.len(), smallest_kept, largest_dropped };
    (Subspace { basis }, gap)
}

/// Stacks matrices with a common column count on top of each other.
pub fn vstack<T: Real>(blocks: &[DMatrix<T>], cols: usize) -> DMatrix<T> {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        out.view_mut((r, 0), (b.nrows(), cols)).copy_from(b);
        r += b.nrows();
    }
    out
}

/// Intersection of subspaces of a common ambient space.
pub fn intersect<T: Real>(spaces: &[&Subspace<T>], ambient: usize, rel_tol: T) -> Subspace<T> {
    if spaces.is_empty() {
        return Subspace::whole(ambient);
    }
    let blocks: Vec<_> = spaces.iter().map(|s| s.complement_projector()).collect();
    kernel(&vstack(&blocks, ambient), rel_tol).0
}

/// `{X : A X ∈ V}`.
pub fn preimage<T: Real>(a: &DMatrix<T>, v: &Subspace<T>, rel_tol: T) -> Subspace<T> {
    kernel(&(v.complement_projector() * a), rel_tol).0
}

/// Spectral norm of the difference of orthogonal projectors (1 when dimensions differ).
pub fn subspace_distance<T: Real>(u: &Subspace<T>, v: &Subspace<T>) -> T {
    if u.dim() != v.dim() {
        return T::one();
    }
    if u.dim() == 0 {
        return T::zero();
    }
    spectral_norm(&(u.projector() - v.projector()))
}

pub fn spectral_norm<T: Real>(a: &DMatrix<T>) -> T {
    if a.is_empty() {
        return T::zero();
    }
    SVD::new(a.clone(), false, false)
        .singular_values
        .iter()
        .fold(T::zero(), |acc, &s| acc.max(s))
}

/// Eigenvalues of a real symmetric matrix in increasing order.
pub fn sym_eigenvalues<T: Real>(a: &DMatrix<T>) -> Vec<T> {
    let sym = (a + a.transpose()) * lit::<T>(0.5);
    let mut ev: Vec<T> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

pub fn min_sym_eigenvalue<T: Real>(a: &DMatrix<T>) -> T {
    sym_eigenvalues(a).first().copied().unwrap_or_else(T::zero)
}

/// Eigenvalues of a complex Hermitian matrix in increasing order.
pub fn hermitian_eigenvalues<T: Real>(a: &DMatrix<Complex<T>>) -> Vec<T> {
    if a.is_empty() {
        return Vec::new();
    }
    let herm = (a + a.adjoint()) * Complex::new(lit::<T>(0.5), T::zero());
    let mut ev: Vec<T> = SymmetricEigen::new(herm).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

/// Smallest eigenvalue of a complex Hermitian matrix with a unit eigenvector.
pub fn hermitian_min_eigenpair<T: Real>(a: &DMatrix<Complex<T>>) -> Option<(T, DVector<Complex<T>>)> {
    if a.is_empty() {
        return None;
    }
    let herm = (a + a.adjoint()) * Complex::new(lit::<T>(0.5), T::zero());
    let eig = SymmetricEigen::new(herm);
    let (i, &l) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.partial_cmp(y.1).unwrap_or(std::cmp::Ordering::Equal))?;
    Some((l, eig.eigenvectors.column(i).into_owned()))
}

/// Symmetric part `(A + Aᵀ)/2`.
pub fn sym<T: Real>(a: &DMatrix<T>) -> DMatrix<T> {
    (a + a.transpose()) * lit::<T>(0.5)
}

/// Largest absolute entry.
pub fn max_abs<T: Real>(a: &DMatrix<T>) -> T {
    a.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
}

pub fn max_abs_c<T: Real>(a: &DMatrix<Complex<T>>) -> T {
    a.iter().fold(T::zero(), |acc, x| acc.max(x.norm_sqr().sqrt()))
}
