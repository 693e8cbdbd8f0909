//! Wick (anti-Wick / coherent-state) quantization in the appendix convention.
//!
//! With wave packets `φ_{y,η}(x) = 2^{n/4} e^{−π|x−y|²} e^{2iπ(x−y)·η}` and
//! `Σ_Y = |φ_Y⟩⟨φ_Y|`, the Wick quantization is `a^Wick = ∫ a(Y) Σ_Y dY`. It
//! equals the Weyl quantization of the Gaussian average
//! `ã(X) = ∫ a(X+Y) e^{−2π|Y|²} 2^n dY`, i.e. `ã = E[a(X+Y)]` with `Y ~ N(0, I/4π)`.
//!
//! In the basis of the appendix oscillator, `φ_Y` is the coherent state with
//! eigenvalues `z_k = √π (y_k + i η_k)` for the annihilation operators.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use super::hermite::HermiteBasis;
use super::polynomial::PolySymbol;
use super::weyl::{weyl_matrix, Convention};
use crate::linalg::max_abs_c;
use crate::{lit, to_f64, Error, Real, Result};

/// Variance `1/4π` of the smoothing Gaussian.
pub fn smoothing_variance<T: Real>() -> T {
    T::one() / (lit::<T>(4.0) * T::pi())
}

/// Weyl symbol `ã` of `a^Wick`.
pub fn wick_symbol<T: Real>(a: &PolySymbol<T>) -> PolySymbol<T> {
    a.gaussian_average(smoothing_variance())
}

/// Closed-form `a^Wick` for polynomial symbols.
pub fn wick_matrix<T: Real>(a: &PolySymbol<T>, basis: &HermiteBasis) -> Result<DMatrix<Complex<T>>> {
    weyl_matrix(&wick_symbol(a), basis, Convention::Appendix)
}

/// Weighted point set in `R^{2n}` used to integrate against `Σ_Y`.
#[derive(Clone, Debug)]
pub struct PhaseGrid<T: Real> {
    pub nodes: Vec<Vec<T>>,
    pub weights: Vec<T>,
}

impl<T: Real> PhaseGrid<T> {
    /// Single node at the origin with unit weight.
    pub fn point_mass(n: usize) -> Self {
        Self { nodes: vec![vec![T::zero(); 2 * n]], weights: vec![T::one()] }
    }

    /// Tensor Gauss–Hermite grid adapted to the factor `e^{−π|Y|²}` carried by `Σ_Y`;
    /// exact for polynomial symbols of degree `< 2k − 2·max_level` per coordinate.
    pub fn gauss_hermite(n: usize, k: usize) -> Self {
        let (u, w) = gauss_hermite_rule::<T>(k);
        let sqrt_pi = T::pi().sqrt();
        // ∫ f(t) dt = ∫ [f(t) e^{πt²}] e^{−πt²} dt, t = u/√π.
        let one_d: Vec<(T, T)> = u
            .iter()
            .zip(&w)
            .map(|(&ui, &wi)| (ui / sqrt_pi, wi / sqrt_pi * (ui * ui).exp()))
            .collect();
        let d = 2 * n;
        let total = k.pow(d as u32);
        let mut nodes = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        for flat in 0..total {
            let mut rem = flat;
            let mut node = Vec::with_capacity(d);
            let mut weight = T::one();
            for _ in 0..d {
                let (t, wt) = one_d[rem % k];
                rem /= k;
                node.push(t);
                weight *= wt;
            }
            nodes.push(node);
            weights.push(weight);
        }
        Self { nodes, weights }
    }
}

/// Gauss–Hermite nodes and weights for the weight `e^{−u²}` (Golub–Welsch).
pub fn gauss_hermite_rule<T: Real>(k: usize) -> (Vec<T>, Vec<T>) {
    let mut jac = DMatrix::<T>::zeros(k, k);
    for i in 1..k {
        let b = (lit::<T>(i as f64) / lit(2.0)).sqrt();
        jac[(i, i - 1)] = b;
        jac[(i - 1, i)] = b;
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(T, T)> = (0..k)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], T::pi().sqrt() * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    pairs.into_iter().unzip()
}

/// Coefficients `⟨h_α | φ_Y⟩` of a wave packet in the appendix Hermite basis, up to a
/// global phase.
pub fn wave_packet<T: Real>(y: &[T], basis: &HermiteBasis) -> DVector<Complex<T>> {
    let n = basis.n();
    let sqrt_pi = T::pi().sqrt();
    let z: Vec<Complex<T>> = (0..n).map(|k| Complex::new(y[k], y[n + k]) * sqrt_pi).collect();
    let envelope = (-z.iter().fold(T::zero(), |a, zk| a + zk.norm_sqr()) / lit(2.0)).exp();
    let max = basis.max_level();
    // z^j / √(j!) per coordinate.
    let powers: Vec<Vec<Complex<T>>> = z
        .iter()
        .map(|&zk| {
            let mut p = vec![Complex::new(T::one(), T::zero())];
            for j in 1..=max {
                let prev = p[j - 1];
                p.push(prev * zk / lit::<T>(j as f64).sqrt());
            }
            p
        })
        .collect();
    DVector::from_fn(basis.dim(), |i, _| {
        let alpha = basis.index(i);
        let mut c = Complex::new(envelope, T::zero());
        for k in 0..n {
            c *= powers[k][alpha[k] as usize];
        }
        c
    })
}

/// `∫ a(Y) Σ_Y dY` by quadrature on `grid`.
pub fn wick_by_quadrature<T: Real>(
    a: &dyn Fn(&[T]) -> Complex<T>,
    basis: &HermiteBasis,
    grid: &PhaseGrid<T>,
) -> DMatrix<Complex<T>> {
    let d = basis.dim();
    let mut m = DMatrix::from_element(d, d, Complex::new(T::zero(), T::zero()));
    for (y, &w) in grid.nodes.iter().zip(&grid.weights) {
        let c = wave_packet(y, basis);
        let s = a(y) * w;
        m += (&c * c.adjoint()) * s;
    }
    m
}

/// Checks that `grid` resolves the identity on `basis` to `tol`.
pub fn check_grid<T: Real>(basis: &HermiteBasis, grid: &PhaseGrid<T>, tol: f64) -> Result<f64> {
    let one = wick_by_quadrature(&|_: &[T]| Complex::new(T::one(), T::zero()), basis, grid);
    let err = to_f64(max_abs_c(&(one - DMatrix::identity(basis.dim(), basis.dim()))));
    if err > tol {
        return Err(Error::Numerical(format!("phase grid too coarse: identity error {err:.3e}")));
    }
    Ok(err)
}

/// `∫ |⟨u, φ_Y⟩|² dY` for `u` given by its Hermite coefficients.
pub fn wave_packet_norm_sq<T: Real>(u: &DVector<Complex<T>>, basis: &HermiteBasis, grid: &PhaseGrid<T>) -> T {
    grid.nodes.iter().zip(&grid.weights).fold(T::zero(), |acc, (y, &w)| {
        let c = wave_packet(y, basis);
        acc + c.dotc(u).norm_sqr() * w
    })
}

/// `ab − (1/4π) a′·b′ + (1/4iπ){a, b}`.
pub fn composition_symbol<T: Real>(a: &PolySymbol<T>, b: &PolySymbol<T>) -> PolySymbol<T> {
    let inv4pi = T::one() / (lit::<T>(4.0) * T::pi());
    a.mul(b)
        .add(&a.gradient_dot(b).scale(Complex::new(-inv4pi, T::zero())))
        .add(&a.poisson(b).scale(Complex::new(T::zero(), -inv4pi)))
}

/// Remainder `a^Wick b^Wick − (composition symbol)^Wick` on the interior block.
pub fn composition_residual<T: Real>(
    a: &PolySymbol<T>,
    b: &PolySymbol<T>,
    basis: &HermiteBasis,
) -> Result<DMatrix<Complex<T>>> {
    if a.degree() > 2 || b.degree() > 2 {
        return Err(Error::Input("composition residual needs quadratic symbols".into()));
    }
    let guard = 2 * (a.degree().max(b.degree())) as usize;
    let inner = basis.interior(guard);
    if inner == 0 {
        return Err(Error::Input("basis too small for the guard band".into()));
    }
    let ma = wick_matrix(a, basis)?;
    let mb = wick_matrix(b, basis)?;
    let mc = wick_matrix(&composition_symbol(a, b), basis)?;
    let prod = &ma * &mb;
    Ok((prod - mc).view((0, 0), (inner, inner)).into_owned())
}

/// Wick data of a quadratic form on levels `≤ level` (appendix convention).
#[derive(Clone, Debug, serde::Serialize)]
pub struct WickCheck {
    pub level: usize,
    /// `tr(a″)/8π` as `[re, im]`.
    pub correction: [f64; 2],
    /// `max |(a^Wick − a^w − correction·I)_{ij}|` on the interior block.
    pub correction_residual: f64,
    /// Lowest eigenvalues of the Hermitian part of `a^Wick` on the interior block.
    pub wick_spectrum: Vec<f64>,
    /// Lowest eigenvalue of the Hermitian part of `a^w` on the interior block.
    pub weyl_min: f64,
}

/// `tr(a″)/8π = tr(Q)/4π` for `a(X) = Xᵀ Q X`.
pub fn quadratic_correction<T: Real>(q: &crate::symplectic::QuadraticForm<T>) -> Complex<T> {
    let k = lit::<T>(4.0) * T::pi();
    Complex::new(q.re().trace() / k, q.im().trace() / k)
}

pub fn wick_check<T: Real>(q: &crate::symplectic::QuadraticForm<T>, level: usize) -> Result<WickCheck> {
    let basis = HermiteBasis::new(q.n(), level);
    let inner = basis.interior(2);
    if inner == 0 {
        return Err(Error::Input("level too small for the guard band".into()));
    }
    let a = PolySymbol::from_quadratic(q);
    let wick = wick_matrix(&a, &basis)?.view((0, 0), (inner, inner)).into_owned();
    let weyl = weyl_matrix(&a, &basis, Convention::Appendix)?.view((0, 0), (inner, inner)).into_owned();
    let corr = quadratic_correction(q);
    let diff = &wick - &weyl - DMatrix::<Complex<T>>::identity(inner, inner) * corr;
    let spectrum = crate::linalg::hermitian_eigenvalues(&wick);
    let weyl_min = crate::linalg::hermitian_eigenvalues(&weyl).first().map_or(f64::NAN, |&v| to_f64(v));
    Ok(WickCheck {
        level,
        correction: [to_f64(corr.re), to_f64(corr.im)],
        correction_residual: to_f64(max_abs_c(&diff)),
        wick_spectrum: spectrum.iter().take(5).map(|&v| to_f64(v)).collect(),
        weyl_min,
    })
}
