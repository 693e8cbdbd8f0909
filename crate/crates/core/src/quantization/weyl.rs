//! Weyl quantization of polynomial symbols in the Hermite basis.
//!
//! A monomial is quantized by averaging the operator products over all distinct
//! orderings of its factors, which is the Weyl rule for polynomials.

use std::collections::HashMap;

use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hermite::{apply_coordinate, HermiteBasis, Ket};
use super::polynomial::PolySymbol;
use crate::symplectic::QuadraticForm;
use crate::{lit, Error, Real, Result};

/// Largest supported symbol degree.
pub const MAX_DEGREE: u32 = 4;

/// Normalization of the Fourier variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `ξ ↔ D_x = −i∂_x`; the oscillator `|x|² + |ξ|²` has eigenvalues `2|α| + n`.
    #[default]
    Body,
    /// `ξ ↔ D_x / 2π`; eigenvalues `(2|α| + n)/2π`, ground state `2^{n/4} e^{−π|x|²}`.
    Appendix,
}

impl Convention {
    /// Factor `s` in `x = s(a + a†)/√2`, `ξ = s(a − a†)/(i√2)`.
    pub fn scale<T: Real>(&self) -> T {
        match self {
            Convention::Body => T::one(),
            Convention::Appendix => T::one() / T::two_pi().sqrt(),
        }
    }
}

/// Distinct orderings of the factor multiset of a monomial.
fn orderings(exps: &[u32]) -> Vec<Vec<usize>> {
    let mut factors: Vec<usize> = Vec::new();
    for (i, &e) in exps.iter().enumerate() {
        factors.extend(std::iter::repeat_n(i, e as usize));
    }
    let mut out = Vec::new();
    permute_unique(&mut factors, 0, &mut out);
    out
}

fn permute_unique(v: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if start >= v.len() {
        out.push(v.clone());
        return;
    }
    let mut seen = Vec::new();
    for i in start..v.len() {
        if seen.contains(&v[i]) {
            continue;
        }
        seen.push(v[i]);
        v.swap(start, i);
        permute_unique(v, start + 1, out);
        v.swap(start, i);
    }
}

/// Matrix `⟨β| a^w |α⟩` on the given basis; exact compression of the operator.
pub fn weyl_matrix<T: Real>(a: &PolySymbol<T>, basis: &HermiteBasis, conv: Convention) -> Result<DMatrix<Complex<T>>> {
    let n = basis.n();
    if a.n() != n {
        return Err(Error::Dimension("symbol and basis live in different dimensions".into()));
    }
    if a.degree() > MAX_DEGREE {
        return Err(Error::Input(format!("symbol degree {} exceeds {MAX_DEGREE}", a.degree())));
    }
    let scale = conv.scale::<T>();
    let plan: Vec<(Complex<T>, Vec<Vec<usize>>)> = a
        .terms()
        .map(|(e, &c)| {
            let ords = orderings(e);
            let w = c / lit::<T>(ords.len() as f64);
            (w, ords)
        })
        .collect();
    let d = basis.dim();
    let columns: Vec<Vec<(usize, Complex<T>)>> = (0..d)
        .into_par_iter()
        .map(|col| {
            let mut acc: HashMap<Vec<u32>, Complex<T>> = HashMap::new();
            for (w, ords) in &plan {
                for ord in ords {
                    let mut ket: Ket<T> = vec![(basis.index(col).to_vec(), *w)];
                    for &i in ord.iter().rev() {
                        ket = apply_coordinate(n, i, scale, &ket);
                    }
                    for (b, v) in ket {
                        *acc.entry(b).or_insert(Complex::new(T::zero(), T::zero())) += v;
                    }
                }
            }
            let mut entries: Vec<(usize, Complex<T>)> =
                acc.into_iter().filter_map(|(b, v)| basis.position(&b).map(|row| (row, v))).collect();
            entries.sort_by_key(|(r, _)| *r);
            entries
        })
        .collect();
    let mut m = DMatrix::from_element(d, d, Complex::new(T::zero(), T::zero()));
    for (col, entries) in columns.into_iter().enumerate() {
        for (row, v) in entries {
            m[(row, col)] = v;
        }
    }
    Ok(m)
}

pub fn quantize_form<T: Real>(q: &QuadraticForm<T>, basis: &HermiteBasis, conv: Convention) -> Result<DMatrix<Complex<T>>> {
    weyl_matrix(&PolySymbol::from_quadratic(q), basis, conv)
}

/// `|x|² + |ξ|²` as a symbol.
pub fn oscillator_symbol<T: Real>(n: usize) -> PolySymbol<T> {
    let mut s = PolySymbol::zero(n);
    for i in 0..2 * n {
        let mut e = vec![0; 2 * n];
        e[i] = 2;
        s.add_term(e, Complex::new(T::one(), T::zero()));
    }
    s
}

/// `q̃(x, ξ) = q(x, ξ/2π)`: the symbol that, quantized in the body convention,
/// gives the appendix quantization of `q`.
pub fn convention_transport<T: Real>(q: &QuadraticForm<T>) -> Result<QuadraticForm<T>> {
    let n = q.n();
    let d = 2 * n;
    let scale = DMatrix::from_fn(d, d, |i, j| {
        if i != j {
            T::zero()
        } else if i < n {
            T::one()
        } else {
            T::one() / T::two_pi()
        }
    });
    QuadraticForm::new(n, &scale * q.re() * &scale, &scale * q.im() * &scale)
}

/// Linear symplectic map `T(x, ξ) = ((2π)^{−1/2} x, (2π)^{1/2} ξ)`, with `q̃ ∘ T = q / 2π`.
pub fn transport_map<T: Real>(n: usize) -> DMatrix<T> {
    let s = T::two_pi().sqrt();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if i != j {
            T::zero()
        } else if i < n {
            T::one() / s
        } else {
            s
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orderings_of_x_xi() {
        assert_eq!(orderings(&[1, 1]).len(), 2);
        assert_eq!(orderings(&[2, 2]).len(), 6);
        assert_eq!(orderings(&[4, 0]).len(), 1);
    }

    #[test]
    fn symmetrized_x_xi_is_hermitian_part() {
        let basis = HermiteBasis::new(1, 6);
        let xxi = PolySymbol::<f64>::monomial(1, vec![1, 1], Complex::new(1.0, 0.0)).unwrap();
        let m = weyl_matrix(&xxi, &basis, Convention::Body).unwrap();
        let inner = basis.interior(2);
        let block = m.view((0, 0), (inner, inner)).into_owned();
        assert!((&block - block.adjoint()).norm() < 1e-13);
        // (xD + Dx)/2 = −i(a² − a†²)/2 has zero diagonal
        for i in 0..inner {
            assert!(block[(i, i)].norm() < 1e-13);
        }
    }
}
