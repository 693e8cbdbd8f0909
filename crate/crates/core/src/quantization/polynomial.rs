//! Polynomial symbols on `R^{2n}` with complex coefficients.

use std::collections::BTreeMap;

use nalgebra::{Complex, DVector};

use crate::symplectic::QuadraticForm;
use crate::{lit, Error, Real, Result};

/// `Σ c_e X^e`, exponents indexed like phase-space coordinates `(x, ξ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySymbol<T: Real> {
    n: usize,
    terms: BTreeMap<Vec<u32>, Complex<T>>,
}

fn c<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

impl<T: Real> PolySymbol<T> {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, v: Complex<T>) -> Self {
        let mut s = Self::zero(n);
        s.add_term(vec![0; 2 * n], v);
        s
    }

    pub fn monomial(n: usize, exps: Vec<u32>, v: Complex<T>) -> Result<Self> {
        if exps.len() != 2 * n {
            return Err(Error::Dimension(format!("monomial needs {} exponents", 2 * n)));
        }
        let mut s = Self::zero(n);
        s.add_term(exps, v);
        Ok(s)
    }

    /// Coordinate function `X_i`.
    pub fn coordinate(n: usize, i: usize) -> Self {
        let mut e = vec![0; 2 * n];
        e[i] = 1;
        let mut s = Self::zero(n);
        s.add_term(e, c(T::one()));
        s
    }

    pub fn from_quadratic(q: &QuadraticForm<T>) -> Self {
        let n = q.n();
        let d = 2 * n;
        let mut s = Self::zero(n);
        for i in 0..d {
            for j in i..d {
                let f = if i == j { T::one() } else { lit(2.0) };
                let v = Complex::new(q.re()[(i, j)] * f, q.im()[(i, j)] * f);
                let mut e = vec![0; d];
                e[i] += 1;
                e[j] += 1;
                s.add_term(e, v);
            }
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Complex<T>)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, e: Vec<u32>, v: Complex<T>) {
        if v == Complex::new(T::zero(), T::zero()) {
            return;
        }
        let entry = self.terms.entry(e).or_insert(Complex::new(T::zero(), T::zero()));
        *entry += v;
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[T]) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (e, &v) in &self.terms {
            let mut m = T::one();
            for (i, &k) in e.iter().enumerate() {
                m *= x[i].powi(k as i32);
            }
            acc += v * m;
        }
        acc
    }

    pub fn eval_vec(&self, x: &DVector<T>) -> Complex<T> {
        self.eval(x.as_slice())
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut s = self.clone();
        for (e, &v) in &o.terms {
            s.add_term(e.clone(), v);
        }
        s
    }

    pub fn scale(&self, k: Complex<T>) -> Self {
        let mut s = Self::zero(self.n);
        for (e, &v) in &self.terms {
            s.add_term(e.clone(), v * k);
        }
        s
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut s = Self::zero(self.n);
        for (e1, &v1) in &self.terms {
            for (e2, &v2) in &o.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                s.add_term(e, v1 * v2);
            }
        }
        s
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut s = Self::zero(self.n);
        for (e, &v) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                s.add_term(f, v * lit::<T>(e[i] as f64));
            }
        }
        s
    }

    /// `∇a·∇b`.
    pub fn gradient_dot(&self, o: &Self) -> Self {
        (0..2 * self.n).fold(Self::zero(self.n), |acc, i| acc.add(&self.derivative(i).mul(&o.derivative(i))))
    }

    /// `{a, b} = ∂_ξ a·∂_x b − ∂_x a·∂_ξ b`.
    pub fn poisson(&self, o: &Self) -> Self {
        let n = self.n;
        let mut s = Self::zero(n);
        for i in 0..n {
            s = s.add(&self.derivative(n + i).mul(&o.derivative(i)));
            s = s.add(&self.derivative(i).mul(&o.derivative(n + i)).scale(c(-T::one())));
        }
        s
    }

    /// `E[a(X + Y)]` for `Y ~ N(0, v I)`.
    pub fn gaussian_average(&self, v: T) -> Self {
        let mut s = Self::zero(self.n);
        for (e, &coef) in &self.terms {
            // Expand each coordinate independently: Σ_k C(e_i, k) X_i^{e_i−k} E[Y^k].
            let mut partial: Vec<(Vec<u32>, T)> = vec![(vec![0; e.len()], T::one())];
            for (i, &ei) in e.iter().enumerate() {
                let mut next = Vec::new();
                for (base, w) in &partial {
                    for k in (0..=ei).step_by(2) {
                        let mut f = base.clone();
                        f[i] = ei - k;
                        let moment = double_factorial::<T>(k) * v.powi(k as i32 / 2);
                        next.push((f, *w * lit::<T>(binomial(ei, k)) * moment));
                    }
                }
                partial = next;
            }
            for (f, w) in partial {
                s.add_term(f, coef * w);
            }
        }
        s
    }

    pub fn max_abs_coefficient(&self) -> T {
        self.terms.values().fold(T::zero(), |a, v| a.max(v.norm_sqr().sqrt()))
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `(k − 1)!!` for even `k`, the `k`-th moment of a unit Gaussian.
fn double_factorial<T: Real>(k: u32) -> T {
    let mut acc = 1.0;
    let mut j = k as i64 - 1;
    while j > 1 {
        acc *= j as f64;
        j -= 2;
    }
    lit(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_round_trip() {
        let q = QuadraticForm::new(
            1,
            nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 2.0]),
            nalgebra::DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 3.0]),
        )
        .unwrap();
        let p = PolySymbol::from_quadratic(&q);
        let x = DVector::from_row_slice(&[0.3, -1.7]);
        assert!((p.eval_vec(&x) - q.eval(&x)).norm() < 1e-13);
    }

    #[test]
    fn gaussian_average_of_fourth_power() {
        let x4 = PolySymbol::<f64>::monomial(1, vec![4, 0], Complex::new(1.0, 0.0)).unwrap();
        let g = x4.gaussian_average(0.5);
        // E[(x+Y)^4] = x^4 + 6 v x^2 + 3 v^2
        let v = g.eval(&[2.0, 0.0]).re;
        assert!((v - (16.0 + 6.0 * 0.5 * 4.0 + 3.0 * 0.25)).abs() < 1e-12);
    }
}
