//! First-order jets `(f(X), ∇f(X))` used to evaluate weights and their Hamilton derivatives.

use nalgebra::{DMatrix, DVector};

use super::cutoff::Cutoff;
use crate::{lit, Real};

#[derive(Clone, Debug)]
pub struct Jet<T: Real> {
    pub v: T,
    pub g: DVector<T>,
}

impl<T: Real> Jet<T> {
    pub fn constant(v: T, dim: usize) -> Self {
        Self { v, g: DVector::zeros(dim) }
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(T::zero(), dim)
    }

    pub fn is_zero(&self) -> bool {
        self.v == T::zero() && self.g.iter().all(|&x| x == T::zero())
    }

    /// `Xᵀ B X` for symmetric `B`.
    pub fn quadratic(b: &DMatrix<T>, x: &DVector<T>) -> Self {
        let bx = b * x;
        Self { v: x.dot(&bx), g: bx * lit::<T>(2.0) }
    }

    /// `⟨X⟩^s = (1 + |X|²)^{s/2}`.
    pub fn japanese(x: &DVector<T>, s: T) -> Self {
        let w = T::one() + x.norm_squared();
        let v = w.powf(s / lit(2.0));
        Self { v, g: x * (s * v / w) }
    }

    /// `|X|`, valid away from the origin.
    pub fn norm(x: &DVector<T>) -> Self {
        let v = x.norm();
        Self { v, g: x / v }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self { v: self.v * o.v, g: &self.g * o.v + &o.g * self.v }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { v: self.v + o.v, g: &self.g + &o.g }
    }

    pub fn scale(&self, c: T) -> Self {
        Self { v: self.v * c, g: &self.g * c }
    }

    /// `f^e` for `f > 0`.
    pub fn powf(&self, e: T) -> Self {
        let v = self.v.powf(e);
        Self { v, g: &self.g * (e * v / self.v) }
    }

    pub fn compose(&self, c: &Cutoff) -> Self {
        let (v, d) = c.eval(self.v);
        Self { v, g: &self.g * d }
    }

    /// `H_{Im q_p} f = 2 ∇f·(Im F_p X)`.
    pub fn bracket(&self, im_map: &DMatrix<T>, x: &DVector<T>) -> T {
        self.g.dot(&(im_map * x)) * lit::<T>(2.0)
    }
}

/// Product of jets, stopping at the first factor that vanishes to first order.
///
/// Factors are produced lazily so that later (possibly singular) factors are
/// only evaluated on the support of the earlier ones.
pub fn lazy_product<T: Real>(dim: usize, factors: &mut dyn Iterator<Item = Jet<T>>) -> Jet<T> {
    let mut acc = Jet::constant(T::one(), dim);
    for f in factors {
        if f.is_zero() {
            return Jet::zero(dim);
        }
        acc = acc.mul(&f);
    }
    acc
}
