//! Smooth cutoffs built from the exponential splice
//! `s(t) = e^{−1/t} / (e^{−1/t} + e^{−1/(1−t)})`, which is `0` for `t ≤ 0`, `1` for
//! `t ≥ 1` and flat to all orders at both ends.

use crate::{lit, Real};

/// Splice value and derivative at `t`.
pub fn splice<T: Real>(t: T) -> (T, T) {
    if t <= T::zero() {
        return (T::zero(), T::zero());
    }
    if t >= T::one() {
        return (T::one(), T::zero());
    }
    let f = |u: T| (-T::one() / u).exp();
    let (a, b) = (f(t), f(T::one() - t));
    let da = a / (t * t);
    let db = b / ((T::one() - t) * (T::one() - t));
    let den = a + b;
    (a / den, (da * b + a * db) / (den * den))
}

/// Even cutoff on the real line, described by its transition radii.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cutoff {
    /// `1` on `|x| ≤ a`, `0` on `|x| ≥ b`.
    Plateau { a: f64, b: f64 },
    /// `0` on `|x| ≤ a`, `1` on `|x| ≥ b`.
    Tail { a: f64, b: f64 },
    /// `0` on `|x| ≤ a`, `1` on `b ≤ |x| ≤ c`, `0` on `|x| ≥ d`.
    Annulus { a: f64, b: f64, c: f64, d: f64 },
}

/// `ψ = 1` on `[−1, 1]`, `supp ψ ⊂ [−2, 2]`.
pub const PSI: Cutoff = Cutoff::Plateau { a: 1.0, b: 2.0 };
/// `χ = 1` on `1 ≤ |x| ≤ 2`, `supp χ ⊂ {1/2 ≤ |x| ≤ 3}`.
pub const CHI: Cutoff = Cutoff::Annulus { a: 0.5, b: 1.0, c: 2.0, d: 3.0 };
/// `w = 1` on `|x| ≥ 2`, `supp w ⊂ {|x| ≥ 1}`.
pub const W: Cutoff = Cutoff::Tail { a: 1.0, b: 2.0 };
/// Same shape as [`W`]; used for `W̃_0`.
pub const W1: Cutoff = W;
/// `w_2 = 1` on `|x| ≥ 1`, `supp w_2 ⊂ {|x| ≥ 1/2}`: `ψ'` lives where `w_2 = 1` and
/// `w_2'` lives where `ψ = 1`.
pub const W2: Cutoff = Cutoff::Tail { a: 0.5, b: 1.0 };
/// Cut away from the origin in `G_{m,p}`.
pub const W0: Cutoff = W;

/// `ψ_0` with `supp ψ_0(r_m |X|^{-2}) ⊂ {r_m < c4 |X|²}`.
pub fn psi0(c4: f64) -> Cutoff {
    Cutoff::Plateau { a: c4 / 4.0, b: c4 / 2.0 }
}

impl Cutoff {
    /// Value and derivative at `x`.
    pub fn eval<T: Real>(&self, x: T) -> (T, T) {
        let ax = x.abs();
        let sign = if x < T::zero() { -T::one() } else { T::one() };
        let rise = |a: f64, b: f64| {
            let (v, d) = splice((ax - lit(a)) / lit(b - a));
            (v, d * sign / lit(b - a))
        };
        match *self {
            Cutoff::Plateau { a, b } => {
                let (v, d) = rise(a, b);
                (T::one() - v, -d)
            }
            Cutoff::Tail { a, b } => rise(a, b),
            Cutoff::Annulus { a, b, c, d } => {
                let (u, du) = rise(a, b);
                let (v, dv) = rise(c, d);
                (u * (T::one() - v), du * (T::one() - v) - u * dv)
            }
        }
    }

    pub fn value<T: Real>(&self, x: T) -> T {
        self.eval(x).0
    }

    /// Closed interval of `|x|` outside of which the derivative vanishes.
    pub fn transition(&self) -> (f64, f64) {
        match *self {
            Cutoff::Plateau { a, b } | Cutoff::Tail { a, b } => (a, b),
            Cutoff::Annulus { a, d, .. } => (a, d),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splice_midpoint() {
        let (v, d) = splice(0.5f64);
        assert!((v - 0.5).abs() < 1e-15);
        assert!((d - 2.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        for c in [PSI, CHI, W, W2] {
            for i in 1..400 {
                let x = -3.5 + i as f64 * 0.0175;
                let h = 1e-6;
                let fd = (c.value(x + h) - c.value(x - h)) / (2.0 * h);
                assert!((fd - c.eval(x).1).abs() < 1e-6, "{c:?} at {x}");
            }
        }
    }

    #[test]
    fn partition_psi_w2() {
        for i in 0..=3000 {
            let t = i as f64 * 0.001;
            assert!(PSI.value(t) + W2.value(t) >= 1.0);
        }
    }
}
