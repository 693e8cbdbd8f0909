//! The bounded weights `g_p` whose Hamilton derivatives `H_{Im q_p} g_p` supply the
//! gain `⟨X⟩^{2/(2m+1)}` away from the region where `Σ Re q_p` already controls it.
//!
//! With `γ_m = 2/(2m+1)`:
//!
//! * `g̃_{m,p} = ψ(r_{m−1}⟨X⟩^{−(2m−1)γ_m}) ⟨X⟩^{−2mγ_m} r̃_{m,p}`
//! * `G_{m,p} = g̃_{m,p} + ψ_0(r_m|X|^{−2}) w_0(|X|) 𝔤̃_{m,p}`, where `𝔤̃` is the
//!   weight of level `m − 1` (absent for `m = 1`)
//! * `W̃_0 = w_1(r_{m−1}⟨X⟩^{−(2m−1)γ_m})`
//! * `Ψ_j = ψ(Λ_j r_{m−j−2} / r_{m−j−1}^{(2m−2j−3)/(2m−2j−1)})`, `0 ≤ j ≤ m−2`
//! * `W_j = w_2(Λ_{j−1} r_{m−j−1} / r_{m−j}^{(2m−2j−1)/(2m−2j+1)})`, `1 ≤ j ≤ m−1`
//! * `𝔭_{j,p} = W̃_0 (Π_{l≤j} W_l) Ψ_j r̃_{m−j−1,p} / r_{m−j−1}^{(2m−2j−2)/(2m−2j−1)}`
//! * `𝔭_p = Σ_j α_j 𝔭_{j,p}` and `g_p = G_{m,p} + κ 𝔭_p`.

use nalgebra::DVector;
use serde::Serialize;

use super::cutoff::{psi0, PSI, W0, W1, W2};
use super::jet::{lazy_product, Jet};
use crate::symplectic::{RForms, SystemOfForms};
use crate::{lit, Error, Real, Result};

/// Tunable constants of the weight at level `m`.
#[derive(Clone, Debug, Serialize)]
pub struct WeightParams {
    pub m: usize,
    /// `Λ_0, …, Λ_{m−2}`.
    pub lambdas: Vec<f64>,
    /// `α_0, …, α_{m−2}`; the leading coefficient `α_0` plays the role of `a_0`.
    pub alphas: Vec<f64>,
    /// Threshold of the `ψ_0` cut: its support lies in `{r_m < c4 |X|²}`.
    pub c4: f64,
    /// Coefficient of `𝔭_p` relative to `G_{m,p}`.
    pub kappa: f64,
}

impl WeightParams {
    pub fn unit(m: usize, c4: f64) -> Self {
        let k = m.saturating_sub(1);
        Self { m, lambdas: vec![1.0; k], alphas: vec![1.0; k], c4, kappa: 1.0 }
    }
}

/// Weight of level `m − 1` entering `G_{m,p}`, scaled by `coefficient`.
#[derive(Clone, Debug)]
pub struct LowerWeight<T: Real> {
    pub assembly: Box<WeightAssembly<T>>,
    pub coefficient: f64,
}

#[derive(Clone, Debug)]
pub struct WeightAssembly<T: Real> {
    sys: SystemOfForms<T>,
    r: RForms<T>,
    params: WeightParams,
    lower: Option<LowerWeight<T>>,
}

/// `H_{Im q_p} g̃_{m,p}` split as (cutoff)·(good term), (cutoff)·(cross term),
/// `(Hψ)`-term and `(H⟨X⟩^·)`-term.
pub type GTildeTerms<T> = [T; 4];

impl<T: Real> WeightAssembly<T> {
    pub fn new(sys: SystemOfForms<T>, params: WeightParams, lower: Option<LowerWeight<T>>) -> Result<Self> {
        let m = params.m;
        if m == 0 {
            return Err(Error::Input("the weight level m must be at least 1".into()));
        }
        if params.lambdas.len() != m - 1 || params.alphas.len() != m - 1 {
            return Err(Error::Input(format!("level {m} needs {} values of Λ and α", m - 1)));
        }
        if params.c4 <= 0.0 {
            return Err(Error::Input("c4 must be positive".into()));
        }
        if let Some(l) = &lower {
            if l.assembly.params.m + 1 != m {
                return Err(Error::Input("lower weight must have level m − 1".into()));
            }
        }
        let r = sys.r_forms(m);
        Ok(Self { sys, r, params, lower })
    }

    pub fn m(&self) -> usize {
        self.params.m
    }

    pub fn params(&self) -> &WeightParams {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut WeightParams {
        &mut self.params
    }

    pub fn lower(&self) -> Option<&LowerWeight<T>> {
        self.lower.as_ref()
    }

    pub fn system(&self) -> &SystemOfForms<T> {
        &self.sys
    }

    pub fn r_forms(&self) -> &RForms<T> {
        &self.r
    }

    fn dim(&self) -> usize {
        self.sys.dim()
    }

    fn mf(&self) -> f64 {
        self.params.m as f64
    }

    /// Gain exponent `2/(2m+1)`.
    pub fn gain(&self) -> f64 {
        2.0 / (2.0 * self.mf() + 1.0)
    }

    fn r_jet(&self, k: usize, x: &DVector<T>) -> Jet<T> {
        Jet::quadratic(self.r.gram(k), x)
    }

    fn r_tilde_jet(&self, k: usize, p: usize, x: &DVector<T>) -> Jet<T> {
        Jet::quadratic(&self.r.r_tilde_matrix(k, p), x)
    }

    /// Argument `r_{m−1}⟨X⟩^{−2(2m−1)/(2m+1)}` shared by `g̃` and `W̃_0`.
    fn level_ratio(&self, x: &DVector<T>) -> Jet<T> {
        let m = self.mf();
        let e = -2.0 * (2.0 * m - 1.0) / (2.0 * m + 1.0);
        self.r_jet(self.params.m - 1, x).mul(&Jet::japanese(x, lit(e)))
    }

    pub fn g_tilde(&self, p: usize, x: &DVector<T>) -> Jet<T> {
        let [cut, decay, rt] = self.g_tilde_factors(p, x);
        cut.mul(&decay).mul(&rt)
    }

    fn g_tilde_factors(&self, p: usize, x: &DVector<T>) -> [Jet<T>; 3] {
        let m = self.mf();
        let cut = self.level_ratio(x).compose(&PSI);
        let decay = Jet::japanese(x, lit(-4.0 * m / (2.0 * m + 1.0)));
        let rt = self.r_tilde_jet(self.params.m, p, x);
        [cut, decay, rt]
    }

    pub fn g_tilde_terms(&self, p: usize, x: &DVector<T>) -> GTildeTerms<T> {
        let a = &self.r.im_maps[p];
        let [cut, decay, rt] = self.g_tilde_factors(p, x);
        let g = self.r.gram(self.params.m - 1);
        let two = lit::<T>(2.0);
        let ax = a * x;
        let good = ax.dot(&(g * &ax)) * two;
        let cross = x.dot(&(g * (a * &ax))) * two;
        [
            cut.v * decay.v * good,
            cut.v * decay.v * cross,
            cut.bracket(a, x) * decay.v * rt.v,
            cut.v * decay.bracket(a, x) * rt.v,
        ]
    }

    /// `ψ_0(r_m |X|^{−2}) w_0(|X|)`.
    pub fn origin_cut(&self, x: &DVector<T>) -> Jet<T> {
        let d = self.dim();
        if x.norm() <= T::one() {
            return Jet::zero(d);
        }
        let w0 = Jet::norm(x).compose(&W0);
        if w0.is_zero() {
            return Jet::zero(d);
        }
        let inv = Jet::quadratic(&nalgebra::DMatrix::identity(d, d), x).powf(-T::one());
        let psi = self.r_jet(self.params.m, x).mul(&inv).compose(&psi0(self.params.c4));
        w0.mul(&psi)
    }

    pub fn big_g(&self, p: usize, x: &DVector<T>) -> Jet<T> {
        let g = self.g_tilde(p, x);
        match &self.lower {
            None => g,
            Some(l) => {
                let cut = self.origin_cut(x);
                if cut.is_zero() {
                    return g;
                }
                let inner = l.assembly.weight(p, x).scale(lit(l.coefficient));
                g.add(&cut.mul(&inner))
            }
        }
    }

    pub fn w_tilde0(&self, x: &DVector<T>) -> Jet<T> {
        self.level_ratio(x).compose(&W1)
    }

    /// `Λ_j r_{m−j−2} / r_{m−j−1}^{(2m−2j−3)/(2m−2j−1)}`.
    fn psi_arg(&self, j: usize, x: &DVector<T>) -> Jet<T> {
        let m = self.params.m;
        let (a, b) = ((2 * m - 2 * j - 3) as f64, (2 * m - 2 * j - 1) as f64);
        let den = self.r_jet(m - j - 1, x).powf(lit(-a / b));
        self.r_jet(m - j - 2, x).mul(&den).scale(lit(self.params.lambdas[j]))
    }

    pub fn big_psi(&self, j: usize, x: &DVector<T>) -> Jet<T> {
        self.psi_arg(j, x).compose(&PSI)
    }

    /// `W_j` for `1 ≤ j ≤ m − 1`; same argument as `Ψ_{j−1}`.
    pub fn big_w(&self, j: usize, x: &DVector<T>) -> Jet<T> {
        self.psi_arg(j - 1, x).compose(&W2)
    }

    /// `r̃_{m−j−1,p} / r_{m−j−1}^{(2m−2j−2)/(2m−2j−1)}` as (numerator, inverse power).
    fn ratio_parts(&self, j: usize, p: usize, x: &DVector<T>) -> (Jet<T>, Jet<T>) {
        let m = self.params.m;
        let k = m - j - 1;
        let (a, b) = ((2 * m - 2 * j - 2) as f64, (2 * m - 2 * j - 1) as f64);
        (self.r_tilde_jet(k, p, x), self.r_jet(k, x).powf(lit(-a / b)))
    }

    /// Cutoff factors `W̃_0, W_1, …, W_j, Ψ_j`, truncated after the first one that vanishes.
    fn cut_factors(&self, j: usize, x: &DVector<T>) -> Option<Vec<Jet<T>>> {
        let mut out = Vec::with_capacity(j + 2);
        let w0 = self.w_tilde0(x);
        if w0.is_zero() {
            return None;
        }
        out.push(w0);
        for l in 1..=j {
            let w = self.big_w(l, x);
            if w.is_zero() {
                return None;
            }
            out.push(w);
        }
        let psi = self.big_psi(j, x);
        if psi.is_zero() {
            return None;
        }
        out.push(psi);
        Some(out)
    }

    pub fn frak_p_j(&self, j: usize, p: usize, x: &DVector<T>) -> Jet<T> {
        let d = self.dim();
        match self.cut_factors(j, x) {
            None => Jet::zero(d),
            Some(f) => {
                let (num, inv) = self.ratio_parts(j, p, x);
                let mut it = f.into_iter().chain([num, inv]);
                lazy_product(d, &mut it)
            }
        }
    }

    pub fn frak_p(&self, p: usize, x: &DVector<T>) -> Jet<T> {
        let d = self.dim();
        let mut acc = Jet::zero(d);
        for j in 0..self.params.m.saturating_sub(1) {
            acc = acc.add(&self.frak_p_j(j, p, x).scale(lit(self.params.alphas[j])));
        }
        acc
    }

    /// `g_p = G_{m,p} + κ 𝔭_p`.
    pub fn weight(&self, p: usize, x: &DVector<T>) -> Jet<T> {
        let g = self.big_g(p, x);
        if self.params.m < 2 {
            return g;
        }
        g.add(&self.frak_p(p, x).scale(lit(self.params.kappa)))
    }

    /// `H_{Im q_p} g_p(X)`.
    pub fn bracket(&self, p: usize, x: &DVector<T>) -> T {
        self.weight(p, x).bracket(&self.r.im_maps[p], x)
    }

    /// `Σ_p H_{Im q_p}` of `G_{m,p}` and of `𝔭_p`, separately.
    pub fn bracket_parts(&self, x: &DVector<T>) -> (T, T) {
        let mut hg = T::zero();
        let mut hp = T::zero();
        for p in 0..self.sys.len() {
            let a = &self.r.im_maps[p];
            hg += self.big_g(p, x).bracket(a, x);
            if self.params.m >= 2 {
                hp += self.frak_p(p, x).bracket(a, x);
            }
        }
        (hg, hp)
    }

    /// `Σ_p Re q_p(X)`.
    pub fn re_sum(&self, x: &DVector<T>) -> T {
        self.r.r(0, x)
    }

    /// Left side `1 + Σ_p (Re q_p + c_h H_{Im q_p} g_p)` of the target inequality.
    pub fn lhs(&self, x: &DVector<T>, c_h: T) -> T {
        let (hg, hp) = self.bracket_parts(x);
        T::one() + self.re_sum(x) + c_h * (hg + hp * lit(self.params.kappa))
    }

    /// Terms `B_1, …, B_5` of `H_{Im q_p} 𝔭_{j,p}` (`B_5` absent for `j = 0`).
    pub fn frak_terms(&self, j: usize, p: usize, x: &DVector<T>) -> Vec<T> {
        let count = if j == 0 { 4 } else { 5 };
        let Some(f) = self.cut_factors(j, x) else {
            return vec![T::zero(); count];
        };
        let a = &self.r.im_maps[p];
        let (num, inv) = self.ratio_parts(j, p, x);
        let prod_except = |skip: Option<usize>| {
            f.iter().enumerate().filter(|(i, _)| Some(*i) != skip).fold(T::one(), |acc, (_, g)| acc * g.v)
        };
        let all = prod_except(None);
        let ratio = num.v * inv.v;
        let psi_idx = f.len() - 1;
        let b1 = f[0].bracket(a, x) * prod_except(Some(0)) * ratio;
        let b2 = f[psi_idx].bracket(a, x) * prod_except(Some(psi_idx)) * ratio;
        let b3 = all * inv.bracket(a, x) * num.v;
        let b4 = all * num.bracket(a, x) * inv.v;
        let mut out = vec![b1, b2, b3, b4];
        if j > 0 {
            let b5 = (1..=j).fold(T::zero(), |acc, l| acc + f[l].bracket(a, x) * prod_except(Some(l)) * ratio);
            out.push(b5);
        }
        out
    }

    /// Part of `B_4` coming from the cross term of `H r̃`, i.e. `B_4` minus its good part.
    pub fn frak_b4_cross(&self, j: usize, p: usize, x: &DVector<T>) -> T {
        let Some(f) = self.cut_factors(j, x) else {
            return T::zero();
        };
        let all = f.iter().fold(T::one(), |acc, g| acc * g.v);
        let (_, inv) = self.ratio_parts(j, p, x);
        let a = &self.r.im_maps[p];
        let g = self.r.gram(self.params.m - j - 2);
        all * inv.v * x.dot(&(g * (a * (a * x)))) * lit::<T>(2.0)
    }

    /// `W̃_0 (Π_{l≤j} W_l) Ψ_j r_{m−j−1}^{1/(2m−2j−1)}`, the term produced by `Σ_p B_4`.
    pub fn good_term(&self, j: usize, x: &DVector<T>) -> T {
        let Some(f) = self.cut_factors(j, x) else {
            return T::zero();
        };
        let m = self.params.m;
        let all = f.iter().fold(T::one(), |acc, g| acc * g.v);
        all * self.r.r(m - j - 1, x).powf(lit(1.0 / (2 * m - 2 * j - 1) as f64))
    }
}
