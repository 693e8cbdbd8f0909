//! Quadratic forms on phase space and their Hamilton maps.
//!
//! Points are ordered `X = (x_1..x_n, ξ_1..ξ_n)`. The symplectic form is
//! `σ((x,ξ),(y,η)) = ξ·y − x·η = Xᵀ J Y` with `J = [[0, −I], [I, 0]]`, and a form
//! `q(X) = Xᵀ Q X` has Hamilton map `F = J⁻¹ Q`, so that `σ(X, F Y) = q(X; Y)`.
//! The Poisson bracket is `{a, b} = ∂_ξ a·∂_x b − ∂_x a·∂_ξ b`; for a real form
//! `a` with Hamilton map `A` this gives `H_a f(X) = 2 ∇f(X)·(A X)`.

use nalgebra::{Complex, DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{max_abs, sym};
use crate::{lit, Error, Real, Result};

/// `J = [[0, −I], [I, 0]]` on `R^{2n}`.
pub fn symplectic_matrix<T: Real>(n: usize) -> DMatrix<T> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = -T::one();
        j[(n + i, i)] = T::one();
    }
    j
}

/// `σ(X, Y) = ξ·y − x·η`.
pub fn sigma<T: Real>(x: &DVector<T>, y: &DVector<T>) -> T {
    let n = x.len() / 2;
    let mut s = T::zero();
    for i in 0..n {
        s += x[n + i] * y[i] - x[i] * y[n + i];
    }
    s
}

/// `J⁻¹ Q = −J Q`, written out without a product.
pub fn hamilton_of_matrix<T: Real>(q: &DMatrix<T>) -> DMatrix<T> {
    let d = q.nrows();
    let n = d / 2;
    let mut f = DMatrix::zeros(d, d);
    for c in 0..d {
        for i in 0..n {
            f[(i, c)] = q[(n + i, c)];
            f[(n + i, c)] = -q[(i, c)];
        }
    }
    f
}

/// Inverse of [`hamilton_of_matrix`]: `Q = J F`.
pub fn matrix_of_hamilton<T: Real>(f: &DMatrix<T>) -> DMatrix<T> {
    symplectic_matrix::<T>(f.nrows() / 2) * f
}

/// Complex quadratic form `q(X) = Xᵀ (Re Q + i Im Q) X` with symmetric real parts.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticForm<T: Real> {
    n: usize,
    re: DMatrix<T>,
    im: DMatrix<T>,
}

/// Hamilton map split into real and imaginary parts.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonMap<T: Real> {
    pub re: DMatrix<T>,
    pub im: DMatrix<T>,
}

impl<T: Real> QuadraticForm<T> {
    /// Builds a form from coefficient matrices; both are symmetrized.
    pub fn new(n: usize, re: DMatrix<T>, im: DMatrix<T>) -> Result<Self> {
        let d = 2 * n;
        if n == 0 {
            return Err(Error::Dimension("phase space dimension must be positive".into()));
        }
        for (name, m) in [("real", &re), ("imaginary", &im)] {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::Dimension(format!(
                    "{name} part is {}x{}, expected {d}x{d}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if m.iter().any(|x| !x.is_finite()) {
                return Err(Error::Input(format!("{name} part has non-finite entries")));
            }
        }
        Ok(Self { n, re: sym(&re), im: sym(&im) })
    }

    pub fn real(n: usize, re: DMatrix<T>) -> Result<Self> {
        Self::new(n, re, DMatrix::zeros(2 * n, 2 * n))
    }

    pub fn zero(n: usize) -> Self {
        Self { n, re: DMatrix::zeros(2 * n, 2 * n), im: DMatrix::zeros(2 * n, 2 * n) }
    }

    /// Form whose Hamilton map is `re + i im`.
    pub fn from_hamilton(map: &HamiltonMap<T>) -> Result<Self> {
        let n = map.re.nrows() / 2;
        Self::new(n, matrix_of_hamilton(&map.re), matrix_of_hamilton(&map.im))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn re(&self) -> &DMatrix<T> {
        &self.re
    }

    pub fn im(&self) -> &DMatrix<T> {
        &self.im
    }

    pub fn re_part(&self) -> Self {
        Self { n: self.n, re: self.re.clone(), im: DMatrix::zeros(self.dim(), self.dim()) }
    }

    pub fn im_part(&self) -> Self {
        Self { n: self.n, re: self.im.clone(), im: DMatrix::zeros(self.dim(), self.dim()) }
    }

    pub fn is_real(&self) -> bool {
        self.im.iter().all(|&x| x == T::zero())
    }

    pub fn eval(&self, x: &DVector<T>) -> Complex<T> {
        self.polarize(x, x)
    }

    /// `q(X; Y) = Xᵀ Q Y`, so that `q(X; X) = q(X)`.
    pub fn polarize(&self, x: &DVector<T>, y: &DVector<T>) -> Complex<T> {
        Complex::new(x.dot(&(&self.re * y)), x.dot(&(&self.im * y)))
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self {
            n: self.n,
            re: &self.re * c.re - &self.im * c.im,
            im: &self.re * c.im + &self.im * c.re,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::Dimension("forms live on different phase spaces".into()));
        }
        Ok(Self { n: self.n, re: &self.re + &other.re, im: &self.im + &other.im })
    }

    pub fn hamilton_map(&self) -> HamiltonMap<T> {
        HamiltonMap { re: hamilton_of_matrix(&self.re), im: hamilton_of_matrix(&self.im) }
    }

    /// `max_{i,j} |σ(e_i, F e_j) − q(e_i; e_j)|`, the defining identity checked on a basis.
    pub fn hamilton_residual(&self) -> T {
        let f = self.hamilton_map();
        let d = self.dim();
        let mut worst = T::zero();
        for i in 0..d {
            for j in 0..d {
                let mut ei = DVector::zeros(d);
                ei[i] = T::one();
                let mut ej = DVector::zeros(d);
                ej[j] = T::one();
                let (fr, fi) = f.apply(&ej);
                let q = self.polarize(&ei, &ej);
                worst = worst.max((sigma(&ei, &fr) - q.re).abs()).max((sigma(&ei, &fi) - q.im).abs());
            }
        }
        worst
    }

    /// Largest absolute coefficient, used as a scale for tolerances.
    pub fn scale_norm(&self) -> T {
        max_abs(&self.re).max(max_abs(&self.im))
    }
}

impl<T: Real> HamiltonMap<T> {
    /// `(Re F X, Im F X)`.
    pub fn apply(&self, x: &DVector<T>) -> (DVector<T>, DVector<T>) {
        (&self.re * x, &self.im * x)
    }

    /// Largest entry of `FᵀJ + JF`, which vanishes exactly for Hamilton maps.
    pub fn skew_defect(&self) -> T {
        let j = symplectic_matrix::<T>(self.re.nrows() / 2);
        let d = |f: &DMatrix<T>| max_abs(&(f.transpose() * &j + &j * f));
        d(&self.re).max(d(&self.im))
    }

    /// `[F, G] = FG − GF` for complex maps.
    pub fn commutator(&self, other: &Self) -> Self {
        let (a, b, c, d) = (&self.re, &self.im, &other.re, &other.im);
        let re = a * c - b * d - (c * a - d * b);
        let im = a * d + b * c - (c * b + d * a);
        Self { re, im }
    }
}

/// Poisson bracket `{a, b}` of complex quadratic forms: matrix `2(AJB − BJA)`.
pub fn poisson_bracket<T: Real>(a: &QuadraticForm<T>, b: &QuadraticForm<T>) -> Result<QuadraticForm<T>> {
    if a.n != b.n {
        return Err(Error::Dimension("bracket of forms on different phase spaces".into()));
    }
    let j = symplectic_matrix::<T>(a.n);
    let two = lit::<T>(2.0);
    let prod = |x: &DMatrix<T>, y: &DMatrix<T>| x * &j * y;
    let ab_re = prod(&a.re, &b.re) - prod(&a.im, &b.im);
    let ab_im = prod(&a.re, &b.im) + prod(&a.im, &b.re);
    let ba_re = prod(&b.re, &a.re) - prod(&b.im, &a.im);
    let ba_im = prod(&b.re, &a.im) + prod(&b.im, &a.re);
    QuadraticForm::new(a.n, (ab_re - ba_re) * two, (ab_im - ba_im) * two)
}

/// Finite family of quadratic forms on a common phase space.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemOfForms<T: Real> {
    n: usize,
    forms: Vec<QuadraticForm<T>>,
    names: Vec<String>,
}

impl<T: Real> SystemOfForms<T> {
    pub fn new(forms: Vec<QuadraticForm<T>>) -> Result<Self> {
        let names = (1..=forms.len()).map(|i| format!("q{i}")).collect();
        Self::with_names(forms, names)
    }

    pub fn with_names(forms: Vec<QuadraticForm<T>>, names: Vec<String>) -> Result<Self> {
        let Some(first) = forms.first() else {
            return Err(Error::Input("a system needs at least one form".into()));
        };
        let n = first.n;
        if forms.iter().any(|f| f.n != n) {
            return Err(Error::Dimension("forms of a system must share the phase space".into()));
        }
        if names.len() != forms.len() {
            return Err(Error::Input("one name per form is required".into()));
        }
        Ok(Self { n, forms, names })
    }

    pub fn single(form: QuadraticForm<T>) -> Self {
        Self { n: form.n, forms: vec![form], names: vec!["q".into()] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn forms(&self) -> &[QuadraticForm<T>] {
        &self.forms
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// `Σ λ_j q_j`.
    pub fn combination(&self, lambdas: &[Complex<T>]) -> Result<QuadraticForm<T>> {
        if lambdas.len() != self.len() {
            return Err(Error::Dimension("one coefficient per form is required".into()));
        }
        let mut acc = QuadraticForm::zero(self.n);
        for (f, &l) in self.forms.iter().zip(lambdas) {
            acc = acc.add(&f.scale(l))?;
        }
        Ok(acc)
    }

    pub fn re_maps(&self) -> Vec<DMatrix<T>> {
        self.forms.iter().map(|f| hamilton_of_matrix(&f.re)).collect()
    }

    pub fn im_maps(&self) -> Vec<DMatrix<T>> {
        self.forms.iter().map(|f| hamilton_of_matrix(&f.im)).collect()
    }

    /// The real forms `r_0, …, r_kmax`.
    pub fn r_forms(&self, kmax: usize) -> RForms<T> {
        RForms::new(self, kmax)
    }

    pub fn scale_norm(&self) -> T {
        self.forms.iter().fold(T::zero(), |a, f| a.max(f.scale_norm()))
    }
}

/// The tower `r_k(X) = Σ_j Σ_{|w| = k} Re q_j(Im F_{l_1} ⋯ Im F_{l_k} X)` via Gram matrices
/// `G_0 = Σ Re Q_j`, `G_k = Σ_l (Im F_l)ᵀ G_{k−1} Im F_l`.
#[derive(Clone, Debug)]
pub struct RForms<T: Real> {
    pub grams: Vec<DMatrix<T>>,
    pub im_maps: Vec<DMatrix<T>>,
}

impl<T: Real> RForms<T> {
    pub fn new(sys: &SystemOfForms<T>, kmax: usize) -> Self {
        let d = sys.dim();
        let im_maps = sys.im_maps();
        let mut g0 = DMatrix::zeros(d, d);
        for f in sys.forms() {
            g0 += f.re();
        }
        let mut grams = vec![g0];
        for k in 1..=kmax {
            let mut g = DMatrix::zeros(d, d);
            for a in &im_maps {
                g += a.transpose() * &grams[k - 1] * a;
            }
            grams.push(sym(&g));
        }
        Self { grams, im_maps }
    }

    pub fn kmax(&self) -> usize {
        self.grams.len() - 1
    }

    pub fn gram(&self, k: usize) -> &DMatrix<T> {
        &self.grams[k]
    }

    pub fn r(&self, k: usize, x: &DVector<T>) -> T {
        x.dot(&(&self.grams[k] * x))
    }

    pub fn grad_r(&self, k: usize, x: &DVector<T>) -> DVector<T> {
        &self.grams[k] * x * lit::<T>(2.0)
    }

    /// Symmetric matrix of `r̃_{k,p}(X) = Σ Re q_j(W X; W Im F_p X)` over words of length `k − 1`.
    pub fn r_tilde_matrix(&self, k: usize, p: usize) -> DMatrix<T> {
        assert!(k >= 1, "r̃ is indexed from 1");
        sym(&(&self.grams[k - 1] * &self.im_maps[p]))
    }

    pub fn r_tilde(&self, k: usize, p: usize, x: &DVector<T>) -> T {
        x.dot(&(&self.grams[k - 1] * (&self.im_maps[p] * x)))
    }

    /// `Σ_{k ≤ m} G_k`.
    pub fn partial_sum(&self, m: usize) -> DMatrix<T> {
        let d = self.grams[0].nrows();
        (0..=m).fold(DMatrix::zeros(d, d), |acc, k| acc + &self.grams[k])
    }

    /// `r_k` as a real quadratic form.
    pub fn r_form(&self, k: usize) -> QuadraticForm<T> {
        let n = self.grams[0].nrows() / 2;
        QuadraticForm::real(n, self.grams[k].clone()).expect("gram matrices have phase-space size")
    }

    /// `r̃_{k,p}` as a real quadratic form.
    pub fn r_tilde_form(&self, k: usize, p: usize) -> QuadraticForm<T> {
        let n = self.grams[0].nrows() / 2;
        QuadraticForm::real(n, self.r_tilde_matrix(k, p)).expect("gram matrices have phase-space size")
    }

    /// `H_{Im q_p} f(X) = 2 ∇f(X)·(Im F_p X)`.
    pub fn bracket_along(&self, p: usize, grad: &DVector<T>, x: &DVector<T>) -> T {
        grad.dot(&(&self.im_maps[p] * x)) * lit::<T>(2.0)
    }
}

/// `Im F_{l_1} ⋯ Im F_{l_k}`.
pub fn word_matrix<T: Real>(im_maps: &[DMatrix<T>], word: &[usize], dim: usize) -> DMatrix<T> {
    word.iter().fold(DMatrix::identity(dim, dim), |acc, &l| acc * &im_maps[l])
}

/// Both sides of
/// `H_{Im q_p} Re q_j(U X; V X) = 2 Re q_j(U A X; V X) + 2 Re q_j(U X; V A X)`
/// with `A = Im F_p`, `U = W A^{s1}`, `V = W A^{s2}` and `W` the word product.
#[derive(Clone, Copy, Debug)]
pub struct BracketIdentity<T: Real> {
    pub lhs: T,
    pub rhs: T,
    pub residual: T,
}

/// The left side goes through the Poisson bracket of forms, the right side through
/// polarized evaluations.
pub fn bracket_identity_check<T: Real>(
    sys: &SystemOfForms<T>,
    p: usize,
    j: usize,
    word: &[usize],
    s1: u32,
    s2: u32,
    x: &DVector<T>,
) -> Result<BracketIdentity<T>> {
    let d = sys.dim();
    if p >= sys.len() || j >= sys.len() || word.iter().any(|&l| l >= sys.len()) {
        return Err(Error::Input("form index out of range".into()));
    }
    if x.len() != d {
        return Err(Error::Dimension(format!("point has {} coordinates, expected {d}", x.len())));
    }
    let maps = sys.im_maps();
    let a = &maps[p];
    let w = word_matrix(&maps, word, d);
    let u = &w * a.pow(s1);
    let v = &w * a.pow(s2);
    let re_j = sys.forms()[j].re();
    let form = QuadraticForm::real(sys.n(), u.transpose() * re_j * &v)?;
    let lhs = poisson_bracket(&sys.forms()[p].im_part(), &form)?.eval(x).re;
    let two = lit::<T>(2.0);
    let ax = a * x;
    let rhs = two * (&u * &ax).dot(&(re_j * (&v * x))) + two * (&u * x).dot(&(re_j * (&v * &ax)));
    Ok(BracketIdentity { lhs, rhs, residual: (lhs - rhs).abs() })
}

/// `H²_{Im q_{l_k}} ⋯ H²_{Im q_{l_1}} Re q_j`, the symbol of the iterated commutator.
pub fn iterated_commutator_symbol<T: Real>(sys: &SystemOfForms<T>, j: usize, word: &[usize]) -> Result<QuadraticForm<T>> {
    if j >= sys.len() || word.iter().any(|&l| l >= sys.len()) {
        return Err(Error::Input("form index out of range".into()));
    }
    let mut b = sys.forms()[j].re_part();
    for &l in word {
        let a = sys.forms()[l].im_part();
        b = poisson_bracket(&a, &poisson_bracket(&a, &b)?)?;
    }
    Ok(b)
}

/// Deterministic sample of `q` on the unit sphere: coordinate axes, normalized
/// pairwise sums and differences, then seeded random directions.
pub fn numerical_range_sample<T: Real>(q: &QuadraticForm<T>, count: usize, seed: u64) -> Vec<Complex<T>> {
    let d = q.dim();
    let mut out = Vec::with_capacity(count);
    let push = |v: DVector<T>, out: &mut Vec<Complex<T>>| {
        if out.len() < count {
            let nv = v.norm();
            out.push(q.eval(&(v / nv)));
        }
    };
    for i in 0..d {
        let mut v = DVector::zeros(d);
        v[i] = T::one();
        push(v, &mut out);
    }
    for i in 0..d {
        for j in i + 1..d {
            for s in [T::one(), -T::one()] {
                let mut v = DVector::zeros(d);
                v[i] = T::one();
                v[j] = s;
                push(v, &mut out);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < count {
        let v = crate::weight::sampling::gaussian_vector(d, &mut rng);
        if v.norm() > T::zero() {
            push(v, &mut out);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(xs)
    }

    #[test]
    fn sigma_matches_matrix() {
        let (x, y) = (v(&[1.0, 2.0, 3.0, 4.0]), v(&[-1.0, 0.5, 2.0, 1.0]));
        let j = symplectic_matrix::<f64>(2);
        assert!((sigma(&x, &y) - x.dot(&(&j * &y))).abs() < 1e-14);
        assert!((sigma(&x, &y) + sigma(&y, &x)).abs() < 1e-14);
    }

    #[test]
    fn harmonic_oscillator_map() {
        let q = QuadraticForm::real(1, DMatrix::identity(2, 2)).unwrap();
        let f = q.hamilton_map();
        assert_eq!(f.re, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
    }

    #[test]
    fn bracket_of_squares() {
        let x2 = QuadraticForm::real(1, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0])).unwrap();
        let xi2 = QuadraticForm::real(1, DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0])).unwrap();
        let b = poisson_bracket(&x2, &xi2).unwrap();
        // {x², ξ²} = −4xξ
        let p = v(&[1.5, -2.0]);
        assert!((b.eval(&p).re - (-4.0 * 1.5 * -2.0)).abs() < 1e-12);
    }

    #[test]
    fn r_tower_of_model_operator() {
        // q = ξ² + i x²: r_0 = ξ², r_1 = x², r̃_{1,1} = −xξ, r_2 = 0
        let re = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        let im = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let sys = SystemOfForms::single(QuadraticForm::new(1, re, im).unwrap());
        let r = sys.r_forms(2);
        let p = v(&[0.7, -1.3]);
        assert!((r.r(0, &p) - 1.69).abs() < 1e-12);
        assert!((r.r(1, &p) - 0.49).abs() < 1e-12);
        assert!(r.r(2, &p).abs() < 1e-12);
        assert!((r.r_tilde(1, 0, &p) - 0.91).abs() < 1e-12);
    }
}
