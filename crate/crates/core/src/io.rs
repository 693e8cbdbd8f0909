//! JSON description of a system of quadratic forms, and built-in examples.
//!
//! ```json
//! {"n": 1, "forms": [{"name": "q", "terms": [
//!     {"mono": "xi1*xi1", "re": 1, "im": 0},
//!     {"mono": "x1*x1", "re": 0, "im": 1}]}]}
//! ```
//!
//! A monomial is `v*w` with `v, w ∈ {x1..xn, xi1..xin}`. Duplicate monomials add up.

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::linalg::min_sym_eigenvalue;
use crate::symplectic::{QuadraticForm, SystemOfForms};
use crate::{lit, to_f64, Error, Real, Result};

/// Slack allowed below zero for the eigenvalues of `Re Q`.
pub const NONNEG_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub n: usize,
    pub forms: Vec<FormSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSpec {
    pub name: String,
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub mono: String,
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Index of a phase-space variable: `x{i}` is `i−1`, `xi{i}` is `n+i−1`.
fn variable(token: &str, n: usize) -> std::result::Result<usize, String> {
    let token = token.trim();
    let (offset, digits) = if let Some(d) = token.strip_prefix("xi") {
        (n, d)
    } else if let Some(d) = token.strip_prefix('x') {
        (0, d)
    } else {
        return Err(format!("unknown variable `{token}`"));
    };
    let i: usize = digits.parse().map_err(|_| format!("unknown variable `{token}`"))?;
    if i == 0 || i > n {
        return Err(format!("variable `{token}` out of range 1..={n}"));
    }
    Ok(offset + i - 1)
}

fn monomial(mono: &str, n: usize) -> std::result::Result<(usize, usize), String> {
    let factors: Vec<&str> = mono.split('*').collect();
    if factors.len() != 2 {
        return Err(format!("`{mono}` is not a product of two variables"));
    }
    Ok((variable(factors[0], n)?, variable(factors[1], n)?))
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("line {}, column {}: {e}", e.line(), e.column())))
    }

    /// Validated system; rejects forms whose real part is not nonnegative.
    pub fn to_system<T: Real>(&self) -> Result<SystemOfForms<T>> {
        let n = self.n;
        if n == 0 {
            return Err(Error::Dimension("n must be positive".into()));
        }
        let d = 2 * n;
        let mut forms = Vec::with_capacity(self.forms.len());
        let mut names = Vec::with_capacity(self.forms.len());
        for (fi, spec) in self.forms.iter().enumerate() {
            let mut re = DMatrix::<f64>::zeros(d, d);
            let mut im = DMatrix::<f64>::zeros(d, d);
            for (ti, term) in spec.terms.iter().enumerate() {
                let at = |msg: String| Error::Input(format!("form {fi} (`{}`), term {ti}: {msg}", spec.name));
                let (a, b) = monomial(&term.mono, n).map_err(at)?;
                if !term.re.is_finite() || !term.im.is_finite() {
                    return Err(at("non-finite coefficient".into()));
                }
                let h = if a == b { 1.0 } else { 0.5 };
                re[(a, b)] += h * term.re;
                re[(b, a)] += if a == b { 0.0 } else { h * term.re };
                im[(a, b)] += h * term.im;
                im[(b, a)] += if a == b { 0.0 } else { h * term.im };
            }
            let q = QuadraticForm::new(n, re.map(lit::<T>), im.map(lit::<T>))?;
            check_nonnegative(&q).map_err(|e| Error::Input(format!("form {fi} (`{}`): {e}", spec.name)))?;
            forms.push(q);
            names.push(spec.name.clone());
        }
        SystemOfForms::with_names(forms, names)
    }

    pub fn from_system<T: Real>(sys: &SystemOfForms<T>, metadata: Option<serde_json::Value>) -> Self {
        let n = sys.n();
        let label = |i: usize| if i < n { format!("x{}", i + 1) } else { format!("xi{}", i - n + 1) };
        let forms = sys
            .forms()
            .iter()
            .zip(sys.names())
            .map(|(q, name)| {
                let mut terms = Vec::new();
                for i in 0..2 * n {
                    for j in i..2 * n {
                        let f = if i == j { 1.0 } else { 2.0 };
                        // `+ 0.0` folds −0 into 0.
                        let re = f * to_f64(q.re()[(i, j)]) + 0.0;
                        let im = f * to_f64(q.im()[(i, j)]) + 0.0;
                        if re != 0.0 || im != 0.0 {
                            terms.push(Term { mono: format!("{}*{}", label(i), label(j)), re, im });
                        }
                    }
                }
                FormSpec { name: name.clone(), terms }
            })
            .collect();
        Self { n, forms, metadata }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("system file serializes")
    }
}

/// Errors unless every eigenvalue of `Re Q` is `≥ −NONNEG_TOL`.
pub fn check_nonnegative<T: Real>(q: &QuadraticForm<T>) -> Result<()> {
    let lmin = to_f64(min_sym_eigenvalue(q.re()));
    if lmin < -NONNEG_TOL {
        return Err(Error::Input(format!("real part is not nonnegative (eigenvalue {lmin:.3e})")));
    }
    Ok(())
}

pub fn parse_system<T: Real>(text: &str) -> Result<SystemOfForms<T>> {
    SystemFile::parse(text)?.to_system()
}

pub fn emit_system<T: Real>(sys: &SystemOfForms<T>) -> String {
    SystemFile::from_system(sys, None).to_json()
}

/// Built-in systems.
pub mod examples {
    use super::*;

    fn entry<T: Real>(m: &mut DMatrix<T>, a: usize, b: usize, v: f64) {
        if a == b {
            m[(a, a)] += lit::<T>(v);
        } else {
            m[(a, b)] += lit::<T>(v / 2.0);
            m[(b, a)] += lit::<T>(v / 2.0);
        }
    }

    /// `x_1² + ξ_1² + i(ξ_1² + x_{j+1} ξ_1)` if `partner_is_xi` is false, and the same with
    /// `ξ_{j+1}` in place of `x_{j+1}` otherwise (`1 ≤ j ≤ n−1`).
    pub fn cross_form<T: Real>(n: usize, j: usize, partner_is_xi: bool) -> Result<QuadraticForm<T>> {
        if n < 2 || j == 0 || j >= n {
            return Err(Error::Input(format!("need n ≥ 2 and 1 ≤ j ≤ n−1, got n={n}, j={j}")));
        }
        let d = 2 * n;
        let mut re = DMatrix::zeros(d, d);
        let mut im = DMatrix::zeros(d, d);
        entry(&mut re, 0, 0, 1.0);
        entry(&mut re, n, n, 1.0);
        entry(&mut im, n, n, 1.0);
        let partner = if partner_is_xi { n + j } else { j };
        entry(&mut im, partner, n, 1.0);
        QuadraticForm::new(n, re, im)
    }

    /// The `2(n−1)` forms `q_1, q̃_1, …, q_{n−1}, q̃_{n−1}`.
    pub fn cross_system<T: Real>(n: usize) -> Result<SystemOfForms<T>> {
        let mut forms = Vec::new();
        let mut names = Vec::new();
        for j in 1..n {
            forms.push(cross_form(n, j, false)?);
            names.push(format!("q{j}"));
            forms.push(cross_form(n, j, true)?);
            names.push(format!("qt{j}"));
        }
        if forms.is_empty() {
            return Err(Error::Input("need n ≥ 2".into()));
        }
        SystemOfForms::with_names(forms, names)
    }

    /// `Σ_j (λ_j q_j + λ̃_j q̃_j)` as a one-form system.
    pub fn cross_sum<T: Real>(n: usize, lambdas: &[f64], lambda_tildes: &[f64]) -> Result<SystemOfForms<T>> {
        let sys = cross_system::<T>(n)?;
        if lambdas.len() != n - 1 || lambda_tildes.len() != n - 1 {
            return Err(Error::Dimension(format!("need {} coefficients of each kind", n - 1)));
        }
        let coeffs: Vec<Complex<T>> = lambdas
            .iter()
            .zip(lambda_tildes)
            .flat_map(|(&l, &lt)| [Complex::new(lit(l), T::zero()), Complex::new(lit(lt), T::zero())])
            .collect();
        let q = sys.combination(&coeffs)?;
        SystemOfForms::with_names(vec![q], vec!["q".into()])
    }

    /// `(1 + i)(|x|² + |ξ|²)`.
    pub fn elliptic<T: Real>(n: usize) -> Result<SystemOfForms<T>> {
        let id = DMatrix::<T>::identity(2 * n, 2 * n);
        Ok(SystemOfForms::single(QuadraticForm::new(n, id.clone(), id)?))
    }

    /// `ξ² + i x²` in one dimension.
    pub fn model<T: Real>() -> Result<SystemOfForms<T>> {
        let re = DMatrix::from_row_slice(2, 2, &[T::zero(), T::zero(), T::zero(), T::one()]);
        let im = DMatrix::from_row_slice(2, 2, &[T::one(), T::zero(), T::zero(), T::zero()]);
        Ok(SystemOfForms::single(QuadraticForm::new(1, re, im)?))
    }

    /// `x_1² + ξ_1²` on `R^{2n}`, which gives no control in the other variables.
    pub fn degenerate<T: Real>(n: usize) -> Result<SystemOfForms<T>> {
        let d = 2 * n;
        let mut re = DMatrix::zeros(d, d);
        entry(&mut re, 0, 0, 1.0);
        entry(&mut re, n, n, 1.0);
        Ok(SystemOfForms::single(QuadraticForm::real(n, re)?))
    }

    /// Metadata recorded with the `cross` example files.
    pub fn cross_metadata(n: usize, lambdas: Option<(&[f64], &[f64])>) -> serde_json::Value {
        let mut v = serde_json::json!({"example": "cross", "n": n});
        if let Some((l, lt)) = lambdas {
            v["lambda"] = serde_json::json!(l);
            v["lambda_tilde"] = serde_json::json!(lt);
        }
        v
    }
}
