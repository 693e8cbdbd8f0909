//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use subcert::symplectic::{QuadraticForm, SystemOfForms};

pub type Q = QuadraticForm<f64>;
pub type Sys = SystemOfForms<f64>;

/// `ξ·y − x·η`, written out independently of the library.
pub fn sigma(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let n = x.len() / 2;
    (0..n).map(|i| x[n + i] * y[i] - x[i] * y[n + i]).sum()
}

/// Central-difference gradient.
pub fn fd_grad(f: &dyn Fn(&DVector<f64>) -> f64, x: &DVector<f64>, h: f64) -> DVector<f64> {
    DVector::from_fn(x.len(), |i, _| {
        let mut p = x.clone();
        let mut m = x.clone();
        p[i] += h;
        m[i] -= h;
        (f(&p) - f(&m)) / (2.0 * h)
    })
}

/// `{a, f}(X) = ∂_ξ a·∂_x f − ∂_x a·∂_ξ f` with both gradients by finite differences.
pub fn fd_poisson(a: &dyn Fn(&DVector<f64>) -> f64, f: &dyn Fn(&DVector<f64>) -> f64, x: &DVector<f64>) -> f64 {
    let h = 1e-3 * (1.0 + x.norm());
    let ga = fd_grad(a, x, h);
    let gf = fd_grad(f, x, h);
    let n = x.len() / 2;
    (0..n).map(|i| ga[n + i] * gf[i] - ga[i] * gf[n + i]).sum()
}

/// Hamilton map by solving `σ(e_i, F e_j) = q(e_i; e_j)` entry by entry.
pub fn hamilton_by_basis(q: &DMatrix<f64>) -> DMatrix<f64> {
    // σ(e_i, v) = v_{i−n} for i ≥ n and −v_{i+n} for i < n.
    let d = q.nrows();
    let n = d / 2;
    let mut f = DMatrix::zeros(d, d);
    for j in 0..d {
        for i in 0..d {
            if i >= n {
                f[(i - n, j)] = q[(i, j)];
            } else {
                f[(i + n, j)] = -q[(i, j)];
            }
        }
    }
    f
}

pub fn words(n_forms: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..n_forms).map(move |l| {
                    let mut w = w.clone();
                    w.push(l);
                    w
                })
            })
            .collect();
    }
    out
}

/// `Im F_{l_1} ⋯ Im F_{l_k}` from the basis-solved Hamilton maps.
pub fn word_product(sys: &Sys, word: &[usize]) -> DMatrix<f64> {
    let d = sys.dim();
    word.iter().fold(DMatrix::identity(d, d), |acc, &l| acc * hamilton_by_basis(sys.forms()[l].im()))
}

/// `Σ_j Σ_{|w| = k} Re q_j(W X)`.
pub fn word_r(sys: &Sys, k: usize, x: &DVector<f64>) -> f64 {
    let mut s = 0.0;
    for w in words(sys.len(), k) {
        let y = word_product(sys, &w) * x;
        for q in sys.forms() {
            s += y.dot(&(q.re() * &y));
        }
    }
    s
}

/// `Σ_j Σ_{|w| = k−1} Re q_j(W X; W Im F_p X)`.
pub fn word_r_tilde(sys: &Sys, k: usize, p: usize, x: &DVector<f64>) -> f64 {
    let a = hamilton_by_basis(sys.forms()[p].im());
    let mut s = 0.0;
    for w in words(sys.len(), k - 1) {
        let m = word_product(sys, &w);
        let (u, v) = (&m * x, &m * (&a * x));
        for q in sys.forms() {
            s += u.dot(&(q.re() * &v));
        }
    }
    s
}

/// Null space by SVD of the stacked `Re F_j W` over all words of length `≤ k`.
pub fn brute_tower_level(sys: &Sys, k: usize) -> DMatrix<f64> {
    let d = sys.dim();
    let mut rows: Vec<DMatrix<f64>> = Vec::new();
    for len in 0..=k {
        for w in words(sys.len(), len) {
            let m = word_product(sys, &w);
            for q in sys.forms() {
                rows.push(hamilton_by_basis(q.re()) * &m);
            }
        }
    }
    let total: usize = rows.iter().map(|r| r.nrows()).sum();
    let mut a = DMatrix::zeros(total.max(d), d);
    let mut at = 0;
    for r in rows {
        a.view_mut((at, 0), (r.nrows(), d)).copy_from(&r);
        at += r.nrows();
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let null: Vec<usize> = (0..d).filter(|&i| svd.singular_values[i] <= 1e-10 * smax.max(1e-300)).collect();
    if smax == 0.0 {
        return DMatrix::identity(d, d);
    }
    DMatrix::from_fn(d, null.len(), |r, c| vt[(null[c], r)])
}

/// Distance between the orthogonal projectors (1 when the dimensions differ).
pub fn projector_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.ncols() != b.ncols() {
        return 1.0;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let pa = a * a.transpose();
    let pb = b * b.transpose();
    (pa - pb).abs().max()
}

pub fn random_vector(rng: &mut ChaCha8Rng, d: usize) -> DVector<f64> {
    DVector::from_fn(d, |_, _| rng.gen_range(-2.0..2.0))
}

/// Random form with `Re Q = BᵀB` of rank `≤ rank` and symmetric `Im Q`.
pub fn random_form(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> Q {
    let d = 2 * n;
    let b = DMatrix::from_fn(rank, d, |_, _| rng.gen_range(-1.0..1.0));
    let im = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    Q::new(n, b.transpose() * b, im).unwrap()
}

/// Sparse integer-valued form: degenerate kernels come out exactly.
pub fn random_integer_form(rng: &mut ChaCha8Rng, n: usize) -> Q {
    let d = 2 * n;
    let rank = rng.gen_range(0..=2);
    let pick = |rng: &mut ChaCha8Rng| [-1.0, 0.0, 0.0, 0.0, 1.0][rng.gen_range(0..5)];
    let b = DMatrix::from_fn(rank, d, |_, _| pick(rng));
    let im = DMatrix::from_fn(d, d, |_, _| pick(rng));
    Q::new(n, b.transpose() * b, im).unwrap()
}

pub fn random_system(rng: &mut ChaCha8Rng, n: usize, count: usize, integer: bool) -> Sys {
    let forms = (0..count)
        .map(|_| {
            if integer {
                random_integer_form(rng, n)
            } else {
                let rank = rng.gen_range(1..=2 * n);
                random_form(rng, n, rank)
            }
        })
        .collect();
    Sys::new(forms).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Proptest strategy for a seed, so generators stay in plain Rust.
pub fn seeds() -> impl Strategy<Value = u64> {
    any::<u64>()
}

pub fn model() -> Sys {
    subcert::io::examples::model::<f64>().unwrap()
}
