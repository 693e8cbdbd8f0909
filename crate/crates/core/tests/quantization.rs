mod common;

use common::*;
use nalgebra::{Complex, DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

use subcert::quantization::wick::{gauss_hermite_rule, wave_packet_norm_sq};
use subcert::quantization::{
    composition_residual, convention_transport, oscillator_symbol, quadratic_correction, quantize_form,
    transport_map, wave_packet, weyl_matrix, wick_by_quadrature, wick_check, wick_matrix, Convention, HermiteBasis,
    PhaseGrid, PolySymbol,
};

type C = Complex<f64>;
type CM = DMatrix<C>;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn max_abs(m: &CM) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn hermitian_part(m: &CM) -> CM {
    (m + m.adjoint()) * c(0.5, 0.0)
}

fn min_eig(m: &CM) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.min()
}

fn mono(n: usize, e: &[u32], v: C) -> PolySymbol<f64> {
    PolySymbol::monomial(n, e.to_vec(), v).unwrap()
}

fn random_symbol(g: &mut rand_chacha::ChaCha8Rng, n: usize, deg: u32) -> PolySymbol<f64> {
    let mut s = PolySymbol::zero(n);
    for _ in 0..6 {
        let mut e = vec![0u32; 2 * n];
        let mut left = g.gen_range(0..=deg);
        while left > 0 {
            e[g.gen_range(0..2 * n)] += 1;
            left -= 1;
        }
        s.add_term(e, c(g.gen_range(-1.0..1.0), g.gen_range(-1.0..1.0)));
    }
    s
}

/// Polynomial parts `p_k` of the normalized Hermite functions `h_k = p_k e^{−x²/2}` at `x`.
fn hermite_polys(x: f64, kmax: usize) -> Vec<f64> {
    let mut p = vec![std::f64::consts::PI.powf(-0.25)];
    if kmax >= 1 {
        p.push(2f64.sqrt() * x * p[0]);
    }
    for k in 1..kmax {
        let next = (2.0 / (k + 1) as f64).sqrt() * x * p[k] - (k as f64 / (k + 1) as f64).sqrt() * p[k - 1];
        p.push(next);
    }
    p
}

/// `⟨h_j, op h_k⟩` by Gauss–Hermite quadrature, `op` acting on (value, derivative) pairs.
fn quadrature_matrix(kmax: usize, entry: &dyn Fn(f64, (f64, f64), (f64, f64)) -> C) -> CM {
    let (u, w) = gauss_hermite_rule::<f64>(40);
    let mut m = CM::zeros(kmax + 1, kmax + 1);
    for (&x, &wt) in u.iter().zip(&w) {
        let p = hermite_polys(x, kmax + 1);
        // h_k' e^{x²/2} = √(2k) p_{k−1} − x p_k
        let d = |k: usize| if k == 0 { -x * p[0] } else { (2.0 * k as f64).sqrt() * p[k - 1] - x * p[k] };
        for j in 0..=kmax {
            for k in 0..=kmax {
                m[(j, k)] += entry(x, (p[j], d(j)), (p[k], d(k))) * wt;
            }
        }
    }
    m
}

#[test]
fn gauss_hermite_moments() {
    let (u, w) = gauss_hermite_rule::<f64>(12);
    let pi = std::f64::consts::PI;
    let mut expect = pi.sqrt();
    for m in 0..12 {
        let got: f64 = u.iter().zip(&w).map(|(x, wt)| wt * x.powi(2 * m)).sum();
        assert!((got - expect).abs() < 1e-12 * expect, "moment {m}");
        expect *= (2 * m + 1) as f64 / 2.0;
    }
}

#[test]
fn one_dimensional_weyl_against_quadrature() {
    let dmax = 12;
    let basis = HermiteBasis::new(1, dmax);
    let i = c(0.0, 1.0);
    let cases: Vec<(Vec<u32>, CM)> = vec![
        (vec![2, 0], quadrature_matrix(dmax, &|x, (a, _), (b, _)| c(x * x * a * b, 0.0))),
        (vec![4, 0], quadrature_matrix(dmax, &|x, (a, _), (b, _)| c(x.powi(4) * a * b, 0.0))),
        (vec![0, 2], quadrature_matrix(dmax, &|_, (_, da), (_, db)| c(da * db, 0.0))),
        (vec![0, 1], quadrature_matrix(dmax, &|_, (a, _), (_, db)| -i * a * db)),
        // (xD + Dx)/2 = −i(x∂ + 1/2)
        (vec![1, 1], quadrature_matrix(dmax, &|x, (a, _), (b, db)| -i * (x * a * db + 0.5 * a * b))),
    ];
    for (e, oracle) in cases {
        let got = weyl_matrix(&mono(1, &e, c(1.0, 0.0)), &basis, Convention::Body).unwrap();
        let err = max_abs(&(&got - &oracle));
        assert!(err < 1e-10 * (1.0 + max_abs(&oracle)), "{e:?}: {err}");
    }
}

#[test]
fn oscillator_is_diagonal() {
    for n in 1..=3 {
        for dmax in [0, 1, 4, 8, 12] {
            let basis = HermiteBasis::new(n, dmax);
            let body = weyl_matrix(&oscillator_symbol::<f64>(n), &basis, Convention::Body).unwrap();
            let app = weyl_matrix(&oscillator_symbol::<f64>(n), &basis, Convention::Appendix).unwrap();
            for r in 0..basis.dim() {
                for col in 0..basis.dim() {
                    let want = if r == col { (2 * basis.level(r) + n) as f64 } else { 0.0 };
                    assert!((body[(r, col)] - c(want, 0.0)).norm() < 1e-12);
                    let want = want / (2.0 * std::f64::consts::PI);
                    assert!((app[(r, col)] - c(want, 0.0)).norm() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn symbol_degree_is_capped() {
    let basis = HermiteBasis::new(1, 4);
    assert!(weyl_matrix(&mono(1, &[5, 0], c(1.0, 0.0)), &basis, Convention::Body).is_err());
    assert!(weyl_matrix(&mono(2, &[1, 0, 0, 0], c(1.0, 0.0)), &basis, Convention::Body).is_err());
}

#[test]
fn wick_corrections() {
    let pi = std::f64::consts::PI;
    let model_corr = quadratic_correction(&model().forms()[0]);
    assert!((model_corr - c(1.0, 1.0) / (4.0 * pi)).norm() < 1e-15);
    let ell = subcert::io::examples::elliptic::<f64>(1).unwrap();
    let chk = wick_check(&ell.forms()[0], 12).unwrap();
    assert!((chk.correction[0] - 1.0 / (2.0 * pi)).abs() < 1e-15);
    assert!((chk.correction[1] - 1.0 / (2.0 * pi)).abs() < 1e-15);
    assert!(chk.correction_residual < 1e-12);
    assert!(chk.wick_spectrum[0] > 0.0);
    let chk = wick_check(&model().forms()[0], 12).unwrap();
    assert!(chk.correction_residual < 1e-12 && chk.wick_spectrum[0] >= -1e-12);
    assert!(wick_check(&model().forms()[0], 1).is_err());
}

#[test]
fn wick_identity_and_point_mass() {
    let basis = HermiteBasis::new(1, 6);
    let one = wick_matrix(&PolySymbol::constant(1, c(1.0, 0.0)), &basis).unwrap();
    assert!(max_abs(&(one - CM::identity(7, 7))) < 1e-14);
    let grid = PhaseGrid::gauss_hermite(1, 12);
    let quad = wick_by_quadrature(&|_: &[f64]| c(1.0, 0.0), &basis, &grid);
    assert!(max_abs(&(quad - CM::identity(7, 7))) < 1e-10);
    let proj = wick_by_quadrature(&|_: &[f64]| c(1.0, 0.0), &basis, &PhaseGrid::point_mass(1));
    let mut e0 = CM::zeros(7, 7);
    e0[(0, 0)] = c(1.0, 0.0);
    assert!(max_abs(&(proj - e0)) < 1e-15);
}

#[test]
fn wick_quadrature_matches_closed_form() {
    let basis = HermiteBasis::new(1, 6);
    let grid = PhaseGrid::gauss_hermite(1, 12);
    let mut g = rng(11);
    for _ in 0..20 {
        let a = random_symbol(&mut g, 1, 4);
        let closed = wick_matrix(&a, &basis).unwrap();
        let quad = wick_by_quadrature(&|y: &[f64]| a.eval(y), &basis, &grid);
        assert!(max_abs(&(&closed - &quad)) < 1e-6 * (1.0 + max_abs(&closed)));
    }
}

#[test]
fn wave_packets_resolve_the_identity() {
    let basis = HermiteBasis::new(1, 6);
    let grid = PhaseGrid::gauss_hermite(1, 12);
    let mut g = rng(3);
    for _ in 0..20 {
        let u = DVector::from_fn(basis.dim(), |_, _| c(g.gen_range(-1.0..1.0), g.gen_range(-1.0..1.0)));
        let got = wave_packet_norm_sq(&u, &basis, &grid);
        assert!((got - u.norm_squared()).abs() < 1e-10 * u.norm_squared());
    }
    let big = HermiteBasis::new(1, 80);
    let v = wave_packet(&[0.3f64, -0.2], &big);
    assert!((v.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn composition_residual_stabilizes() {
    let x2 = mono(1, &[2, 0], c(1.0, 0.0));
    let xi2 = mono(1, &[0, 2], c(1.0, 0.0));
    let small = composition_residual(&x2, &xi2, &HermiteBasis::new(1, 12)).unwrap();
    let big = composition_residual(&x2, &xi2, &HermiteBasis::new(1, 24)).unwrap();
    let k = small.nrows();
    let common = big.view((0, 0), (k, k)).into_owned();
    assert!(max_abs(&(&small - &common)) < 1e-9);
    assert!(max_abs(&big) <= 2.0 * max_abs(&small) + 1e-12);
    assert!(composition_residual(&mono(1, &[3, 0], c(1.0, 0.0)), &x2, &HermiteBasis::new(1, 12)).is_err());
}

#[test]
fn transport_map_is_symplectic() {
    for n in 1..=3 {
        let t = transport_map::<f64>(n);
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            j[(i, n + i)] = -1.0;
            j[(n + i, i)] = 1.0;
        }
        assert!((t.transpose() * &j * &t - &j).abs().max() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn adjoint_band_and_parity(seed in seeds()) {
        let mut g = rng(seed);
        let n = g.gen_range(1..=2);
        let dmax = g.gen_range(2..=6);
        let basis = HermiteBasis::new(n, dmax);
        let a = random_symbol(&mut g, n, 4);
        let mut conj = PolySymbol::zero(n);
        for (e, v) in a.terms() {
            conj.add_term(e.clone(), v.conj());
        }
        let conv = if g.gen_bool(0.5) { Convention::Body } else { Convention::Appendix };
        let m = weyl_matrix(&a, &basis, conv).unwrap();
        let mc = weyl_matrix(&conj, &basis, conv).unwrap();
        prop_assert!(max_abs(&(&mc - m.adjoint())) < 1e-12 * (1.0 + max_abs(&m)));
        let deg = a.degree() as usize;
        for r in 0..basis.dim() {
            for col in 0..basis.dim() {
                let (lr, lc) = (basis.level(r), basis.level(col));
                if lr.abs_diff(lc) > deg {
                    prop_assert_eq!(m[(r, col)], c(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn nonnegative_forms_quantize_to_nonnegative_operators(seed in seeds()) {
        let mut g = rng(seed);
        let n = g.gen_range(1..=2);
        let rank = g.gen_range(0..=2 * n);
        let q = random_form(&mut g, n, rank);
        let basis = HermiteBasis::new(n, 6);
        let scale = 1.0 + q.scale_norm() * 10.0;
        let weyl = quantize_form(&q, &basis, Convention::Body).unwrap();
        prop_assert!(min_eig(&hermitian_part(&weyl)) >= -1e-10 * scale);
        let a = PolySymbol::from_quadratic(&q);
        let wick = wick_matrix(&a, &basis).unwrap();
        prop_assert!(min_eig(&hermitian_part(&wick)) >= -1e-10 * scale);
        let chk = wick_check(&q, 8).unwrap();
        prop_assert!(chk.correction_residual < 1e-10 * scale);
        prop_assert!(chk.wick_spectrum[0] >= chk.weyl_min - 1e-10 * scale);
    }

    #[test]
    fn conventions_are_related_by_transport(seed in seeds()) {
        let mut g = rng(seed);
        let n = g.gen_range(1..=2);
        let rank = g.gen_range(0..=2 * n);
        let q = random_form(&mut g, n, rank);
        let basis = HermiteBasis::new(n, 5);
        let app = quantize_form(&q, &basis, Convention::Appendix).unwrap();
        let qt = convention_transport(&q).unwrap();
        let t = transport_map::<f64>(n);
        // The appendix basis is the body basis dilated by T, so the matrices of q̃ ∘ T agree.
        let pulled = Q::new(n, t.transpose() * qt.re() * &t, t.transpose() * qt.im() * &t).unwrap();
        let body = quantize_form(&pulled, &basis, Convention::Body).unwrap();
        prop_assert!(max_abs(&(&app - &body)) < 1e-12 * (1.0 + max_abs(&app)));
        let direct = quantize_form(&q, &basis, Convention::Body).unwrap() * c(1.0 / (2.0 * std::f64::consts::PI), 0.0);
        prop_assert!(max_abs(&(&app - &direct)) < 1e-12 * (1.0 + max_abs(&app)));
        let x = random_vector(&mut g, 2 * n);
        let lhs = qt.eval(&(&t * &x));
        let rhs = q.eval(&x) / (2.0 * std::f64::consts::PI);
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + q.eval(&x).norm()));
    }
}
