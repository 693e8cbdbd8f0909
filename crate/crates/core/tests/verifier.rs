mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use subcert::io::examples;
use subcert::linalg::hermitian_eigenvalues;
use subcert::verifier::{assemble, estimate_probe, exponent_for, sharpness_scan, weight_diagonal, Trend};
use subcert::quantization::HermiteBasis;
use subcert::Complex;

const LEVELS: [usize; 4] = [8, 16, 24, 32];

fn cs(sys: &Sys, s: f64, levels: &[usize]) -> Vec<f64> {
    estimate_probe(sys, s, levels).unwrap().levels.iter().map(|l| l.c).collect()
}

#[test]
fn weight_diagonal_values() {
    let basis = HermiteBasis::new(1, 4);
    let w: Vec<f64> = weight_diagonal(&basis, 5, 0.5);
    for (k, v) in w.iter().enumerate() {
        assert!((v - (2.0 + 2.0 * k as f64).sqrt()).abs() < 1e-15);
    }
    let w: Vec<f64> = weight_diagonal(&HermiteBasis::new(2, 1), 3, 1.0);
    assert_eq!(w, vec![3.0, 5.0, 5.0]);
    assert_eq!(exponent_for(1), 1.0 / 3.0);
}

#[test]
fn elliptic_constant_is_level_independent() {
    // min_k (2(2k+1)² + 1)/(2k+2)², attained at k = 0.
    let sys = examples::elliptic::<f64>(1).unwrap();
    for c in cs(&sys, 1.0, &LEVELS) {
        assert!((c - 0.75).abs() < 1e-12);
    }
    let p = estimate_probe(&sys, 1.0, &LEVELS).unwrap();
    assert_eq!(p.trend, Trend::Stable);
    assert_eq!(p.witness[0].alpha, vec![0]);
}

#[test]
fn sharpness() {
    // |ξ² + ix²| ≥ (x² + ξ²)/√2: globally elliptic, so even the full power is attained.
    let probes = sharpness_scan(&model(), &[1.0 / 3.0, 1.0], &LEVELS).unwrap();
    assert_eq!(probes[0].trend, Trend::Stable);
    assert_eq!(probes[1].trend, Trend::Stable);
    assert!(probes[1].levels.iter().all(|l| l.c > 0.2));
    let cross = examples::cross_system::<f64>(2).unwrap();
    let probes = sharpness_scan(&cross, &[1.0 / 3.0, 1.0], &[8, 16, 24]).unwrap();
    assert_eq!(probes[0].trend, Trend::Stable);
    assert_eq!(probes[1].trend, Trend::Decaying);
}

#[test]
fn cross_and_degenerate_trends() {
    let cross = examples::cross_system::<f64>(2).unwrap();
    let p = estimate_probe(&cross, exponent_for(1), &LEVELS).unwrap();
    assert_eq!(p.trend, Trend::Stable);
    assert!(p.levels.iter().all(|l| l.c > 0.7));
    let deg = examples::degenerate::<f64>(2).unwrap();
    let p = estimate_probe(&deg, exponent_for(1), &LEVELS).unwrap();
    assert_eq!(p.trend, Trend::Decaying);
    // The minimizer escapes along the unconstrained (x2, ξ2) oscillator.
    assert_eq!(p.witness[0].alpha, vec![0, 32]);
    assert!(p.witness[0].weight > 0.5);
}

#[test]
fn empty_levels_are_rejected() {
    assert!(estimate_probe(&model(), 0.5, &[]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn invariants(seed in seeds()) {
        let mut g = rng(seed);
        let n = g.gen_range(1..=2);
        let count = g.gen_range(2..=3);
        let sys = random_system(&mut g, n, count, false);
        let s = g.gen_range(0.0..1.0);
        let levels = [4, 6];
        let base = cs(&sys, s, &levels);
        prop_assert!(base[1] <= base[0] * (1.0 + 1e-10));
        prop_assert!(base.iter().all(|&c| c > 0.0));

        let mut forms = sys.forms().to_vec();
        forms.shuffle(&mut g);
        let perm = cs(&Sys::new(forms.clone()).unwrap(), s, &levels);
        for (a, b) in base.iter().zip(&perm) {
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
        }

        forms.push(random_form(&mut g, n, 1));
        let more = cs(&Sys::new(forms).unwrap(), s, &levels);
        for (a, b) in base.iter().zip(&more) {
            prop_assert!(*b >= a - 1e-10 * a.abs().max(1.0));
        }
    }

    #[test]
    fn identity_weight_scaling(seed in seeds()) {
        let mut g = rng(seed);
        let n = g.gen_range(1..=2);
        let count = g.gen_range(1..=2);
        let sys = random_system(&mut g, n, count, false);
        let t = g.gen_range(0.1..3.0);
        let scaled = Sys::new(sys.forms().iter().map(|q| q.scale(Complex::new(t, 0.0))).collect()).unwrap();
        let level = 5;
        let got = cs(&scaled, 0.0, &[level])[0];
        let (basis, ops) = assemble(&sys, level).unwrap();
        let inner = basis.count_up_to(level);
        let mut acc = DMatrix::<Complex<f64>>::identity(inner, inner);
        for a in &ops {
            let cols = a.columns(0, inner);
            acc += cols.adjoint() * cols * Complex::new(t * t, 0.0);
        }
        let want = hermitian_eigenvalues(&acc)[0];
        prop_assert!((got - want).abs() <= 1e-9 * want.max(1.0));
        prop_assert!(got >= 1.0 - 1e-12);
    }
}
