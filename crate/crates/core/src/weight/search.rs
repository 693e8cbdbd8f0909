//! Sampled search for the constants of the weight assembly.
//!
//! The constants are fixed in the order `Λ_0, α_1, Λ_1, …, α_{m−2}, Λ_{m−2}` by
//! doubling from `1` until the estimate governing each of them holds at every
//! sample. The weight of level `m − 1` is searched recursively on the region
//! `{r_m < c4 |X|²}` where the lower-level condition is available. Finally the
//! bracket scale `c_h` (halving from `1`) and `κ` (doubling from `1`) are chosen
//! to maximize the fitted constant in
//!
//! `1 + Σ_p (Re q_p + c_h H_{Im q_p} g_p) ≥ c ⟨X⟩^{2/(2m+1)}`.
//!
//! Sampling cannot prove the inequality; success means that every sampled margin
//! is nonnegative for the fitted `c > 0` and that the weight contributes beyond
//! the constant: `(lhs − 1) / ⟨X⟩^{2/(2m+1)}` stays positive on the outer half of
//! the radii, where a bounded left side would make it vanish.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use super::assembly::{LowerWeight, WeightAssembly, WeightParams};
use super::sampling::SampleRegion;
use crate::singular::positive_definiteness_check;
use crate::symplectic::SystemOfForms;
use crate::{lit, to_f64, Real, Result};

/// Smallest `(lhs − 1)/⟨X⟩^γ` on the outer shells that counts as a gain.
const GAIN_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub region: SampleRegion,
    /// Share of `⟨X⟩^{2/(2m+1)}` left to the remainder terms.
    pub epsilon: f64,
    pub max_doublings: u32,
    pub c_h_halvings: u32,
    pub kappa_doublings: u32,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { region: SampleRegion::default(), epsilon: 0.25, max_doublings: 24, c_h_halvings: 16, kappa_doublings: 8 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub point: Vec<f64>,
    pub radius: f64,
    pub lhs: f64,
    /// `lhs / ⟨X⟩^{2/(2m+1)}`.
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShellMinimum {
    pub radius: f64,
    pub samples: usize,
    pub min_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub success: bool,
    pub m: usize,
    pub reason: String,
    /// `λ_min(Σ_{k≤m} G_k)` (or the positivity constant inherited on a sub-region).
    pub positivity: f64,
    pub params: WeightParams,
    pub c_h: f64,
    /// Fitted constant `c` of the target inequality.
    pub c: f64,
    pub min_margin: f64,
    pub shells: Vec<ShellMinimum>,
    pub witness: Option<Witness>,
    pub samples: usize,
    pub lower: Option<Box<SearchReport>>,
}

pub struct SearchOutcome<T: Real> {
    pub report: SearchReport,
    pub assembly: WeightAssembly<T>,
}

/// Constraint `r_k(X) < c |X|²` restricting the sampled region.
#[derive(Clone, Copy, Debug)]
struct Domain {
    k: usize,
    c: f64,
}

struct Sample<T: Real> {
    x: DVector<T>,
    shell: usize,
    radius: f64,
}

pub fn constant_search<T: Real>(sys: &SystemOfForms<T>, m: usize, cfg: &SearchConfig) -> Result<SearchOutcome<T>> {
    let lambda = to_f64(positive_definiteness_check(sys, m));
    search_level(sys, m, cfg, lambda, &[])
}

fn collect_samples<T: Real>(sys: &SystemOfForms<T>, cfg: &SearchConfig, domain: &[Domain]) -> Vec<Sample<T>> {
    let kmax = domain.iter().map(|d| d.k).max().unwrap_or(0);
    let r = sys.r_forms(kmax);
    let mut out = Vec::new();
    for (shell, pts) in cfg.region.shells::<T>(sys.dim()).into_iter().enumerate() {
        let radius = cfg.region.radii[shell];
        for x in pts {
            let n2 = x.norm_squared();
            if domain.iter().all(|d| r.r(d.k, &x) < lit::<T>(d.c) * n2) {
                out.push(Sample { x, shell, radius });
            }
        }
    }
    out
}

fn search_level<T: Real>(
    sys: &SystemOfForms<T>,
    m: usize,
    cfg: &SearchConfig,
    positivity: f64,
    domain: &[Domain],
) -> Result<SearchOutcome<T>> {
    let c4 = if positivity > 0.0 { positivity / 2.0 } else { 1e-6 };
    let (lower, lower_report) = if m >= 2 {
        let mut sub = domain.to_vec();
        sub.push(Domain { k: m, c: c4 });
        let out = search_level(sys, m - 1, cfg, positivity - c4, &sub)?;
        let coefficient = out.report.c_h;
        let report = out.report.clone();
        (Some(LowerWeight { assembly: Box::new(out.assembly), coefficient }), Some(Box::new(report)))
    } else {
        (None, None)
    };
    let mut asm = WeightAssembly::new(sys.clone(), WeightParams::unit(m, c4), lower)?;
    let samples = collect_samples::<T>(sys, cfg, domain);
    let gain = asm.gain();
    let eps_share = cfg.epsilon / (m.max(2) - 1) as f64;
    let japanese = |x: &DVector<T>| to_f64(crate::weight::jet::Jet::japanese(x, lit(gain)).v);

    let mut fail_reason: Option<String> = None;
    if let Some(l) = &lower_report {
        if !l.success {
            fail_reason = Some(format!("level {} weight failed: {}", m - 1, l.reason));
        }
    }
    if positivity <= 0.0 {
        fail_reason.get_or_insert_with(|| format!("Σ_{{k≤{m}}} r_k is not positive definite"));
    }

    for j in 0..m.saturating_sub(1) {
        if j > 0 {
            let ok = double_until(&mut asm, cfg.max_doublings, |a| {
                samples.par_iter().all(|s| {
                    let b2: f64 = (0..sys.len()).map(|p| to_f64(a.frak_terms(j - 1, p, &s.x)[1]).abs()).sum();
                    let budget = 0.5 * a.params().alphas[j] * to_f64(a.good_term(j, &s.x))
                        + eps_share * japanese(&s.x)
                        + to_f64(a.re_sum(&s.x));
                    a.params().alphas[j - 1] * b2 <= budget
                })
            }, |a, v| a.params_mut().alphas[j] = v);
            if !ok {
                fail_reason.get_or_insert_with(|| format!("α_{j} did not settle"));
            }
        }
        let ok = double_until(&mut asm, cfg.max_doublings, |a| {
            samples.par_iter().all(|s| {
                let mut bad = 0.0;
                for p in 0..sys.len() {
                    let t = a.frak_terms(j, p, &s.x);
                    bad += to_f64(t[0]).abs() + to_f64(t[2]).abs() + to_f64(a.frak_b4_cross(j, p, &s.x)).abs();
                    if j > 0 {
                        bad += to_f64(t[4]).abs();
                    }
                }
                let good: f64 = (0..=j).map(|i| a.params().alphas[i] * to_f64(a.good_term(i, &s.x))).sum();
                a.params().alphas[j] * bad <= 0.5 * good + eps_share * japanese(&s.x)
            })
        }, |a, v| a.params_mut().lambdas[j] = v);
        if !ok {
            fail_reason.get_or_insert_with(|| format!("Λ_{j} did not settle"));
        }
    }

    // Per-sample pieces that do not depend on c_h and κ.
    let pieces: Vec<(f64, f64, f64, f64)> = samples
        .par_iter()
        .map(|s| {
            let (hg, hp) = asm.bracket_parts(&s.x);
            (1.0 + to_f64(asm.re_sum(&s.x)), to_f64(hg), to_f64(hp), japanese(&s.x))
        })
        .collect();

    let kappas: Vec<f64> = if m >= 2 { (0..=cfg.kappa_doublings).map(|k| 2f64.powi(k as i32)).collect() } else { vec![1.0] };
    let nshell = cfg.region.radii.len();
    let mut best: Option<Fit> = None;
    let mut fallback: Option<Fit> = None;
    for &kappa in &kappas {
        for h in 0..=cfg.c_h_halvings {
            let c_h = 0.5f64.powi(h as i32);
            let fit = fit(&samples, &pieces, nshell, c_h, kappa);
            if fit.passes {
                if best.as_ref().is_none_or(|b| fit.c > b.c) {
                    best = Some(fit);
                }
            } else if fallback.as_ref().is_none_or(|b| fit.gain > b.gain) {
                fallback = Some(fit);
            }
        }
    }
    let (chosen, mut success) = match best {
        Some(b) => (b, true),
        None => (fallback.expect("at least one candidate is evaluated"), false),
    };
    asm.params_mut().kappa = chosen.kappa;
    if fail_reason.is_some() {
        success = false;
    }
    let reason = if success {
        "all sampled margins nonnegative with a visible gain on the outer shells".to_string()
    } else if let Some(r) = fail_reason {
        r
    } else if chosen.min_lhs <= 0.0 {
        "left side is not positive at some sample".to_string()
    } else {
        format!("no gain beyond the constant on the outer shells: min (lhs − 1)/⟨X⟩^γ = {:.3e}", chosen.gain)
    };
    let witness = if success { None } else { chosen.witness(&samples, &pieces) };
    let c = if success { chosen.c * (1.0 - 1e-12) } else { chosen.c.max(0.0) };
    let min_margin = pieces
        .iter()
        .map(|&(base, hg, hp, jx)| base + chosen.c_h * (hg + chosen.kappa * hp) - c * jx)
        .fold(f64::INFINITY, f64::min);
    let report = SearchReport {
        success,
        m,
        reason,
        positivity,
        params: asm.params().clone(),
        c_h: chosen.c_h,
        c,
        min_margin,
        shells: chosen.shells.clone(),
        witness,
        samples: samples.len(),
        lower: lower_report,
    };
    Ok(SearchOutcome { report, assembly: asm })
}

/// Sets a constant to `1, 2, 4, …` until `check` passes; returns whether it did.
fn double_until<T: Real>(
    asm: &mut WeightAssembly<T>,
    max: u32,
    check: impl Fn(&WeightAssembly<T>) -> bool,
    set: impl Fn(&mut WeightAssembly<T>, f64),
) -> bool {
    for k in 0..=max {
        set(asm, 2f64.powi(k as i32));
        if check(asm) {
            return true;
        }
    }
    false
}

struct Fit {
    c_h: f64,
    kappa: f64,
    c: f64,
    min_lhs: f64,
    /// `min (lhs − 1)/⟨X⟩^{2/(2m+1)}` over the outer half of the shells.
    gain: f64,
    passes: bool,
    shells: Vec<ShellMinimum>,
}

impl Fit {
    fn witness<T: Real>(&self, samples: &[Sample<T>], pieces: &[(f64, f64, f64, f64)]) -> Option<Witness> {
        // Worst sample on the outermost populated shell.
        let last = samples.iter().map(|s| s.shell).max()?;
        let mut best: Option<Witness> = None;
        for (s, &(base, hg, hp, jx)) in samples.iter().zip(pieces) {
            if s.shell != last {
                continue;
            }
            let lhs = base + self.c_h * (hg + self.kappa * hp);
            let ratio = lhs / jx;
            if best.as_ref().is_none_or(|b| ratio < b.ratio) {
                let point = s.x.iter().map(|&v| to_f64(v)).collect();
                best = Some(Witness { point, radius: s.radius, lhs, ratio });
            }
        }
        best
    }
}

fn fit<T: Real>(samples: &[Sample<T>], pieces: &[(f64, f64, f64, f64)], nshell: usize, c_h: f64, kappa: f64) -> Fit {
    let mut mins = vec![f64::INFINITY; nshell];
    let mut gains = vec![f64::INFINITY; nshell];
    let mut counts = vec![0usize; nshell];
    let mut min_lhs = f64::INFINITY;
    for (s, &(base, hg, hp, jx)) in samples.iter().zip(pieces) {
        let lhs = base + c_h * (hg + kappa * hp);
        min_lhs = min_lhs.min(lhs);
        mins[s.shell] = mins[s.shell].min(lhs / jx);
        gains[s.shell] = gains[s.shell].min((lhs - 1.0) / jx);
        counts[s.shell] += 1;
    }
    let populated: Vec<usize> = (0..nshell).filter(|&i| counts[i] > 0).collect();
    let outer = &populated[populated.len() / 2..];
    let gain = outer.iter().map(|&i| gains[i]).fold(f64::INFINITY, f64::min);
    let c = mins.iter().copied().fold(f64::INFINITY, f64::min);
    let passes = !populated.is_empty() && min_lhs > 0.0 && c > 0.0 && gain > GAIN_TOL;
    let shells = populated
        .iter()
        .map(|&i| ShellMinimum { radius: samples.iter().find(|s| s.shell == i).map_or(0.0, |s| s.radius), samples: counts[i], min_ratio: mins[i] })
        .collect();
    Fit { c_h, kappa, c, min_lhs, gain, passes, shells }
}
