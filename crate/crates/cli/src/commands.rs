use std::time::Instant;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use subcert::io::{emit_system, examples, SystemFile};
use subcert::linalg::Subspace;
use subcert::quantization::wick_check;
use subcert::singular::{certificate, singular_space, system_tower, Certificate};
use subcert::verifier::{estimate_probe, exponent_for, Probe, Trend};
use subcert::weight::sampling::SampleRegion;
use subcert::weight::{constant_search, SearchConfig};
use subcert::{Error, Result, System64};

use crate::report::{Report, Status};
use crate::{Common, ExampleName, EXIT_NOT_SATISFIED, EXIT_OK};

fn load(path: &str) -> Result<(System64, String)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{path}: {e}")))?;
    let sys: System64 = SystemFile::parse(&text)
        .and_then(|f| f.to_system())
        .map_err(|e| Error::Input(format!("{path}: {e}")))?;
    let digest = Sha256::digest(emit_system(&sys).as_bytes());
    let hex = digest.iter().map(|b| format!("{b:02x}")).collect();
    Ok((sys, hex))
}

fn emit(report: Report, common: &Common, started: Instant) -> Result<u8> {
    print!("{}", report.render(common, started));
    Ok(match report.status {
        Status::Satisfied => EXIT_OK,
        Status::NotSatisfied => EXIT_NOT_SATISFIED,
    })
}

fn basis_columns(s: &Subspace<f64>) -> Vec<Vec<f64>> {
    s.basis.column_iter().map(|c| c.iter().copied().collect()).collect()
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Satisfied
    } else {
        Status::NotSatisfied
    }
}

fn certificate_lines(cert: &Certificate) -> Vec<String> {
    let dims: Vec<String> = cert.dims.iter().map(|d| d.to_string()).collect();
    let mut out = vec![format!("tower dims: {}", dims.join(" "))];
    match (cert.k0, cert.delta) {
        (Some(k0), Some(delta)) => {
            out.push(format!("k0 = {k0}, loss δ = {}/{} = {delta:.6}", 2 * k0, 2 * k0 + 1));
            if let Some(l) = cert.lambda_min {
                out.push(format!("λ_min(Σ_{{k≤k0}} G_k) = {l:.6e}"));
            }
        }
        _ => out.push("tower does not reach {0}".into()),
    }
    out
}

pub fn analyze(path: &str, kmax: Option<usize>, common: &Common) -> Result<u8> {
    let started = Instant::now();
    let (sys, sha) = load(path)?;
    let cert = certificate(&sys, kmax, common.tol);
    let tower = system_tower(&sys, kmax.unwrap_or(sys.dim()), common.tol);
    let limit = tower.levels.last().expect("tower has a level");
    let forms: Vec<Value> = sys
        .forms()
        .iter()
        .zip(sys.names())
        .map(|(q, name)| {
            let s = singular_space(q, common.tol);
            json!({"name": name, "singular_dim": s.dim(), "singular_basis": basis_columns(&s)})
        })
        .collect();
    let mut text = vec![format!("system: {} form(s) on R^{}", sys.len(), sys.dim())];
    text.extend(certificate_lines(&cert));
    for f in &forms {
        text.push(format!("form {}: singular space dim {}", f["name"].as_str().unwrap_or("?"), f["singular_dim"]));
    }
    let report = Report {
        command: "analyze",
        system_sha256: sha,
        options: json!({"kmax": kmax, "tol": common.tol}),
        status: status(cert.satisfied),
        result: json!({
            "certificate": cert,
            "tower_limit_basis": basis_columns(limit),
            "forms": forms,
        }),
        text,
    };
    emit(report, common, started)
}

fn probe_lines(p: &Probe) -> Vec<String> {
    let mut out = vec![format!("weight power s = {:.6}", p.s)];
    for l in &p.levels {
        out.push(format!("  D = {:>3} (dim {:>5}): c = {:.6e}", l.level, l.dim, l.c));
    }
    out.push(format!("  trend: {}", match p.trend {
        Trend::Stable => "stable",
        Trend::Decaying => "decaying",
    }));
    if let Some(w) = p.witness.first() {
        out.push(format!("  minimizer peaks at α = {:?} (weight {:.3})", w.alpha, w.weight));
    }
    out
}

pub fn verify(
    path: &str,
    levels: &[usize],
    k0: Option<usize>,
    powers: &[f64],
    kmax: Option<usize>,
    common: &Common,
) -> Result<u8> {
    let started = Instant::now();
    let (sys, sha) = load(path)?;
    let cert = certificate(&sys, kmax, common.tol);
    let options = json!({"levels": levels, "k0": k0, "powers": powers, "kmax": kmax, "tol": common.tol});
    let Some(k0) = k0.or(cert.k0) else {
        let mut text = certificate_lines(&cert);
        text.push("no k0 to probe; pass --k0".into());
        let report = Report {
            command: "verify",
            system_sha256: sha,
            options,
            status: Status::NotSatisfied,
            result: json!({"certificate": cert, "probe": null, "scan": []}),
            text,
        };
        return emit(report, common, started);
    };
    for &s in powers {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Input(format!("weight power {s} outside [0, 1]")));
        }
    }
    let probe = estimate_probe(&sys, exponent_for(k0), levels)?;
    let scan = powers.iter().map(|&s| estimate_probe(&sys, s, levels)).collect::<Result<Vec<_>>>()?;
    let mut text = vec![format!("k0 = {k0}")];
    text.extend(probe_lines(&probe));
    for p in &scan {
        text.extend(probe_lines(p));
    }
    let report = Report {
        command: "verify",
        system_sha256: sha,
        options,
        status: status(probe.trend == Trend::Stable),
        result: json!({"certificate": cert, "k0": k0, "probe": probe, "scan": scan}),
        text,
    };
    emit(report, common, started)
}

pub fn weights(
    path: &str,
    m: Option<usize>,
    samples: usize,
    shells: usize,
    radius: f64,
    kmax: Option<usize>,
    common: &Common,
) -> Result<u8> {
    let started = Instant::now();
    let (sys, sha) = load(path)?;
    if samples == 0 || shells == 0 || radius.is_nan() || radius <= 1.0 {
        return Err(Error::Input("need samples ≥ 1, shells ≥ 1 and radius > 1".into()));
    }
    let cert = certificate(&sys, kmax, common.tol);
    let m = m.unwrap_or_else(|| cert.k0.unwrap_or(1)).max(1);
    let cfg = SearchConfig {
        region: SampleRegion::log_spaced(shells, 1.0, radius, samples, common.seed),
        ..SearchConfig::default()
    };
    let out = constant_search(&sys, m, &cfg)?;
    let r = &out.report;
    let mut text = vec![
        format!("m = {m}, {} samples", r.samples),
        format!("λ_min(Σ_{{k≤m}} G_k) = {:.6e}", r.positivity),
        format!("Λ = {:?}, α = {:?}, κ = {}, c_h = {}", r.params.lambdas, r.params.alphas, r.params.kappa, r.c_h),
        format!("fitted c = {:.6e}", r.c),
        r.reason.clone(),
    ];
    if let Some(w) = &r.witness {
        text.push(format!("witness X = {:?} (radius {:.3e}, lhs {:.6e}, ratio {:.6e})", w.point, w.radius, w.lhs, w.ratio));
    }
    let report = Report {
        command: "weights",
        system_sha256: sha,
        options: json!({"m": m, "samples": samples, "shells": shells, "radius": radius, "kmax": kmax, "tol": common.tol}),
        status: status(r.success),
        result: json!({"search": r}),
        text,
    };
    emit(report, common, started)
}

const CORRECTION_TOL: f64 = 1e-10;
const POSITIVITY_TOL: f64 = 1e-8;

pub fn wick(path: &str, levels: &[usize], common: &Common) -> Result<u8> {
    let started = Instant::now();
    let (sys, sha) = load(path)?;
    let level = *levels.iter().max().ok_or_else(|| Error::Input("no level given".into()))?;
    let mut ok = true;
    let mut text = Vec::new();
    let mut forms = Vec::new();
    for (q, name) in sys.forms().iter().zip(sys.names()) {
        let c = wick_check(q, level)?;
        let scale = 1.0 + q.scale_norm() * level as f64;
        let pos = c.wick_spectrum.first().copied().unwrap_or(0.0);
        ok &= c.correction_residual <= CORRECTION_TOL * scale && pos >= -POSITIVITY_TOL;
        text.push(format!(
            "form {name}: correction tr(a″)/8π = {:.12} + {:.12}i, residual {:.3e}, min eig of Re part^Wick {:.6e}",
            c.correction[0], c.correction[1], c.correction_residual, pos
        ));
        forms.push(json!({"name": name, "check": c}));
    }
    let report = Report {
        command: "wick",
        system_sha256: sha,
        options: json!({"level": level}),
        status: status(ok),
        result: json!({"forms": forms}),
        text,
    };
    emit(report, common, started)
}

pub fn example(name: ExampleName, n: usize, lambda: &[f64], lambda_tilde: &[f64], output: Option<&str>) -> Result<u8> {
    let file = match name {
        ExampleName::Cross if lambda.is_empty() => {
            SystemFile::from_system(&examples::cross_system::<f64>(n)?, Some(examples::cross_metadata(n, None)))
        }
        ExampleName::Cross => {
            let lt = if lambda_tilde.is_empty() { lambda } else { lambda_tilde };
            let sys = examples::cross_sum::<f64>(n, lambda, lt)?;
            SystemFile::from_system(&sys, Some(examples::cross_metadata(n, Some((lambda, lt)))))
        }
        ExampleName::Model => SystemFile::from_system(&examples::model::<f64>()?, None),
        ExampleName::Elliptic => SystemFile::from_system(&examples::elliptic::<f64>(n)?, None),
        ExampleName::Degenerate => SystemFile::from_system(&examples::degenerate::<f64>(n)?, None),
    };
    let mut text = file.to_json();
    text.push('\n');
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Input(format!("{p}: {e}")))?,
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}
