use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::JobConfig;
use padic_mra::error::{MraError, Result};
use padic_mra::function::{fourier, lincomb, TestFunction};
use padic_mra::io::{to_json, FunctionJson, MaskJson, WaveletSetJson};
use padic_mra::masks::{
    haar_mask, mask_from_roots as build_mask, refinable_from_mask, support_witness,
};
use padic_mra::mra::{
    check_mra, check_orthonormal_shifts, recover_mask, MraConfig, Orthonormality,
};
use padic_mra::padic::{pow, PadicRational};
use padic_mra::wavelets::{
    analyze, construct_wavelet_set, frame_bounds, kozyrev_set, synthesize, verify_wavelet_set,
    WaveletSet,
};

/// Round-trip error accepted by `transform`.
pub const ROUND_TRIP_TOL: f64 = 1e-8;

pub struct Outcome {
    pub pass: bool,
    pub result: Value,
    pub human: String,
    /// Documents for `--out`: an unnamed one is written to the path itself,
    /// named ones into the directory.
    pub documents: Vec<(Option<&'static str>, String)>,
}

fn value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| MraError::Schema(e.to_string()))
}

fn read_doc<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| {
        MraError::InvalidArgument(format!("cannot read {}: {e}", path.display()))
    })?;
    serde_json::from_str(&text)
        .map_err(|e| MraError::Schema(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)
        .map_err(|e| MraError::InvalidArgument(format!("cannot write {}: {e}", path.display())))
}

fn mra_config(cfg: &JobConfig) -> MraConfig {
    MraConfig {
        tol: cfg.tol,
        sphere_range: cfg.sphere_range,
    }
}

fn read_function(cfg: &JobConfig, path: &Path) -> Result<TestFunction> {
    let f = read_doc::<FunctionJson>(path)?.to_function()?;
    cfg.check_p(f.prime())?;
    Ok(f)
}

fn read_wavelets(cfg: &JobConfig, path: &Path) -> Result<WaveletSet> {
    let doc: WaveletSetJson = read_doc(path)?;
    cfg.check_p(doc.p)?;
    doc.to_set(cfg.tol)
}

fn fmt_c(z: Complex64) -> String {
    if z.im.abs() < 1e-15 {
        format!("{:.6}", z.re)
    } else {
        format!("{:.6}{:+.6}i", z.re, z.im)
    }
}

pub fn emit(cfg: &JobConfig, outcome: &Outcome, json: bool, out: Option<&Path>) -> Result<()> {
    if let Some(out) = out {
        let named = outcome.documents.iter().any(|(n, _)| n.is_some());
        if named {
            fs::create_dir_all(out).map_err(|e| {
                MraError::InvalidArgument(format!("cannot create {}: {e}", out.display()))
            })?;
        }
        for (name, text) in &outcome.documents {
            match name {
                Some(name) => write_file(&out.join(name), text)?,
                None => write_file(out, text)?,
            }
        }
    }
    if json {
        let doc = json!({ "config": cfg, "pass": outcome.pass, "result": outcome.result });
        println!("{}", to_json(&doc)?);
    } else {
        print!("{}", outcome.human);
        println!("verdict: {}", if outcome.pass { "pass" } else { "fail" });
    }
    Ok(())
}

pub fn haar(cfg: &JobConfig) -> Result<Outcome> {
    let p = cfg.p()?;
    let mask = haar_mask(p)?;
    let phi = refinable_from_mask(&mask, 0, cfg.tol)?;
    let report = check_mra(&phi, &mra_config(cfg))?;
    let constructed = construct_wavelet_set(&phi, &mask, cfg.tol)?;
    let constructed_frame = frame_bounds(&constructed.normalized()?, cfg.tol)?;
    let ws = kozyrev_set(p)?;
    let frame = frame_bounds(&ws, cfg.tol)?;
    let orthonormal = report.orthonormal.verdict == Orthonormality::Orthonormal;
    let unit_bounds = (frame.a - 1.0).abs() + (frame.b - 1.0).abs() < cfg.tol;
    let pass = report.criterion_ok && orthonormal && unit_bounds;

    let mut human = String::new();
    let _ = writeln!(human, "Haar MRA, p = {p}");
    let _ = writeln!(human, "criterion_ok: {}", report.criterion_ok);
    let _ = writeln!(human, "orthonormal: {orthonormal}");
    let _ = writeln!(human, "wavelets: {}", ws.count());
    let _ = writeln!(human, "frame bounds (unit-norm wavelets): A = {:.12}, B = {:.12}", frame.a, frame.b);
    let _ = writeln!(
        human,
        "frame bounds (constructed masks, normalized): A = {:.12}, B = {:.12}",
        constructed_frame.a, constructed_frame.b
    );
    Ok(Outcome {
        pass,
        result: json!({
            "report": value(&report)?,
            "frame": value(&frame)?,
            "constructed_frame": value(&constructed_frame)?,
            "wavelets": value(&WaveletSetJson::from_set(&ws))?,
        }),
        human,
        documents: vec![
            (Some("mask.json"), to_json(&MaskJson::from(&mask))?),
            (Some("phi.json"), to_json(&FunctionJson::from(&phi))?),
            (Some("report.json"), to_json(&json!({ "config": cfg, "report": report }))?),
            (Some("wavelets.json"), to_json(&WaveletSetJson::from_set(&ws))?),
            (Some("frame.json"), to_json(&json!({ "config": cfg, "frame": frame }))?),
        ],
    })
}

fn parse_list(items: &[String], p: u32) -> Result<Vec<PadicRational>> {
    items
        .iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| PadicRational::parse(s, p))
        .collect()
}

pub fn mask_from_roots(cfg: &JobConfig, roots: &[String]) -> Result<Outcome> {
    let p = cfg.p()?;
    let n = cfg.n()?;
    let zeros = parse_list(roots, p)?;
    let mask = build_mask(p, n, &zeros)?;
    let doc = MaskJson::from(&mask);
    let mut human = String::new();
    let _ = writeln!(human, "mask p = {p}, N = {n}, {} zeros", zeros.len());
    for (k, h) in mask.taps().iter().enumerate() {
        let _ = writeln!(human, "h[{k}] = {}", fmt_c(*h));
    }
    Ok(Outcome {
        pass: true,
        result: value(&doc)?,
        human,
        documents: vec![(None, to_json(&doc)?)],
    })
}

pub fn mask_eval(cfg: &JobConfig, path: &Path, xi: &[String]) -> Result<Outcome> {
    let mask = read_doc::<MaskJson>(path)?.to_mask()?;
    cfg.check_p(mask.prime())?;
    let points = parse_list(xi, mask.prime())?;
    let mut rows = Vec::new();
    let mut human = String::new();
    for x in &points {
        let v = mask.poly().eval(x)?;
        let _ = writeln!(human, "m({x}) = {}", fmt_c(v));
        rows.push(json!({ "xi": x.to_string(), "value": [v.re, v.im] }));
    }
    Ok(Outcome {
        pass: true,
        result: Value::Array(rows),
        human,
        documents: vec![],
    })
}

pub fn mask_info(cfg: &JobConfig, path: &Path) -> Result<Outcome> {
    let mask = read_doc::<MaskJson>(path)?.to_mask()?;
    cfg.check_p(mask.prime())?;
    let at0 = mask.at_zero();
    let normalized = (at0 - 1.0).norm() <= cfg.tol;
    let degree = mask.poly().degree(cfg.tol);
    let witness = match cfg.m {
        Some(m) => Some(support_witness(&mask, m, cfg.tol)?),
        None => None,
    };
    let mut human = String::new();
    let _ = writeln!(human, "p = {}, N = {}", mask.prime(), mask.scale());
    let _ = writeln!(human, "degree: {}", degree.map_or("-".into(), |d| d.to_string()));
    let _ = writeln!(human, "m(0) = {}", fmt_c(at0));
    let mut support = Value::Null;
    if let (Some(m), Some(w)) = (cfg.m, witness) {
        match w {
            None => {
                let _ = writeln!(human, "Fourier support of the refinable function within B_{m}");
            }
            Some((u, v)) => {
                let _ = writeln!(
                    human,
                    "Fourier support leaves B_{m}: |φ̂({u}/{}^{})| = {v:e}",
                    mask.prime(),
                    m + 1
                );
            }
        }
        support = json!({
            "M": m,
            "within": w.is_none(),
            "witness": w.map(|(u, v)| json!({ "u": u, "s": m + 1, "magnitude": v })),
        });
    }
    let pass = normalized && witness.is_none_or(|w| w.is_none());
    Ok(Outcome {
        pass,
        result: json!({
            "p": mask.prime(),
            "N": mask.scale(),
            "degree": degree,
            "at_zero": [at0.re, at0.im],
            "support": support,
        }),
        human,
        documents: vec![],
    })
}

pub fn refine(cfg: &JobConfig, path: &Path, csv: Option<&Path>) -> Result<Outcome> {
    let mask = read_doc::<MaskJson>(path)?.to_mask()?;
    let p = mask.prime();
    cfg.check_p(p)?;
    let m = cfg.m()?;
    cfg.check_frame(p, mask.scale(), m)?;
    let phi = refinable_from_mask(&mask, m, cfg.tol)?;
    if let Some(csv) = csv {
        let spec = fourier(&phi);
        let mut text = String::from("l,xi,abs\n");
        for (l, v) in spec.values().iter().enumerate() {
            let _ = writeln!(text, "{l},{l}/{p}^{m},{:.17e}", v.norm());
        }
        write_file(csv, &text)?;
    }
    let doc = FunctionJson::from(&phi);
    let (n, m) = phi.frame();
    let human = format!(
        "refinable function in D_{n}^{m} ({} grid values), max |φ| = {:.6}\n",
        phi.len(),
        phi.max_abs()
    );
    Ok(Outcome {
        pass: true,
        result: value(&doc)?,
        human,
        documents: vec![(None, to_json(&doc)?)],
    })
}

pub fn check(cfg: &JobConfig, path: &Path) -> Result<Outcome> {
    let phi = read_function(cfg, path)?;
    let report = check_mra(&phi, &mra_config(cfg))?;
    let mut human = String::new();
    let _ = writeln!(human, "p = {}, N = {}, M = {}", report.p, report.n, report.m);
    let _ = writeln!(human, "refinable: {}", report.refinable);
    let _ = writeln!(human, "refinement residual: {:e}", report.refinement_residual);
    let _ = writeln!(
        human,
        "#L_φ = {} (bound p^N = {})",
        report.lset.len(),
        pow(report.p, report.n)
    );
    let _ = writeln!(human, "axiom (a) shifts in V_1: {}", report.axiom_a_ok);
    if let Some(w) = report.axiom_a_witnesses.iter().find(|w| !w.ok) {
        let _ = writeln!(human, "  witness: shift {} residual {:e}", w.shift, w.residual);
    }
    let _ = writeln!(human, "shift expansions: {}", report.shifts_ok);
    if let Some(w) = report.shift_witnesses.iter().find(|w| !w.ok) {
        let _ = writeln!(human, "  witness: shift {} residual {:e}", w.shift, w.residual);
    }
    let _ = writeln!(human, "orthonormal shifts: {:?}", report.orthonormal.verdict);
    let _ = writeln!(human, "criterion_ok: {}", report.criterion_ok);
    let pass = report.criterion_ok;
    let doc = to_json(&json!({ "config": cfg, "report": report }))?;
    Ok(Outcome {
        pass,
        result: value(&report)?,
        human,
        documents: vec![(None, doc)],
    })
}

pub fn ortho(cfg: &JobConfig, path: &Path) -> Result<Outcome> {
    let phi = read_function(cfg, path)?;
    let report = check_orthonormal_shifts(&phi, cfg.tol)?;
    let mut human = String::new();
    let _ = writeln!(human, "periodization test: {}", report.periodization_ok);
    let _ = writeln!(human, "supp φ̂ in B_0: {}", report.unit_ball_support);
    if let Some(u) = report.unit_modulus {
        let _ = writeln!(human, "|φ̂| = 1 on B_0: {u}");
    }
    let _ = writeln!(human, "Gram residual: {:e}", report.gram_residual);
    let _ = writeln!(human, "orthonormality: {:?}", report.verdict);
    Ok(Outcome {
        pass: report.verdict == Orthonormality::Orthonormal,
        result: value(&report)?,
        human,
        documents: vec![],
    })
}

pub fn wavelets(
    cfg: &JobConfig,
    phi_path: &Path,
    mask_path: Option<&Path>,
    normalize: bool,
) -> Result<Outcome> {
    let phi = read_function(cfg, phi_path)?;
    let mask = match mask_path {
        Some(path) => read_doc::<MaskJson>(path)?.to_mask()?,
        None => recover_mask(&phi, cfg.tol)?.mask,
    };
    let mut ws = construct_wavelet_set(&phi, &mask, cfg.tol)?;
    if normalize {
        ws = ws.normalized()?;
    }
    let check = verify_wavelet_set(&ws, cfg.tol)?;
    let doc = WaveletSetJson::from_set(&ws);
    let mut human = String::new();
    let _ = writeln!(human, "{} wavelets, scale N = {}", ws.count(), ws.scale());
    for (nu, m) in ws.masks.iter().enumerate() {
        let taps: Vec<String> = m.taps().iter().map(|g| fmt_c(*g)).collect();
        let _ = writeln!(human, "g^({}) = [{}]", nu + 1, taps.join(", "));
    }
    let _ = writeln!(human, "V_0 orthogonality residual: {:e}", check.v0_residual);
    let _ = writeln!(human, "inclusion residual: {:e}", check.inclusion_residual);
    if let Some(d) = check.system_determinant {
        let _ = writeln!(human, "system determinant: {}", fmt_c(d));
    }
    Ok(Outcome {
        pass: check.ok,
        result: json!({ "wavelets": value(&doc)?, "verification": value(&check)? }),
        human,
        documents: vec![(None, to_json(&doc)?)],
    })
}

pub fn frame(cfg: &JobConfig, path: &Path) -> Result<Outcome> {
    let ws = read_wavelets(cfg, path)?;
    let report = frame_bounds(&ws, cfg.tol)?;
    let pass = report.a > 0.0
        && report.a <= report.b
        && report.inclusion_residual <= cfg.tol
        && report.v0_residual <= cfg.tol;
    let mut human = String::new();
    let _ = writeln!(human, "generators: {}", report.generators);
    let _ = writeln!(human, "A = {:.12}", report.a);
    let _ = writeln!(human, "B = {:.12}", report.b);
    let _ = writeln!(human, "inclusion residual: {:e}", report.inclusion_residual);
    if let Some([re, im]) = report.resultant {
        let _ = writeln!(human, "resultant: {}", fmt_c(Complex64::new(re, im)));
    }
    let doc = to_json(&json!({ "config": cfg, "frame": report }))?;
    Ok(Outcome {
        pass,
        result: value(&report)?,
        human,
        documents: vec![(None, doc)],
    })
}

/// Random element of `V_j1` on the ball `B_(N - j0)(0)`.
fn random_in_v(ws: &WaveletSet, j0: i32, j1: i32, seed: u64) -> Result<TestFunction> {
    let p = ws.prime();
    let radius = ws.scale() as i32 - j0;
    if radius + j1 < 0 {
        return Err(MraError::InvalidArgument(format!("level {j1} below the region")));
    }
    let base = ws.phi.dilate_normalized(-j1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = pow(p, (radius + j1) as u32);
    let mut terms = Vec::with_capacity(count as usize);
    let mut coeffs = Vec::with_capacity(count as usize);
    for k in 0..count {
        terms.push(base.shift(&PadicRational::new(p, k as i64, radius as u32))?);
        coeffs.push(Complex64::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ));
    }
    lincomb(&coeffs, &terms)
}

pub fn transform(
    cfg: &JobConfig,
    ws_path: Option<&Path>,
    f_path: Option<&Path>,
    j0: i32,
    j1: i32,
) -> Result<Outcome> {
    let ws = match ws_path {
        Some(path) => read_wavelets(cfg, path)?,
        None => {
            let p = cfg.p()?;
            let mask = haar_mask(p)?;
            let phi = refinable_from_mask(&mask, 0, cfg.tol)?;
            construct_wavelet_set(&phi, &mask, cfg.tol)?
        }
    };
    let f = match f_path {
        Some(path) => read_function(cfg, path)?,
        None => random_in_v(&ws, j0, j1, cfg.seed)?,
    };
    let tree = analyze(&f, &ws, j0, j1)?;
    let back = synthesize(&tree, &ws)?;
    let error = back.max_abs_diff(&f)?;
    let pass = error < ROUND_TRIP_TOL;
    let mut human = String::new();
    let _ = writeln!(
        human,
        "levels {j0}..{j1} on B_{}(0): {} scaling coefficients, detail energy {:.6e}",
        tree.radius,
        tree.scaling.len(),
        tree.detail_energy()
    );
    let _ = writeln!(human, "reconstruction error: {error:e}");
    let result = json!({
        "coefficients": value(&tree)?,
        "reconstruction": value(&FunctionJson::from(&back))?,
        "reconstruction_error": error,
    });
    Ok(Outcome {
        pass,
        documents: vec![(None, to_json(&result)?)],
        result,
        human,
    })
}
