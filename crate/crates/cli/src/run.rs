use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use extremal_rays::comb_counterexample::render_svg;
use extremal_rays::currents::{
    reconstruct_l1, sample_mu_flat, sample_mu_nu, sample_nu_flat, thurston_estimate,
};
use extremal_rays::modulus::{
    disk_box_with_modulus, grid_modulus, mod_liouville_gap, ModulusResult,
};
use extremal_rays::teich_ray::{certify_counterexample, run_convergence, SqueezeExperiment};
use extremal_rays::trajectories::{trace_horizontal, trace_vertical_with, TraceOptions};
use extremal_rays::{Exact, Lamination64, Qd64};

use crate::config::{Builtin, Kind, Params, UsageError};
use crate::plot;

#[derive(Debug)]
pub enum CliError {
    Usage(UsageError),
    Math(extremal_rays::Error),
    Io(std::io::Error),
    /// A certification experiment ran and failed.
    Failed(String),
}

impl From<UsageError> for CliError {
    fn from(e: UsageError) -> Self {
        Self::Usage(e)
    }
}

impl From<extremal_rays::Error> for CliError {
    fn from(e: extremal_rays::Error) -> Self {
        Self::Math(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(e) => write!(f, "usage: {e}"),
            Self::Math(e) => write!(f, "{e}"),
            Self::Io(e) => write!(f, "i/o: {e}"),
            Self::Failed(m) => write!(f, "certification failed: {m}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Deterministic summary printed to stdout and the written files.
pub struct Outcome {
    pub summary: String,
    pub files: Vec<String>,
}

fn write(dir: &Path, name: &str, body: &str, files: &mut Vec<String>) -> CliResult<()> {
    fs::write(dir.join(name), body)?;
    files.push(name.to_string());
    Ok(())
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value");
    s.push('\n');
    s
}

pub fn run(p: &Params, dir: &Path) -> CliResult<Outcome> {
    match p.kind()? {
        Kind::Modulus => modulus(p, dir),
        Kind::Trace => trace(p, dir),
        Kind::Lamination => lamination(p, dir),
        Kind::Ray => ray(p, dir),
        Kind::CombCertify => comb_certify(p, dir),
        Kind::LiouvilleGap => liouville_gap(p, dir),
    }
}

fn default_sets(p: &Params) -> (&str, &str) {
    match p.builtin {
        Some(Builtin::Comb) => ("F", "E"),
        _ => ("left", "right"),
    }
}

fn modulus(p: &Params, dir: &Path) -> CliResult<Outcome> {
    let dom = p.domain_required()?;
    let (de, df) = default_sets(p);
    let e = p.set(&dom, p.e.as_deref().unwrap_or(de))?;
    let f = p.set(&dom, p.f.as_deref().unwrap_or(df))?;
    let h = p.h("1/64")?;
    let r: ModulusResult = grid_modulus(&dom, &e, &f, &h)?;
    let mut files = Vec::new();
    let mut body = r.to_json();
    body.push('\n');
    write(dir, "modulus.json", &body, &mut files)?;
    if p.svg {
        write(
            dir,
            "domain.svg",
            &render_svg(&dom, &[(&e, "red"), (&f, "blue")]),
            &mut files,
        )?;
    }
    Ok(Outcome {
        summary: format!(
            "modulus {:.10} (extrapolated {:.10} ± {:.3e})",
            r.value, r.extrapolated, r.error_bar
        ),
        files,
    })
}

fn qd(p: &Params) -> CliResult<Qd64> {
    Ok(Qd64::new(p.qd()?)?)
}

fn trace_opts(p: &Params) -> TraceOptions {
    TraceOptions {
        budget: p
            .budget
            .unwrap_or(extremal_rays::trajectories::DEFAULT_BUDGET),
        ..TraceOptions::default()
    }
}

fn trace(p: &Params, dir: &Path) -> CliResult<Outcome> {
    let q = qd(p)?;
    let z0 = p.z0()?;
    let t = trace_vertical_with(&q, z0, &trace_opts(p))?;
    let mut files = Vec::new();
    write(dir, "trajectory.csv", &t.to_csv(), &mut files)?;
    write(dir, "trajectory.json", &pretty(&t.sidecar()), &mut files)?;
    if p.svg {
        write(
            dir,
            "trajectory.svg",
            &plot::disk_paths(&[&t.points]),
            &mut files,
        )?;
    }
    Ok(Outcome {
        summary: format!(
            "trajectory with {} points, φ-length {:.10}, ends {} / {}",
            t.points.len(),
            t.phi_length,
            t.end_a.describe(),
            t.end_b.describe()
        ),
        files,
    })
}

fn lamination_json(l: &Lamination64) -> Value {
    let atoms: Vec<Value> = l
        .atoms()
        .iter()
        .map(|a| {
            let len = if a.length.is_finite() {
                json!(a.length)
            } else {
                Value::Null
            };
            json!([a.ends.0, a.ends.1, a.weight, len])
        })
        .collect();
    json!({
        "kind": format!("{:?}", l.kind),
        "source": l.source,
        "skipped": l.skipped,
        "total_mass": l.total_mass(),
        "atoms": atoms,
    })
}

fn lamination(p: &Params, dir: &Path) -> CliResult<Outcome> {
    let n = p.samples.unwrap_or(256);
    let seed = p.seed.unwrap_or(0);
    let (mu, nu, expected_l1): (Lamination64, Lamination64, f64) = match p.flat_domain()? {
        Some(dom) => (
            sample_mu_flat(&dom, None, n)?,
            sample_nu_flat(&dom, None, n)?,
            extremal_rays::Coord::to_f64(&dom.area()),
        ),
        None => {
            let q = qd(p)?;
            let opts = trace_opts(p);
            // The horizontal leaf through z0 is the transversal.
            let h = trace_horizontal(&q, p.z0()?, &opts)?;
            let (mu, nu) = sample_mu_nu(&q, &[h.points.clone()], n, &opts)?;
            (mu, nu, q.l1_norm())
        }
    };
    let l1 = reconstruct_l1(&mu, &nu)?;
    let th = thurston_estimate(&mu, p.samples.unwrap_or(256), seed)?;
    let report = json!({
        "samples": n,
        "seed": seed,
        "mu": lamination_json(&mu),
        "nu": lamination_json(&nu),
        "l1_reconstructed": l1,
        "l1_reference": expected_l1,
        "thurston_lower_bound": th.norm,
    });
    let mut files = Vec::new();
    write(dir, "lamination.json", &pretty(&report), &mut files)?;
    if p.svg {
        write(dir, "lamination.svg", &plot::geodesics(&mu), &mut files)?;
    }
    Ok(Outcome {
        summary: format!(
            "{} leaves, mass {:.10}, L1 {:.10} (reference {:.10}), Thurston ≥ {:.6}",
            mu.atoms().len(),
            mu.total_mass(),
            l1,
            expected_l1,
            th.norm
        ),
        files,
    })
}

fn ray(p: &Params, dir: &Path) -> CliResult<Outcome> {
    let dom = p.domain_required()?;
    let (de, df) = match p.builtin {
        Some(Builtin::Comb) => ("F", "E"),
        _ => ("bottom", "top"),
    };
    let e = p.set(&dom, p.e.as_deref().unwrap_or(de))?;
    let f = p.set(&dom, p.f.as_deref().unwrap_or(df))?;
    let h = p.h("1/64")?;
    let mut exp = SqueezeExperiment::new(dom, e, f, p.eps()?, h)?;
    let rep = run_convergence(&mut exp)?;
    let mut files = Vec::new();
    write(dir, "convergence.csv", &rep.to_csv(), &mut files)?;
    let flags = json!({
        "target": extremal_rays::Coord::to_f64(&exp.target),
        "monotone": rep.monotone,
        "final_gap": rep.final_gap,
        "lower_bound_ok": rep.lower_bound_ok,
    });
    write(dir, "convergence.json", &pretty(&flags), &mut files)?;
    if p.svg {
        write(dir, "convergence.svg", &plot::convergence(&rep), &mut files)?;
    }
    Ok(Outcome {
        summary: format!(
            "target {:.10}, final gap {:.3e}, monotone {}, lower bound {}",
            extremal_rays::Coord::to_f64(&exp.target),
            rep.final_gap,
            rep.monotone,
            rep.lower_bound_ok
        ),
        files,
    })
}

fn comb_certify(p: &Params, dir: &Path) -> CliResult<Outcome> {
    let k_max = p.kmax();
    let h: Exact = p.h("1/1024")?;
    let cert = certify_counterexample(k_max, &h)?;
    let mut files = Vec::new();
    let mut body = cert.to_json();
    body.push('\n');
    write(dir, "certificate.json", &body, &mut files)?;
    if p.svg {
        let dom = extremal_rays::comb_counterexample::build_comb::<Exact>(k_max)?;
        write(dir, "comb.svg", &render_svg(&dom, &[]), &mut files)?;
    }
    let failed: Vec<String> = cert
        .records
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.k.to_string())
        .collect();
    if !failed.is_empty() {
        return Err(CliError::Failed(format!(
            "levels {} fail",
            failed.join(", ")
        )));
    }
    Ok(Outcome {
        summary: format!("all conditions hold for k = 1..={k_max} at h = {}", cert.h),
        files,
    })
}

fn liouville_gap(p: &Params, dir: &Path) -> CliResult<Outcome> {
    let mut csv = String::from("modulus,liouville,gap\n");
    let mut last = f64::NAN;
    for m in p.moduli()? {
        let b = disk_box_with_modulus(m)?;
        let g = mod_liouville_gap(&b)?;
        csv.push_str(&format!("{m},{},{g}\n", b.liouville()));
        last = g;
    }
    let mut files = Vec::new();
    write(dir, "liouville_gap.csv", &csv, &mut files)?;
    Ok(Outcome {
        summary: format!("gap at the largest modulus {last:.3e}"),
        files,
    })
}
