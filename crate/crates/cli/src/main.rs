use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use defcs::algebra::{telescope_g, StructurePolynomial};
use defcs::conjugate::{conjugate_spec, delta_for_vacuum, undeformed_spec};
use defcs::export;
use defcs::measures::{bg_density, bg_measure_density, gaussian_density, moment_sequence, verify_moments};
use defcs::presets::Preset;
use defcs::rational::{self, Rational};
use defcs::repspace::LoweringModule;
use defcs::states::{
    annihilation_cs, chain_series, displacement_cs, eigen_residual, exponential_cs, CoherentState, CutoffPolicy, Family,
};
use defcs::verify::run_suite;

#[derive(Parser)]
#[command(name = "defcs", version, about = "Coherent states of polynomially deformed su(1,1)/su(2) algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON job file; `-` reads standard input.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Named algebra: su11, su2, pair, trilinear, quadratic, higgs,
    /// multiphoton(m,n), dicke(n_atoms,k).
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, hide = true)]
    inject_fault: Option<String>,
}

#[derive(Subcommand, Clone, Copy, PartialEq)]
enum Command {
    /// Structure polynomial, Casimir function and Casimir values.
    Derive,
    /// Ladder table, canonical conjugate and undeformed map of a module.
    Rep,
    /// Vacua of a boson-realization sector.
    Vacua,
    /// Coherent states over a parameter grid.
    Cs,
    /// Full invariant suite.
    Verify,
    /// Moment sequence and optional quadrature check of a density.
    Moments,
    /// Closure, conservation and Casimir checks of a realization sector.
    RealizationCheck,
}

#[derive(Deserialize, Default, Clone)]
#[serde(deny_unknown_fields, default)]
struct SectorConfig {
    h0: Option<String>,
    q: Option<i64>,
}

#[derive(Deserialize, Default, Clone)]
#[serde(deny_unknown_fields, default)]
struct CutoffConfig {
    tol: Option<f64>,
    max_cutoff: Option<usize>,
    min_levels: Option<usize>,
}

#[derive(Deserialize, Default, Clone)]
#[serde(deny_unknown_fields, default)]
struct JobConfig {
    preset: Option<String>,
    params: BTreeMap<String, String>,
    /// Custom structure polynomial, lowest degree first.
    f: Option<Vec<String>>,
    w0: Option<String>,
    sector: Option<SectorConfig>,
    mode_cutoff: Option<i64>,
    vacuum: Option<usize>,
    family: Option<Family>,
    grid: Option<Vec<[f64; 2]>>,
    dim: Option<usize>,
    cutoff: Option<CutoffConfig>,
    tol: Option<f64>,
    n_max: Option<usize>,
    weights: Option<Vec<String>>,
    density: Option<String>,
    epsilon: Option<String>,
}

/// Bad invocation or configuration: exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn load_config(cli: &Cli) -> Result<JobConfig> {
    let Some(path) = &cli.config else {
        return Ok(JobConfig::default());
    };
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| usage(format!("reading stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| usage(format!("reading {}: {e}", path.display())))?
    };
    if text.trim().is_empty() {
        return Err(usage("empty config"));
    }
    serde_json::from_str(&text).map_err(|e| usage(format!("config: {e}")))
}

enum Algebra {
    Preset(Preset),
    Custom { f: StructurePolynomial, w0: Option<Rational> },
}

struct Job {
    cfg: JobConfig,
    algebra: Option<Algebra>,
    tol: Option<f64>,
}

fn parse_rational(field: &str, s: &str) -> Result<Rational> {
    rational::parse(s).map_err(|e| usage(format!("{field}: {e}")))
}

fn resolve(cli: &Cli) -> Result<Job> {
    let cfg = load_config(cli)?;
    if let Some(t) = cli.tol.or(cfg.tol) {
        if !(t > 0.0) {
            return Err(usage(format!("tolerance must be positive, got {t}")));
        }
    }
    if matches!(&cfg.grid, Some(g) if g.is_empty()) {
        return Err(usage("parameter grid is empty"));
    }
    let name = cli.preset.clone().or_else(|| cfg.preset.clone());
    let algebra = match (name, &cfg.f) {
        (Some(name), _) => {
            let mut params = cfg.params.clone();
            if let Some(sector) = &cfg.sector {
                if let Some(h0) = &sector.h0 {
                    params.insert("h0".into(), h0.clone());
                }
                if let Some(q) = sector.q {
                    params.insert("q".into(), q.to_string());
                }
            }
            if let Some(w0) = &cfg.w0 {
                params.insert("w0".into(), w0.clone());
            }
            let preset = Preset::parse(&name)
                .and_then(|p| p.with_params(&params))
                .map_err(|e| usage(e.to_string()))?;
            Some(Algebra::Preset(preset))
        }
        (None, Some(coeffs)) => {
            let c = coeffs
                .iter()
                .map(|s| parse_rational("f", s))
                .collect::<Result<Vec<_>>>()?;
            let w0 = cfg.w0.as_deref().map(|s| parse_rational("w0", s)).transpose()?;
            Some(Algebra::Custom { f: StructurePolynomial::new(c), w0 })
        }
        (None, None) => None,
    };
    Ok(Job { tol: cli.tol.or(cfg.tol), cfg, algebra })
}

impl Job {
    fn algebra(&self) -> Result<&Algebra> {
        self.algebra.as_ref().ok_or_else(|| usage("no algebra: give --preset or a config with \"preset\" or \"f\""))
    }

    fn preset(&self) -> Result<&Preset> {
        match self.algebra()? {
            Algebra::Preset(p) => Ok(p),
            Algebra::Custom { .. } => Err(usage("this command needs a named preset")),
        }
    }

    fn name(&self) -> String {
        match &self.algebra {
            Some(Algebra::Preset(p)) => p.to_string(),
            _ => "custom".into(),
        }
    }

    fn structure(&self) -> Result<StructurePolynomial> {
        match self.algebra()? {
            Algebra::Preset(p) => Ok(p.structure()?),
            Algebra::Custom { f, .. } => Ok(f.clone()),
        }
    }

    fn module(&self, default_dim: usize) -> Result<LoweringModule> {
        let dim = self.cfg.dim.unwrap_or(default_dim);
        match self.algebra()? {
            Algebra::Preset(p) => match self.cfg.vacuum {
                Some(k) => {
                    let t = realization(self)?;
                    let vac = t
                        .find_vacua()
                        .iter()
                        .filter_map(|v| v.state)
                        .nth(k)
                        .ok_or_else(|| usage(format!("sector has no physical vacuum number {k}")))?;
                    let module = t.sector_to_module(vac, None)?;
                    Ok(if dim < module.dim() { module.with_cutoff(dim)? } else { module })
                }
                None => Ok(p.module(dim)?),
            },
            Algebra::Custom { f, w0 } => {
                let w0 = w0.clone().ok_or_else(|| usage("custom algebra needs \"w0\""))?;
                Ok(LoweringModule::from_casimir(&telescope_g(f)?, w0, dim)?)
            }
        }
    }

    fn b_sign(&self) -> defcs::conjugate::BSign {
        match &self.algebra {
            Some(Algebra::Preset(p)) => p.b_sign(),
            Some(Algebra::Custom { f, .. }) if f.0.leading() > Rational::from_integer(0.into()) => {
                defcs::conjugate::BSign::Minus
            }
            _ => defcs::conjugate::BSign::Plus,
        }
    }

    fn epsilon(&self) -> Result<Option<Rational>> {
        self.cfg.epsilon.as_deref().map(|s| parse_rational("epsilon", s)).transpose()
    }

    fn policy(&self) -> CutoffPolicy {
        let mut p = CutoffPolicy::default();
        if let Some(c) = &self.cfg.cutoff {
            p.tol = c.tol.unwrap_or(p.tol);
            p.max_cutoff = c.max_cutoff.unwrap_or(p.max_cutoff);
            p.min_levels = c.min_levels.unwrap_or(p.min_levels);
        }
        p
    }
}

struct Outcome {
    report: serde_json::Value,
    files: Vec<(String, String)>,
    passed: bool,
}

impl Outcome {
    fn ok(report: serde_json::Value) -> Self {
        Outcome { report, files: Vec::new(), passed: true }
    }
}

fn poly_strings(p: &defcs::Poly) -> Vec<String> {
    p.coeffs().iter().map(rational::format).collect()
}

fn cmd_derive(job: &Job) -> Result<Outcome> {
    let f = job.structure()?;
    let g = telescope_g(&f)?;
    let weights: Vec<Rational> = match &job.cfg.weights {
        Some(ws) => ws.iter().map(|w| parse_rational("weights", w)).collect::<Result<_>>()?,
        None => match job.algebra()? {
            Algebra::Preset(p) => p.module(2).map(|m| vec![m.w0().clone()]).unwrap_or_default(),
            Algebra::Custom { w0, .. } => w0.iter().cloned().collect(),
        },
    };
    let casimir: Vec<_> = weights
        .iter()
        .map(|w| {
            serde_json::json!({
                "weight": rational::format(w),
                "value": rational::format(&defcs::algebra::casimir_value(&g, w)),
            })
        })
        .collect();
    Ok(Outcome::ok(serde_json::json!({
        "algebra": job.name(),
        "f": poly_strings(&f.0),
        "f_display": f.0.to_string(),
        "g": poly_strings(&g.0),
        "g_display": g.0.to_string(),
        "casimir": casimir,
    })))
}

fn cmd_rep(job: &Job) -> Result<Outcome> {
    let module = job.module(50)?;
    let conjugate = match conjugate_spec(&module, &delta_for_vacuum(module.w0())) {
        Ok(spec) => serde_json::to_value(spec)?,
        Err(e) => serde_json::json!({ "error": e.to_string() }),
    };
    let mapped = match undeformed_spec(&module, job.b_sign(), job.epsilon()?) {
        Ok(spec) => serde_json::to_value(spec)?,
        Err(e) => serde_json::json!({ "error": e.to_string() }),
    };
    let report = serde_json::json!({
        "algebra": job.name(),
        "module": module.dump(),
        "conjugate": conjugate,
        "undeformed_map": mapped,
    });
    Ok(Outcome { report, files: vec![("ladder.csv".into(), export::ladder_csv(&module))], passed: true })
}

fn realization(job: &Job) -> Result<defcs::realizations::RealizedTriple> {
    job.preset()?
        .realization(job.cfg.mode_cutoff)?
        .ok_or_else(|| usage(format!("preset {} has no boson realization", job.name())))
}

fn cmd_vacua(job: &Job) -> Result<Outcome> {
    let t = realization(job)?;
    let vacua: Vec<_> = t
        .find_vacua()
        .iter()
        .map(|v| {
            serde_json::json!({
                "n0": rational::format(&v.n0),
                "multiplicity": v.multiplicity,
                "occupation": v.state.map(|i| t.sector.basis[i].clone()),
            })
        })
        .collect();
    Ok(Outcome::ok(serde_json::json!({
        "algebra": job.name(),
        "sector": t.sector.charges,
        "dim": t.dim(),
        "vacua": vacua,
    })))
}

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build()?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

#[derive(Serialize)]
struct PointSummary {
    index: usize,
    parameter: [f64; 2],
    levels: usize,
    norm_sq: f64,
    raw_norm_sq: f64,
    tail_bound: Option<f64>,
    normalizable: bool,
    eigen_residual: Option<f64>,
}

fn cmd_cs(job: &Job, workers: Option<usize>) -> Result<Outcome> {
    let family = job.cfg.family.unwrap_or(Family::Annihilation);
    let dim = job.cfg.dim.unwrap_or(300);
    let module = job.module(if family == Family::Displacement { dim } else { 64 })?;
    let grid = job.cfg.grid.clone().unwrap_or_else(|| vec![[1.0, 0.0]]);
    let mut policy = job.policy();
    if let Some(t) = job.tol {
        policy.tol = t;
    }
    let b = job.b_sign();
    let eps = job.epsilon()?;
    // Sector chains of boson realizations are finite by construction.
    let realized = matches!(job.algebra()?, Algebra::Preset(p) if p.is_realized());
    let one = |z: Complex64| -> defcs::Result<CoherentState> {
        match family {
            Family::Annihilation if module.is_terminated() && realized => chain_series(&module, z),
            Family::Annihilation => annihilation_cs(&module, z, &policy),
            Family::Exponential => exponential_cs(&module, z, &policy),
            Family::Displacement => displacement_cs(&module, b, eps.clone(), z, dim),
        }
    };
    let states: Vec<defcs::Result<CoherentState>> = with_workers(workers, || {
        grid.par_iter().map(|p| one(Complex64::new(p[0], p[1]))).collect()
    })?;
    let mut files = Vec::new();
    let mut points = Vec::new();
    for (index, st) in states.into_iter().enumerate() {
        let st = st.with_context(|| format!("grid point {index}"))?;
        let residual = match family {
            Family::Annihilation => Some(eigen_residual(&module, &st)?),
            _ => None,
        };
        files.push((format!("cs_{index:03}.csv"), export::coefficients_csv(&st)));
        points.push(PointSummary {
            index,
            parameter: [st.parameter.re, st.parameter.im],
            levels: st.len(),
            norm_sq: st.norm_sq,
            raw_norm_sq: st.raw_norm_sq,
            tail_bound: st.tail_bound.is_finite().then_some(st.tail_bound),
            normalizable: st.normalizable,
            eigen_residual: residual,
        });
    }
    let report = serde_json::json!({
        "algebra": job.name(),
        "family": family,
        "points": points,
    });
    files.push(("summary.json".into(), serde_json::to_string_pretty(&report)? + "\n"));
    Ok(Outcome { report, files, passed: true })
}

fn cmd_verify(job: &Job, fault: Option<&str>) -> Result<Outcome> {
    if let Some(Algebra::Preset(p)) = &job.algebra {
        // The suite covers every shipped preset; a named one must at least build.
        p.structure()?;
    }
    let report = run_suite(fault).map_err(|e| usage(e.to_string()))?;
    let passed = report.iter().all(|c| c.passed);
    let failing: Vec<&str> = report.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    Ok(Outcome {
        report: serde_json::json!({ "passed": passed, "failing": failing, "checks": report }),
        files: Vec::new(),
        passed,
    })
}

fn cmd_moments(job: &Job) -> Result<Outcome> {
    let n_max = job.cfg.n_max.unwrap_or(8);
    let module = job.module(n_max + 2)?;
    let seq = moment_sequence(&module, n_max)?;
    let phi = match job.algebra()? {
        Algebra::Preset(Preset::Su11 { .. } | Preset::Pair { .. }) => Some(-rational::to_f64(module.w0())),
        _ => None,
    };
    let density = job.cfg.density.clone();
    let tol = job.tol.unwrap_or(1e-6);
    let (check, note) = match (density.as_deref(), phi) {
        (Some("gaussian"), _) => (Some(verify_moments(gaussian_density, &seq, n_max, 1e-12)?), None),
        (Some("printed"), Some(phi)) => (Some(verify_moments(|r| bg_density(r, phi), &seq, n_max, 1e-12)?), None),
        (None | Some("measure"), Some(phi)) => {
            (Some(verify_moments(|r| bg_measure_density(r, phi), &seq, n_max, 1e-12)?), None)
        }
        (None, None) => (None, Some("no closed-form density for this module; exact moments only")),
        (Some(d), _) => return Err(usage(format!("density {d:?} is not available for {}", job.name()))),
    };
    let passed = check.as_ref().map_or(true, |c| c.max_rel_err <= tol);
    let report = serde_json::json!({
        "algebra": job.name(),
        "n_max": n_max,
        "density": check.as_ref().map(|_| density.clone().unwrap_or_else(|| "measure".into())),
        "max_rel_err": check.as_ref().map(|c| c.max_rel_err),
        "tolerance": tol,
        "passed": passed,
        "note": note,
        "moments": seq.exact.iter().map(rational::format).collect::<Vec<_>>(),
    });
    let files = vec![("moments.csv".into(), export::moments_csv(&seq, check.as_ref()))];
    Ok(Outcome { report, files, passed })
}

fn cmd_realization_check(job: &Job) -> Result<Outcome> {
    let preset = job.preset()?;
    let t = realization(job)?;
    let expected = preset.structure()?;
    let conservation = t.conservation();
    let (fit, fit_ok) = match t.closure_fit() {
        Ok(f) => {
            let ok = f == expected;
            (serde_json::json!(poly_strings(&f.0)), ok)
        }
        Err(e) => (serde_json::json!({ "error": e.to_string() }), false),
    };
    let g = telescope_g(&expected)?;
    let casimir = t.casimir_diagonal(&g);
    let casimir_ok = t
        .components()
        .iter()
        .all(|chain| chain.iter().all(|&i| casimir[i] == casimir[chain[0]]));
    let vacua: usize = t.find_vacua().iter().map(|v| v.multiplicity).sum();
    let passed = conservation.ok() && fit_ok && casimir_ok;
    let report = serde_json::json!({
        "algebra": job.name(),
        "recipe": t.recipe,
        "sector": t.sector.charges,
        "dim": t.dim(),
        "conservation": conservation,
        "closure_fit": fit,
        "closure_matches_preset": fit_ok,
        "casimir_constant_on_chains": casimir_ok,
        "vacua_with_multiplicity": vacua,
        "passed": passed,
    });
    Ok(Outcome { report, files: vec![("nplus.csv".into(), t.nplus_csv())], passed })
}

fn write_outputs(dir: &Path, command: &str, outcome: &Outcome) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, body) in &outcome.files {
        fs::write(dir.join(name), body)?;
    }
    let name = format!("{command}.json");
    if !outcome.files.iter().any(|(n, _)| *n == name || n == "summary.json") {
        fs::write(dir.join(name), serde_json::to_string_pretty(&outcome.report)? + "\n")?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    let job = resolve(cli)?;
    let (name, outcome) = match cli.command {
        Command::Derive => ("derive", cmd_derive(&job)?),
        Command::Rep => ("rep", cmd_rep(&job)?),
        Command::Vacua => ("vacua", cmd_vacua(&job)?),
        Command::Cs => ("cs", cmd_cs(&job, cli.workers)?),
        Command::Verify => ("verify", cmd_verify(&job, cli.inject_fault.as_deref())?),
        Command::Moments => ("moments", cmd_moments(&job)?),
        Command::RealizationCheck => ("realization-check", cmd_realization_check(&job)?),
    };
    if let Some(dir) = &cli.out {
        write_outputs(dir, name, &outcome)?;
    }
    // A closed pipe downstream is not an error of the computation.
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&outcome.report)?);
    if !outcome.passed {
        eprintln!("{name}: verification failed");
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
