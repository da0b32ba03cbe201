//! Named invariant suite over the shipped presets. A fault can be injected
//! into the inputs of one invariant to exercise the failure path.

use num::Zero;
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{telescope_g, StructurePolynomial};
use crate::conjugate::{conjugate_raising, delta_for_vacuum, undeformed_map, BSign};
use crate::error::{Error, Result};
use crate::measures::{bg_measure_density, gaussian_density, moment_sequence, verify_moments};
use crate::poly::Poly;
use crate::presets::Preset;
use crate::rational::{int, rat, Rational};
use crate::repspace::{commutator_residual, LoweringModule};
use crate::states::{
    annihilation_cs, displacement_cs, eigen_residual, exponential_cs, exponential_normalizable, fidelity,
    ladder_series, CutoffPolicy,
};

pub const INVARIANTS: &[&str] = &[
    "telescoping",
    "module-commutator",
    "canonical-conjugate",
    "undeformed-map",
    "annihilation-eigenstate",
    "sector-closure",
    "sector-casimir",
    "sector-module",
    "trilinear-vacua",
    "moment-recursion",
    "measure-moments",
    "tanh-law",
    "normalizability",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check { name: name.to_string(), passed, detail }
}

fn from_result(name: &str, r: Result<(bool, String)>) -> Check {
    match r {
        Ok((passed, detail)) => check(name, passed, detail),
        Err(e) => check(name, false, format!("error: {e}")),
    }
}

fn bg(phi: Rational, dim: usize) -> Result<LoweringModule> {
    LoweringModule::from_casimir(&telescope_g(&StructurePolynomial::su11())?, -phi, dim)
}

fn higgs_infinite(dim: usize) -> Result<LoweringModule> {
    let f = StructurePolynomial::higgs(int(-1), int(-1));
    LoweringModule::from_casimir(&telescope_g(&f)?, int(1), dim)
}

/// Runs every invariant; `fault` names one whose inputs get corrupted.
pub fn run_suite(fault: Option<&str>) -> Result<Vec<Check>> {
    if let Some(name) = fault {
        if !INVARIANTS.contains(&name) {
            return Err(Error::InvalidParameter(format!("unknown invariant {name:?}")));
        }
    }
    let hit = |name: &str| fault == Some(name);
    Ok(vec![
        from_result("telescoping", telescoping(hit("telescoping"))),
        from_result("module-commutator", module_commutator(hit("module-commutator"))),
        from_result("canonical-conjugate", canonical_conjugate(hit("canonical-conjugate"))),
        from_result("undeformed-map", mapped(hit("undeformed-map"))),
        from_result("annihilation-eigenstate", eigenstate(hit("annihilation-eigenstate"))),
        from_result("sector-closure", sector_closure(hit("sector-closure"))),
        from_result("sector-casimir", sector_casimir(hit("sector-casimir"))),
        from_result("sector-module", sector_module(hit("sector-module"))),
        from_result("trilinear-vacua", trilinear_vacua(hit("trilinear-vacua"))),
        from_result("moment-recursion", moment_recursion(hit("moment-recursion"))),
        from_result("measure-moments", measure_moments(hit("measure-moments"))),
        from_result("tanh-law", tanh_law(hit("tanh-law"))),
        from_result("normalizability", normalizability(hit("normalizability"))),
    ])
}

fn telescoping(fault: bool) -> Result<(bool, String)> {
    let mut worst = 0usize;
    for p in Preset::shipped() {
        let f = p.structure()?;
        let mut g = telescope_g(&f)?;
        if fault {
            g = crate::algebra::CasimirPolynomial(&g.0 + &Poly::monomial(rat(1, 1000), 2));
        }
        for k in -10..=10 {
            let x = rat(k, 3);
            if g.eval(&x) - g.eval(&(&x - int(1))) != f.eval(&x) {
                worst += 1;
            }
        }
    }
    Ok((worst == 0, format!("{worst} failing points")))
}

fn module_commutator(fault: bool) -> Result<(bool, String)> {
    let modules = [
        (StructurePolynomial::su11(), bg(int(-1), 200)?),
        (Preset::parse("quadratic")?.structure()?, Preset::parse("quadratic")?.module(200)?),
        (StructurePolynomial::higgs(int(-1), int(-1)), higgs_infinite(200)?),
    ];
    let mut worst: f64 = 0.0;
    for (f, m) in &modules {
        let mut t = m.ladder_matrices();
        if fault {
            t.nplus[(5, 4)] *= 1.0 + 1e-6;
        }
        let scale = t.nplus.amax().powi(2).max(1.0);
        worst = worst.max(commutator_residual(&t, f) / scale);
    }
    Ok((worst < 1e-12, format!("max relative residual {worst:e}")))
}

fn canonical_conjugate(fault: bool) -> Result<(bool, String)> {
    let t = Preset::parse("su11")?.with_params(&[("phi".to_string(), "-1/4".to_string())].into())?;
    let m = t.module(200)?;
    let mut nt = conjugate_raising(&m, &delta_for_vacuum(m.w0()))?;
    if fault {
        nt[(3, 2)] += 1e-6;
    }
    let ops = m.ladder_matrices();
    let comm = &ops.nminus * &nt - &nt * &ops.nminus;
    let mut worst: f64 = 0.0;
    for i in 0..199 {
        for j in 0..199 {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((comm[(i, j)] - want).abs());
        }
    }
    Ok((worst < 1e-12, format!("interior residual {worst:e}")))
}

fn mapped(fault: bool) -> Result<(bool, String)> {
    let cases = [
        (bg(rat(-3, 4), 200)?, BSign::Plus),
        (Preset::parse("quadratic")?.module(200)?, BSign::Plus),
        (higgs_infinite(200)?, BSign::Plus),
        (Preset::parse("su2")?.module(200)?, BSign::Minus),
    ];
    let mut worst: f64 = 0.0;
    for (m, b) in &cases {
        let t = m.ladder_matrices();
        let mut nbar = undeformed_map(m, *b, None)?;
        if fault && m.dim() > 4 {
            nbar[(2, 3)] *= 1.0 + 1e-6;
        }
        let target = &t.n0 * (-2.0 * b.value() as f64);
        let comm = &t.nplus * &nbar - &nbar * &t.nplus;
        let k = if m.is_terminated() { m.dim() } else { m.dim() - 1 };
        let scale = t.nplus.amax().powi(2).max(1.0);
        for i in 0..k {
            for j in 0..k {
                worst = worst.max((comm[(i, j)] - target[(i, j)]).abs() / scale);
            }
        }
    }
    Ok((worst < 1e-10, format!("max relative residual {worst:e}")))
}

fn eigenstate(fault: bool) -> Result<(bool, String)> {
    let m = bg(rat(-3, 2), 2)?;
    let mut worst: f64 = 0.0;
    for a in [0.5, 2.0, 5.0] {
        let mut st = annihilation_cs(&m, Complex64::new(a, -0.5 * a), &CutoffPolicy::default())?;
        if fault {
            st.coeffs[1] *= 1.0 + 1e-6;
        }
        worst = worst.max(eigen_residual(&m, &st)?);
    }
    Ok((worst < 1e-10, format!("max residual {worst:e}")))
}

fn sector_closure(fault: bool) -> Result<(bool, String)> {
    let mut names = Vec::new();
    for p in Preset::shipped() {
        let Some(mut t) = p.realization(None)? else { continue };
        let f = p.structure()?;
        if fault && t.nplus.len() > 2 {
            t.nplus[1].sq += int(1);
        }
        let ok = t.conservation().ok()
            && match t.closure_fit() {
                Ok(fit) => {
                    t.physical_commutator_diagonal()
                        .iter()
                        .zip(&t.n0)
                        .all(|(d, x)| *d == f.eval(x))
                        && fit == f
                }
                Err(_) => false,
            };
        if !ok {
            names.push(p.to_string());
        }
    }
    Ok((names.is_empty(), format!("failing: {names:?}")))
}

fn sector_casimir(fault: bool) -> Result<(bool, String)> {
    let mut names = Vec::new();
    for p in Preset::shipped() {
        let Some(mut t) = p.realization(None)? else { continue };
        if fault {
            t.raise_sq[0] += int(1);
        }
        let g = p.casimir()?;
        for chain in t.components() {
            let c = t.casimir_diagonal(&g);
            if chain.iter().any(|&i| c[i] != c[chain[0]]) {
                names.push(p.to_string());
                break;
            }
        }
    }
    Ok((names.is_empty(), format!("failing: {names:?}")))
}

fn sector_module(fault: bool) -> Result<(bool, String)> {
    let cases = [
        (Preset::Pair { q: 1 }, 80, 40usize),
        (Preset::parse("trilinear")?, 12, 11),
        (Preset::parse("multiphoton(2,2)")?, 0, 0),
    ];
    let alpha = Complex64::new(0.8, 0.3);
    let mut worst: f64 = 1.0;
    for (p, cutoff, levels) in cases {
        let t = p.realization((cutoff > 0).then_some(cutoff))?.expect("realized preset");
        let vac = t.find_vacua().iter().find_map(|v| v.state).ok_or(Error::EmptySector)?;
        let levels = if levels == 0 { t.orbit(vac).len() } else { levels };
        let module = t.sector_to_module(vac, Some(levels))?;
        let direct = t.sector_series(vac, alpha, levels)?;
        let mut via = ladder_series(&module, alpha, levels)?;
        if fault {
            via[1] *= 1.01;
        }
        worst = worst.min(fidelity(&via, &direct));
    }
    Ok((worst >= 1.0 - 1e-12, format!("min fidelity {worst}")))
}

fn trilinear_vacua(fault: bool) -> Result<(bool, String)> {
    let mut bad = Vec::new();
    for (h0, q) in crate::realizations::trilinear_sectors([12, 12, 12]) {
        let mut t = crate::realizations::realize_trilinear([12, 12, 12], &h0, q)?;
        if t.dim() < 5 {
            continue;
        }
        if fault {
            t.lower_sq[0] += int(1);
        }
        let count: usize = t.find_vacua().iter().map(|v| v.multiplicity).sum();
        if count != 3 {
            bad.push(format!("({h0}, {q})"));
        }
    }
    Ok((bad.is_empty(), format!("sectors without three vacua: {bad:?}")))
}

fn moment_recursion(fault: bool) -> Result<(bool, String)> {
    let mut ok = true;
    for p in ["su11", "pair", "quadratic"] {
        let m = Preset::parse(p)?.module(30)?;
        let mut seq = moment_sequence(&m, 20)?;
        if fault {
            seq.exact[7] += int(1);
        }
        for n in 1..=20 {
            ok &= seq.exact[n] == &seq.exact[n - 1] * m.s_at(n).unwrap_or_else(Rational::zero);
        }
    }
    Ok((ok, String::new()))
}

fn measure_moments(fault: bool) -> Result<(bool, String)> {
    let unit = LoweringModule::from_ladder_poly(&Poly::x(), int(0), 12)?;
    let calibration = verify_moments(gaussian_density, &moment_sequence(&unit, 10)?, 10, 1e-12)?;
    let mut worst = calibration.max_rel_err;
    for phi in [-0.5, -1.0, -1.5] {
        let m = bg(Rational::from_float(phi).expect("finite"), 12)?;
        let shift = if fault { 1e-3 } else { 0.0 };
        let check = verify_moments(|r| bg_measure_density(r, phi + shift), &moment_sequence(&m, 8)?, 8, 1e-12)?;
        worst = worst.max(check.max_rel_err);
    }
    Ok((worst < 1e-6 && calibration.max_rel_err < 1e-8, format!("max relative error {worst:e}")))
}

fn tanh_law(fault: bool) -> Result<(bool, String)> {
    let m = bg(int(-1), 2)?;
    let policy = CutoffPolicy { tol: 1e-12, ..CutoffPolicy::default() };
    let mut worst: f64 = 1.0;
    for r in [0.25, 0.75, 1.5] {
        let eta = Complex64::from_polar(r, 0.4);
        let d = displacement_cs(&m, BSign::Plus, None, eta, 300)?;
        let xi = Complex64::from_polar(r.tanh() * if fault { 1.01 } else { 1.0 }, 0.4);
        let e = exponential_cs(&m, xi, &policy)?;
        let n = e.coeffs.len().min(d.coeffs.len());
        worst = worst.min(fidelity(&d.coeffs[..n], &e.coeffs[..n]));
    }
    Ok((worst >= 1.0 - 1e-8, format!("min fidelity {worst}")))
}

fn normalizability(fault: bool) -> Result<(bool, String)> {
    let gamma = Complex64::new(0.3, 0.1);
    let quadratic = Preset::parse("quadratic")?.module(10)?;
    let higgs = higgs_infinite(10)?;
    let su11 = bg(int(-1), 10)?;
    let at = |r: f64| Complex64::from_polar(r, 0.7);
    let expect = |m: &LoweringModule, g: Complex64, want: bool| exponential_normalizable(m, g) == Some(want);
    let outcome = [
        expect(&quadratic, gamma, fault),
        expect(&higgs, gamma, false),
        expect(&su11, at(0.9), true),
        expect(&su11, at(1.1), false),
    ];
    Ok((outcome.iter().all(|b| *b), format!("{outcome:?}")))
}
