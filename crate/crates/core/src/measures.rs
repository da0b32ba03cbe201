//! Moment sequences of the resolution of identity and quadrature checks of
//! candidate radial densities.

use std::f64::consts::PI;

use num::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::repspace::LoweringModule;
use crate::specialfn::{log_bessel_k, quad_semi_infinite_rel};

/// `rho_n = s[1] ... s[n]` for `n = 0..=n_max`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentSequence {
    #[serde(with = "rational::serde_vec_str")]
    pub exact: Vec<Rational>,
    pub log_values: Vec<f64>,
    pub module_signature: u64,
}

impl MomentSequence {
    pub fn n_max(&self) -> usize {
        self.exact.len() - 1
    }

    pub fn values(&self) -> Vec<f64> {
        self.log_values.iter().map(|l| l.exp()).collect()
    }
}

pub fn moment_sequence(module: &LoweringModule, n_max: usize) -> Result<MomentSequence> {
    let mut exact = vec![Rational::one()];
    let mut log_values = vec![0.0];
    for k in 1..=n_max {
        let s = module
            .s_at(k)
            .ok_or(Error::NotExtendable { len: module.dim() })?;
        if s.is_zero() {
            return Err(Error::PoleOnSpectrum { level: k });
        }
        log_values.push(log_values[k - 1] + rational::ln_positive(&s));
        exact.push(&exact[k - 1] * s);
    }
    Ok(MomentSequence { exact, log_values, module_signature: module.signature() })
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("density requires r > 0, got {r}")))
    }
}

/// `r^(1-2 phi) K_(1/2+phi)(2r)`, the printed Barut-Girardello weight.
pub fn bg_density(r: f64, phi: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(((1.0 - 2.0 * phi) * r.ln() + log_bessel_k(0.5 + phi, 2.0 * r)?).exp())
}

/// `r^(-2 phi - 1) K_(-2 phi - 1)(2r)`, whose moments are
/// `Gamma(n+1) Gamma(n-2 phi)` up to normalization.
pub fn bg_measure_density(r: f64, phi: f64) -> Result<f64> {
    check_radius(r)?;
    let nu = -2.0 * phi - 1.0;
    Ok((nu * r.ln() + log_bessel_k(nu, 2.0 * r)?).exp())
}

/// `exp(-r^2)`, with moments `n!`.
pub fn gaussian_density(r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok((-r * r).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentRow {
    pub n: usize,
    /// `rho_n / rho_0` as an exact rational string.
    pub exact: String,
    pub expected: f64,
    pub quadrature: f64,
    pub rel_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentCheck {
    pub rows: Vec<MomentRow>,
    pub max_rel_err: f64,
}

/// Compares `2 pi int density(r) r^(2n+1) dr`, normalized by its `n = 0`
/// value, against `rho_n / rho_0` for `n <= n_max`.
pub fn verify_moments<F>(density: F, moments: &MomentSequence, n_max: usize, quad_tol: f64) -> Result<MomentCheck>
where
    F: Fn(f64) -> Result<f64>,
{
    if n_max > moments.n_max() {
        return Err(Error::Domain(format!(
            "moment sequence has {} terms, {} requested",
            moments.n_max(),
            n_max
        )));
    }
    let integral = |n: usize| -> Result<f64> {
        let v = quad_semi_infinite_rel(
            |r| density(r).map(|d| 2.0 * PI * d * r.powi(2 * n as i32 + 1)).unwrap_or(f64::NAN),
            quad_tol,
        )?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::QuadratureNotConverged { prev: v, last: v })
        }
    };
    let zeroth = integral(0)?;
    if zeroth == 0.0 {
        return Err(Error::DegenerateMeasure);
    }
    let mut rows = Vec::with_capacity(n_max + 1);
    let mut max_rel_err: f64 = 0.0;
    for n in 0..=n_max {
        let quadrature = if n == 0 { 1.0 } else { integral(n)? / zeroth };
        let ratio = &moments.exact[n] / &moments.exact[0];
        let expected = (moments.log_values[n] - moments.log_values[0]).exp();
        let rel_err = (quadrature - expected).abs() / expected;
        max_rel_err = max_rel_err.max(rel_err);
        rows.push(MomentRow { n, exact: rational::format(&ratio), expected, quadrature, rel_err });
    }
    Ok(MomentCheck { rows, max_rel_err })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{telescope_g, StructurePolynomial};
    use crate::rational::{int, rat};
    use crate::specialfn::log_gamma;

    fn bg(phi: Rational) -> LoweringModule {
        let g = telescope_g(&StructurePolynomial::su11()).unwrap();
        LoweringModule::from_casimir(&g, -phi, 16).unwrap()
    }

    #[test]
    fn moments_recursion_and_gamma_form() {
        let phi = rat(-3, 2);
        let m = bg(phi.clone());
        let seq = moment_sequence(&m, 12).unwrap();
        assert_eq!(seq.exact[0], int(1));
        for n in 1..=12 {
            assert_eq!(seq.exact[n], &seq.exact[n - 1] * &m.s_at(n).unwrap());
            let p = rational::to_f64(&phi);
            let want = log_gamma(n as f64 + 1.0).unwrap() + log_gamma(n as f64 - 2.0 * p).unwrap()
                - log_gamma(-2.0 * p).unwrap();
            assert!((seq.log_values[n] - want).abs() < 1e-12);
        }
        assert_eq!(moment_sequence(&m, 0).unwrap().exact, vec![int(1)]);
    }

    #[test]
    fn finite_module_has_no_moments() {
        let g = telescope_g(&StructurePolynomial::su2()).unwrap();
        let m = LoweringModule::from_casimir(&g, int(-1), 5).unwrap();
        assert_eq!(moment_sequence(&m, 4), Err(Error::PoleOnSpectrum { level: 3 }));
    }

    #[test]
    fn gaussian_calibration() {
        let m = LoweringModule::from_ladder_poly(&crate::poly::Poly::x(), int(0), 12).unwrap();
        let seq = moment_sequence(&m, 10).unwrap();
        assert_eq!(seq.exact[5], int(120));
        let check = verify_moments(gaussian_density, &seq, 10, 1e-12).unwrap();
        assert!(check.max_rel_err < 1e-8, "{}", check.max_rel_err);
    }

    #[test]
    fn bg_measure_reproduces_moments() {
        for phi in [rat(-1, 2), int(-1), rat(-3, 2)] {
            let seq = moment_sequence(&bg(phi.clone()), 8).unwrap();
            let p = rational::to_f64(&phi);
            let check = verify_moments(|r| bg_measure_density(r, p), &seq, 8, 1e-12).unwrap();
            assert!(check.max_rel_err < 1e-6, "phi={phi}: {}", check.max_rel_err);
        }
    }

    #[test]
    fn printed_density_shapes() {
        let r: f64 = 0.7;
        let k0 = crate::specialfn::bessel_k(0.0, 2.0 * r).unwrap();
        assert!((bg_density(r, -0.5).unwrap() - r * r * k0).abs() < 1e-14);
        for r in [1e-6, 0.1, 1.0, 10.0, 40.0] {
            assert!(bg_density(r, -1.0).unwrap() > 0.0);
        }
        let ratio = bg_density(31.0, -1.0).unwrap() / bg_density(30.0, -1.0).unwrap();
        assert!(ratio < (-1.8f64).exp());
        assert!(matches!(bg_density(0.0, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_density_is_degenerate() {
        let seq = moment_sequence(&bg(int(-1)), 3).unwrap();
        assert_eq!(verify_moments(|_| Ok(0.0), &seq, 3, 1e-10), Err(Error::DegenerateMeasure));
    }
}
