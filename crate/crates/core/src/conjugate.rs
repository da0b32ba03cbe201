//! Canonical conjugate `Ñ+ = N+ F(C, N0)` of the lowering operator and the
//! map `N̄- = N- G(C, N0)` onto the undeformed commutator `-2b N0`.

use nalgebra::DMatrix;
use num::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, int, Rational};
use crate::repspace::LoweringModule;

/// Shift fixed by `(N0 + delta)|vacuum> = |vacuum>`.
pub fn delta_for_vacuum(w0: &Rational) -> Rational {
    Rational::one() - w0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjugateSpec {
    #[serde(with = "rational::serde_str")]
    pub delta: Rational,
    /// `F(m) = (w0 + m + delta) / s[m+1]` for levels `0..dim-1`.
    #[serde(serialize_with = "decimal_strings")]
    pub f_diag: Vec<f64>,
    pub pole_levels: Vec<usize>,
}

fn decimal_strings<S: serde::Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&format!("{x:.16e}"))?;
    }
    seq.end()
}

fn finite_module_pole(module: &LoweringModule) -> Result<()> {
    match module.termination() {
        Some(t) => Err(Error::PoleOnSpectrum { level: t }),
        None => Ok(()),
    }
}

pub fn conjugate_spec(module: &LoweringModule, delta: &Rational) -> Result<ConjugateSpec> {
    finite_module_pole(module)?;
    let d = module.dim();
    let f_diag = (0..d.saturating_sub(1))
        .map(|m| {
            let num = module.weight(m) + delta;
            rational::to_f64(&(num / &module.s()[m + 1]))
        })
        .collect();
    Ok(ConjugateSpec { delta: delta.clone(), f_diag, pole_levels: Vec::new() })
}

/// `Ñ+` with subdiagonal entries `(w0 + m + delta) / sqrt(s[m+1])`.
pub fn conjugate_raising(module: &LoweringModule, delta: &Rational) -> Result<DMatrix<f64>> {
    finite_module_pole(module)?;
    let d = module.dim();
    let mut out = DMatrix::zeros(d, d);
    for m in 0..d.saturating_sub(1) {
        let num = rational::to_f64(&(module.weight(m) + delta));
        out[(m + 1, m)] = num / rational::to_f64(&module.s()[m + 1]).sqrt();
    }
    Ok(out)
}

/// Basis of the numerical kernel of `Ñ+^T`: right singular vectors whose
/// singular value is below `tol` times the largest.
pub fn dual_vacua(ntilde: &DMatrix<f64>, tol: f64) -> Vec<nalgebra::DVector<f64>> {
    let d = ntilde.nrows();
    if d == 0 {
        return Vec::new();
    }
    let adj = ntilde.transpose();
    if adj.iter().all(|v| *v == 0.0) {
        return (0..d)
            .map(|k| nalgebra::DVector::from_fn(d, |i, _| if i == k { 1.0 } else { 0.0 }))
            .collect();
    }
    let svd = adj.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let largest = svd.singular_values.max();
    let mut out: Vec<nalgebra::DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s < tol * largest)
        .map(|(k, _)| {
            let mut v = v_t.row(k).transpose();
            // Deterministic sign: largest component positive.
            let imax = v.iamax();
            if v[imax] < 0.0 {
                v.neg_mut();
            }
            v
        })
        .collect();
    out.sort_by_key(|v| v.iamax());
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BSign {
    /// su(1,1): `[N+, N̄-] = -2 N0`.
    Plus,
    /// su(2): `[N+, N̄-] = +2 N0`.
    Minus,
}

impl BSign {
    pub fn value(self) -> i64 {
        match self {
            BSign::Plus => 1,
            BSign::Minus => -1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UndeformedMapSpec {
    pub b_sign: BSign,
    #[serde(with = "rational::serde_str")]
    pub epsilon_const: Rational,
    /// `G(m) = ((x^2 - x) b + eps) / s[m]` at `x = w0 + m`, levels `1..dim`.
    #[serde(serialize_with = "decimal_strings")]
    pub g_diag: Vec<f64>,
}

/// Default constant: `b w0 (1 - w0)`, the unique value for which the mapped
/// commutator also holds on the vacuum.
pub fn default_epsilon(module: &LoweringModule, b: BSign) -> Rational {
    let w0 = module.w0();
    int(b.value()) * w0 * (Rational::one() - w0)
}

fn map_numerator(b: BSign, eps: &Rational, x: &Rational) -> Rational {
    int(b.value()) * (x * x - x) + eps
}

pub fn undeformed_spec(
    module: &LoweringModule,
    b: BSign,
    epsilon: Option<Rational>,
) -> Result<UndeformedMapSpec> {
    let eps = epsilon.unwrap_or_else(|| default_epsilon(module, b));
    let mut g_diag = Vec::with_capacity(module.dim().saturating_sub(1));
    for m in 1..module.dim() {
        let s = &module.s()[m];
        if s.is_zero() {
            return Err(Error::PoleOnSpectrum { level: m });
        }
        let num = map_numerator(b, &eps, &module.weight(m));
        g_diag.push(rational::to_f64(&(num / s)));
    }
    Ok(UndeformedMapSpec { b_sign: b, epsilon_const: eps, g_diag })
}

/// `N̄-` with superdiagonal entries `((x^2 - x) b + eps) / sqrt(s[m])`,
/// `x = w0 + m`, mapping level `m` to `m - 1`.
pub fn undeformed_map(
    module: &LoweringModule,
    b: BSign,
    epsilon: Option<Rational>,
) -> Result<DMatrix<f64>> {
    let eps = epsilon.unwrap_or_else(|| default_epsilon(module, b));
    let d = module.dim();
    let mut out = DMatrix::zeros(d, d);
    for m in 1..d {
        let s = &module.s()[m];
        if s.is_zero() {
            return Err(Error::PoleOnSpectrum { level: m });
        }
        let num = rational::to_f64(&map_numerator(b, &eps, &module.weight(m)));
        out[(m - 1, m)] = num / rational::to_f64(s).sqrt();
    }
    Ok(out)
}

/// Max-norm of `[A, B] - target` over the leading `k x k` block.
pub fn block_residual(a: &DMatrix<f64>, b: &DMatrix<f64>, target: &DMatrix<f64>, k: usize) -> f64 {
    let comm = a * b - b * a;
    let mut worst: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            worst = worst.max((comm[(i, j)] - target[(i, j)]).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{telescope_g, StructurePolynomial};
    use crate::rational::rat;

    fn bg(phi: Rational, d: usize) -> LoweringModule {
        let g = telescope_g(&StructurePolynomial::su11()).unwrap();
        LoweringModule::from_casimir(&g, -phi, d).unwrap()
    }

    #[test]
    fn delta_values() {
        assert_eq!(delta_for_vacuum(&rat(1, 4)), rat(3, 4));
        assert_eq!(delta_for_vacuum(&rat(3, 4)), rat(1, 4));
        let phi = rat(-5, 2);
        assert_eq!(delta_for_vacuum(&-phi.clone()), phi + int(1));
        assert_eq!(delta_for_vacuum(&int(0)), int(1));
    }

    #[test]
    fn bg_conjugate_entries() {
        let phi = int(-1);
        let m = bg(phi.clone(), 12);
        let delta = delta_for_vacuum(m.w0());
        let nt = conjugate_raising(&m, &delta).unwrap();
        let phif = -1.0;
        for k in 0..11 {
            let want = ((k as f64 + 1.0) / (k as f64 - 2.0 * phif)).sqrt();
            assert!((nt[(k + 1, k)] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn canonical_commutator_on_interior() {
        let m = bg(rat(-3, 2), 200);
        let delta = delta_for_vacuum(m.w0());
        let nt = conjugate_raising(&m, &delta).unwrap();
        let t = m.ladder_matrices();
        let id = DMatrix::identity(200, 200);
        assert!(block_residual(&t.nminus, &nt, &id, 199) < 1e-12);
    }

    #[test]
    fn finite_module_has_no_conjugate() {
        let g = telescope_g(&StructurePolynomial::su2()).unwrap();
        let m = LoweringModule::from_casimir(&g, int(-1), 10).unwrap();
        assert_eq!(
            conjugate_raising(&m, &int(2)),
            Err(Error::PoleOnSpectrum { level: 3 })
        );
    }

    #[test]
    fn dual_vacuum_is_the_vacuum() {
        let m = bg(int(-1), 30);
        let nt = conjugate_raising(&m, &delta_for_vacuum(m.w0())).unwrap();
        let vacua = dual_vacua(&nt, 1e-10);
        assert_eq!(vacua.len(), 1);
        assert!((vacua[0][0] - 1.0).abs() < 1e-12);

        let trivial = DMatrix::<f64>::zeros(1, 1);
        assert_eq!(dual_vacua(&trivial, 1e-10).len(), 1);

        let full = DMatrix::<f64>::identity(4, 4) * 2.0;
        assert!(dual_vacua(&full, 1e-10).is_empty());
    }

    #[test]
    fn bg_map_is_the_identity_map() {
        let m = bg(int(-1), 50);
        let nbar = undeformed_map(&m, BSign::Plus, None).unwrap();
        let t = m.ladder_matrices();
        assert!((&nbar - &t.nminus).amax() < 1e-12);
        let spec = undeformed_spec(&m, BSign::Plus, None).unwrap();
        assert!(spec.g_diag.iter().all(|g| (g - 1.0).abs() < 1e-14));
    }

    #[test]
    fn mapped_commutator_both_signs() {
        let m = bg(rat(-3, 4), 80);
        let t = m.ladder_matrices();
        let nbar = undeformed_map(&m, BSign::Plus, None).unwrap();
        let target = &t.n0 * -2.0;
        assert!(block_residual(&t.nplus, &nbar, &target, 79) < 1e-10);

        let g = telescope_g(&StructurePolynomial::su2()).unwrap();
        let spin = LoweringModule::from_casimir(&g, int(-1), 200).unwrap();
        let t = spin.ladder_matrices();
        let nbar = undeformed_map(&spin, BSign::Minus, None).unwrap();
        let target = &t.n0 * 2.0;
        assert!(block_residual(&t.nplus, &nbar, &target, 3) < 1e-12);
    }

    #[test]
    fn vacuum_row_needs_the_default_constant() {
        let m = bg(int(-2), 20);
        let t = m.ladder_matrices();
        let nbar = undeformed_map(&m, BSign::Plus, Some(int(0))).unwrap();
        let target = &t.n0 * -2.0;
        let comm = &t.nplus * &nbar - &nbar * &t.nplus;
        assert!((comm[(0, 0)] - target[(0, 0)]).abs() > 1.0);
        for k in 1..19 {
            assert!((comm[(k, k)] - target[(k, k)]).abs() < 1e-10);
        }
    }

    #[test]
    fn spec_serializes_delta_as_rational() {
        let m = bg(int(-1), 4);
        let spec = conjugate_spec(&m, &delta_for_vacuum(m.w0())).unwrap();
        let json = serde_json::to_value(&spec).unwrap();
        assert_eq!(json["delta"], "0/1");
        assert_eq!(spec.f_diag.len(), 3);
    }
}
