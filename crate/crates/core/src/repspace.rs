//! Truncated lowest-weight modules and their ladder matrices.
//!
//! Level `m` of a module carries the `N0` eigenvalue `w0 + m`; the raising
//! operator maps level `m-1` to level `m` with coefficient `sqrt(s[m])`,
//! where `s[m] = C - g(w0 + m - 1)` and `C = g(w0 - 1)`.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use nalgebra::DMatrix;
use num::{One, Signed, Zero};
use serde::Serialize;

use crate::algebra::{casimir_value, telescope_g, CasimirPolynomial, StructurePolynomial};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{self, int, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct LoweringModule {
    w0: Rational,
    casimir: Option<Rational>,
    g: Option<CasimirPolynomial>,
    ladder: Option<Poly>,
    extendable: bool,
    s: Vec<Rational>,
    s_beyond: Option<Rational>,
    termination: Option<usize>,
}

/// JSON form of a module.
#[derive(Serialize)]
pub struct ModuleDump {
    #[serde(with = "rational::serde_str")]
    pub w0: Rational,
    #[serde(rename = "C", with = "rational::serde_opt_str")]
    pub casimir: Option<Rational>,
    #[serde(rename = "D")]
    pub dim: usize,
    #[serde(with = "rational::serde_vec_str")]
    pub s: Vec<Rational>,
    pub termination: Option<usize>,
}

impl LoweringModule {
    /// Module built from `g` on the vacuum weight `w0`, truncated to `dim`
    /// levels unless it terminates earlier.
    pub fn from_casimir(g: &CasimirPolynomial, w0: Rational, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidCutoff { min: 2, got: dim });
        }
        let c = casimir_value(g, &w0);
        let ladder = &Poly::constant(c.clone()) - &g.0.shift(&(&w0 - Rational::one()));
        let mut s = vec![Rational::zero()];
        let mut s_beyond = None;
        let mut termination = None;
        for m in 1..=dim {
            let v = ladder.eval(&int(m as i64));
            if v.is_negative() {
                return Err(Error::NonUnitary { level: m, value: v });
            }
            if v.is_zero() || m == dim {
                if v.is_zero() {
                    termination = Some(m);
                }
                s_beyond = Some(v);
                break;
            }
            s.push(v);
        }
        Ok(LoweringModule {
            w0,
            casimir: Some(c),
            g: Some(g.clone()),
            ladder: Some(ladder),
            extendable: true,
            s,
            s_beyond,
            termination,
        })
    }

    /// Module given directly by its squared ladder coefficients
    /// `s_table[0..]` (with `s_table[0] = 0`). The Casimir value is left
    /// undefined.
    pub fn from_ladder(s_table: &[Rational], w0: Rational) -> Result<Self> {
        match s_table.first() {
            None => return Err(Error::InvalidLadder("empty table".into())),
            Some(s0) if !s0.is_zero() => {
                return Err(Error::InvalidLadder(format!("s[0] must be 0, got {s0}")))
            }
            _ => {}
        }
        let mut s = vec![Rational::zero()];
        let mut termination = None;
        for (m, v) in s_table.iter().enumerate().skip(1) {
            if v.is_negative() {
                return Err(Error::NonUnitary { level: m, value: v.clone() });
            }
            if v.is_zero() {
                termination = Some(m);
                break;
            }
            s.push(v.clone());
        }
        let s_beyond = termination.map(|_| Rational::zero());
        let points: Vec<(Rational, Rational)> = s
            .iter()
            .enumerate()
            .map(|(m, v)| (int(m as i64), v.clone()))
            .chain(s_beyond.iter().map(|v| (int(s.len() as i64), v.clone())))
            .collect();
        let ladder = Poly::fit(&points, 8);
        Ok(LoweringModule {
            w0,
            casimir: None,
            g: None,
            ladder,
            extendable: false,
            s,
            s_beyond,
            termination,
        })
    }

    /// Module whose ladder is the polynomial `s(m)` (with `s(0) = 0`); the
    /// structure polynomial is `f(x) = s(x - w0) - s(x - w0 + 1)`.
    pub fn from_ladder_poly(s_poly: &Poly, w0: Rational, dim: usize) -> Result<Self> {
        if !s_poly.coeff(0).is_zero() {
            return Err(Error::InvalidLadder("ladder polynomial must vanish at 0".into()));
        }
        let g = telescope_g(&ladder_structure(s_poly, &w0))?;
        let mut module = LoweringModule::from_casimir(&g, w0, dim)?;
        module.ladder = Some(s_poly.clone());
        Ok(module)
    }

    pub fn w0(&self) -> &Rational {
        &self.w0
    }

    pub fn casimir(&self) -> Option<&Rational> {
        self.casimir.as_ref()
    }

    pub fn casimir_polynomial(&self) -> Option<&CasimirPolynomial> {
        self.g.as_ref()
    }

    /// Number of basis levels kept.
    pub fn dim(&self) -> usize {
        self.s.len()
    }

    /// Squared ladder coefficients for levels `0..dim`.
    pub fn s(&self) -> &[Rational] {
        &self.s
    }

    /// `s[dim]`, the coefficient cut by the truncation, when known.
    pub fn s_beyond(&self) -> Option<&Rational> {
        self.s_beyond.as_ref()
    }

    pub fn termination(&self) -> Option<usize> {
        self.termination
    }

    pub fn is_terminated(&self) -> bool {
        self.termination.is_some()
    }

    /// `s` as a polynomial in the level `m`: exact for modules built from
    /// `g`, fitted (when an exact fit exists) for tables.
    pub fn ladder_polynomial(&self) -> Option<&Poly> {
        self.ladder.as_ref()
    }

    /// Whether levels beyond the table can be generated.
    pub fn is_extendable(&self) -> bool {
        self.extendable && !self.is_terminated()
    }

    /// Structure polynomial implied by the ladder, when it is polynomial.
    pub fn structure_polynomial(&self) -> Option<StructurePolynomial> {
        self.ladder.as_ref().map(|s| ladder_structure(s, &self.w0))
    }

    /// `s[m]` for any level the module knows about.
    pub fn s_at(&self, m: usize) -> Option<Rational> {
        if m < self.s.len() {
            return Some(self.s[m].clone());
        }
        if m == self.s.len() {
            if let Some(v) = &self.s_beyond {
                return Some(v.clone());
            }
        }
        if self.is_extendable() {
            return self.ladder.as_ref().map(|p| p.eval(&int(m as i64)));
        }
        None
    }

    /// The same module with a different number of kept levels.
    pub fn with_cutoff(&self, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidCutoff { min: 1, got: 0 });
        }
        if dim <= self.s.len() {
            let mut out = self.clone();
            if dim < self.s.len() {
                out.s_beyond = Some(self.s[dim].clone());
                out.s.truncate(dim);
                out.termination = None;
            }
            return Ok(out);
        }
        if self.is_terminated() {
            return Ok(self.clone());
        }
        if !self.extendable {
            return Err(Error::NotExtendable { len: self.s.len() });
        }
        let g = self.g.as_ref().ok_or(Error::NotExtendable { len: self.s.len() })?;
        let mut out = LoweringModule::from_casimir(g, self.w0.clone(), dim)?;
        out.ladder = self.ladder.clone();
        Ok(out)
    }

    /// Hash of the vacuum weight and the first ladder coefficients; equal for
    /// truncations of the same module.
    pub fn signature(&self) -> u64 {
        let mut h = DefaultHasher::new();
        rational::format(&self.w0).hash(&mut h);
        for m in 1..=6 {
            match self.s_at(m) {
                Some(v) => rational::format(&v).hash(&mut h),
                None => break,
            }
        }
        h.finish()
    }

    pub fn dump(&self) -> ModuleDump {
        ModuleDump {
            w0: self.w0.clone(),
            casimir: self.casimir.clone(),
            dim: self.dim(),
            s: self.s.clone(),
            termination: self.termination,
        }
    }

    /// `N0` eigenvalue of level `m`.
    pub fn weight(&self, m: usize) -> Rational {
        &self.w0 + int(m as i64)
    }

    pub fn ladder_matrices(&self) -> OperatorTriple {
        ladder_matrices(self)
    }
}

fn ladder_structure(s: &Poly, w0: &Rational) -> StructurePolynomial {
    let a = s.shift(&-w0.clone());
    let b = s.shift(&(Rational::one() - w0));
    StructurePolynomial(&a - &b)
}

/// Dense double-precision matrices of `N0`, `N+`, `N-` on a module.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorTriple {
    pub n0: DMatrix<f64>,
    pub nplus: DMatrix<f64>,
    pub nminus: DMatrix<f64>,
    pub labels: Vec<String>,
    /// True when the top level is a truncation rather than the end of a
    /// finite module.
    pub truncated: bool,
}

pub fn ladder_matrices(module: &LoweringModule) -> OperatorTriple {
    let d = module.dim();
    let mut n0 = DMatrix::zeros(d, d);
    let mut nplus = DMatrix::zeros(d, d);
    for m in 0..d {
        n0[(m, m)] = rational::to_f64(&module.weight(m));
        if m + 1 < d {
            nplus[(m + 1, m)] = rational::to_f64(&module.s[m + 1]).sqrt();
        }
    }
    let nminus = nplus.transpose();
    OperatorTriple {
        n0,
        nplus,
        nminus,
        labels: (0..d).map(|m| format!("m={m}")).collect(),
        truncated: !module.is_terminated(),
    }
}

impl OperatorTriple {
    pub fn dim(&self) -> usize {
        self.n0.nrows()
    }

    /// Rows and columns on which the algebra holds exactly.
    pub fn interior(&self) -> usize {
        if self.truncated {
            self.dim().saturating_sub(1)
        } else {
            self.dim()
        }
    }
}

/// Max-norm of `[N+, N-] - f(N0)` on the interior.
pub fn commutator_residual(t: &OperatorTriple, f: &StructurePolynomial) -> f64 {
    let comm = &t.nplus * &t.nminus - &t.nminus * &t.nplus;
    let k = t.interior();
    let mut worst: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            let target = if i == j { f.0.eval_f64(t.n0[(i, i)]) } else { 0.0 };
            worst = worst.max((comm[(i, j)] - target).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn su11_g() -> CasimirPolynomial {
        telescope_g(&StructurePolynomial::su11()).unwrap()
    }

    #[test]
    fn bg_module_is_infinite() {
        let phi = int(-1);
        let m = LoweringModule::from_casimir(&su11_g(), -phi, 10).unwrap();
        assert_eq!(m.dim(), 10);
        assert!(!m.is_terminated());
        for k in 0..10 {
            assert_eq!(m.s()[k], int((k * (k + 1)) as i64));
        }
        assert_eq!(m.s_beyond(), Some(&int(110)));
    }

    #[test]
    fn spin_one_terminates_at_three() {
        let g = telescope_g(&StructurePolynomial::su2()).unwrap();
        let m = LoweringModule::from_casimir(&g, int(-1), 10).unwrap();
        assert_eq!(m.s(), &[int(0), int(2), int(2)]);
        assert_eq!(m.termination(), Some(3));
        assert_eq!(m.dim(), 3);
    }

    #[test]
    fn spin_half_has_dimension_two() {
        let g = telescope_g(&StructurePolynomial::su2()).unwrap();
        let m = LoweringModule::from_casimir(&g, rat(-1, 2), 10).unwrap();
        assert_eq!(m.s(), &[int(0), int(1)]);
        assert_eq!(m.termination(), Some(2));
    }

    #[test]
    fn non_unitary_weight_is_rejected() {
        let g = telescope_g(&StructurePolynomial::su2()).unwrap();
        let err = LoweringModule::from_casimir(&g, int(1), 5).unwrap_err();
        assert!(matches!(err, Error::NonUnitary { level: 1, .. }));
    }

    #[test]
    fn cutoff_must_be_two() {
        assert_eq!(
            LoweringModule::from_casimir(&su11_g(), int(1), 1),
            Err(Error::InvalidCutoff { min: 2, got: 1 })
        );
    }

    #[test]
    fn quadratic_ladder_table() {
        let table = |eps: Rational| -> Vec<Rational> {
            (0..6)
                .map(|m| {
                    let m = int(m);
                    &m * (&m - rat(1, 2) - &eps) * (&m + rat(1, 2) - &eps)
                })
                .collect()
        };
        let boundary = LoweringModule::from_ladder(&table(rat(1, 2)), int(0)).unwrap();
        assert_eq!(boundary.termination(), Some(1));
        assert_eq!(boundary.dim(), 1);
        let open = LoweringModule::from_ladder(&table(rat(-3, 2)), int(0)).unwrap();
        assert_eq!(open.s()[3], int(3 * 4 * 5));
        assert!(!open.is_terminated());
        assert_eq!(open.casimir(), None);
    }

    #[test]
    fn table_matches_casimir_construction() {
        let phi = rat(-3, 2);
        let table: Vec<Rational> = (0..8)
            .map(|m| {
                let m = int(m);
                &m * (&m - int(1) - int(2) * &phi)
            })
            .collect();
        let from_table = LoweringModule::from_ladder(&table, -phi.clone()).unwrap();
        let from_g = LoweringModule::from_casimir(&su11_g(), -phi, 8).unwrap();
        assert_eq!(from_table.s(), from_g.s());
        assert_eq!(from_table.signature(), from_g.signature());
    }

    #[test]
    fn trivial_table() {
        let m = LoweringModule::from_ladder(&[int(0)], int(0)).unwrap();
        assert_eq!(m.dim(), 1);
        assert!(LoweringModule::from_ladder(&[], int(0)).is_err());
        assert!(LoweringModule::from_ladder(&[int(0), int(-1)], int(0)).is_err());
    }

    #[test]
    fn ladder_poly_round_trip() {
        // s(m) = m((m - eps)^2 - 1/4), eps = -3/2
        let s = Poly::from_ints(&[0, 2, 3, 1]);
        let m = LoweringModule::from_ladder_poly(&s, int(0), 12).unwrap();
        for k in 0..12 {
            assert_eq!(m.s()[k], s.eval(&int(k as i64)));
        }
    }

    #[test]
    fn small_matrices() {
        let m = LoweringModule::from_ladder(&[int(0), int(1)], int(0)).unwrap();
        let t = m.ladder_matrices();
        assert_eq!(t.nplus, DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]));
        assert_eq!(t.n0, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.0, 1.0])));

        let bg = LoweringModule::from_casimir(&su11_g(), int(1), 3).unwrap();
        let t = bg.ladder_matrices();
        assert_eq!(t.nplus[(1, 0)], 2f64.sqrt());
        assert_eq!(t.nplus[(2, 1)], 6f64.sqrt());
        assert_eq!(t.nminus, t.nplus.transpose());
        let prod = &t.nminus * &t.nplus;
        for k in 0..2 {
            assert!((prod[(k, k)] - rational::to_f64(&bg.s()[k + 1])).abs() < 1e-12);
        }
    }

    #[test]
    fn commutator_and_corruption() {
        let bg = LoweringModule::from_casimir(&su11_g(), rat(3, 2), 40).unwrap();
        let mut t = bg.ladder_matrices();
        assert!(commutator_residual(&t, &StructurePolynomial::su11()) < 1e-12);
        let s2 = rational::to_f64(&bg.s()[2]) + 1.0;
        t.nplus[(2, 1)] = s2.sqrt();
        t.nminus = t.nplus.transpose();
        assert!(commutator_residual(&t, &StructurePolynomial::su11()) >= 1.0);
    }

    #[test]
    fn finite_higgs_module_closes_everywhere() {
        let f = StructurePolynomial::higgs(int(1), int(1));
        let g = telescope_g(&f).unwrap();
        let m = LoweringModule::from_casimir(&g, int(-2), 20).unwrap();
        assert_eq!(m.termination(), Some(5));
        let t = m.ladder_matrices();
        assert!(!t.truncated);
        assert!(commutator_residual(&t, &f) < 1e-12);
    }

    #[test]
    fn with_cutoff_extends_and_truncates() {
        let m = LoweringModule::from_casimir(&su11_g(), int(1), 4).unwrap();
        let big = m.with_cutoff(9).unwrap();
        assert_eq!(big.s()[8], int(72));
        let small = big.with_cutoff(3).unwrap();
        assert_eq!(small.s_beyond(), Some(&int(12)));
        let table = LoweringModule::from_ladder(&[int(0), int(2)], int(1)).unwrap();
        assert_eq!(table.with_cutoff(5), Err(Error::NotExtendable { len: 2 }));
    }

    #[test]
    fn dump_uses_rational_strings() {
        let m = LoweringModule::from_casimir(&su11_g(), rat(1, 4), 3).unwrap();
        let json = serde_json::to_value(m.dump()).unwrap();
        assert_eq!(json["w0"], "1/4");
        assert_eq!(json["C"], "3/16");
        assert_eq!(json["s"][2], "3/1");
    }
}
