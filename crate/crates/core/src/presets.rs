//! Named algebras with default parameters, shared by the CLI and the
//! verification suite.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{telescope_g, CasimirPolynomial, StructurePolynomial};
use crate::conjugate::BSign;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{self, int, rat, Rational};
use crate::realizations::{
    multiphoton_h0, realize_dicke, realize_multiphoton, realize_pair, realize_trilinear, RealizedTriple,
};
use crate::repspace::LoweringModule;

#[derive(Clone, Debug, PartialEq)]
pub enum Preset {
    /// Barut-Girardello module, `w0 = -phi`.
    Su11 { phi: Rational },
    Su2 { w0: Rational },
    /// Two-mode pair realization of su(1,1) in sector `q = na - nb`.
    Pair { q: i64 },
    Trilinear { h0: Rational, q: i64 },
    /// Ladder `s(m) = m((m - eps)^2 - 1/4)` on `w0 = 0`.
    Quadratic { eps: Rational },
    Higgs { c: Rational, h: Rational, w0: Rational },
    Multiphoton { m: i64, n: i64, h0: Option<Rational> },
    Dicke { n_atoms: i64, k: i64, h0: Option<Rational> },
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Su11 { .. } => write!(f, "su11"),
            Preset::Su2 { .. } => write!(f, "su2"),
            Preset::Pair { .. } => write!(f, "pair"),
            Preset::Trilinear { .. } => write!(f, "trilinear"),
            Preset::Quadratic { .. } => write!(f, "quadratic"),
            Preset::Higgs { .. } => write!(f, "higgs"),
            Preset::Multiphoton { m, n, .. } => write!(f, "multiphoton({m},{n})"),
            Preset::Dicke { n_atoms, k, .. } => write!(f, "dicke({n_atoms},{k})"),
        }
    }
}

fn args(name: &str) -> Result<(&str, Vec<i64>)> {
    let bad = || Error::InvalidParameter(format!("unknown preset {name:?}"));
    match name.split_once('(') {
        None => Ok((name, Vec::new())),
        Some((head, rest)) => {
            let inner = rest.strip_suffix(')').ok_or_else(bad)?;
            let nums = inner
                .split(',')
                .map(|s| s.trim().parse::<i64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            Ok((head, nums))
        }
    }
}

impl Preset {
    /// Parses `su11`, `su2`, `pair`, `trilinear`, `quadratic`, `higgs`,
    /// `multiphoton(m,n)` and `dicke(n_atoms,k)`.
    pub fn parse(name: &str) -> Result<Preset> {
        let (head, nums) = args(name.trim())?;
        let preset = match (head, nums.as_slice()) {
            ("su11", []) => Preset::Su11 { phi: int(-1) },
            ("su2", []) => Preset::Su2 { w0: int(-1) },
            ("pair", []) => Preset::Pair { q: 0 },
            ("trilinear", []) => Preset::Trilinear { h0: rat(21, 4), q: 0 },
            ("quadratic", []) => Preset::Quadratic { eps: rat(-3, 2) },
            ("higgs", []) => Preset::Higgs { c: int(1), h: int(1), w0: int(-1) },
            ("multiphoton", [m, n]) => Preset::Multiphoton { m: *m, n: *n, h0: None },
            ("dicke", [a, k]) => Preset::Dicke { n_atoms: *a, k: *k, h0: None },
            _ => return Err(Error::InvalidParameter(format!("unknown preset {name:?}"))),
        };
        preset.validate()?;
        Ok(preset)
    }

    fn validate(&self) -> Result<()> {
        match self {
            Preset::Su11 { phi } if *phi >= int(0) => {
                Err(Error::InvalidParameter(format!("su11 needs phi < 0, got {phi}")))
            }
            Preset::Multiphoton { m, n, .. } if *m < 1 || *n < 1 || m + n > 6 => Err(
                Error::InvalidParameter(format!("multiphoton orders ({m},{n}) out of range")),
            ),
            Preset::Dicke { n_atoms, k, .. } if !(1..=6).contains(n_atoms) || !(1..=3).contains(k) => Err(
                Error::InvalidParameter(format!("dicke parameters ({n_atoms},{k}) out of range")),
            ),
            _ => Ok(()),
        }
    }

    /// Overrides named parameters (`phi`, `w0`, `q`, `h0`, `eps`, `c`, `h`).
    pub fn with_params(mut self, params: &BTreeMap<String, String>) -> Result<Preset> {
        for (key, value) in params {
            let r = rational::parse(value)?;
            let as_int = || -> Result<i64> {
                if rational::is_integer(&r) {
                    r.to_integer()
                        .try_into()
                        .map_err(|_| Error::InvalidParameter(format!("{key} = {value} too large")))
                } else {
                    Err(Error::InvalidParameter(format!("{key} must be an integer, got {value}")))
                }
            };
            let name = self.to_string();
            let unknown = || Error::InvalidParameter(format!("preset {name} has no parameter {key:?}"));
            match (&mut self, key.as_str()) {
                (Preset::Su11 { phi }, "phi") => *phi = r,
                (Preset::Su2 { w0 }, "w0") => *w0 = r,
                (Preset::Pair { q }, "q") => *q = as_int()?,
                (Preset::Trilinear { h0, .. }, "h0") => *h0 = r,
                (Preset::Trilinear { q, .. }, "q") => *q = as_int()?,
                (Preset::Quadratic { eps }, "eps") => *eps = r,
                (Preset::Higgs { c, .. }, "c") => *c = r,
                (Preset::Higgs { h, .. }, "h") => *h = r,
                (Preset::Higgs { w0, .. }, "w0") => *w0 = r,
                (Preset::Multiphoton { h0, .. }, "h0") => *h0 = Some(r),
                (Preset::Dicke { h0, .. }, "h0") => *h0 = Some(r),
                _ => return Err(unknown()),
            }
        }
        self.validate()?;
        Ok(self)
    }

    /// Presets covered by the default verification suite.
    pub fn shipped() -> Vec<Preset> {
        ["su11", "su2", "pair", "trilinear", "quadratic", "higgs", "multiphoton(2,2)", "dicke(4,1)"]
            .iter()
            .map(|n| Preset::parse(n).expect("shipped preset"))
            .collect()
    }

    fn quadratic_ladder(eps: &Rational) -> Poly {
        // m((m - eps)^2 - 1/4)
        let shifted = Poly::new(vec![-eps.clone(), int(1)]);
        let sq = &(&shifted * &shifted) - &Poly::constant(rat(1, 4));
        &Poly::x() * &sq
    }

    fn multiphoton_default_h0(m: i64, n: i64) -> Rational {
        multiphoton_h0(m, n, 10 * m, 0)
    }

    fn dicke_default_h0(n_atoms: i64) -> Rational {
        rat(n_atoms, 2) + int(4)
    }

    pub fn is_realized(&self) -> bool {
        matches!(
            self,
            Preset::Pair { .. } | Preset::Trilinear { .. } | Preset::Multiphoton { .. } | Preset::Dicke { .. }
        )
    }

    /// Sector realization, for presets that have one. `mode_cutoff`
    /// overrides the default per-mode limit.
    pub fn realization(&self, mode_cutoff: Option<i64>) -> Result<Option<RealizedTriple>> {
        Ok(Some(match self {
            Preset::Pair { q } => {
                let c = mode_cutoff.unwrap_or(40);
                realize_pair([c, c], *q)?
            }
            Preset::Trilinear { h0, q } => {
                let c = mode_cutoff.unwrap_or(12);
                realize_trilinear([c, c, c], h0, *q)?
            }
            Preset::Multiphoton { m, n, h0 } => {
                let h0 = h0.clone().unwrap_or_else(|| Preset::multiphoton_default_h0(*m, *n));
                // Whole sector: n0/m + n1/n = 2 h0.
                let top = (int(2) * &h0).ceil().to_integer();
                let top: i64 = top.try_into().map_err(|_| Error::InvalidParameter("h0 too large".into()))?;
                let c = mode_cutoff.map(|c| [c, c]).unwrap_or([m * top, n * top]);
                realize_multiphoton(*m, *n, c, &h0)?
            }
            Preset::Dicke { n_atoms, k, h0 } => {
                let h0 = h0.clone().unwrap_or_else(|| Preset::dicke_default_h0(*n_atoms));
                let top = ((&h0 + rat(*n_atoms, 2)) * int(*k)).floor().to_integer();
                let top: i64 = top.try_into().map_err(|_| Error::InvalidParameter("h0 too large".into()))?;
                realize_dicke(*n_atoms, *k, mode_cutoff.unwrap_or(top.max(0)), &h0)?
            }
            _ => return Ok(None),
        }))
    }

    pub fn structure(&self) -> Result<StructurePolynomial> {
        Ok(match self {
            Preset::Su11 { .. } | Preset::Pair { .. } => StructurePolynomial::su11(),
            Preset::Su2 { .. } => StructurePolynomial::su2(),
            Preset::Trilinear { h0, q } => StructurePolynomial::trilinear(h0, &int(*q)),
            Preset::Quadratic { .. } => self.module(2)?.structure_polynomial().expect("polynomial ladder"),
            Preset::Higgs { c, h, .. } => StructurePolynomial::higgs(c.clone(), h.clone()),
            Preset::Multiphoton { .. } | Preset::Dicke { .. } => {
                self.realization(None)?.expect("realized preset").closure_fit()?
            }
        })
    }

    pub fn casimir(&self) -> Result<CasimirPolynomial> {
        telescope_g(&self.structure()?)
    }

    /// Sign of the undeformed target: su(2)-like presets use `+2 N0`.
    pub fn b_sign(&self) -> BSign {
        match self {
            Preset::Su2 { .. } => BSign::Minus,
            Preset::Higgs { c, .. } if *c > int(0) => BSign::Minus,
            _ => BSign::Plus,
        }
    }

    /// Lowest-weight module with at most `dim` levels.
    pub fn module(&self, dim: usize) -> Result<LoweringModule> {
        let from_g = |f: StructurePolynomial, w0: Rational| {
            LoweringModule::from_casimir(&telescope_g(&f)?, w0, dim)
        };
        match self {
            Preset::Su11 { phi } => from_g(StructurePolynomial::su11(), -phi.clone()),
            Preset::Su2 { w0 } => from_g(StructurePolynomial::su2(), w0.clone()),
            Preset::Pair { q } => from_g(StructurePolynomial::su11(), rat(q.abs() + 1, 2)),
            Preset::Higgs { c, h, w0 } => from_g(StructurePolynomial::higgs(c.clone(), h.clone()), w0.clone()),
            Preset::Quadratic { eps } => {
                LoweringModule::from_ladder_poly(&Preset::quadratic_ladder(eps), int(0), dim)
            }
            Preset::Trilinear { .. } | Preset::Multiphoton { .. } | Preset::Dicke { .. } => {
                let t = self.realization(None)?.expect("realized preset");
                let vac = t
                    .find_vacua()
                    .iter()
                    .find_map(|v| v.state)
                    .ok_or(Error::EmptySector)?;
                let module = t.sector_to_module(vac, None)?;
                if dim < module.dim() {
                    module.with_cutoff(dim)
                } else {
                    Ok(module)
                }
            }
        }
    }
}
