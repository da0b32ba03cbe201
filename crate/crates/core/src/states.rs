//! Coherent states on lowest-weight modules: annihilation-operator
//! eigenstates, exponential (dual) states and displacement states.

use num::{Signed, Zero};
use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::conjugate::{default_epsilon, BSign};
use crate::error::{Error, Result};
use crate::linalg::{expm_apply, Tridiagonal};
use crate::poly::Poly;
use crate::rational::{self, int, Rational};
use crate::repspace::LoweringModule;
use crate::specialfn::pfq;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Annihilation,
    Exponential,
    Displacement,
}

/// How far a series state is carried. Levels are added until the mass
/// beyond the kept levels is certified below `tol^2` relative to the kept
/// mass, so the amplitude tail is below `tol`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffPolicy {
    pub tol: f64,
    pub max_cutoff: usize,
    pub min_levels: usize,
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        CutoffPolicy { tol: 1e-14, max_cutoff: 20_000, min_levels: 1 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoherentState {
    pub family: Family,
    pub parameter: Complex64,
    pub coeffs: Vec<Complex64>,
    /// Squared norm of `coeffs` (1 for normalized states).
    pub norm_sq: f64,
    /// Squared norm of the series before normalization, with `c_0 = 1`.
    pub raw_norm_sq: f64,
    /// Upper bound on the mass beyond the kept levels, relative to the kept
    /// mass (infinite when the series diverges).
    pub tail_bound: f64,
    pub normalizable: bool,
    pub module_signature: u64,
}

impl Serialize for CoherentState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View<'a> {
            family: Family,
            parameter: [f64; 2],
            coeffs: Vec<[f64; 2]>,
            norm_sq: f64,
            tail_bound: Option<f64>,
            normalizable: bool,
            #[serde(skip)]
            _marker: std::marker::PhantomData<&'a ()>,
        }
        View {
            family: self.family,
            parameter: [self.parameter.re, self.parameter.im],
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
            norm_sq: self.norm_sq,
            tail_bound: self.tail_bound.is_finite().then_some(self.tail_bound),
            normalizable: self.normalizable,
            _marker: std::marker::PhantomData,
        }
        .serialize(s)
    }
}

impl CoherentState {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `|c_n|^2` per level.
    pub fn populations(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm_sqr()).collect()
    }

    fn vacuum(family: Family, parameter: Complex64, module: &LoweringModule) -> Self {
        CoherentState {
            family,
            parameter,
            coeffs: vec![Complex64::new(1.0, 0.0)],
            norm_sq: 1.0,
            raw_norm_sq: 1.0,
            tail_bound: 0.0,
            normalizable: true,
            module_signature: module.signature(),
        }
    }
}

fn s_f64(module: &LoweringModule, m: usize) -> Result<f64> {
    match module.s_at(m) {
        Some(v) => Ok(rational::to_f64(&v)),
        None => Err(Error::NotExtendable { len: module.dim() }),
    }
}

fn mass(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

fn normalize(coeffs: &mut [Complex64]) -> f64 {
    let n = mass(coeffs);
    if n > 0.0 {
        let inv = 1.0 / n.sqrt();
        coeffs.iter_mut().for_each(|c| *c *= inv);
    }
    mass(coeffs)
}

/// First level from which the ladder never decreases, certified by a
/// Cauchy root bound on its forward difference.
fn monotone_from(module: &LoweringModule) -> Option<usize> {
    let p = module.ladder_polynomial()?;
    certified_sign_change(&p.forward_difference())
}

/// Level beyond which `p(m) >= 0`, or `None` if `p` is eventually negative.
fn certified_sign_change(p: &Poly) -> Option<usize> {
    if p.is_zero() {
        return Some(0);
    }
    if p.leading().is_negative() {
        return None;
    }
    Some(p.cauchy_bound().ceil() as usize)
}

/// Raw series `c_n = alpha^n / sqrt(s[1] ... s[n])` for `n < levels`.
pub fn ladder_series(module: &LoweringModule, alpha: Complex64, levels: usize) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(levels);
    let mut c = Complex64::new(1.0, 0.0);
    for n in 0..levels {
        if n > 0 {
            let s = s_f64(module, n)?;
            if s <= 0.0 {
                return Err(Error::PoleOnSpectrum { level: n });
            }
            c = c * alpha / s.sqrt();
        }
        out.push(c);
    }
    Ok(out)
}

/// Eigenstate of `N-` with eigenvalue `alpha`.
pub fn annihilation_cs(module: &LoweringModule, alpha: Complex64, policy: &CutoffPolicy) -> Result<CoherentState> {
    if alpha.is_zero() {
        return Ok(CoherentState::vacuum(Family::Annihilation, alpha, module));
    }
    let a2 = alpha.norm_sqr();
    let tol2 = policy.tol * policy.tol;
    let (mut coeffs, raw, tail) = if let Some(t) = module.termination() {
        let coeffs = ladder_series(module, alpha, t)?;
        let pops: Vec<f64> = coeffs.iter().map(|c| c.norm_sqr()).collect();
        let total: f64 = pops.iter().sum();
        let mut suffix = vec![0.0; t + 1];
        for n in (0..t).rev() {
            suffix[n] = suffix[n + 1] + pops[n];
        }
        let keep = (0..t)
            .find(|&n| n + 1 >= policy.min_levels.min(t) && suffix[n] <= tol2 * total)
            .ok_or(Error::PoleOnSpectrum { level: t })?;
        let kept_mass = total - suffix[keep + 1];
        (coeffs[..=keep].to_vec(), kept_mass, suffix[keep + 1] / kept_mass)
    } else {
        let m0 = monotone_from(module);
        let mut coeffs: Vec<Complex64> = Vec::new();
        let mut c = Complex64::new(1.0, 0.0);
        let mut partial = 0.0;
        let mut bound = f64::INFINITY;
        let mut n = 0;
        loop {
            coeffs.push(c);
            let t_n = c.norm_sqr();
            partial += t_n;
            let s_next = match module.s_at(n + 1) {
                Some(v) => rational::to_f64(&v),
                None => {
                    return Err(Error::CutoffExceeded { max_cutoff: n + 1, bound });
                }
            };
            let r = a2 / s_next;
            if let Some(m0) = m0 {
                if m0 <= n + 1 && r < 1.0 {
                    bound = t_n / (1.0 - r) / partial;
                    if bound <= tol2 && n + 1 >= policy.min_levels {
                        let tail = t_n * r / (1.0 - r) / partial;
                        break (coeffs, partial, tail);
                    }
                }
            }
            if n + 1 >= policy.max_cutoff {
                return Err(Error::CutoffExceeded { max_cutoff: policy.max_cutoff, bound });
            }
            c = c * alpha / s_next.sqrt();
            n += 1;
        }
    };
    let norm_sq = normalize(&mut coeffs);
    Ok(CoherentState {
        family: Family::Annihilation,
        parameter: alpha,
        coeffs,
        norm_sq,
        raw_norm_sq: raw,
        tail_bound: tail,
        normalizable: true,
        module_signature: module.signature(),
    })
}

/// The series `alpha^n / sqrt(s[1] ... s[n])` over every level of a finite
/// chain, normalized. It satisfies the eigenvalue equation except at the top
/// level; `tail_bound` holds the squared defect `|alpha c_top|^2`.
pub fn chain_series(module: &LoweringModule, alpha: Complex64) -> Result<CoherentState> {
    let levels = module.termination().unwrap_or(module.dim());
    let mut coeffs = ladder_series(module, alpha, levels)?;
    let raw = mass(&coeffs);
    let norm_sq = normalize(&mut coeffs);
    let defect = (alpha * coeffs[levels - 1]).norm_sqr();
    Ok(CoherentState {
        family: Family::Annihilation,
        parameter: alpha,
        coeffs,
        norm_sq,
        raw_norm_sq: raw,
        tail_bound: defect,
        normalizable: true,
        module_signature: module.signature(),
    })
}

/// Whether `exp(gamma N+)|0>` has a finite norm.
pub fn exponential_normalizable(module: &LoweringModule, gamma: Complex64) -> Option<bool> {
    if gamma.is_zero() || module.is_terminated() {
        return Some(true);
    }
    let p = module.ladder_polynomial()?;
    let g2 = gamma.norm_sqr();
    Some(match p.degree() {
        0 | 1 => true,
        2 => g2 * rational::to_f64(&p.leading()) < 1.0,
        _ => false,
    })
}

/// `exp(gamma N+)|0>`, with coefficients `gamma^n sqrt(s[1]...s[n]) / n!`.
pub fn exponential_cs(module: &LoweringModule, gamma: Complex64, policy: &CutoffPolicy) -> Result<CoherentState> {
    if gamma.is_zero() {
        return Ok(CoherentState::vacuum(Family::Exponential, gamma, module));
    }
    let step = |c: Complex64, n: usize| -> Result<Complex64> {
        Ok(c * gamma * s_f64(module, n + 1)?.sqrt() / (n as f64 + 1.0))
    };
    if let Some(t) = module.termination() {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for n in 0..t - 1 {
            coeffs.push(step(coeffs[n], n)?);
        }
        let raw = mass(&coeffs);
        let norm_sq = normalize(&mut coeffs);
        return Ok(CoherentState {
            family: Family::Exponential,
            parameter: gamma,
            coeffs,
            norm_sq,
            raw_norm_sq: raw,
            tail_bound: 0.0,
            normalizable: true,
            module_signature: module.signature(),
        });
    }
    let normalizable = exponential_normalizable(module, gamma).unwrap_or(false);
    if !normalizable {
        let levels = policy.min_levels.max(2);
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for n in 0..levels - 1 {
            match step(coeffs[n], n) {
                Ok(c) => coeffs.push(c),
                Err(_) => break,
            }
        }
        let raw = mass(&coeffs);
        return Ok(CoherentState {
            family: Family::Exponential,
            parameter: gamma,
            coeffs,
            norm_sq: raw,
            raw_norm_sq: raw,
            tail_bound: f64::INFINITY,
            normalizable: false,
            module_signature: module.signature(),
        });
    }

    // Ratio r(m) = |gamma|^2 s(m+1)/(m+1)^2; its monotonicity is read off
    // Q(m) = s(m+2)(m+1)^2 - s(m+1)(m+2)^2.
    let p = module
        .ladder_polynomial()
        .cloned()
        .ok_or(Error::NotExtendable { len: module.dim() })?;
    let one = Poly::from_ints(&[1, 1]);
    let two = Poly::from_ints(&[2, 1]);
    let q = &(&p.shift(&int(2)) * &(&one * &one)) - &(&p.shift(&int(1)) * &(&two * &two));
    let g2 = gamma.norm_sqr();
    let (m0, increasing) = if q.is_zero() {
        (0, false)
    } else {
        (q.cauchy_bound().ceil() as usize, q.leading().is_positive())
    };
    let limit = if p.degree() == 2 { g2 * rational::to_f64(&p.leading()) } else { 0.0 };
    let tol2 = policy.tol * policy.tol;
    let mut coeffs: Vec<Complex64> = Vec::new();
    let mut c = Complex64::new(1.0, 0.0);
    let mut partial = 0.0;
    let mut bound = f64::INFINITY;
    let mut n = 0;
    let (raw, tail) = loop {
        coeffs.push(c);
        let t_n = c.norm_sqr();
        partial += t_n;
        let s_next = s_f64(module, n + 1)?;
        let r = g2 * s_next / ((n + 1) as f64).powi(2);
        if n >= m0 {
            let sup = if increasing { r.max(limit) } else { r };
            if sup < 1.0 {
                bound = t_n / (1.0 - sup) / partial;
                if bound <= tol2 && n + 1 >= policy.min_levels {
                    break (partial, t_n * sup / (1.0 - sup) / partial);
                }
            }
        }
        if n + 1 >= policy.max_cutoff {
            return Err(Error::CutoffExceeded { max_cutoff: policy.max_cutoff, bound });
        }
        c = step(c, n)?;
        n += 1;
    };
    let norm_sq = normalize(&mut coeffs);
    Ok(CoherentState {
        family: Family::Exponential,
        parameter: gamma,
        coeffs,
        norm_sq,
        raw_norm_sq: raw,
        tail_bound: tail,
        normalizable: true,
        module_signature: module.signature(),
    })
}

fn displacement_generator(
    module: &LoweringModule,
    b: BSign,
    epsilon: &Rational,
    eta: Complex64,
) -> Result<(Tridiagonal, bool)> {
    let d = module.dim();
    let mut a = Tridiagonal::zeros(d);
    let mut unitary = true;
    for m in 1..d {
        let s = &module.s()[m];
        if s.is_zero() {
            return Err(Error::PoleOnSpectrum { level: m });
        }
        let root = rational::to_f64(s).sqrt();
        let x = module.weight(m);
        let num = int(b.value()) * (&x * &x - &x) + epsilon;
        let nbar = rational::to_f64(&num) / root;
        unitary &= (nbar - root).abs() <= 1e-12 * root.max(1.0);
        a.sub[m - 1] = eta * root;
        a.sup[m - 1] = -eta.conj() * nbar;
    }
    Ok((a, unitary))
}

/// `exp(eta N+ - eta* N̄-)|0>` on `dim` levels. The state is normalized and
/// flagged non-normalizable when `N̄-` is not the adjoint of `N+`, in which
/// case the generator is not anti-Hermitian.
pub fn displacement_cs(
    module: &LoweringModule,
    b: BSign,
    epsilon: Option<Rational>,
    eta: Complex64,
    dim: usize,
) -> Result<CoherentState> {
    let m = module.with_cutoff(dim)?;
    let eps = epsilon.unwrap_or_else(|| default_epsilon(&m, b));
    let (a, unitary) = displacement_generator(&m, b, &eps, eta)?;
    let mut v = vec![Complex64::new(0.0, 0.0); m.dim()];
    v[0] = Complex64::new(1.0, 0.0);
    let mut coeffs = expm_apply(&a, &v);
    let raw = mass(&coeffs);
    let tail = coeffs.last().map(|c| c.norm_sqr()).unwrap_or(0.0) / raw;
    if coeffs[0].norm() > 0.0 {
        let phase = coeffs[0].conj() / coeffs[0].norm();
        coeffs.iter_mut().for_each(|c| *c *= phase);
    }
    let norm_sq = normalize(&mut coeffs);
    Ok(CoherentState {
        family: Family::Displacement,
        parameter: eta,
        coeffs,
        norm_sq,
        raw_norm_sq: raw,
        tail_bound: tail,
        normalizable: unitary,
        module_signature: module.signature(),
    })
}

/// Squared norm of the unnormalized displacement vector at several cutoffs.
pub fn displacement_norm_profile(
    module: &LoweringModule,
    b: BSign,
    epsilon: Option<Rational>,
    eta: Complex64,
    dims: &[usize],
) -> Result<Vec<(usize, f64)>> {
    dims.iter()
        .map(|&d| {
            let st = displacement_cs(module, b, epsilon.clone(), eta, d)?;
            Ok((d, st.raw_norm_sq))
        })
        .collect()
}

/// `<x|y>`, conjugate-linear in `x`.
pub fn overlap(x: &CoherentState, y: &CoherentState) -> Result<Complex64> {
    if x.module_signature != y.module_signature {
        return Err(Error::ModuleMismatch);
    }
    Ok(x.coeffs.iter().zip(&y.coeffs).map(|(a, b)| a.conj() * b).sum())
}

/// `|<x|y>|^2 / (<x|x><y|y>)` for raw coefficient vectors.
pub fn fidelity(x: &[Complex64], y: &[Complex64]) -> f64 {
    let ip: Complex64 = x.iter().zip(y).map(|(a, b)| a.conj() * b).sum();
    ip.norm_sqr() / (mass(x) * mass(y))
}

/// `||N- psi - alpha psi|| / ||psi||` on the kept levels.
pub fn eigen_residual(module: &LoweringModule, state: &CoherentState) -> Result<f64> {
    let c = &state.coeffs;
    let mut acc = 0.0;
    for k in 0..c.len() {
        let lowered = if k + 1 < c.len() {
            c[k + 1] * s_f64(module, k + 1)?.sqrt()
        } else {
            Complex64::zero()
        };
        acc += (lowered - state.parameter * c[k]).norm_sqr();
    }
    Ok((acc / mass(c)).sqrt())
}

/// Gamma-form parameters of the ladder: `s(m) = lead * m * prod (m - r_i)`
/// gives `prod_{k<=n} s(k) = lead^n n! prod (1 - r_i)_n`. Returns `lead` and
/// the lower parameters `1 - r_i`.
pub fn gamma_form(module: &LoweringModule) -> Result<(f64, Vec<f64>)> {
    if module.is_terminated() {
        return Err(Error::NotGammaForm("finite module".into()));
    }
    let p = module
        .ladder_polynomial()
        .ok_or_else(|| Error::NotGammaForm("ladder is not polynomial".into()))?;
    let lead = p.leading();
    if !lead.is_positive() {
        return Err(Error::NotGammaForm("ladder has non-positive leading coefficient".into()));
    }
    let (roots, rest) = p.rational_roots();
    if rest.degree() > 0 {
        return Err(Error::NotGammaForm(format!("irrational roots in factor {rest}")));
    }
    let mut b = Vec::new();
    let mut zero_seen = false;
    for (r, mult) in roots {
        for _ in 0..mult {
            if r.is_zero() && !zero_seen {
                zero_seen = true;
                continue;
            }
            let bi = Rational::from_integer(1.into()) - &r;
            if !bi.is_positive() && rational::is_integer(&bi) {
                return Err(Error::NotGammaForm("ladder vanishes at a positive level".into()));
            }
            b.push(rational::to_f64(&bi));
        }
    }
    if !zero_seen {
        return Err(Error::NotGammaForm("ladder does not vanish at level 0".into()));
    }
    Ok((rational::to_f64(&lead), b))
}

/// Closed-form `sum_n |alpha|^(2n) / (s[1]...s[n])` as `0Fq(b; |alpha|^2/lead)`.
pub fn norm_hypergeometric(module: &LoweringModule, alpha: Complex64) -> Result<f64> {
    let (lead, b) = gamma_form(module)?;
    let z = Complex64::new(alpha.norm_sqr() / lead, 0.0);
    Ok(pfq(&[], &b, z, 1e-16)?.value.re)
}

/// Closed-form `sum_n (conj(beta) alpha)^n / (s[1]...s[n])`.
pub fn overlap_hypergeometric(module: &LoweringModule, beta: Complex64, alpha: Complex64) -> Result<Complex64> {
    let (lead, b) = gamma_form(module)?;
    Ok(pfq(&[], &b, beta.conj() * alpha / lead, 1e-16)?.value)
}

/// Squared norm of the unnormalized annihilation series, in closed form
/// when available and by direct summation otherwise.
pub fn norm_squared(module: &LoweringModule, alpha: Complex64) -> Result<f64> {
    match norm_hypergeometric(module, alpha) {
        Ok(v) => Ok(v),
        Err(Error::NotGammaForm(_)) => {
            Ok(annihilation_cs(module, alpha, &CutoffPolicy::default())?.raw_norm_sq)
        }
        Err(e) => Err(e),
    }
}
