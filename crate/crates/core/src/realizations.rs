//! Exact boson (and collective-spin) realizations of deformed algebras on
//! sectors of fixed conserved charges.
//!
//! Every generator is a monomial in creation and annihilation operators, so
//! on the occupation basis it moves a state by a fixed lattice step with a
//! coefficient whose square is rational. Matrices are stored as those
//! squared coefficients; floats are produced only on export.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num::{One, Signed, Zero};
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{CasimirPolynomial, StructurePolynomial};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{self, int, rat, Rational};
use crate::repspace::LoweringModule;

/// Entry `sqrt(sq)` at `(row, col)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub row: usize,
    pub col: usize,
    #[serde(with = "rational::serde_str")]
    pub sq: Rational,
}

/// Occupation basis of one charge sector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FockSector {
    pub modes: Vec<String>,
    pub mode_cutoffs: Vec<i64>,
    pub basis: Vec<Vec<i64>>,
    /// Declared sector charges (name, value).
    pub charges: Vec<(String, String)>,
    #[serde(skip)]
    index: HashMap<Vec<i64>, usize>,
}

impl FockSector {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn index_of(&self, state: &[i64]) -> Option<usize> {
        self.index.get(state).copied()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealizedTriple {
    pub recipe: String,
    pub sector: FockSector,
    /// Lattice step of `N+`.
    pub shift: Vec<i64>,
    pub n0: Vec<Rational>,
    pub nplus: Vec<Entry>,
    pub nminus: Vec<Entry>,
    /// Squared `N+` coefficient out of each state, ignoring the cutoff.
    pub raise_sq: Vec<Rational>,
    /// Squared `N-` coefficient out of each state, ignoring the cutoff.
    pub lower_sq: Vec<Rational>,
    /// States whose `N+` or `N-` image is cut off by the mode limits.
    pub boundary: Vec<bool>,
    /// Values of every conserved charge on each state.
    pub state_charges: Vec<Vec<Rational>>,
    pub charge_names: Vec<String>,
}

type StateFn<'a> = &'a dyn Fn(&[i64]) -> Rational;

struct Recipe<'a> {
    name: String,
    modes: Vec<&'a str>,
    cutoffs: Vec<i64>,
    shift: Vec<i64>,
    raise_sq: StateFn<'a>,
    n0: StateFn<'a>,
    charges: Vec<(&'a str, StateFn<'a>)>,
    /// Required charge values; `None` keeps every state.
    sector: Option<Vec<Rational>>,
}

fn lattice(cutoffs: &[i64]) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for &c in cutoffs {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=c).map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

fn build(recipe: Recipe<'_>) -> Result<RealizedTriple> {
    let mut basis = Vec::new();
    let mut state_charges = Vec::new();
    for x in lattice(&recipe.cutoffs) {
        let values: Vec<Rational> = recipe.charges.iter().map(|(_, f)| f(&x)).collect();
        if let Some(target) = &recipe.sector {
            if &values != target {
                continue;
            }
        }
        basis.push(x);
        state_charges.push(values);
    }
    if basis.is_empty() {
        return Err(Error::EmptySector);
    }
    let index: HashMap<Vec<i64>, usize> =
        basis.iter().enumerate().map(|(i, x)| (x.clone(), i)).collect();
    let n = basis.len();
    let mut nplus = Vec::new();
    let mut nminus = Vec::new();
    let mut raise_sq = Vec::with_capacity(n);
    let mut lower_sq = Vec::with_capacity(n);
    let mut boundary = vec![false; n];
    for (i, x) in basis.iter().enumerate() {
        let up: Vec<i64> = x.iter().zip(&recipe.shift).map(|(a, b)| a + b).collect();
        let down: Vec<i64> = x.iter().zip(&recipe.shift).map(|(a, b)| a - b).collect();
        let rs = (recipe.raise_sq)(x);
        let ls = (recipe.raise_sq)(&down);
        if !rs.is_zero() {
            match index.get(&up) {
                Some(&j) => nplus.push(Entry { row: j, col: i, sq: rs.clone() }),
                None => boundary[i] = true,
            }
        }
        if !ls.is_zero() {
            match index.get(&down) {
                Some(&j) => nminus.push(Entry { row: j, col: i, sq: ls.clone() }),
                None => boundary[i] = true,
            }
        }
        raise_sq.push(rs);
        lower_sq.push(ls);
    }
    let n0 = basis.iter().map(|x| (recipe.n0)(x)).collect();
    let charges = match &recipe.sector {
        Some(values) => recipe
            .charges
            .iter()
            .zip(values)
            .map(|((name, _), v)| (name.to_string(), rational::format(v)))
            .collect(),
        None => Vec::new(),
    };
    Ok(RealizedTriple {
        recipe: recipe.name,
        sector: FockSector {
            modes: recipe.modes.iter().map(|s| s.to_string()).collect(),
            mode_cutoffs: recipe.cutoffs,
            basis,
            charges,
            index,
        },
        shift: recipe.shift,
        n0,
        nplus,
        nminus,
        raise_sq,
        lower_sq,
        boundary,
        state_charges,
        charge_names: recipe.charges.iter().map(|(n, _)| n.to_string()).collect(),
    })
}

fn falling(x: i64, k: i64) -> Rational {
    int((0..k).map(|i| x - i).product())
}

fn rising(x: i64, k: i64) -> Rational {
    int((0..k).map(|i| x + i).product())
}

/// One oscillator: `K- = a^2/2`, `K+ = a†^2/2`, `K0 = (2n+1)/4`. Both parity
/// sectors are kept; they form the two components.
pub fn realize_su11_single(cutoff: i64) -> Result<RealizedTriple> {
    if cutoff < 4 {
        return Err(Error::InvalidCutoff { min: 4, got: cutoff.max(0) as usize });
    }
    let raise = |x: &[i64]| rat((x[0] + 1) * (x[0] + 2), 4);
    let n0 = |x: &[i64]| rat(2 * x[0] + 1, 4);
    let parity = |x: &[i64]| int(x[0].rem_euclid(2));
    build(Recipe {
        name: "su11-single".into(),
        modes: vec!["a"],
        cutoffs: vec![cutoff],
        shift: vec![2],
        raise_sq: &raise,
        n0: &n0,
        charges: vec![("parity", &parity)],
        sector: None,
    })
}

/// Two modes: `K+ = a† b†`, `K- = a b`, `K0 = (na + nb + 1)/2`, sector
/// `q = na - nb`.
pub fn realize_pair(cutoffs: [i64; 2], q: i64) -> Result<RealizedTriple> {
    let raise = |x: &[i64]| int((x[0] + 1) * (x[1] + 1));
    let n0 = |x: &[i64]| rat(x[0] + x[1] + 1, 2);
    let charge = |x: &[i64]| int(x[0] - x[1]);
    build(Recipe {
        name: format!("pair(q={q})"),
        modes: vec!["a", "b"],
        cutoffs: cutoffs.to_vec(),
        shift: vec![1, 1],
        raise_sq: &raise,
        n0: &n0,
        charges: vec![("q", &charge)],
        sector: Some(vec![int(q)]),
    })
}

fn trilinear_h0(x: &[i64]) -> Rational {
    rat(2 * x[0] + x[1] + x[2] + 1, 4)
}

/// Three modes: `J+ = a† b c`, `J- = a b† c†`, `J0 = (na - K0)/2` with
/// `K0 = (nb + nc + 1)/2`; sector `H0 = (na + K0)/2 = h0`, `Q = nb - nc = q`.
pub fn realize_trilinear(cutoffs: [i64; 3], h0: &Rational, q: i64) -> Result<RealizedTriple> {
    let raise = |x: &[i64]| int((x[0] + 1) * x[1] * x[2]);
    let n0 = |x: &[i64]| rat(2 * x[0] - x[1] - x[2] - 1, 4);
    let qf = |x: &[i64]| int(x[1] - x[2]);
    build(Recipe {
        name: format!("trilinear(h0={h0}, q={q})"),
        modes: vec!["a", "b", "c"],
        cutoffs: cutoffs.to_vec(),
        shift: vec![1, -1, -1],
        raise_sq: &raise,
        n0: &n0,
        charges: vec![("h0", &trilinear_h0), ("q", &qf)],
        sector: Some(vec![h0.clone(), int(q)]),
    })
}

/// All non-empty `(h0, q)` sectors of the three-mode lattice.
pub fn trilinear_sectors(cutoffs: [i64; 3]) -> Vec<(Rational, i64)> {
    let mut out: Vec<(Rational, i64)> = lattice(&cutoffs)
        .iter()
        .map(|x| (trilinear_h0(x), x[1] - x[2]))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// `H0 = (n0/m + n1/n)/2` of an occupation pair.
pub fn multiphoton_h0(m: i64, n: i64, n0: i64, n1: i64) -> Rational {
    (rat(n0, m) + rat(n1, n)) / int(2)
}

/// Two modes: `N+ = a0^m a1†^n`, `N0 = (n1/n - n0/m)/2`, sector
/// `H0 = (n0/m + n1/n)/2 = h0`.
pub fn realize_multiphoton(m: i64, n: i64, cutoffs: [i64; 2], h0: &Rational) -> Result<RealizedTriple> {
    if m < 1 || n < 1 || m + n > 6 {
        return Err(Error::InvalidParameter(format!(
            "multiphoton orders need m, n >= 1 and m + n <= 6, got ({m}, {n})"
        )));
    }
    let raise = move |x: &[i64]| falling(x[0], m) * rising(x[1] + 1, n);
    let n0 = move |x: &[i64]| (rat(x[1], n) - rat(x[0], m)) / int(2);
    let h = move |x: &[i64]| multiphoton_h0(m, n, x[0], x[1]);
    build(Recipe {
        name: format!("multiphoton({m},{n})"),
        modes: vec!["a0", "a1"],
        cutoffs: cutoffs.to_vec(),
        shift: vec![-m, n],
        raise_sq: &raise,
        n0: &n0,
        charges: vec![("h0", &h)],
        sector: Some(vec![h0.clone()]),
    })
}

/// `n_atoms` two-level atoms in the maximal collective multiplet
/// `j = n_atoms/2` coupled to one mode: `N+ = J+ a^k`, `N- = J- a†^k`,
/// `N0 = (Jz - n)/(k+1)`, sector `H0 = Jz + n/k = h0`. The spin coordinate
/// is `u = j + Jz`.
pub fn realize_dicke(n_atoms: i64, k: i64, cutoff: i64, h0: &Rational) -> Result<RealizedTriple> {
    if !(1..=6).contains(&n_atoms) || !(1..=3).contains(&k) {
        return Err(Error::InvalidParameter(format!(
            "dicke needs 1 <= n_atoms <= 6 and 1 <= k <= 3, got ({n_atoms}, {k})"
        )));
    }
    let two_j = n_atoms;
    let jz = move |u: i64| rat(2 * u - two_j, 2);
    let raise = move |x: &[i64]| int((two_j - x[0]) * (x[0] + 1)) * falling(x[1], k);
    let n0 = move |x: &[i64]| (jz(x[0]) - int(x[1])) / int(k + 1);
    let h = move |x: &[i64]| jz(x[0]) + rat(x[1], k);
    build(Recipe {
        name: format!("dicke({n_atoms},{k})"),
        modes: vec!["spin", "photon"],
        cutoffs: vec![two_j, cutoff],
        shift: vec![1, -k],
        raise_sq: &raise,
        n0: &n0,
        charges: vec![("h0", &h)],
        sector: Some(vec![h0.clone()]),
    })
}

/// Sum of terms `c * sqrt(r)` with rational `c` and non-negative rational `r`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SqrtSum {
    terms: Vec<(Rational, Rational)>,
}

fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let (p, q) = (r.numer(), r.denom());
    let (sp, sq) = (p.sqrt(), q.sqrt());
    (&sp * &sp == *p && &sq * &sq == *q).then(|| Rational::new(sp, sq))
}

impl SqrtSum {
    pub fn push(&mut self, coeff: Rational, radicand: Rational) {
        if !coeff.is_zero() && !radicand.is_zero() {
            self.terms.push((coeff, radicand));
        }
    }

    /// Terms grouped into linearly independent radicals.
    fn grouped(&self) -> Vec<(Rational, Rational)> {
        let mut groups: Vec<(Rational, Rational)> = Vec::new();
        'terms: for (c, r) in &self.terms {
            for (gc, gr) in groups.iter_mut() {
                if let Some(t) = rational_sqrt(&(r / &*gr)) {
                    *gc += c * t;
                    continue 'terms;
                }
            }
            groups.push((c.clone(), r.clone()));
        }
        groups.retain(|(c, _)| !c.is_zero());
        groups
    }

    pub fn is_zero(&self) -> bool {
        self.grouped().is_empty()
    }

    /// The exact value when it is rational.
    pub fn rational_value(&self) -> Option<Rational> {
        let groups = self.grouped();
        let mut acc = Rational::zero();
        for (c, r) in groups {
            acc += c * rational_sqrt(&r)?;
        }
        Some(acc)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Vacuum {
    #[serde(with = "rational::serde_str")]
    pub n0: Rational,
    pub multiplicity: usize,
    /// Basis index when the vacuum is a state of the sector.
    pub state: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConservationReport {
    pub charges_conserved: bool,
    pub weight_step_exact: bool,
}

impl ConservationReport {
    pub fn ok(&self) -> bool {
        self.charges_conserved && self.weight_step_exact
    }
}

impl RealizedTriple {
    pub fn dim(&self) -> usize {
        self.sector.len()
    }

    fn step(&self, i: usize, sign: i64) -> Option<usize> {
        let y: Vec<i64> = self.sector.basis[i]
            .iter()
            .zip(&self.shift)
            .map(|(a, b)| a + sign * b)
            .collect();
        self.sector.index_of(&y)
    }

    /// Chains connected by `N+`, each ordered by increasing `N0`.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.dim()];
        let mut out = Vec::new();
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|a, b| self.n0[*a].cmp(&self.n0[*b]).then(a.cmp(b)));
        for start in order {
            if seen[start] {
                continue;
            }
            let mut bottom = start;
            while let Some(j) = self.step(bottom, -1) {
                bottom = j;
            }
            let mut chain = vec![bottom];
            seen[bottom] = true;
            let mut cur = bottom;
            while let Some(j) = self.step(cur, 1) {
                chain.push(j);
                seen[j] = true;
                cur = j;
            }
            out.push(chain);
        }
        out
    }

    /// Sub-triple on the given basis states.
    pub fn restrict(&self, states: &[usize]) -> Result<RealizedTriple> {
        if states.is_empty() {
            return Err(Error::EmptySector);
        }
        let remap: HashMap<usize, usize> = states.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let pick = |entries: &[Entry]| -> Vec<Entry> {
            entries
                .iter()
                .filter_map(|e| {
                    Some(Entry { row: *remap.get(&e.row)?, col: *remap.get(&e.col)?, sq: e.sq.clone() })
                })
                .collect()
        };
        let basis: Vec<Vec<i64>> = states.iter().map(|&i| self.sector.basis[i].clone()).collect();
        let index = basis.iter().enumerate().map(|(k, x)| (x.clone(), k)).collect();
        let nplus = pick(&self.nplus);
        let nminus = pick(&self.nminus);
        let mut boundary: Vec<bool> = states.iter().map(|&i| self.boundary[i]).collect();
        for (k, &i) in states.iter().enumerate() {
            let up_lost = !self.raise_sq[i].is_zero() && !nplus.iter().any(|e| e.col == k);
            let down_lost = !self.lower_sq[i].is_zero() && !nminus.iter().any(|e| e.col == k);
            boundary[k] |= up_lost || down_lost;
        }
        Ok(RealizedTriple {
            recipe: self.recipe.clone(),
            sector: FockSector {
                modes: self.sector.modes.clone(),
                mode_cutoffs: self.sector.mode_cutoffs.clone(),
                basis,
                charges: self.sector.charges.clone(),
                index,
            },
            shift: self.shift.clone(),
            n0: states.iter().map(|&i| self.n0[i].clone()).collect(),
            nplus,
            nminus,
            raise_sq: states.iter().map(|&i| self.raise_sq[i].clone()).collect(),
            lower_sq: states.iter().map(|&i| self.lower_sq[i].clone()).collect(),
            boundary,
            state_charges: states.iter().map(|&i| self.state_charges[i].clone()).collect(),
            charge_names: self.charge_names.clone(),
        })
    }

    /// Dense float matrices `(N0, N+, N-)`.
    pub fn dense(&self) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        let d = self.dim();
        let n0 = DMatrix::from_fn(d, d, |i, j| if i == j { rational::to_f64(&self.n0[i]) } else { 0.0 });
        let fill = |entries: &[Entry]| {
            let mut m = DMatrix::zeros(d, d);
            for e in entries {
                m[(e.row, e.col)] = rational::to_f64(&e.sq).sqrt();
            }
            m
        };
        (n0, fill(&self.nplus), fill(&self.nminus))
    }

    /// Exact `[N+, N-]` of the (cut) matrices; errors on the first
    /// off-diagonal entry that does not cancel.
    pub fn commutator_diagonal(&self) -> Result<Vec<Rational>> {
        let by_col = |entries: &[Entry]| {
            let mut map: HashMap<usize, Vec<(usize, Rational)>> = HashMap::new();
            for e in entries {
                map.entry(e.col).or_default().push((e.row, e.sq.clone()));
            }
            map
        };
        let plus = by_col(&self.nplus);
        let minus = by_col(&self.nminus);
        let mut sums: HashMap<(usize, usize), SqrtSum> = HashMap::new();
        for (first, second, sign) in [(&minus, &plus, 1), (&plus, &minus, -1)] {
            for (&j, outs) in first {
                for (k, s1) in outs {
                    if let Some(next) = second.get(k) {
                        for (i, s2) in next {
                            sums.entry((*i, j)).or_default().push(int(sign), s1 * s2);
                        }
                    }
                }
            }
        }
        let mut keys: Vec<&(usize, usize)> = sums.keys().collect();
        keys.sort();
        let mut diag = vec![Rational::zero(); self.dim()];
        for key in keys {
            let sum = &sums[key];
            let (i, j) = *key;
            if i != j {
                if !sum.is_zero() {
                    return Err(Error::NotDiagonal { row: i, col: j });
                }
            } else {
                diag[i] = sum
                    .rational_value()
                    .ok_or_else(|| Error::NoPolynomialFit(format!("irrational diagonal at state {i}")))?;
            }
        }
        Ok(diag)
    }

    /// Structure polynomial fitted exactly to the commutator diagonal on
    /// interior states, as a function of the `N0` eigenvalue. The lowest
    /// degree confirmed by a spare point wins; small sectors fall back to
    /// interpolation through every point.
    pub fn closure_fit(&self) -> Result<StructurePolynomial> {
        let diag = self.commutator_diagonal()?;
        let points: Vec<(Rational, Rational)> = (0..self.dim())
            .filter(|&i| !self.boundary[i])
            .map(|i| (self.n0[i].clone(), diag[i].clone()))
            .collect();
        if let Some(p) = Poly::fit(&points, 8) {
            return Ok(StructurePolynomial(p));
        }
        // Too few points to confirm a degree: exact interpolation through all.
        let mut nodes = points.clone();
        nodes.sort();
        nodes.dedup();
        let distinct = nodes.windows(2).all(|w| w[0].0 != w[1].0);
        if distinct && !nodes.is_empty() && nodes.len() <= 9 {
            return Ok(StructurePolynomial(Poly::interpolate(&nodes)));
        }
        Err(Error::NoPolynomialFit(format!("{} interior points", points.len())))
    }

    /// Commutator diagonal from the uncut coefficients: `lower_sq - raise_sq`.
    pub fn physical_commutator_diagonal(&self) -> Vec<Rational> {
        self.lower_sq.iter().zip(&self.raise_sq).map(|(l, r)| l - r).collect()
    }

    /// `N+ N-` eigenvalue (the squared lowering coefficient) as a polynomial
    /// in `N0`.
    pub fn lowering_polynomial(&self) -> Result<Poly> {
        let points: Vec<(Rational, Rational)> = (0..self.dim())
            .map(|i| (self.n0[i].clone(), self.lower_sq[i].clone()))
            .collect();
        Poly::fit(&points, 9)
            .ok_or_else(|| Error::NoPolynomialFit(format!("{} sector points", points.len())))
    }

    /// States annihilated by `N-` (the exact kernel, ignoring the cutoff),
    /// together with the rational zeros of the lowering polynomial. Zeros
    /// with no sector state are kept as formal vacua with `state = None`.
    pub fn find_vacua(&self) -> Vec<Vacuum> {
        let kernel: Vec<usize> = (0..self.dim()).filter(|&i| self.lower_sq[i].is_zero()).collect();
        let mut out: Vec<Vacuum> = Vec::new();
        if let Ok(p) = self.lowering_polynomial() {
            if !p.is_zero() {
                for (r, mult) in p.rational_roots().0 {
                    let state = kernel.iter().copied().find(|&i| self.n0[i] == r);
                    out.push(Vacuum { n0: r, multiplicity: mult, state });
                }
            }
        }
        for &i in &kernel {
            if !out.iter().any(|v| v.state == Some(i)) {
                match out.iter_mut().find(|v| v.n0 == self.n0[i] && v.state.is_none()) {
                    Some(v) => v.state = Some(i),
                    None => out.push(Vacuum { n0: self.n0[i].clone(), multiplicity: 1, state: Some(i) }),
                }
            }
        }
        out.sort_by(|a, b| a.n0.cmp(&b.n0).then(a.state.cmp(&b.state)));
        out
    }

    /// States along the `N+` orbit of `vacuum`, stopping at termination or
    /// at the cutoff.
    pub fn orbit(&self, vacuum: usize) -> Vec<usize> {
        let mut out = vec![vacuum];
        let mut cur = vacuum;
        while !self.raise_sq[cur].is_zero() {
            match self.step(cur, 1) {
                Some(j) => {
                    out.push(j);
                    cur = j;
                }
                None => break,
            }
        }
        out
    }

    /// Lowest-weight module read off the `N+` orbit of a vacuum state,
    /// truncated to `levels` when given.
    pub fn sector_to_module(&self, vacuum: usize, levels: Option<usize>) -> Result<LoweringModule> {
        if !self.lower_sq[vacuum].is_zero() {
            return Err(Error::NotAVacuum(vacuum));
        }
        let orbit = self.orbit(vacuum);
        let last = *orbit.last().unwrap();
        let terminated = self.raise_sq[last].is_zero();
        let mut table: Vec<Rational> = vec![Rational::zero()];
        for w in orbit.windows(2) {
            table.push(self.raise_sq[w[0]].clone());
        }
        if terminated {
            table.push(Rational::zero());
        }
        if let Some(l) = levels {
            if l > table.len() && !terminated {
                return Err(Error::OrbitLeavesCutoff { len: orbit.len(), wanted: l });
            }
            table.truncate(l.max(1));
        }
        LoweringModule::from_ladder(&table, self.n0[vacuum].clone())
    }

    /// Annihilation-eigenstate series built directly from the sector's
    /// `N+` entries along the orbit of `vacuum`.
    pub fn sector_series(&self, vacuum: usize, alpha: Complex64, levels: usize) -> Result<Vec<Complex64>> {
        let orbit = self.orbit(vacuum);
        if levels > orbit.len() {
            return Err(Error::OrbitLeavesCutoff { len: orbit.len(), wanted: levels });
        }
        let mut out = vec![Complex64::new(1.0, 0.0)];
        for k in 1..levels {
            let (from, to) = (orbit[k - 1], orbit[k]);
            let e = self
                .nplus
                .iter()
                .find(|e| e.col == from && e.row == to)
                .ok_or(Error::NotMonomial(from))?;
            let amp = rational::to_f64(&e.sq).sqrt();
            out.push(out[k - 1] * alpha / amp);
        }
        Ok(out)
    }

    /// `C = N- N+ + g(N0)` on each state, from uncut coefficients.
    pub fn casimir_diagonal(&self, g: &CasimirPolynomial) -> Vec<Rational> {
        (0..self.dim()).map(|i| &self.raise_sq[i] + g.eval(&self.n0[i])).collect()
    }

    /// Every generator entry joins states of equal charges, and `N+` raises
    /// `N0` by exactly one.
    pub fn conservation(&self) -> ConservationReport {
        let same = |e: &Entry| self.state_charges[e.row] == self.state_charges[e.col];
        let charges_conserved = self.nplus.iter().chain(&self.nminus).all(same);
        let one = Rational::one();
        let weight_step_exact = self.nplus.iter().all(|e| &self.n0[e.row] - &self.n0[e.col] == one)
            && self.nminus.iter().all(|e| &self.n0[e.col] - &self.n0[e.row] == one);
        ConservationReport { charges_conserved, weight_step_exact }
    }

    /// Coordinate-format rows `(row, col, s)` of `N+`.
    pub fn nplus_csv(&self) -> String {
        let mut out = String::from("row,col,s\n");
        for e in &self.nplus {
            out.push_str(&format!("{},{},{}\n", e.row, e.col, rational::format(&e.sq)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::telescope_g;

    #[test]
    fn single_oscillator_values() {
        let t = realize_su11_single(10).unwrap();
        let vac = t.sector.index_of(&[0]).unwrap();
        assert_eq!(t.n0[vac], rat(1, 4));
        let f = t.closure_fit().unwrap();
        assert_eq!(f, StructurePolynomial::su11());
        let g = telescope_g(&f).unwrap();
        assert_eq!(t.casimir_diagonal(&g)[vac], rat(3, 16));
        let vacua = t.find_vacua();
        let states: Vec<_> = vacua.iter().map(|v| v.state.map(|i| t.sector.basis[i][0])).collect();
        assert_eq!(states, vec![Some(0), Some(1)]);
        assert_eq!(t.components().len(), 2);
    }

    #[test]
    fn single_oscillator_cutoff() {
        assert!(matches!(realize_su11_single(3), Err(Error::InvalidCutoff { .. })));
    }

    #[test]
    fn pair_sector_is_bg() {
        let q = 2;
        let t = realize_pair([20, 20], q).unwrap();
        let vacua = t.find_vacua();
        let physical: Vec<_> = vacua.iter().filter_map(|v| v.state).collect();
        assert_eq!(physical.len(), 1);
        let vac = physical[0];
        assert_eq!(t.sector.basis[vac], vec![q, 0]);
        let module = t.sector_to_module(vac, Some(10)).unwrap();
        for m in 1..10 {
            assert_eq!(module.s()[m], int((m as i64) * (m as i64 + q)));
        }
        let g = telescope_g(&StructurePolynomial::su11()).unwrap();
        let c = rat(1 - q * q, 4);
        assert!(t.casimir_diagonal(&g).iter().all(|v| *v == c));
    }

    #[test]
    fn trilinear_identities() {
        let h0 = rat(21, 4);
        for q in [-2, 0, 2] {
            let t = realize_trilinear([12, 12, 12], &h0, q).unwrap();
            let f = StructurePolynomial::trilinear(&h0, &int(q));
            for (i, x) in t.sector.basis.iter().enumerate() {
                let (na, nb, nc) = (x[0], x[1], x[2]);
                let diag = int(na * (nb + 1) * (nc + 1) - (na + 1) * nb * nc);
                assert_eq!(t.physical_commutator_diagonal()[i], diag);
                assert_eq!(f.eval(&t.n0[i]), diag);
            }
            assert_eq!(t.closure_fit().unwrap(), f);
            let count: usize = t.find_vacua().iter().map(|v| v.multiplicity).sum();
            assert_eq!(count, 3);
            assert!(t.conservation().ok());
        }
    }

    #[test]
    fn trilinear_vacuum_positions() {
        let h0 = rat(11, 2);
        let t = realize_trilinear([12, 12, 12], &h0, 1).unwrap();
        let roots: Vec<Rational> = t.find_vacua().iter().map(|v| v.n0.clone()).collect();
        assert_eq!(roots, vec![-h0.clone(), h0.clone(), &h0 + int(1)]);
    }

    #[test]
    fn multiphoton_degree_law() {
        for (m, n) in [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3)] {
            let h0 = multiphoton_h0(m, n, 18, 0);
            let t = realize_multiphoton(m, n, [24, 24], &h0).unwrap();
            let f = t.closure_fit().unwrap();
            assert_eq!(f.degree(), (m + n - 1) as usize, "({m},{n})");
            assert!(t.conservation().ok());
        }
        let t = realize_multiphoton(1, 1, [10, 10], &multiphoton_h0(1, 1, 6, 0)).unwrap();
        assert_eq!(t.closure_fit().unwrap(), StructurePolynomial::su2());
    }

    #[test]
    fn higgs_type_has_four_vacua() {
        let h0 = multiphoton_h0(2, 2, 20, 0);
        let t = realize_multiphoton(2, 2, [24, 24], &h0).unwrap();
        let count: usize = t.find_vacua().iter().map(|v| v.multiplicity).sum();
        assert_eq!(count, 4);
    }

    #[test]
    fn dicke_closure() {
        let t = realize_dicke(1, 1, 10, &rat(7, 2)).unwrap();
        assert_eq!(t.dim(), 2);
        assert!(t.closure_fit().unwrap().degree() <= 1);
        let t = realize_dicke(2, 1, 10, &int(4)).unwrap();
        assert!(t.closure_fit().unwrap().degree() <= 2);
        let t = realize_dicke(4, 1, 10, &int(6)).unwrap();
        assert_eq!(t.dim(), 5);
        assert_eq!(t.closure_fit().unwrap().degree(), 2);
        assert!(t.conservation().ok());
        let t = realize_dicke(4, 2, 20, &int(6)).unwrap();
        assert!(t.closure_fit().unwrap().degree() <= 3);
        assert!(matches!(realize_dicke(7, 1, 4, &int(1)), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn corrupted_matrix_is_not_diagonal() {
        let mut t = realize_pair([8, 8], 0).unwrap();
        let e = t.nplus[0].clone();
        t.nplus.push(Entry { row: (e.row + 1) % t.dim(), col: e.col, sq: int(3) });
        assert!(matches!(t.closure_fit(), Err(Error::NotDiagonal { .. })));
    }

    #[test]
    fn empty_sector() {
        assert_eq!(realize_pair([3, 3], 9).unwrap_err(), Error::EmptySector);
    }

    #[test]
    fn orbit_limits() {
        let t = realize_pair([5, 5], 0).unwrap();
        let vac = t.sector.index_of(&[0, 0]).unwrap();
        assert!(matches!(
            t.sector_to_module(vac, Some(10)),
            Err(Error::OrbitLeavesCutoff { len: 6, wanted: 10 })
        ));
        let nonvac = t.sector.index_of(&[1, 1]).unwrap();
        assert_eq!(t.sector_to_module(nonvac, None), Err(Error::NotAVacuum(nonvac)));
        let trivial = realize_trilinear([3, 3, 3], &rat(1, 4), 0).unwrap();
        let m = trivial.sector_to_module(0, None).unwrap();
        assert_eq!(m.dim(), 1);
    }

    #[test]
    fn sqrt_sums() {
        let mut s = SqrtSum::default();
        s.push(int(1), int(8));
        s.push(int(-2), int(2));
        assert!(s.is_zero());
        let mut s = SqrtSum::default();
        s.push(int(1), int(2));
        s.push(int(-1), int(3));
        assert!(!s.is_zero());
        assert_eq!(s.rational_value(), None);
        let mut s = SqrtSum::default();
        s.push(int(3), rat(9, 4));
        assert_eq!(s.rational_value(), Some(rat(9, 2)));
    }
}
