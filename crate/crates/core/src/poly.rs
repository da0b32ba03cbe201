//! Dense univariate polynomials with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::{Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::{self, Rational};

/// Coefficients are stored lowest degree first; trailing zeros are trimmed,
/// so the zero polynomial has an empty coefficient list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Poly::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| rational::int(c)).collect())
    }

    /// Product of linear factors `(x - r)` over `roots`, times `lead`.
    pub fn from_roots(lead: Rational, roots: &[Rational]) -> Self {
        roots.iter().fold(Poly::constant(lead), |p, r| {
            &p * &Poly::new(vec![-r.clone(), Rational::one()])
        })
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rational::to_f64(c);
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `p(a*x + b)`.
    pub fn compose_affine(&self, a: &Rational, b: &Rational) -> Self {
        let lin = Poly::new(vec![b.clone(), a.clone()]);
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &Poly::constant(c.clone());
        }
        acc
    }

    /// `p(x + c)`.
    pub fn shift(&self, c: &Rational) -> Self {
        self.compose_affine(&Rational::one(), c)
    }

    /// `p(x) - p(x - 1)`.
    pub fn backward_difference(&self) -> Self {
        self - &self.shift(&-Rational::one())
    }

    /// `p(x + 1) - p(x)`.
    pub fn forward_difference(&self) -> Self {
        &self.shift(&Rational::one()) - self
    }

    /// Quotient and remainder of division by `x - r`.
    pub fn deflate(&self, r: &Rational) -> (Poly, Rational) {
        if self.is_zero() {
            return (Poly::zero(), Rational::zero());
        }
        let n = self.coeffs.len();
        let mut q = vec![Rational::zero(); n - 1];
        let mut carry = Rational::zero();
        for k in (0..n).rev() {
            let v = &self.coeffs[k] + &carry * r;
            if k == 0 {
                return (Poly::new(q), v);
            }
            q[k - 1] = v.clone();
            carry = v;
        }
        unreachable!()
    }

    /// Cauchy bound: every complex root has modulus below the returned value.
    pub fn cauchy_bound(&self) -> f64 {
        if self.degree() == 0 {
            return 0.0;
        }
        let lead = rational::to_f64(&self.leading()).abs();
        let m = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| rational::to_f64(c).abs() / lead)
            .fold(0.0, f64::max);
        1.0 + m
    }

    /// All rational roots with multiplicities, in increasing order, and the
    /// cofactor left after removing them.
    pub fn rational_roots(&self) -> (Vec<(Rational, usize)>, Poly) {
        let mut roots: Vec<(Rational, usize)> = Vec::new();
        let mut p = self.clone();
        if p.is_zero() {
            return (roots, p);
        }
        let mut zero_mult = 0;
        while p.degree() > 0 && p.coeff(0).is_zero() {
            p = p.deflate(&Rational::zero()).0;
            zero_mult += 1;
        }
        if zero_mult > 0 {
            roots.push((Rational::zero(), zero_mult));
        }
        if p.degree() == 0 {
            return (roots, p);
        }
        let ints = integer_coefficients(&p);
        let (Some(a0), Some(an)) = (
            divisors(&ints[0].abs()),
            divisors(&ints.last().unwrap().abs()),
        ) else {
            return (roots, p);
        };
        let mut candidates: Vec<Rational> = Vec::new();
        for num in &a0 {
            for den in &an {
                let r = Rational::new(num.clone(), den.clone());
                candidates.push(r.clone());
                candidates.push(-r);
            }
        }
        candidates.sort();
        candidates.dedup();
        for r in candidates {
            let mut mult = 0;
            loop {
                if p.degree() == 0 {
                    break;
                }
                let (q, rem) = p.deflate(&r);
                if !rem.is_zero() {
                    break;
                }
                p = q;
                mult += 1;
            }
            if mult > 0 {
                roots.push((r, mult));
            }
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        (roots, p)
    }

    /// Newton divided-difference interpolation through distinct nodes.
    pub fn interpolate(points: &[(Rational, Rational)]) -> Poly {
        let n = points.len();
        if n == 0 {
            return Poly::zero();
        }
        let xs: Vec<Rational> = points.iter().map(|p| p.0.clone()).collect();
        let mut dd: Vec<Rational> = points.iter().map(|p| p.1.clone()).collect();
        for level in 1..n {
            for i in (level..n).rev() {
                dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
            }
        }
        let mut acc = Poly::constant(dd[n - 1].clone());
        for i in (0..n - 1).rev() {
            let factor = Poly::new(vec![-xs[i].clone(), Rational::one()]);
            acc = &(&acc * &factor) + &Poly::constant(dd[i].clone());
        }
        acc
    }

    /// Lowest-degree polynomial through `points` (distinct nodes), accepted
    /// only when it is confirmed by at least one node beyond those used to
    /// build it and its degree is at most `max_degree`.
    pub fn fit(points: &[(Rational, Rational)], max_degree: usize) -> Option<Poly> {
        let mut sorted = points.to_vec();
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        sorted.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
        if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
            return None;
        }
        let n = sorted.len();
        for deg in 0..=max_degree {
            if deg + 2 > n {
                break;
            }
            let p = Poly::interpolate(&sorted[..=deg]);
            if sorted[deg + 1..].iter().all(|(x, y)| &p.eval(x) == y) {
                return Some(p);
            }
        }
        None
    }
}

fn integer_coefficients(p: &Poly) -> Vec<BigInt> {
    let lcm = p
        .coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    p.coeffs
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect()
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.to_u64()?;
    if n == 0 {
        return None;
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d: u64 = 1;
    while d.saturating_mul(d) <= n {
        if d > 10_000_000 {
            return None;
        }
        if n % d == 0 {
            small.push(BigInt::from(d));
            if d != n / d {
                large.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Some(small)
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            let mag = c.abs();
            if first {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = k == 0 || !mag.is_one();
            if show_coeff {
                if rational::is_integer(&mag) {
                    write!(f, "{}", mag.numer())?;
                } else {
                    write!(f, "({})", mag)?;
                }
            }
            match k {
                0 => {}
                1 => write!(f, "{}x", if show_coeff { "*" } else { "" })?,
                _ => write!(f, "{}x^{}", if show_coeff { "*" } else { "" }, k)?,
            }
        }
        Ok(())
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        rational::serde_vec_str::serialize(&self.coeffs, s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        rational::serde_vec_str::deserialize(d).map(Poly::new)
    }
}
