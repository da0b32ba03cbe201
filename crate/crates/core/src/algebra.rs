//! Structure polynomials `f` with `[N+, N-] = f(N0)` and their telescoped
//! Casimir functions `g` with `g(x) - g(x-1) = f(x)`, `g(0) = 0`.

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{int, rat, Rational};

pub const DEFAULT_DEGREE_LIMIT: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StructurePolynomial(pub Poly);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CasimirPolynomial(pub Poly);

impl StructurePolynomial {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        StructurePolynomial(Poly::new(coeffs))
    }

    pub fn degree(&self) -> usize {
        self.0.degree()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.eval(x)
    }

    /// `f(x) = -2x`, the su(1,1) commutator.
    pub fn su11() -> Self {
        StructurePolynomial(Poly::from_ints(&[0, -2]))
    }

    /// `f(x) = 2x`, the su(2) commutator.
    pub fn su2() -> Self {
        StructurePolynomial(Poly::from_ints(&[0, 2]))
    }

    /// `f(x) = sign*2b*x + a*x^2 + c`.
    pub fn quadratic(a: Rational, b: Rational, c: Rational, sign: i64) -> Self {
        let lin = int(2 * sign.signum()) * b;
        StructurePolynomial::new(vec![c, lin, a])
    }

    /// `f(x) = 2c*x + 4h*x^3`.
    pub fn higgs(c: Rational, h: Rational) -> Self {
        StructurePolynomial::new(vec![Rational::zero(), int(2) * c, Rational::zero(), int(4) * h])
    }

    /// Sector reduction of the three-boson algebra:
    /// `f(j) = -3j^2 + (2h0 - 1)j + h0(h0 + 1) - (1 - q^2)/4`.
    pub fn trilinear(h0: &Rational, q: &Rational) -> Self {
        let one = Rational::one();
        let c0 = h0 * (h0 + &one) - (&one - q * q) * rat(1, 4);
        let c1 = int(2) * h0 - &one;
        StructurePolynomial::new(vec![c0, c1, int(-3)])
    }
}

impl CasimirPolynomial {
    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.eval(x)
    }

    pub fn degree(&self) -> usize {
        self.0.degree()
    }
}

pub fn telescope_g(f: &StructurePolynomial) -> Result<CasimirPolynomial> {
    telescope_g_with_limit(f, DEFAULT_DEGREE_LIMIT)
}

/// Solves `g(x) - g(x-1) = f(x)` with `g(0) = 0` by back substitution on the
/// monomial basis, where `x^k - (x-1)^k = sum_{i<k} C(k,i) (-1)^(k-i+1) x^i`.
pub fn telescope_g_with_limit(f: &StructurePolynomial, limit: usize) -> Result<CasimirPolynomial> {
    let d = f.degree();
    if d > limit {
        return Err(Error::DegreeLimit { degree: d, limit });
    }
    if f.0.is_zero() {
        return Ok(CasimirPolynomial(Poly::zero()));
    }
    let binom = binomials(d + 1);
    let c = |k: usize, i: usize| -> Rational {
        let sign = if (k - i) % 2 == 1 { 1 } else { -1 };
        Rational::from_integer((sign * binom[k][i]).into())
    };
    let mut g = vec![Rational::zero(); d + 2];
    for i in (0..=d).rev() {
        let mut rhs = f.0.coeff(i);
        for k in i + 2..=d + 1 {
            rhs -= &g[k] * c(k, i);
        }
        g[i + 1] = rhs / int(i as i64 + 1);
    }
    Ok(CasimirPolynomial(Poly::new(g)))
}

fn binomials(n: usize) -> Vec<Vec<i64>> {
    let mut b = vec![vec![0i64; n + 1]; n + 1];
    for k in 0..=n {
        b[k][0] = 1;
        for i in 1..=k {
            b[k][i] = b[k - 1][i - 1] + if i < k { b[k - 1][i] } else { 0 };
        }
    }
    b
}

/// `C(j) = g(j - 1)`.
pub fn casimir_value(g: &CasimirPolynomial, j: &Rational) -> Rational {
    g.eval(&(j - Rational::one()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x_poly(coeffs: &[Rational]) -> Poly {
        Poly::new(coeffs.to_vec())
    }

    #[test]
    fn su11_casimir() {
        let g = telescope_g(&StructurePolynomial::su11()).unwrap();
        assert_eq!(g.0, Poly::from_ints(&[0, -1, -1]));
    }

    #[test]
    fn zero_structure() {
        let g = telescope_g(&StructurePolynomial::new(vec![])).unwrap();
        assert!(g.0.is_zero());
    }

    #[test]
    fn higgs_casimir() {
        let (c, h) = (rat(3, 2), rat(-2, 5));
        let g = telescope_g(&StructurePolynomial::higgs(c.clone(), h.clone())).unwrap();
        // c x(x+1) + h x^2 (x+1)^2
        let x1 = Poly::from_ints(&[0, 1, 1]);
        let expected = &x1.scale(&c) + &(&x1 * &x1).scale(&h);
        assert_eq!(g.0, expected);
    }

    #[test]
    fn general_quadratic_casimir() {
        for sign in [1, -1] {
            let (a, b, c) = (rat(2, 3), rat(5, 4), rat(-1, 7));
            let f = StructurePolynomial::quadratic(a.clone(), b.clone(), c.clone(), sign);
            let g = telescope_g(&f).unwrap();
            // (a/3) x(x+1)(x+1/2) + x(c + sign*b*(x+1))
            let cubic = &(&Poly::from_ints(&[0, 1]) * &Poly::from_ints(&[1, 1]))
                * &x_poly(&[rat(1, 2), int(1)]);
            let sb = int(sign) * &b;
            let lin = x_poly(&[&c + &sb, sb]);
            let expected = &cubic.scale(&(a / int(3))) + &(&Poly::x() * &lin);
            assert_eq!(g.0, expected);
        }
    }

    #[test]
    fn degree_limit_is_enforced() {
        let f = StructurePolynomial(Poly::monomial(int(1), 9));
        assert_eq!(
            telescope_g(&f),
            Err(Error::DegreeLimit { degree: 9, limit: 8 })
        );
        assert!(telescope_g_with_limit(&f, 9).is_ok());
    }

    #[test]
    fn casimir_values() {
        let g = telescope_g(&StructurePolynomial::su11()).unwrap();
        let phi = rat(-3, 2);
        assert_eq!(casimir_value(&g, &-phi.clone()), -&phi * (&phi + int(1)));
        let zero = CasimirPolynomial(Poly::zero());
        assert_eq!(casimir_value(&zero, &rat(7, 3)), int(0));
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(StructurePolynomial::su11().eval(&rat(1, 4)), rat(-1, 2));
        let g = telescope_g(&StructurePolynomial::su11()).unwrap();
        assert_eq!(g.eval(&rat(1, 4)), rat(-5, 16));
        let g2 = telescope_g(&StructurePolynomial::higgs(int(1), int(0))).unwrap();
        assert_eq!(g2.eval(&int(2)), int(6));
    }

    #[test]
    fn trilinear_coefficients() {
        let f = StructurePolynomial::trilinear(&rat(21, 4), &int(1));
        assert_eq!(f.0.coeff(2), int(-3));
        assert_eq!(f.0.coeff(1), rat(19, 2));
        assert_eq!(f.0.coeff(0), rat(21 * 25, 16));
    }

    #[test]
    fn json_round_trip() {
        let f = StructurePolynomial::new(vec![rat(1, 2), int(-3)]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"["1/2","-3/1"]"#);
        let back: StructurePolynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
