//! Complex tridiagonal matrices and the action of their exponential on a
//! vector.

use num_complex::Complex64;

/// Tridiagonal matrix: `sub[i]` sits at `(i+1, i)`, `sup[i]` at `(i, i+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<Complex64>,
    pub diag: Vec<Complex64>,
    pub sup: Vec<Complex64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Tridiagonal {
            sub: vec![z; n.saturating_sub(1)],
            diag: vec![z; n],
            sup: vec![z; n.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = self.diag[i] * v[i];
            if i > 0 {
                acc += self.sub[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                acc += self.sup[i] * v[i + 1];
            }
            out[i] = acc;
        }
        out
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|j| {
                let mut s = self.diag[j].norm();
                if j + 1 < n {
                    s += self.sub[j].norm();
                }
                if j > 0 {
                    s += self.sup[j - 1].norm();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Tridiagonal {
            sub: self.sub.iter().map(|x| x * c).collect(),
            diag: self.diag.iter().map(|x| x * c).collect(),
            sup: self.sup.iter().map(|x| x * c).collect(),
        }
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `exp(A) v` by splitting into `s` steps with `|A|/s <= 1` and summing the
/// Taylor series of each step until the terms stop contributing.
pub fn expm_apply(a: &Tridiagonal, v: &[Complex64]) -> Vec<Complex64> {
    let steps = a.norm1().ceil().max(1.0) as usize;
    let step = a.scale(Complex64::new(1.0 / steps as f64, 0.0));
    let mut w = v.to_vec();
    for _ in 0..steps {
        let mut term = w.clone();
        let mut acc = w.clone();
        for k in 1..200 {
            term = step.matvec(&term);
            let inv = 1.0 / k as f64;
            term.iter_mut().for_each(|x| *x *= inv);
            acc.iter_mut().zip(&term).for_each(|(a, t)| *a += t);
            if norm(&term) <= 1e-17 * norm(&acc) {
                break;
            }
        }
        w = acc;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn diagonal_exponential() {
        let mut a = Tridiagonal::zeros(3);
        a.diag = vec![c(0.5), c(-1.0), Complex64::new(0.0, 2.0)];
        let out = expm_apply(&a, &[c(1.0), c(1.0), c(1.0)]);
        assert!((out[0] - c(0.5f64.exp())).norm() < 1e-14);
        assert!((out[1] - c((-1.0f64).exp())).norm() < 1e-14);
        assert!((out[2] - Complex64::new(0.0, 2.0).exp()).norm() < 1e-14);
    }

    #[test]
    fn rotation_generator() {
        // exp(t [[0,-1],[1,0]]) e0 = (cos t, sin t)
        let mut a = Tridiagonal::zeros(2);
        a.sub = vec![c(3.0)];
        a.sup = vec![c(-3.0)];
        let out = expm_apply(&a, &[c(1.0), c(0.0)]);
        assert!((out[0] - c(3f64.cos())).norm() < 1e-13);
        assert!((out[1] - c(3f64.sin())).norm() < 1e-13);
    }

    #[test]
    fn nilpotent_shift() {
        // exp of the lower shift on e0 gives 1/k! at level k.
        let mut a = Tridiagonal::zeros(6);
        a.sub = vec![c(1.0); 5];
        let mut v = vec![c(0.0); 6];
        v[0] = c(1.0);
        let out = expm_apply(&a, &v);
        let mut fact = 1.0;
        for (k, x) in out.iter().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            assert!((x.re - 1.0 / fact).abs() < 1e-15);
        }
    }
}
