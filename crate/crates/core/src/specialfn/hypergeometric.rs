use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesResult {
    pub value: Complex64,
    pub terms_used: usize,
    pub converged: bool,
    /// Upper bound on the modulus of the neglected tail.
    pub bound: f64,
}

const MAX_TERMS: usize = 100_000;

/// Generalized hypergeometric series `pFq(a; b; z)` for `p <= q`, summed by
/// term recurrence until the tail bound falls below `tol * |sum|`.
///
/// For `k > max|b_i|` the ratio of consecutive terms is bounded by
/// `u(k) = |z| prod(|a_i|+k) / (prod(k-|b_i|) (k+1))`, which decreases in
/// `k`; once `u(k) < 1` the tail after term `k` is at most
/// `|t_k| u(k) / (1 - u(k))`.
pub fn pfq(a: &[f64], b: &[f64], z: Complex64, tol: f64) -> Result<SeriesResult> {
    if a.len() > b.len() {
        return Err(Error::NotEntire { p: a.len(), q: b.len() });
    }
    for &bi in b {
        if bi <= 0.0 && bi == bi.floor() {
            return Err(Error::BParameterPole(bi));
        }
    }
    let b_max = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let zabs = z.norm();
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        if zabs == 0.0 {
            return Ok(SeriesResult { value: sum, terms_used: k + 1, converged: true, bound: 0.0 });
        }
        if kf > b_max {
            let mut u = zabs / (kf + 1.0);
            for &ai in a {
                u *= ai.abs() + kf;
            }
            for &bi in b {
                u /= kf - bi.abs();
            }
            if u < 1.0 {
                let bound = term.norm() * u / (1.0 - u);
                if bound <= tol * sum.norm() || term.norm() == 0.0 {
                    return Ok(SeriesResult { value: sum, terms_used: k + 1, converged: true, bound });
                }
            }
        }
        let mut ratio = z / (kf + 1.0);
        for &ai in a {
            ratio *= ai + kf;
        }
        for &bi in b {
            ratio /= bi + kf;
        }
        term *= ratio;
        sum += term;
    }
    Err(Error::SeriesNotConverged { terms: MAX_TERMS })
}
