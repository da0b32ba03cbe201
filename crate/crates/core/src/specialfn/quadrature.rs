use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

const PEAK_THRESHOLD: f64 = 1e-18;
const MAX_LEVELS: usize = 12;

/// `int_0^inf f(r) dr` by the exp-sinh substitution `r = exp(pi/2 sinh t)`
/// and the trapezoidal rule in `t`, with absolute tolerance `tol`.
pub fn quad_semi_infinite<F: Fn(f64) -> f64>(f: F, tol: f64) -> Result<f64> {
    integrate(&f, |_| tol)
}

/// As [`quad_semi_infinite`] with tolerance relative to the integral.
pub fn quad_semi_infinite_rel<F: Fn(f64) -> f64>(f: F, rel_tol: f64) -> Result<f64> {
    integrate(&f, |estimate| rel_tol * estimate.abs())
}

fn transformed<F: Fn(f64) -> f64>(f: &F, t: f64) -> Option<f64> {
    let s = FRAC_PI_2 * t.sinh();
    let r = s.exp();
    if r == 0.0 || !r.is_finite() {
        return None;
    }
    let v = f(r) * r * FRAC_PI_2 * t.cosh();
    v.is_finite().then_some(v)
}

/// Sums the transformed integrand over `k*h` for `k` in one direction,
/// stopping once it stays below the peak threshold.
fn scan<F: Fn(f64) -> f64>(f: &F, h: f64, start: i64, stride: i64, peak: &mut f64) -> f64 {
    let mut sum = 0.0;
    let mut quiet = 0;
    let mut k = start;
    loop {
        let Some(v) = transformed(f, k as f64 * h) else { break };
        sum += v;
        *peak = peak.max(v.abs());
        if v.abs() < PEAK_THRESHOLD * *peak {
            quiet += 1;
            if quiet >= 4 {
                break;
            }
        } else {
            quiet = 0;
        }
        k += stride;
        if k.abs() > 1_000_000 {
            break;
        }
    }
    sum
}

fn integrate<F: Fn(f64) -> f64, T: Fn(f64) -> f64>(f: &F, tol: T) -> Result<f64> {
    let mut peak = transformed(f, 0.0).map(f64::abs).unwrap_or(0.0);
    let mut h = 0.5;
    let center = transformed(f, 0.0).unwrap_or(0.0);
    let mut sum = center + scan(f, h, 1, 1, &mut peak) + scan(f, h, -1, -1, &mut peak);
    let mut estimate = sum * h;
    let mut prev = f64::NAN;
    for _ in 0..MAX_LEVELS {
        // New nodes are the odd multiples of h/2.
        let half = h * 0.5;
        let odd = scan_odd(f, half, &mut peak);
        sum += odd;
        h = half;
        prev = estimate;
        estimate = sum * h;
        if (estimate - prev).abs() <= tol(estimate) {
            return Ok(estimate);
        }
    }
    Err(Error::QuadratureNotConverged { prev, last: estimate })
}

fn scan_odd<F: Fn(f64) -> f64>(f: &F, h: f64, peak: &mut f64) -> f64 {
    let mut total = 0.0;
    for dir in [1i64, -1] {
        let mut quiet = 0;
        let mut j: i64 = 0;
        loop {
            let k = dir * (2 * j + 1);
            let Some(v) = transformed(f, k as f64 * h) else { break };
            total += v;
            *peak = peak.max(v.abs());
            if v.abs() < PEAK_THRESHOLD * *peak {
                quiet += 1;
                if quiet >= 4 {
                    break;
                }
            } else {
                quiet = 0;
            }
            j += 1;
            if j > 1_000_000 {
                break;
            }
        }
    }
    total
}
