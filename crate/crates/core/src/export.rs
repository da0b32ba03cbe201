//! Plain CSV tables: '.' decimal point, 17 significant digits.

use crate::measures::{MomentCheck, MomentSequence};
use crate::rational;
use crate::repspace::LoweringModule;
use crate::states::CoherentState;

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn coefficients_csv(state: &CoherentState) -> String {
    let mut out = String::from("n,re,im,population\n");
    for (n, c) in state.coeffs.iter().enumerate() {
        out.push_str(&format!("{n},{},{},{}\n", fmt_f64(c.re), fmt_f64(c.im), fmt_f64(c.norm_sqr())));
    }
    out
}

pub fn ladder_csv(module: &LoweringModule) -> String {
    let mut out = String::from("m,weight,s,s_float\n");
    for (m, s) in module.s().iter().enumerate() {
        out.push_str(&format!(
            "{m},{},{},{}\n",
            rational::format(&module.weight(m)),
            rational::format(s),
            fmt_f64(rational::to_f64(s))
        ));
    }
    out
}

/// `n, exact, value, quadrature, rel_err`; the last two are empty without
/// a quadrature check.
pub fn moments_csv(seq: &MomentSequence, check: Option<&MomentCheck>) -> String {
    let mut out = String::from("n,exact,value,quadrature,rel_err\n");
    for (n, exact) in seq.exact.iter().enumerate() {
        let value = fmt_f64(seq.log_values[n].exp());
        let (q, e) = match check.and_then(|c| c.rows.get(n)) {
            Some(row) => (fmt_f64(row.quadrature), fmt_f64(row.rel_err)),
            None => (String::new(), String::new()),
        };
        out.push_str(&format!("{n},{},{value},{q},{e}\n", rational::format(exact)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        let digits = fmt_f64(std::f64::consts::PI).split('e').next().unwrap().replace('.', "");
        assert_eq!(digits.len(), 17);
    }
}
