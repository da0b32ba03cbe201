use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 607.0 / 128.0;

const LANCZOS_COEFFS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_76e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_64e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

fn lanczos_ln_gamma(x: f64) -> f64 {
    let z = x - 1.0;
    let mut sum = LANCZOS_COEFFS[0];
    for (k, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + sum.ln()
}

/// `ln|Gamma(x)|` together with the sign of `Gamma(x)`.
pub fn log_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma of non-finite argument {x}")));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::PoleAtNonpositiveInteger(x));
    }
    if x == 1.0 || x == 2.0 {
        return Ok((0.0, 1.0));
    }
    if x < 0.5 {
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
        let s = (PI * x).sin();
        let (lg, _) = log_gamma_signed(1.0 - x)?;
        let sign = if s < 0.0 { -1.0 } else { 1.0 };
        return Ok(((PI / s.abs()).ln() - lg, sign));
    }
    Ok((lanczos_ln_gamma(x), 1.0))
}

/// `ln|Gamma(x)|`.
pub fn log_gamma(x: f64) -> Result<f64> {
    log_gamma_signed(x).map(|(v, _)| v)
}
