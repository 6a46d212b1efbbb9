//! Fixed-width numeric formatting for the benchmark tables.

use blrs_core::Nu;

/// Scientific notation with 10 significant digits and a signed, zero-padded
/// two-digit exponent, e.g. `1.798414968E+12`.
pub fn sci10(x: f64) -> String {
    sci(x, 9)
}

/// Degrees of freedom in the table style: `1.0E-08`, `1.0E+01`, or `inf`.
pub fn sci_nu(nu: Nu) -> String {
    match nu {
        Nu::Infinite => "inf".to_string(),
        Nu::Finite(v) => sci(v, 1),
    }
}

fn sci(x: f64, decimals: usize) -> String {
    if x == 0.0 {
        return format!("{:.*}E+00", decimals, 0.0);
    }
    let sign = if x < 0.0 { "-" } else { "" };
    let mut exp = x.abs().log10().floor() as i32;
    let mut mantissa = x.abs() / 10f64.powi(exp);
    if mantissa >= 10.0 {
        mantissa /= 10.0;
        exp += 1;
    } else if mantissa < 1.0 {
        mantissa *= 10.0;
        exp -= 1;
    }
    let mut digits = format!("{mantissa:.*}", decimals);
    // rounding can carry the mantissa to 10.000...
    if digits.starts_with("10") {
        exp += 1;
        digits = format!("{:.*}", decimals, 1.0);
    }
    format!("{sign}{digits}E{exp:+03}")
}
