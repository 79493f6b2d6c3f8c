//! Number rendering for text files and CSV output.

use crate::scalar::Real;

/// Shortest representation that parses back to the identical value.
///
/// Integral values keep a trailing `.0` so the output always reads as a
/// decimal (`3.0`, not `3`).
pub fn exact<T: Real>(v: T) -> String {
    format!("{v:?}")
}

/// Renders `v` with `digits` significant digits, `%g` style: plain decimal
/// for moderate exponents, scientific otherwise, trailing zeros trimmed.
pub fn sig<T: Real>(v: T, digits: usize) -> String {
    let x = v.as_f64();
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

/// Nine significant digits, the precision used for every CSV table.
pub fn sig9<T: Real>(v: T) -> String {
    sig(v, 9)
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
