//! Number rendering shared by every textual artifact (cspec strings,
//! math-notation formulas, natural-language templates, CSV output).
//!
//! All of them use the C `printf` `%g` convention: fixed notation for
//! moderate exponents, scientific otherwise, trailing zeros stripped.  That
//! keeps emitted files diff-able and lets round-trip tests compare strings
//! instead of bit patterns.

/// Render `v` like C's `%.*g` with `sig` significant digits.
///
/// Values the toolkit emits are rounded at creation time to at most `sig`
/// significant digits, so printing and re-parsing is exact for them.
pub fn fmt_g(v: f64, sig: usize) -> String {
    assert!(sig >= 1);
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    // Round to `sig` significant digits via scientific notation, then pick
    // the %g style from the decimal exponent of the rounded value.
    let sci = format!("{:.*e}", sig - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("{:e} always contains 'e'");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if exp < -4 || exp >= sig as i32 {
        let mantissa = strip_trailing_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let prec = (sig as i32 - 1 - exp).max(0) as usize;
        // Format the already-rounded mantissa, not the raw value, so both
        // branches agree on carries like 0.99999995 -> "1".
        let rounded: f64 = sci.parse().expect("scientific form parses back");
        strip_trailing_zeros(&format!("{rounded:.prec$}"))
    }
}

/// `%.6g` — the default used for time windows and cspec text.
pub fn g6(v: f64) -> String {
    fmt_g(v, 6)
}

/// `%.9g` — used for profile coefficients, CSV cells, and anywhere a value
/// may legitimately carry more digits than a time stamp.
pub fn g9(v: f64) -> String {
    fmt_g(v, 9)
}

/// Round `v` to `sig` significant digits by formatting and re-parsing.
///
/// Sampled dataset values go through this once so that every later print at
/// `>= sig` digits reproduces them exactly.
pub fn round_sig(v: f64, sig: usize) -> f64 {
    fmt_g(v, sig).parse().expect("fmt_g output parses")
}

/// Round `v` to `dp` decimal places (used for sampled time bounds).
pub fn round_dp(v: f64, dp: usize) -> f64 {
    format!("{v:.dp$}").parse().expect("fixed-point format parses")
}

fn strip_trailing_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    let s = s.trim_end_matches('0');
    s.trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g6_on_reference_values() {
        // Expected strings are printf("%.6g") outputs.
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (0.049, "0.049"),
            (4.5, "4.5"),
            (345.0, "345"),
            (1.882e-5, "1.882e-05"),
            (3.356e-6, "3.356e-06"),
            (-1.390e-5, "-1.39e-05"),
            (-0.510, "-0.51"),
            (2.844, "2.844"),
            (1_000_000.0, "1e+06"),
            (999_999.5, "1e+06"),
            (123_456_789.0, "1.23457e+08"),
            (0.0001, "0.0001"),
            (0.00001, "1e-05"),
            (294.2976, "294.298"),
        ];
        for (v, expect) in cases {
            assert_eq!(g6(v), expect, "g6({v})");
        }
    }

    #[test]
    fn g9_keeps_profile_precision() {
        assert_eq!(g9(294.2976), "294.2976");
        assert_eq!(g9(-0.0122), "-0.0122");
        assert_eq!(g9(408.1535), "408.1535");
        assert_eq!(g9(2.2684e-5), "2.2684e-05");
        assert_eq!(g9(1_473_200.0), "1473200");
    }

    #[test]
    fn round_sig_then_print_is_stable() {
        let vals = [
            std::f64::consts::PI,
            1.0 / 3.0,
            12345.6789,
            9.87654321e-7,
            -0.000123456,
        ];
        for v in vals {
            let r = round_sig(v, 9);
            assert_eq!(r, round_sig(r, 9));
            assert_eq!(g9(r).parse::<f64>().unwrap(), r);
        }
    }

    #[test]
    fn negative_zero_formats_as_zero() {
        assert_eq!(g6(-0.0), "0");
    }
}
