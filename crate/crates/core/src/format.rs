//! Fixed-precision text output shared by the command line reports.

use num_complex::Complex64;

/// Significant digits in every printed float.
pub const SIG_DIGITS: usize = 15;

/// `x` like C's `%.15g`.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIG_DIGITS as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", strip_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (SIG_DIGITS as i32 - 1 - exp) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `a + bi` or `a - bi`.
pub fn fmt_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() && z.im != 0.0 {
        format!("{} - {}i", fmt_g(z.re), fmt_g(-z.im))
    } else {
        format!("{} + {}i", fmt_g(z.re), fmt_g(z.im))
    }
}

/// Parses the output of [`fmt_complex`].
pub fn parse_complex(text: &str) -> Option<Complex64> {
    let body = text.trim().strip_suffix('i')?;
    let (re, sign, im) = if let Some((re, im)) = body.rsplit_once(" + ") {
        (re, 1.0, im)
    } else {
        let (re, im) = body.rsplit_once(" - ")?;
        (re, -1.0, im)
    };
    Some(Complex64::new(re.trim().parse().ok()?, sign * im.trim().parse::<f64>().ok()?))
}

pub fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (2.5, "2.5"),
            (0.0, "0"),
            (1.0, "1"),
            (-3.0, "-3"),
            (std::f64::consts::PI, "3.14159265358979"),
            (1e-5, "1e-05"),
            (1.5e-17, "1.5e-17"),
            (123456789012345.0, "123456789012345"),
            (1e15, "1e+15"),
            (0.0001, "0.0001"),
            (1.0 / 3.0, "0.333333333333333"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g(x), want, "{x}");
        }
    }

    #[test]
    fn complex_round_trip() {
        for z in [Complex64::new(0.5, 0.5), Complex64::new(1.0, -2.0), Complex64::new(-1e-17, 0.0)] {
            let text = fmt_complex(z);
            assert_eq!(parse_complex(&text), Some(z), "{text}");
        }
        assert_eq!(fmt_complex(Complex64::new(1.0, 0.0)), "1 + 0i");
        assert_eq!(fmt_complex(Complex64::new(0.0, -0.0)), "0 + 0i");
    }
}
