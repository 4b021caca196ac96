//! Exact decimal rendering of rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u8), e as usize)
}

/// `10^e` as a rational, `e` of either sign.
fn pow10_ratio(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(pow10(e as u32))
    } else {
        BigRational::new(BigInt::from(1u8), pow10((-e) as u32))
    }
}

/// `%g`-style rendering with `digits` significant digits, rounding half
/// away from zero on the exact value. Trailing zeros are dropped.
pub fn significant(r: &BigRational, digits: usize) -> String {
    assert!(digits >= 1);
    if r.is_zero() {
        return "0".into();
    }
    let sign = if r.is_negative() { "-" } else { "" };
    let a = r.abs();

    // exponent estimate from bit lengths, then corrected exactly
    let bits = a.numer().bits() as i64 - a.denom().bits() as i64;
    let mut e = (bits as f64 * std::f64::consts::LOG10_2).floor() as i64;
    while pow10_ratio(e) > a {
        e -= 1;
    }
    while pow10_ratio(e + 1) <= a {
        e += 1;
    }

    let scaled = &a * pow10_ratio(digits as i64 - 1 - e);
    let two = BigInt::from(2u8);
    let mut q = (scaled.numer() * &two + scaled.denom()) / (scaled.denom() * &two);
    if q == pow10(digits as u32) {
        q /= 10u8;
        e += 1;
    }
    let s = q.to_string();
    debug_assert_eq!(s.len(), digits);

    let body = if e < -5 || e >= digits as i64 {
        let mantissa = trim(&s[..1], &s[1..]);
        format!("{mantissa}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
    } else if e >= 0 {
        let k = e as usize + 1;
        trim(&s[..k], &s[k..])
    } else {
        let zeros = "0".repeat((-e - 1) as usize);
        trim("0", &format!("{zeros}{s}"))
    };
    format!("{sign}{body}")
}

fn trim(int: &str, frac: &str) -> String {
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        int.to_string()
    } else {
        format!("{int}.{frac}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn hand_checked() {
        assert_eq!(significant(&q(0, 1), 12), "0");
        assert_eq!(significant(&q(10, 1), 12), "10");
        assert_eq!(significant(&q(4, 3), 12), "1.33333333333");
        assert_eq!(significant(&q(2, 3), 12), "0.666666666667");
        assert_eq!(significant(&q(7, 2), 12), "3.5");
        assert_eq!(significant(&q(20039, 1000), 12), "20.039");
        assert_eq!(significant(&q(-1, 8), 12), "-0.125");
        assert_eq!(significant(&q(1, 100_000), 12), "0.00001");
        assert_eq!(significant(&q(1, 1_000_000), 12), "1e-06");
        assert_eq!(significant(&q(999_999_999_999_9, 10), 12), "1e+12");
        assert_eq!(significant(&q(123_456_789_012_345, 1), 12), "1.23456789012e+14");
        assert_eq!(significant(&q(5, 2), 1), "3");
        assert_eq!(significant(&q(95, 1), 1), "1e+02");
    }

    proptest! {
        #[test]
        fn close_to_the_float_value(n in -1_000_000_000i64..1_000_000_000, d in 1i64..1_000_000) {
            let r = q(n, d);
            let shown: f64 = significant(&r, 12).parse().unwrap();
            let exact = n as f64 / d as f64;
            prop_assert!((shown - exact).abs() <= 6e-12 * exact.abs(), "{} vs {}", shown, exact);
        }

        #[test]
        fn at_most_twelve_digits(n in 1i64..i64::MAX, d in 1i64..i64::MAX) {
            let s = significant(&q(n, d), 12);
            let mantissa = s.split('e').next().unwrap();
            let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).collect::<String>();
            prop_assert!(digits.trim_start_matches('0').len() <= 12, "{}", s);
        }
    }
}
