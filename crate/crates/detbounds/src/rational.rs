//! Exact rational scalars and a few certified numeric helpers.
//!
//! `Rational` is an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator, so comparisons are an exact total order.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Shorthand for an integer rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses "p/q" or a plain integer string.
pub fn parse_rational(s: &str) -> Result<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|e| Error::Parse(format!("invalid rational {s:?}: {e}")))
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Integer power with a signed exponent. Negative exponents require a
/// nonzero base.
pub fn pow_i(x: &Rational, k: i32) -> Rational {
    if k >= 0 {
        num_traits::pow::pow(x.clone(), k as usize)
    } else {
        num_traits::pow::pow(x.clone(), (-k) as usize)
            .recip()
    }
}

/// Certified enclosure of exp(x): returns exact rationals (lo, hi) with
/// lo <= exp(x) <= hi and hi - lo <= 2^-precision_bits.
///
/// Uses the Taylor series with an explicit geometric tail majorant, so every
/// comparison against the enclosure is an exact statement about exp(x).
pub fn exp_bounds(x: &Rational, precision_bits: u32) -> (Rational, Rational) {
    if x.is_zero() {
        return (Rational::one(), Rational::one());
    }
    if x.is_negative() {
        let (lo, hi) = exp_bounds(&-x.clone(), precision_bits + 2);
        // exp(x) = 1/exp(-x); invert the enclosure.
        return (hi.recip(), lo.recip());
    }
    let width_target = Rational::new(BigInt::one(), BigInt::one() << precision_bits);
    let mut term = Rational::one(); // x^k / k!
    let mut sum = Rational::one();
    let mut k: u64 = 0;
    loop {
        k += 1;
        term *= x / Rational::from_integer(BigInt::from(k));
        sum += &term;
        // Tail majorant: sum_{j>k} x^j/j! <= term * r/(1-r) with r = x/(k+1),
        // valid once r < 1.
        let r = x / Rational::from_integer(BigInt::from(k + 1));
        if r < Rational::one() {
            let tail = &term * &r / (Rational::one() - &r);
            if tail <= width_target {
                return (sum.clone(), sum + tail);
            }
        }
        assert!(k < 100_000, "exp series failed to converge");
    }
}

/// Sign of a rational as -1, 0, or 1.
pub fn sign(x: &Rational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-7").unwrap(), rat_int(-7));
        assert_eq!(parse_rational("6/8").unwrap(), rat(3, 4));
        assert_eq!(format!("{}", rat(3, 4)), "3/4");
        assert_eq!(format!("{}", rat_int(5)), "5");
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn exp_enclosure_brackets_known_values() {
        // exp(5/2) = 12.1824939607...
        let (lo, hi) = exp_bounds(&rat(5, 2), 80);
        assert!(to_f64(&lo) <= 12.182_494 && 12.182_493 <= to_f64(&hi));
        assert!(&hi - &lo <= rat(1, 1 << 30));
        // exp(-1) = 0.36787944...
        let (lo, hi) = exp_bounds(&rat(-1, 1), 60);
        assert!(lo < hi);
        assert!(to_f64(&lo) < 0.367_880 && 0.367_879 < to_f64(&hi));
    }

    #[test]
    fn integer_powers() {
        assert_eq!(pow_i(&rat(3, 2), 3), rat(27, 8));
        assert_eq!(pow_i(&rat(3, 2), -2), rat(4, 9));
        assert_eq!(pow_i(&rat(5, 7), 0), rat_int(1));
    }
}
