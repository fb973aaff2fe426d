//! Exact rational helpers.
//!
//! Every probability and payoff in the crate is a [`Rat`]; floating point is
//! only produced by [`to_f64`] and [`fmt_decimal`] for display and sampling.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

pub fn int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

/// `10^exp` as an exact integer.
pub fn pow10(exp: u32) -> Rat {
    Rat::from_integer(num_traits::pow(BigInt::from(10), exp as usize))
}

/// Parses `"p/q"`, `"-p/q"` or a plain integer. Denominator must be nonzero.
pub fn parse(text: &str) -> Option<Rat> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).ok()?;
            let d = BigInt::from_str(d.trim()).ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rat::new(n, d))
        }
        None => BigInt::from_str(text).ok().map(Rat::from_integer),
    }
}

/// Canonical text form: `p/q` in lowest terms, or `p` for integers.
pub fn fmt(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Decimal rendering with `places` digits after the point (display only).
pub fn fmt_decimal(r: &Rat, places: usize) -> String {
    format!("{:.*}", places, to_f64(r))
}

/// Renders an annotation such as `3/10` as `30%` when it is a whole percent.
pub fn fmt_percent(r: &Rat) -> String {
    let pct = r * int(100);
    if pct.is_integer() {
        format!("{}%", pct.numer())
    } else {
        format!("{}%", fmt(&pct))
    }
}

pub fn sum<'a, I: IntoIterator<Item = &'a Rat>>(items: I) -> Rat {
    items.into_iter().fold(Rat::zero(), |acc, x| acc + x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse("6/4"), Some(ratio(3, 2)));
        assert_eq!(parse("-7"), Some(int(-7)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("x"), None);
        assert_eq!(fmt(&ratio(-6, 4)), "-3/2");
        assert_eq!(fmt(&int(5)), "5");
        assert_eq!(fmt_percent(&ratio(3, 10)), "30%");
        assert_eq!(fmt(&-pow10(42)), format!("-1{}", "0".repeat(42)));
    }
}
