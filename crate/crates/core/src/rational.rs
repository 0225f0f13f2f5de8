//! Exact scalar helpers on top of [`BigRational`].
//!
//! Everything numeric in this crate is a [`Rational`] or an [`Integer`]; there
//! is no floating point anywhere on the computation path.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Integer = BigInt;
pub type Rational = BigRational;

pub fn int(v: i64) -> Integer {
    BigInt::from(v)
}

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(v: impl Into<BigInt>) -> Rational {
    BigRational::from_integer(v.into())
}

/// Parses `"p"`, `"-p"` or `"p/q"` exactly. Whitespace around the parts is not
/// accepted.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = |why: &str| Error::Input(format!("malformed rational {s:?}: {why}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let parse_int = |t: &str| -> Result<BigInt> {
        let digits = t.strip_prefix('-').or_else(|| t.strip_prefix('+')).unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad("expected an integer"));
        }
        t.parse::<BigInt>().map_err(|_| bad("expected an integer"))
    };
    let n = parse_int(num)?;
    let d = match den {
        Some(d) => parse_int(d)?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn floor(r: &Rational) -> Integer {
    r.floor().to_integer()
}

pub fn ceil(r: &Rational) -> Integer {
    r.ceil().to_integer()
}

/// `floor(sqrt(r))` for `r >= 0`.
pub fn floor_sqrt(r: &Rational) -> Integer {
    debug_assert!(!r.is_negative());
    // floor(sqrt(p/q)) = floor(floor(sqrt(p*q)) / q)
    let p = r.numer();
    let q = r.denom();
    (p * q).sqrt().div_floor(q)
}

/// Smallest rational of the form `k / denom(r)` that is `>= sqrt(r)`.
/// Exact when `r` is a perfect square of a rational with the same denominator.
pub fn sqrt_upper(r: &Rational) -> Rational {
    debug_assert!(!r.is_negative());
    let p = r.numer();
    let q = r.denom();
    let pq = p * q;
    let s = pq.sqrt();
    let s = if &s * &s == pq { s } else { s + 1 };
    BigRational::new(s, q.clone())
}

/// `floor(a + sqrt(b))` for `b >= 0`, decided by exact comparisons.
pub fn floor_add_sqrt(a: &Rational, b: &Rational) -> Integer {
    // a + sqrt(b) >= m  <=>  m - a <= sqrt(b)
    let le = |m: &Integer| -> bool {
        let t = rat_int(m.clone()) - a;
        !t.is_positive() || &t * &t <= *b
    };
    let mut m = floor(a) + floor_sqrt(b);
    while le(&(&m + 1)) {
        m += 1;
    }
    while !le(&m) {
        m -= 1;
    }
    m
}

/// `ceil(a - sqrt(b))` for `b >= 0`.
pub fn ceil_sub_sqrt(a: &Rational, b: &Rational) -> Integer {
    -floor_add_sqrt(&-a, b)
}

/// Is `r` an integer?
pub fn is_integral(r: &Rational) -> bool {
    r.is_integer()
}

pub fn pow(r: &Rational, e: usize) -> Rational {
    num_traits::pow(r.clone(), e)
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}
