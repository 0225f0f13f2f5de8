use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{rat_int, sqrt_upper, Rational};

/// A nonnegative value of a Minkowski functional: either a rational, or the
/// square root of a rational (ellipsoids), stored as its exact square.
#[derive(Debug, Clone)]
pub enum GaugeValue {
    Rational(Rational),
    Sqrt(Rational),
}

impl GaugeValue {
    pub fn zero() -> Self {
        GaugeValue::Rational(Rational::zero())
    }

    pub fn one() -> Self {
        GaugeValue::Rational(Rational::one())
    }

    pub fn rational(r: Rational) -> Self {
        GaugeValue::Rational(r)
    }

    pub fn sqrt(square: Rational) -> Self {
        GaugeValue::Sqrt(square)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            GaugeValue::Rational(r) | GaugeValue::Sqrt(r) => r.is_zero(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            GaugeValue::Rational(r) | GaugeValue::Sqrt(r) => r.is_negative(),
        }
    }

    /// The exact square of the value.
    pub fn square(&self) -> Rational {
        match self {
            GaugeValue::Rational(r) => r * r,
            GaugeValue::Sqrt(s) => s.clone(),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            GaugeValue::Rational(r) => Some(r),
            GaugeValue::Sqrt(_) => None,
        }
    }

    /// The smallest convenient rational `>=` the value (equal when rational).
    pub fn upper_rational(&self) -> Rational {
        match self {
            GaugeValue::Rational(r) => r.clone(),
            GaugeValue::Sqrt(s) => sqrt_upper(s),
        }
    }

    /// `μ · self` for rational `μ >= 0`.
    pub fn mul_rational(&self, mu: &Rational) -> Self {
        debug_assert!(!mu.is_negative());
        match self {
            GaugeValue::Rational(r) => GaugeValue::Rational(r * mu),
            GaugeValue::Sqrt(s) => GaugeValue::Sqrt(s * mu * mu),
        }
    }

    /// `self / μ` for rational `μ > 0`.
    pub fn div_rational(&self, mu: &Rational) -> Self {
        self.mul_rational(&mu.recip())
    }

    /// Exact product; rational only if both factors are.
    pub fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (GaugeValue::Rational(a), GaugeValue::Rational(b)) => GaugeValue::Rational(a * b),
            _ => GaugeValue::Sqrt(self.square() * other.square()),
        }
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Same representation and same value (stricter than `==`, which compares
    /// values only).
    pub fn same_repr(&self, other: &Self) -> bool {
        match (self, other) {
            (GaugeValue::Rational(a), GaugeValue::Rational(b)) | (GaugeValue::Sqrt(a), GaugeValue::Sqrt(b)) => a == b,
            _ => false,
        }
    }

    /// Compares against a rational.
    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        self.cmp(&GaugeValue::Rational(r.clone()))
    }
}

impl From<Rational> for GaugeValue {
    fn from(r: Rational) -> Self {
        GaugeValue::Rational(r)
    }
}

impl From<i64> for GaugeValue {
    fn from(v: i64) -> Self {
        GaugeValue::Rational(rat_int(v))
    }
}

/// Compares `r` with `sqrt(s)`, `s >= 0`.
fn cmp_rational_sqrt(r: &Rational, s: &Rational) -> Ordering {
    if r.is_negative() {
        return Ordering::Less;
    }
    (r * r).cmp(s)
}

impl Ord for GaugeValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (GaugeValue::Rational(a), GaugeValue::Rational(b)) => a.cmp(b),
            (GaugeValue::Sqrt(a), GaugeValue::Sqrt(b)) => a.cmp(b),
            (GaugeValue::Rational(r), GaugeValue::Sqrt(s)) => cmp_rational_sqrt(r, s),
            (GaugeValue::Sqrt(s), GaugeValue::Rational(r)) => cmp_rational_sqrt(r, s).reverse(),
        }
    }
}

impl PartialOrd for GaugeValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for GaugeValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for GaugeValue {}

impl fmt::Display for GaugeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaugeValue::Rational(r) => write!(f, "{r}"),
            GaugeValue::Sqrt(s) => write!(f, "sqrt({s})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    #[test]
    fn mixed_comparisons() {
        let two = GaugeValue::from(2);
        assert!(GaugeValue::sqrt(rat(3, 1)) < two);
        assert!(GaugeValue::sqrt(rat(5, 1)) > two);
        assert_eq!(GaugeValue::sqrt(rat(4, 1)), two);
        assert!(!GaugeValue::sqrt(rat(4, 1)).same_repr(&two));
        assert!(GaugeValue::sqrt(rat(2, 1)) > GaugeValue::from(rat(7, 5)));
        assert!(GaugeValue::sqrt(rat(2, 1)) < GaugeValue::from(rat(3, 2)));
    }

    #[test]
    fn products() {
        let s2 = GaugeValue::sqrt(rat(2, 1));
        assert_eq!(s2.mul(&s2), GaugeValue::from(2));
        assert_eq!(s2.pow(3), GaugeValue::sqrt(rat(8, 1)));
        assert!(GaugeValue::from(rat(1, 3)).mul(&GaugeValue::from(3)).same_repr(&GaugeValue::from(1)));
        assert_eq!(s2.mul_rational(&rat(3, 1)), GaugeValue::sqrt(rat(18, 1)));
    }

    proptest! {
        #[test]
        fn order_agrees_with_squares(a in 0i64..200, b in 1i64..20, c in 0i64..200, e in 1i64..20) {
            let x = rat(a, b);
            let y = rat(c, e);
            prop_assert_eq!(GaugeValue::from(x.clone()).cmp(&GaugeValue::sqrt(&y * &y)), x.cmp(&y));
            prop_assert_eq!(GaugeValue::sqrt(&x * &x).cmp(&GaugeValue::sqrt(&y * &y)), x.cmp(&y));
        }
    }
}
