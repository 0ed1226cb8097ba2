//! Rational numbers extended with a single absorbing infinity.
//!
//! Cost tables take values in `Q ∪ {inf}`.  Addition absorbs: `x + inf = inf`.
//! Scaling by a nonnegative rational keeps infinity infinite except that
//! scaling by zero yields zero, which is the convention the closure
//! operations rely on.  Infinity compares strictly above every rational, so
//! minima are well defined.
//!
//! The textual form is `p/q` for non-integers, `p` for integers, and `inf`.
//! Values are always kept reduced with a positive denominator.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtendedRational {
    Finite(BigRational),
    Infinite,
}

pub use ExtendedRational::{Finite, Infinite};

impl ExtendedRational {
    pub fn zero() -> Self {
        Finite(BigRational::zero())
    }

    pub fn from_integer(n: i64) -> Self {
        Finite(BigRational::from_integer(BigInt::from(n)))
    }

    /// Builds `p/q`; `q` must be nonzero.
    pub fn new(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Finite(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Infinite)
    }

    pub fn as_finite(&self) -> Option<&BigRational> {
        match self {
            Finite(q) => Some(q),
            Infinite => None,
        }
    }

    /// Scales by a nonnegative rational, with `0 * inf = 0`.
    ///
    /// Panics if `c` is negative; callers validate signs first.
    pub fn scale(&self, c: &BigRational) -> Self {
        assert!(!c.is_negative(), "negative scale factor");
        if c.is_zero() {
            return ExtendedRational::zero();
        }
        match self {
            Finite(q) => Finite(q * c),
            Infinite => Infinite,
        }
    }

    /// Adds a finite rational; infinity absorbs.
    pub fn add_rational(&self, c: &BigRational) -> Self {
        match self {
            Finite(q) => Finite(q + c),
            Infinite => Infinite,
        }
    }
}

impl PartialOrd for ExtendedRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Infinite) => Ordering::Less,
            (Infinite, Finite(_)) => Ordering::Greater,
            (Infinite, Infinite) => Ordering::Equal,
        }
    }
}

impl std::ops::Add for ExtendedRational {
    type Output = ExtendedRational;
    fn add(self, rhs: ExtendedRational) -> ExtendedRational {
        &self + &rhs
    }
}

impl std::ops::Add<&ExtendedRational> for ExtendedRational {
    type Output = ExtendedRational;
    fn add(self, rhs: &ExtendedRational) -> ExtendedRational {
        &self + rhs
    }
}

impl std::ops::Add for &ExtendedRational {
    type Output = ExtendedRational;
    fn add(self, rhs: &ExtendedRational) -> ExtendedRational {
        match (self, rhs) {
            (Finite(a), Finite(b)) => Finite(a + b),
            _ => Infinite,
        }
    }
}

impl std::ops::AddAssign<&ExtendedRational> for ExtendedRational {
    fn add_assign(&mut self, rhs: &ExtendedRational) {
        match (&mut *self, rhs) {
            (Finite(a), Finite(b)) => *a += b,
            (lhs, _) => *lhs = Infinite,
        }
    }
}

impl std::iter::Sum for ExtendedRational {
    fn sum<I: Iterator<Item = ExtendedRational>>(iter: I) -> Self {
        let mut acc = ExtendedRational::zero();
        for v in iter {
            acc += &v;
        }
        acc
    }
}

impl From<BigRational> for ExtendedRational {
    fn from(q: BigRational) -> Self {
        Finite(q)
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infinite => write!(f, "inf"),
            Finite(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
        }
    }
}

/// Formats a plain rational the same way cost values are formatted.
pub fn display_rational(q: &BigRational) -> String {
    Finite(q.clone()).to_string()
}

/// Parses a plain rational in `p/q` or `p` form.
pub fn parse_rational(s: &str) -> Result<BigRational, Error> {
    match ExtendedRational::from_str(s)? {
        Finite(q) => Ok(q),
        Infinite => Err(Error::parse(s.to_owned(), "expected a finite rational")),
    }
}

impl FromStr for ExtendedRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s == "inf" {
            return Ok(Infinite);
        }
        let bad = |msg: &str| Error::parse(s.to_owned(), msg.to_owned());
        let (num, den) = match s.split_once('/') {
            None => (s, None),
            Some((n, d)) => (n, Some(d)),
        };
        let p = BigInt::from_str(num).map_err(|_| bad("malformed numerator"))?;
        let q = match den {
            None => BigInt::one(),
            Some(d) => {
                let q = BigInt::from_str(d).map_err(|_| bad("malformed denominator"))?;
                if q.is_zero() {
                    return Err(bad("zero denominator"));
                }
                q
            }
        };
        Ok(Finite(BigRational::new(p, q)))
    }
}

impl Serialize for ExtendedRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtendedRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        ExtendedRational::from_str(&s).map_err(de::Error::custom)
    }
}

/// Serde helpers for plain `BigRational` fields using the same textual form.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&display_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(de::Error::custom)
    }
}

/// Serde helpers for `Vec<BigRational>` fields.
pub mod serde_rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = v.iter().map(display_rational).collect();
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let strings = Vec::<String>::deserialize(d)?;
        strings
            .iter()
            .map(|s| parse_rational(s).map_err(de::Error::custom))
            .collect()
    }
}
