//! Exact rationals used for every distance in the system.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// An exact rational number, always kept in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

/// Rejection reason for a rational literal.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RatParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal {0:?}")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("rational {0:?} is not in canonical lowest terms")]
    NotCanonical(String),
}

impl Rat {
    pub fn new(numer: i64, denom: i64) -> Rat {
        assert!(denom != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn integer(value: i64) -> Rat {
        Rat(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn recip(&self) -> Option<Rat> {
        if self.0.is_zero() {
            None
        } else {
            Some(Rat(self.0.recip()))
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }
}

impl From<i64> for Rat {
    fn from(value: i64) -> Rat {
        Rat::integer(value)
    }
}

impl Add for &Rat {
    type Output = Rat;
    fn add(self, rhs: &Rat) -> Rat {
        Rat(&self.0 + &rhs.0)
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, rhs: Rat) -> Rat {
        Rat(self.0 + rhs.0)
    }
}

impl Mul for &Rat {
    type Output = Rat;
    fn mul(self, rhs: &Rat) -> Rat {
        Rat(&self.0 * &rhs.0)
    }
}

impl Mul for Rat {
    type Output = Rat;
    fn mul(self, rhs: Rat) -> Rat {
        Rat(self.0 * rhs.0)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn canonical_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'))
}

/// Parses the canonical form only: `p` or `p/q`, optional leading `-` on
/// `p`, no leading zeros, `q > 1`, `gcd(p, q) = 1`.
impl FromStr for Rat {
    type Err = RatParseError;

    fn from_str(s: &str) -> Result<Rat, RatParseError> {
        if s.is_empty() {
            return Err(RatParseError::Empty);
        }
        let malformed = || RatParseError::Malformed(s.to_string());
        let (numer, denom) = match s.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (s, None),
        };
        let unsigned = numer.strip_prefix('-').unwrap_or(numer);
        if !canonical_digits(unsigned) {
            return Err(malformed());
        }
        if numer.starts_with('-') && unsigned == "0" {
            return Err(RatParseError::NotCanonical(s.to_string()));
        }
        let p: BigInt = numer.parse().map_err(|_| malformed())?;
        let q: BigInt = match denom {
            None => BigInt::one(),
            Some(d) => {
                if !canonical_digits(d) {
                    return Err(malformed());
                }
                d.parse().map_err(|_| malformed())?
            }
        };
        if q.is_zero() {
            return Err(RatParseError::ZeroDenominator(s.to_string()));
        }
        let value = BigRational::new(p.clone(), q.clone());
        if value.numer() != &p || value.denom() != &q || (denom.is_some() && q.is_one()) {
            return Err(RatParseError::NotCanonical(s.to_string()));
        }
        Ok(Rat(value))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Rat, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(de::Error::custom)
    }
}
