use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number used for exponent algebra.
pub type Rational = Ratio<i64>;

/// A norm exponent `p` in `[1, inf]`, stored as the exact reciprocal `1/p`.
///
/// Ordering follows `p`, so `Exponent::INFINITY` is the largest value.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Exponent {
    recip: Rational,
}

impl Exponent {
    pub const INFINITY: Exponent = Exponent {
        recip: Ratio::new_raw(0, 1),
    };
    pub const ONE: Exponent = Exponent {
        recip: Ratio::new_raw(1, 1),
    };
    pub const TWO: Exponent = Exponent {
        recip: Ratio::new_raw(1, 2),
    };

    /// Builds `p` from its reciprocal; `recip` must lie in `[0, 1]`.
    pub fn from_recip(recip: Rational) -> Result<Self> {
        if recip.is_negative() || recip > Rational::one() {
            return Err(Error::InvalidExponent(format!("1/{recip}")));
        }
        Ok(Exponent { recip })
    }

    pub fn from_int(p: u32) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidExponent(p.to_string()));
        }
        Self::from_recip(Rational::new(1, i64::from(p)))
    }

    /// `p = num / den`.
    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if num <= 0 || den <= 0 {
            return Err(Error::InvalidExponent(format!("{num}/{den}")));
        }
        Self::from_recip(Rational::new(den, num))
    }

    pub fn recip(self) -> Rational {
        self.recip
    }

    pub fn is_infinite(self) -> bool {
        self.recip.is_zero()
    }

    /// `p` as a float (`f64::INFINITY` for `p = inf`).
    pub fn value(self) -> f64 {
        if self.is_infinite() {
            f64::INFINITY
        } else {
            ratio_to_f64(self.recip.recip())
        }
    }

    pub fn recip_f64(self) -> f64 {
        ratio_to_f64(self.recip)
    }

    /// `p` as an exact rational, `None` for `p = inf`.
    pub fn as_rational(self) -> Option<Rational> {
        (!self.is_infinite()).then(|| self.recip.recip())
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        other.recip.cmp(&self.recip)
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            None => write!(f, "inf"),
            Some(p) if p.is_integer() => write!(f, "{}", p.numer()),
            Some(p) => write!(f, "{}/{}", p.numer(), p.denom()),
        }
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Exponent({self})")
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Accepts `inf`, an integer, or a rational `a/b`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::InvalidExponent(s.to_string());
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => return Ok(Exponent::INFINITY),
            _ => {}
        }
        let (num, den) = match t.split_once('/') {
            Some((a, b)) => (
                a.trim().parse::<i64>().map_err(|_| bad())?,
                b.trim().parse::<i64>().map_err(|_| bad())?,
            ),
            None => (t.parse::<i64>().map_err(|_| bad())?, 1),
        };
        Self::from_ratio(num, den).map_err(|_| bad())
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `h_+ = max(h, 0)`.
pub fn positive_part(h: Rational) -> Rational {
    if h.is_negative() {
        Rational::zero()
    } else {
        h
    }
}

pub fn ratio_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `"num/den"` rendering used in JSON reports.
pub fn ratio_string(r: Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `base^e` with a single floating-point power; small denominators are
/// special-cased so that e.g. `16^(1/2)` is exactly 4.
pub fn pow_rational(base: f64, e: Rational) -> f64 {
    if e.is_zero() {
        return 1.0;
    }
    let (num, den) = (*e.numer(), *e.denom());
    match den {
        1 => powi_i64(base, num),
        2 => powi_i64(base.sqrt(), num),
        _ => base.powf(ratio_to_f64(e)),
    }
}

fn powi_i64(base: f64, n: i64) -> f64 {
    match i32::try_from(n) {
        Ok(n) => base.powi(n),
        Err(_) => base.powf(n as f64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_round_trip() {
        for p in 1..=50u32 {
            let e = Exponent::from_int(p).unwrap();
            assert_eq!(e.as_rational(), Some(Rational::from_integer(i64::from(p))));
            assert_eq!(e.to_string().parse::<Exponent>().unwrap(), e);
        }
        assert_eq!("inf".parse::<Exponent>().unwrap().recip(), Rational::zero());
    }

    #[test]
    fn parses_rationals() {
        let e: Exponent = "3/2".parse().unwrap();
        assert_eq!(e.recip(), Rational::new(2, 3));
        assert_eq!(e.to_string(), "3/2");
        let e: Exponent = "4/2".parse().unwrap();
        assert_eq!(e.to_string(), "2");
    }

    #[test]
    fn rejects_out_of_range() {
        for s in ["0", "1/2", "-3", "bogus", "", "2/0", "1.5"] {
            assert!(s.parse::<Exponent>().is_err(), "{s}");
        }
        assert!(Exponent::from_recip(Rational::new(3, 2)).is_err());
        assert!(Exponent::from_recip(Rational::new(-1, 2)).is_err());
    }

    #[test]
    fn ordering_follows_p() {
        let one = Exponent::ONE;
        let two = Exponent::TWO;
        let inf = Exponent::INFINITY;
        assert!(one < two && two < inf);
        assert_eq!(inf.value(), f64::INFINITY);
    }

    #[test]
    fn exact_powers() {
        assert_eq!(pow_rational(16.0, Rational::new(1, 2)), 4.0);
        assert_eq!(pow_rational(7.0, Rational::zero()), 1.0);
        assert_eq!(pow_rational(5.0, Rational::one()), 5.0);
        assert_eq!(pow_rational(256.0, Rational::new(1, 8)), 2.0);
    }
}
