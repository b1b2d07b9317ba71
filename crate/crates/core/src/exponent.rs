//! Integrability exponents for the spaces `l_p`, including `p = infinity`.
//!
//! The infinite exponent is a distinct enum case, never a sentinel float, and
//! all derived arithmetic treats `1/infinity` as exactly `0`. The conjugate
//! exponent is computed through reciprocals (`1/p' = 1 - 1/p`) so that taking
//! the dual twice returns the original value exactly for the exponents used
//! throughout (`1`, `4/3`, `2`, `4`, `infinity`).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{CoreError, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub const INF: Exponent = Exponent::Infinity;

    /// Validates `p >= 1`. `f64::INFINITY` is accepted and mapped to the
    /// dedicated case.
    pub fn new(p: f64) -> Result<Exponent> {
        if p.is_nan() {
            return Err(CoreError::invalid("exponent must not be NaN"));
        }
        if p == f64::INFINITY {
            return Ok(Exponent::Infinity);
        }
        if p < 1.0 {
            return Err(CoreError::invalid(format!(
                "exponent must satisfy p >= 1, got {p}"
            )));
        }
        Ok(Exponent::Finite(p))
    }

    /// The exponent as a float; `infinity` maps to `f64::INFINITY`.
    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// `1/p`, with `1/infinity == 0` exactly.
    pub fn recip(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    fn from_recip(r: f64) -> Exponent {
        if r == 0.0 {
            Exponent::Infinity
        } else {
            Exponent::Finite(1.0 / r)
        }
    }

    /// The conjugate exponent `p' = p/(p-1)`, computed via `1/p' = 1 - 1/p`.
    pub fn dual(self) -> Exponent {
        Exponent::from_recip(1.0 - self.recip())
    }

    pub fn min(self, other: Exponent) -> Exponent {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Exponent) -> Exponent {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value().partial_cmp(&other.value())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Exponent> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") || t == "∞" {
            return Ok(Exponent::Infinity);
        }
        let p: f64 = t
            .parse()
            .map_err(|_| CoreError::invalid(format!("cannot parse exponent from {s:?}")))?;
        Exponent::new(p)
    }
}

impl serde::Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => ser.serialize_f64(*p),
            Exponent::Infinity => ser.serialize_str("inf"),
        }
    }
}

impl<'de> serde::Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Exponent;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "a number >= 1 or the string \"inf\"")
            }
            fn visit_f64<E: serde::de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Exponent::new(v).map_err(E::custom)
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                Exponent::new(v as f64).map_err(E::custom)
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                Exponent::new(v as f64).map_err(E::custom)
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                v.parse().map_err(E::custom)
            }
        }
        de.deserialize_any(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_values() {
        assert!(Exponent::new(0.5).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
        assert!(Exponent::new(-1.0).is_err());
        assert!(Exponent::new(1.0).is_ok());
    }

    #[test]
    fn dual_pairs() {
        let two = Exponent::new(2.0).unwrap();
        assert_eq!(two.dual(), two);
        let one = Exponent::new(1.0).unwrap();
        assert_eq!(one.dual(), Exponent::Infinity);
        assert_eq!(Exponent::Infinity.dual(), one);
        let four = Exponent::new(4.0).unwrap();
        let four_thirds = Exponent::new(4.0 / 3.0).unwrap();
        assert_eq!(four.dual(), four_thirds);
        assert_eq!(four_thirds.dual(), four);
    }

    #[test]
    fn dual_is_an_exact_involution_on_the_working_set() {
        for p in [1.0, 4.0 / 3.0, 2.0, 4.0, f64::INFINITY] {
            let e = Exponent::new(p).unwrap();
            assert_eq!(e.dual().dual(), e, "dual(dual({p})) drifted");
        }
    }

    #[test]
    fn infinity_reciprocal_is_zero() {
        assert_eq!(Exponent::Infinity.recip(), 0.0);
        assert_eq!(Exponent::Infinity.value(), f64::INFINITY);
    }

    #[test]
    fn parses_from_str() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert_eq!(
            "2".parse::<Exponent>().unwrap(),
            Exponent::new(2.0).unwrap()
        );
        assert!("0.3".parse::<Exponent>().is_err());
    }
}
