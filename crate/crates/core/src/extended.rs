//! Extended real values for conjugates and support functions.
//!
//! Fenchel conjugates and support functions of unbounded sets take the value
//! +∞. That value is carried as an explicit variant, never as `f64::INFINITY`
//! spilling out of overflowing arithmetic, so every +∞ in a result was put
//! there deliberately.

use serde::{Deserialize, Serialize};

/// A real number or +∞.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInf => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    /// Unwraps a finite value; panics on +∞ (test/diagnostic convenience).
    pub fn expect_finite(self, ctx: &str) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => panic!("expected finite value in {ctx}, got +inf"),
        }
    }

    /// `self + x` with +∞ absorbing.
    pub fn add_finite(self, x: f64) -> ExtReal {
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v + x),
            ExtReal::PosInf => ExtReal::PosInf,
        }
    }

    /// `s * self` for s > 0 (positive scaling preserves +∞).
    pub fn scale_pos(self, s: f64) -> ExtReal {
        assert!(s > 0.0, "scale_pos requires a positive factor, got {s}");
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(s * v),
            ExtReal::PosInf => ExtReal::PosInf,
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::Finite(v)
    }
}

impl std::fmt::Display for ExtReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => write!(f, "+inf"),
        }
    }
}

// JSON form: finite values as numbers, +∞ as the string "+inf".
impl Serialize for ExtReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => s.serialize_f64(*v),
            ExtReal::PosInf => s.serialize_str("+inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::Number(n) => n
                .as_f64()
                .map(ExtReal::Finite)
                .ok_or_else(|| D::Error::custom("non-f64 number")),
            serde_json::Value::String(s) if s == "+inf" => Ok(ExtReal::PosInf),
            other => Err(D::Error::custom(format!("invalid extended real: {other}"))),
        }
    }
}
