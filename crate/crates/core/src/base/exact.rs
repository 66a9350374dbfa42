use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An exact real number. Every finite `f64` converts without loss, and sums
/// and differences stay exact, so translating an interval endpoint by `g` and
/// then by `-g` returns the original endpoint bit for bit.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactReal(BigRational);

impl ExactReal {
    pub fn zero() -> Self {
        ExactReal(BigRational::zero())
    }

    /// Panics on NaN or infinities; those are not group elements.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "ExactReal::from_f64 called with {x}");
        ExactReal(BigRational::from_float(x).expect("finite float"))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        ExactReal(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<f64> for ExactReal {
    fn from(x: f64) -> Self {
        ExactReal::from_f64(x)
    }
}

impl fmt::Debug for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

impl Add for &ExactReal {
    type Output = ExactReal;
    fn add(self, rhs: &ExactReal) -> ExactReal {
        ExactReal(&self.0 + &rhs.0)
    }
}

impl Add for ExactReal {
    type Output = ExactReal;
    fn add(self, rhs: ExactReal) -> ExactReal {
        ExactReal(self.0 + rhs.0)
    }
}

impl Sub for &ExactReal {
    type Output = ExactReal;
    fn sub(self, rhs: &ExactReal) -> ExactReal {
        ExactReal(&self.0 - &rhs.0)
    }
}

impl Sub for ExactReal {
    type Output = ExactReal;
    fn sub(self, rhs: ExactReal) -> ExactReal {
        ExactReal(self.0 - rhs.0)
    }
}

impl Neg for &ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        ExactReal(-&self.0)
    }
}

impl Neg for ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        ExactReal(-self.0)
    }
}

// Reports carry the nearest double; the exact value only matters in memory.
impl Serialize for ExactReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.to_f64())
    }
}

impl<'de> Deserialize<'de> for ExactReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let x = f64::deserialize(d)?;
        if !x.is_finite() {
            return Err(serde::de::Error::custom("non-finite real"));
        }
        Ok(ExactReal::from_f64(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn translation_round_trip_is_exact() {
        let a = ExactReal::from_f64(-std::f64::consts::FRAC_PI_2);
        let g = ExactReal::from_f64(0.7);
        let back = &(&a - &g) + &g;
        assert_eq!(back, a);
        // the float route is not exact for this pair
        assert_ne!((-std::f64::consts::FRAC_PI_2 - 0.7) + 0.7, -std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn ratio_conversion() {
        assert_eq!(ExactReal::from_ratio(3, 4).to_f64(), 0.75);
        assert_eq!(ExactReal::from_ratio(3, 4), ExactReal::from_f64(0.75));
    }
}
