use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point type every numeric model quantity is expressed in.
///
/// Implemented for `f32` and `f64`. Box dimensions stay integral (`u64` mm)
/// and are not parameterized.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal. Panics only for values the type cannot hold.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Absolute slack used when comparing accumulated fractions against bounds.
    fn tolerance() -> Self {
        let floor = Self::lit(1e-9);
        let eps = Self::epsilon() * Self::lit(64.0);
        if eps > floor {
            eps
        } else {
            floor
        }
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_scales_with_precision() {
        assert_eq!(<f64 as Scalar>::tolerance(), 1e-9);
        assert!(<f32 as Scalar>::tolerance() > 1e-6);
    }

    #[test]
    fn literals_round_trip() {
        assert_eq!(f32::lit(0.25), 0.25f32);
        assert_eq!(f64::from_count(40), 40.0);
    }
}
