//! Floating point scalar used by every real-valued metric and ratio.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use alloy_primitives::U256;
use num_traits::{Float, FromPrimitive, NumCast};

/// Real number type the metrics are generic over: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + NumCast + Sum + Debug + Display + FromStr + Default + Send + Sync + 'static
{
    /// Nearest representable value of an unsigned integer, infinity if it does not fit.
    fn from_u64_lossy(v: u64) -> Self {
        <Self as NumCast>::from(v).unwrap_or_else(Self::infinity)
    }

    /// Nearest representable value of a wei amount.
    fn from_wei(v: U256) -> Self {
        <Self as NumCast>::from(<f64 as From<&U256>>::from(&v)).unwrap_or_else(Self::infinity)
    }

    fn from_f64_lossy(v: f64) -> Self {
        <Self as NumCast>::from(v).unwrap_or_else(Self::nan)
    }

    fn to_f64_lossy(self) -> f64 {
        <f64 as NumCast>::from(self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wei_conversion_is_correctly_rounded() {
        let v = U256::from(3u64) * U256::from(10u64).pow(U256::from(21u64));
        assert_eq!(f64::from_wei(v), 3e21);
        assert_eq!(f32::from_wei(v), 3e21f32);
        assert_eq!(f64::from_wei(U256::MAX), 1.157920892373162e77);
        assert!(f32::from_wei(U256::MAX).is_infinite());
    }
}
