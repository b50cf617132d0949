//! Precision-generic scalar arithmetic.
//!
//! The integrators are written once against [`Real`] and instantiated for
//! `f64` and, with the `extended` feature, for an MPFR-backed float with a
//! configurable mantissa width.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Working precision of a computation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Precision {
    #[default]
    Double,
    /// MPFR float with the given mantissa width in bits.
    Extended(u32),
}

impl Precision {
    /// Maps a bit count from the command line. 64 selects native doubles.
    pub fn from_bits(bits: u32) -> Result<Self> {
        match bits {
            64 => Ok(Precision::Double),
            128 | 256 | 512 => Ok(Precision::Extended(bits)),
            other => Err(Error::InvalidArgument(format!(
                "precision must be one of 64, 128, 256, 512 bits, got {other}"
            ))),
        }
    }

    pub fn bits(self) -> u32 {
        match self {
            Precision::Double => 64,
            Precision::Extended(bits) => bits,
        }
    }

    /// Unit roundoff of the active precision, as a double.
    pub fn epsilon(self) -> f64 {
        match self {
            Precision::Double => f64::EPSILON,
            Precision::Extended(bits) => 2f64.powi(1 - bits as i32),
        }
    }
}

pub trait Real:
    Clone
    + Debug
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    /// Whatever is needed to create new values (the mantissa width for MPFR).
    type Ctx: Copy + Send + Sync + Debug;

    fn ctx(&self) -> Self::Ctx;
    fn from_f64(x: f64, ctx: Self::Ctx) -> Self;
    fn from_ratio(num: i64, den: i64, ctx: Self::Ctx) -> Self;
    fn to_f64(&self) -> f64;
    fn epsilon(ctx: Self::Ctx) -> f64;

    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn powi(&self, k: i32) -> Self;
    /// `self^e` for `self > 0`.
    fn powf(&self, e: f64) -> Self;
    fn is_finite(&self) -> bool;

    fn lift(&self, x: f64) -> Self {
        Self::from_f64(x, self.ctx())
    }

    fn is_sign_positive(&self) -> bool {
        self.to_f64() > 0.0
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Real for f64 {
    type Ctx = ();

    fn ctx(&self) {}

    fn from_f64(x: f64, _: ()) -> Self {
        x
    }

    fn from_ratio(num: i64, den: i64, _: ()) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn epsilon(_: ()) -> f64 {
        f64::EPSILON
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }

    fn ln(&self) -> Self {
        f64::ln(*self)
    }

    fn exp(&self) -> Self {
        f64::exp(*self)
    }

    fn powi(&self, k: i32) -> Self {
        f64::powi(*self, k)
    }

    fn powf(&self, e: f64) -> Self {
        f64::powf(*self, e)
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn is_sign_positive(&self) -> bool {
        *self > 0.0
    }
}

#[cfg(feature = "extended")]
pub use mp::Mp;

#[cfg(feature = "extended")]
mod mp {
    use std::cmp::Ordering;
    use std::ops::{Add, Div, Mul, Neg, Sub};

    use rug::ops::Pow;
    use rug::Float;

    use super::Real;

    /// MPFR float; every value carries its own precision and results take
    /// the precision of the left operand.
    #[derive(Debug, Clone, PartialEq)]
    pub struct Mp(pub Float);

    impl Mp {
        pub fn new(x: f64, bits: u32) -> Self {
            Mp(Float::with_val(bits, x))
        }

        pub fn prec(&self) -> u32 {
            self.0.prec()
        }
    }

    impl PartialOrd for Mp {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            self.0.partial_cmp(&other.0)
        }
    }

    macro_rules! binop {
        ($tr:ident, $m:ident) => {
            impl $tr for Mp {
                type Output = Mp;
                fn $m(self, rhs: Mp) -> Mp {
                    Mp($tr::$m(self.0, &rhs.0))
                }
            }
            impl<'a> $tr<&'a Mp> for Mp {
                type Output = Mp;
                fn $m(self, rhs: &'a Mp) -> Mp {
                    Mp($tr::$m(self.0, &rhs.0))
                }
            }
        };
    }

    binop!(Add, add);
    binop!(Sub, sub);
    binop!(Mul, mul);
    binop!(Div, div);

    impl Neg for Mp {
        type Output = Mp;
        fn neg(self) -> Mp {
            Mp(-self.0)
        }
    }

    impl Real for Mp {
        type Ctx = u32;

        fn ctx(&self) -> u32 {
            self.0.prec()
        }

        fn from_f64(x: f64, bits: u32) -> Self {
            Mp(Float::with_val(bits, x))
        }

        fn from_ratio(num: i64, den: i64, bits: u32) -> Self {
            Mp(Float::with_val(bits, num) / Float::with_val(bits, den))
        }

        fn to_f64(&self) -> f64 {
            self.0.to_f64()
        }

        fn epsilon(bits: u32) -> f64 {
            2f64.powi(1 - bits as i32)
        }

        fn abs(&self) -> Self {
            Mp(self.0.clone().abs())
        }

        fn sqrt(&self) -> Self {
            Mp(self.0.clone().sqrt())
        }

        fn ln(&self) -> Self {
            Mp(self.0.clone().ln())
        }

        fn exp(&self) -> Self {
            Mp(self.0.clone().exp())
        }

        fn powi(&self, k: i32) -> Self {
            Mp(self.0.clone().pow(k))
        }

        fn powf(&self, e: f64) -> Self {
            let exponent = Float::with_val(self.0.prec(), e);
            Mp(self.0.clone().pow(&exponent))
        }

        fn is_finite(&self) -> bool {
            self.0.is_finite()
        }

        fn is_sign_positive(&self) -> bool {
            self.0.is_sign_positive() && !self.0.is_zero()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_bits_mapping() {
        assert_eq!(Precision::from_bits(64).unwrap(), Precision::Double);
        assert_eq!(Precision::from_bits(256).unwrap(), Precision::Extended(256));
        assert!(Precision::from_bits(100).is_err());
        assert!(Precision::Extended(256).epsilon() < 1e-70);
    }

    #[cfg(feature = "extended")]
    #[test]
    fn mp_keeps_precision_and_exact_ratios() {
        let third = Mp::from_ratio(1, 3, 256);
        let back = third.clone() * Mp::from_f64(3.0, 256);
        let err = (back - Mp::from_f64(1.0, 256)).abs().to_f64();
        assert!(err < 1e-75, "err = {err}");
        assert_eq!(third.prec(), 256);
        let x = Mp::from_f64(2.0, 256).powf(0.5);
        assert!((x.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-16);
        assert!(Mp::from_f64(-1.0, 128) < Mp::from_f64(0.5, 128));
    }
}
