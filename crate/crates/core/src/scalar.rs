//! Scalar abstraction for the hot Jones-space path.
//!
//! The per-symbol tracker step is written against [`Real`] rather than `f64`
//! so that the same code can be executed with an instrumented scalar that
//! counts arithmetic operations and comparisons.

use core::fmt::Debug;
use core::ops::Neg;

use num_traits::Num;

/// Real field used by the generic Jones-space routines.
///
/// Implementors must count (or not) their own arithmetic; conversions through
/// [`Real::from_f64`] and [`Real::to_f64`] are treated as constant loads and
/// inspection, not arithmetic.
pub trait Real: Copy + Debug + PartialOrd + Num + Neg<Output = Self> {
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
}

impl Real for f64 {
    #[inline(always)]
    fn from_f64(v: f64) -> Self {
        v
    }

    #[inline(always)]
    fn to_f64(self) -> f64 {
        self
    }

    #[inline(always)]
    fn sqrt(self) -> Self {
        math::sqrt(self)
    }

    #[inline(always)]
    fn sin(self) -> Self {
        math::sin(self)
    }

    #[inline(always)]
    fn cos(self) -> Self {
        math::cos(self)
    }
}

/// `f64` elementary functions, routed to `std` when available and to `libm`
/// otherwise.
pub mod math {
    #[cfg(feature = "std")]
    mod imp {
        #[inline(always)]
        pub fn sqrt(x: f64) -> f64 {
            x.sqrt()
        }
        #[inline(always)]
        pub fn sin(x: f64) -> f64 {
            x.sin()
        }
        #[inline(always)]
        pub fn cos(x: f64) -> f64 {
            x.cos()
        }
        #[inline(always)]
        pub fn acos(x: f64) -> f64 {
            x.acos()
        }
        #[inline(always)]
        pub fn atan2(y: f64, x: f64) -> f64 {
            y.atan2(x)
        }
        #[inline(always)]
        pub fn ln(x: f64) -> f64 {
            x.ln()
        }
        #[inline(always)]
        pub fn exp(x: f64) -> f64 {
            x.exp()
        }
        #[inline(always)]
        pub fn round(x: f64) -> f64 {
            x.round()
        }
    }

    #[cfg(not(feature = "std"))]
    mod imp {
        pub use libm::{acos, atan2, cos, exp, log as ln, round, sin, sqrt};
    }

    pub use imp::*;
}
