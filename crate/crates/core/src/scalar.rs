//! Scalar abstractions.
//!
//! Two families of scalars appear in this crate:
//!
//! * [`Exact`] — ordered fields with exact arithmetic. The coherence checker and
//!   the simplex solver behind it only ever run on these (typically
//!   [`Rational`](crate::Rational)), so no tolerance enters a yes/no verdict.
//! * [`Real`] — IEEE floats used for Hilbert-space work. Each float type carries
//!   its own structural and composite tolerances.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// Ordered field with exact arithmetic.
pub trait Exact: Clone + Debug + Display + Num + Signed + PartialOrd + Ord {
    fn from_int(v: i64) -> Self;
}

impl Exact for BigRational {
    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

impl Exact for Ratio<i64> {
    fn from_int(v: i64) -> Self {
        Ratio::from_integer(v)
    }
}

impl Exact for Ratio<i128> {
    fn from_int(v: i64) -> Self {
        Ratio::from_integer(v as i128)
    }
}

/// Floating point scalar used by the Hilbert-space layer.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Tolerance for structural checks: hermiticity, idempotence, orthonormality.
    fn structural_tol() -> Self;
    /// Tolerance for quantities accumulated over several operations.
    fn composite_tol() -> Self;

    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }
}

impl Real for f64 {
    fn structural_tol() -> Self {
        1e-9
    }
    fn composite_tol() -> Self {
        1e-8
    }
}

impl Real for f32 {
    fn structural_tol() -> Self {
        1e-5
    }
    fn composite_tol() -> Self {
        1e-4
    }
}

/// Parse `"num/den"` (or a bare integer) into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Format a rational as `"num/den"`, always with an explicit denominator.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
