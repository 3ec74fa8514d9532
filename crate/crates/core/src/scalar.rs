//! Scalar abstractions.
//!
//! All combinatorial code is generic over an integer type implementing [`Int`]
//! (`i64`, `i128` or [`num_bigint::BigInt`]) and, where a real value is
//! involved, over a floating point type implementing [`Real`] (`f32`, `f64`).

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Float, FromPrimitive, Signed, ToPrimitive};

/// Signed integer usable as a coefficient or set element.
pub trait Int:
    Integer
    + Signed
    + Clone
    + Hash
    + Debug
    + Display
    + FromPrimitive
    + ToPrimitive
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + Send
    + Sync
    + 'static
{
    /// Base-2 logarithm of `|self|`. Exact for values below 2^53, otherwise
    /// computed from the bit length plus the leading 53 bits.
    fn log2(&self) -> f64;

    /// Number of significant bits of `|self|`.
    fn bit_len(&self) -> u64;

    /// Builds an integer from a decimal string.
    fn parse_decimal(s: &str) -> Option<Self> {
        Self::from_str_radix(s.trim(), 10).ok()
    }

    fn from_i64_lossless(v: i64) -> Self {
        Self::from_i64(v).expect("every Int holds an i64")
    }
}

macro_rules! impl_prim_int {
    ($t:ty) => {
        impl Int for $t {
            fn log2(&self) -> f64 {
                let v = self.unsigned_abs();
                if v < (1 << 53) {
                    (v as f64).log2()
                } else {
                    let bits = <$t>::BITS - v.leading_zeros();
                    let top = (v >> (bits - 53)) as f64;
                    (bits - 53) as f64 + top.log2()
                }
            }

            fn bit_len(&self) -> u64 {
                (<$t>::BITS - self.unsigned_abs().leading_zeros()) as u64
            }
        }
    };
}

impl_prim_int!(i64);
impl_prim_int!(i128);

impl Int for BigInt {
    fn log2(&self) -> f64 {
        let bits = self.bits();
        if bits <= 53 {
            return self.magnitude().to_f64().unwrap_or(0.0).log2();
        }
        let top = (self.magnitude() >> (bits - 53)).to_f64().unwrap_or(0.0);
        (bits - 53) as f64 + top.log2()
    }

    fn bit_len(&self) -> u64 {
        self.bits()
    }
}

/// Floating point type for real-valued parameters and bounds.
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}

impl Real for f32 {}
impl Real for f64 {}

/// Logarithm convention for the `2^{(log x)^a}` maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Two,
    Natural,
}

impl LogBase {
    pub fn log<T: Int>(self, x: &T) -> f64 {
        match self {
            LogBase::Two => x.log2(),
            LogBase::Natural => x.log2() * std::f64::consts::LN_2,
        }
    }
}

/// `⌊2^y⌋` as an integer of type `T`, or `None` if it does not fit.
///
/// Exponents of 53 or more are assembled from the 53-bit mantissa of `2^{frac(y)}`
/// shifted by the integer part, so arbitrarily large results are available for
/// `BigInt`. Beyond 2^53 the low bits are not meaningful.
pub fn pow2_floor<T: Int>(y: f64) -> Option<T> {
    if !y.is_finite() || y < 0.0 {
        return if y < 0.0 { Some(T::zero()) } else { None };
    }
    if y < 53.0 {
        return T::from_f64(y.exp2().floor());
    }
    let whole = y.floor();
    let mantissa = ((y - whole).exp2() * (1u64 << 52) as f64).floor() as u64;
    let shift = whole as u64 - 52;
    let two = T::from_i64_lossless(2);
    let scale = num_traits::checked_pow(two, usize::try_from(shift).ok()?)?;
    T::from_u64(mantissa)?.checked_mul(&scale)
}

/// `⌊2^{(log x)^a}⌋`, the map used by the tower and by the θ schedule.
pub fn iterated_log_map<T: Int>(x: &T, a: f64, base: LogBase) -> Option<T> {
    let l = base.log(x);
    if l < 0.0 {
        return None;
    }
    pow2_floor(l.powf(a))
}

/// Whether the value is beyond the range where `log2` is exact.
pub fn log_is_approximate<T: Int>(x: &T) -> bool {
    x.bit_len() > 53
}

/// Converts a big integer to `T` if it fits.
pub fn from_bigint<T: Int>(v: &BigInt) -> Option<T> {
    let mut out = T::zero();
    let base = T::from_u64(1 << 32)?;
    let (sign, digits) = v.to_u32_digits();
    for d in digits.iter().rev() {
        out = out.checked_mul(&base)?.checked_add(&T::from_u32(*d)?)?;
    }
    Some(if sign == Sign::Minus { -out } else { out })
}

/// Converts any [`Int`] to a `BigInt`.
pub fn to_bigint<T: Int>(v: &T) -> BigInt {
    if let Some(x) = v.to_i128() {
        return BigInt::from(x);
    }
    BigInt::parse_bytes(v.to_string().as_bytes(), 10).expect("decimal rendering")
}

/// Converts between integer types, failing on overflow.
pub fn convert<S: Int, T: Int>(v: &S) -> Option<T> {
    match v.to_i128() {
        Some(x) => T::from_i128(x),
        None => from_bigint(&to_bigint(v)),
    }
}
