//! Scalar abstractions.
//!
//! Similarity scores and heuristic values are generic over [`Real`] so the
//! search can run in `f32` or `f64`. Exact numeric evaluation of expression
//! trees is generic over [`Field`], implemented for [`BigRational`] and the
//! primitive floats.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Floating-point type used for similarity scores and heuristic values.
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as float")
    }
}

impl<T> Real for T where T: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}

/// A number system that expression trees can be evaluated in.
pub trait Field: Clone + PartialEq + Debug + Num + Neg<Output = Self> {
    /// Converts an exact literal. `None` if the value is not representable.
    fn from_rational(q: &BigRational) -> Option<Self>;

    /// Integer power; `None` where undefined (zero to a negative power).
    fn powi(&self, n: i64) -> Option<Self>;

    /// Value of an uninterpreted function application. `None` by default.
    fn apply(_name: &str, _args: &[Self]) -> Option<Self> {
        None
    }
}

impl Field for BigRational {
    fn from_rational(q: &BigRational) -> Option<Self> {
        Some(q.clone())
    }

    fn powi(&self, n: i64) -> Option<Self> {
        if self.is_zero() && n < 0 {
            return None;
        }
        let n = i32::try_from(n).ok()?;
        Some(num_traits::Pow::pow(self, n))
    }
}

macro_rules! float_field {
    ($t:ty) => {
        impl Field for $t {
            fn from_rational(q: &BigRational) -> Option<Self> {
                let n = q.numer().to_f64()?;
                let d = q.denom().to_f64()?;
                Some((n / d) as $t)
            }

            fn powi(&self, n: i64) -> Option<Self> {
                if *self == 0.0 && n < 0 {
                    return None;
                }
                Some(<$t>::powi(*self, i32::try_from(n).ok()?))
            }
        }
    };
}

float_field!(f64);
float_field!(f32);

pub(crate) fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub(crate) fn is_one(q: &BigRational) -> bool {
    q.is_one()
}

pub(crate) fn is_natural(q: &BigRational) -> bool {
    q.is_integer() && !q.is_negative()
}

/// Integer value of an exact literal, if it is an integer that fits in `i64`.
pub(crate) fn as_small_integer(q: &BigRational) -> Option<i64> {
    if q.is_integer() {
        q.numer().to_i64()
    } else {
        None
    }
}

/// An element of the prime field of order `2^61 - 1`.
///
/// Evaluating two expressions at the same random point in this field gives
/// a cheap fingerprint: different values prove the expressions differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Modular(u64);

impl Modular {
    pub const MODULUS: u64 = (1 << 61) - 1;

    pub fn new(v: u64) -> Self {
        Modular(v % Self::MODULUS)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn from_bigint(n: &BigInt) -> Self {
        let m = BigInt::from(Self::MODULUS);
        let r = ((n % &m) + &m) % &m;
        Modular(r.to_u64().expect("reduced below the modulus"))
    }

    fn pow_u64(self, mut e: u64) -> Self {
        let (mut base, mut acc) = (self, Modular(1));
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(self) -> Option<Self> {
        (self.0 != 0).then(|| self.pow_u64(Self::MODULUS - 2))
    }

    /// A fixed pseudo-random element derived from `name`.
    pub fn of_name(name: &str) -> Self {
        Modular::of_bytes(name.bytes())
    }

    fn of_bytes(bytes: impl Iterator<Item = u8>) -> Self {
        // FNV-1a, then a splitmix64 finalizer
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in bytes {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        h ^= h >> 30;
        h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h ^= h >> 27;
        h = h.wrapping_mul(0x94d0_49bb_1331_11eb);
        h ^= h >> 31;
        Modular::new(h)
    }
}

impl std::ops::Add for Modular {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Modular::new(self.0 + o.0)
    }
}

impl std::ops::Sub for Modular {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Modular::new(self.0 + Self::MODULUS - o.0)
    }
}

impl std::ops::Mul for Modular {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let p = u128::from(self.0) * u128::from(o.0);
        Modular((p % u128::from(Self::MODULUS)) as u64)
    }
}

impl std::ops::Div for Modular {
    type Output = Self;
    /// Panics on division by zero.
    fn div(self, o: Self) -> Self {
        self * o.inverse().expect("division by zero in the prime field")
    }
}

impl std::ops::Rem for Modular {
    type Output = Self;
    /// Division in a field is exact.
    fn rem(self, _: Self) -> Self {
        Modular(0)
    }
}

impl Neg for Modular {
    type Output = Self;
    fn neg(self) -> Self {
        Modular(0) - self
    }
}

impl Zero for Modular {
    fn zero() -> Self {
        Modular(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl One for Modular {
    fn one() -> Self {
        Modular(1)
    }
}

impl Num for Modular {
    type FromStrRadixErr = std::num::ParseIntError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        u64::from_str_radix(s, radix).map(Modular::new)
    }
}

impl Field for Modular {
    fn from_rational(q: &BigRational) -> Option<Self> {
        let n = Modular::from_bigint(q.numer());
        Some(n * Modular::from_bigint(q.denom()).inverse()?)
    }

    fn powi(&self, n: i64) -> Option<Self> {
        let base = if n < 0 { self.inverse()? } else { *self };
        Some(base.pow_u64(n.unsigned_abs()))
    }

    /// A pseudo-random function of the name and the argument values.
    fn apply(name: &str, args: &[Self]) -> Option<Self> {
        let bytes = name.bytes().chain(args.iter().flat_map(|a| a.0.to_le_bytes()));
        Some(Modular::of_bytes(bytes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_on_samples() {
        let xs = [0u64, 1, 2, 12345, Modular::MODULUS - 1, 1 << 60];
        for &a in &xs {
            let a = Modular::new(a);
            assert_eq!(a + (-a), Modular::zero());
            if let Some(inv) = a.inverse() {
                assert_eq!(a * inv, Modular::one());
                assert_eq!(a.powi(-3).unwrap() * a.powi(3).unwrap(), Modular::one());
            } else {
                assert!(a.is_zero());
            }
        }
        let half = Modular::from_rational(&BigRational::new(1.into(), 2.into())).unwrap();
        assert_eq!(half + half, Modular::one());
        let minus = Modular::from_rational(&BigRational::from_integer((-5).into())).unwrap();
        assert_eq!(minus + Modular::new(5), Modular::zero());
    }
}
