//! Exact scalar fields: prime fields `Fp<P>` and the rationals `Q`.
//!
//! Everything downstream is generic over [`Field`]. The trait is a thin layer
//! over `num-traits` adding what exact linear algebra over an arbitrary field
//! needs: characteristic, embedding of integers, inversion and a stable text
//! form for reports.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
pub use num_traits::{One, Zero};
use rand::Rng;

pub trait Field:
    Clone
    + Debug
    + Display
    + PartialEq
    + Eq
    + Hash
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    /// 0 for the rationals, `p` for `Fp<p>`.
    fn characteristic() -> u64;

    fn from_i64(n: i64) -> Self;

    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;

    /// Config-style label: `"Q"` or `"Fp:<p>"`.
    fn label() -> String;

    /// Number of elements, `None` when infinite.
    fn order() -> Option<u64> {
        match Self::characteristic() {
            0 => None,
            p => Some(p),
        }
    }

    /// All elements of a finite field, in a fixed order.
    fn elements() -> Option<Vec<Self>> {
        Self::order().map(|p| (0..p as i64).map(Self::from_i64).collect())
    }

    /// A seeded random element; small numerators and denominators over `Q`.
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn from_u64(n: u64) -> Self {
        match Self::characteristic() {
            0 => {
                // q is always small, but stay exact for any u64.
                let hi = Self::from_i64((n >> 32) as i64);
                let lo = Self::from_i64((n & 0xffff_ffff) as i64);
                hi * Self::from_i64(1i64 << 32) + lo
            }
            p => Self::from_i64((n % p) as i64),
        }
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }

    fn sign(positive: bool) -> Self {
        if positive {
            Self::one()
        } else {
            -Self::one()
        }
    }
}

/// The prime field with `P` elements. `P` must be prime; this is checked by
/// [`Fp::check_prime`] and by the config layer, not at the type level.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fp<const P: u32>(u32);

impl<const P: u32> Fp<P> {
    pub const fn new(v: u32) -> Self {
        Fp(v % P)
    }

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn check_prime() -> bool {
        is_prime(P as u64)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `Some((p, e))` when `n = p^e` with `p` prime and `e >= 1`.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n % d == 0)?;
    let mut m = n;
    let mut e = 0;
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    (m == 1).then_some((p, e))
}

impl<const P: u32> Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u32> Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u32> Add for Fp<P> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let s = self.0 + o.0;
        Fp(if s >= P { s - P } else { s })
    }
}

impl<const P: u32> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Fp(if self.0 >= o.0 { self.0 - o.0 } else { self.0 + P - o.0 })
    }
}

impl<const P: u32> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Fp(((self.0 as u64 * o.0 as u64) % P as u64) as u32)
    }
}

impl<const P: u32> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Fp(if self.0 == 0 { 0 } else { P - self.0 })
    }
}

impl<const P: u32> AddAssign for Fp<P> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<const P: u32> SubAssign for Fp<P> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<const P: u32> MulAssign for Fp<P> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<const P: u32> Zero for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u32> One for Fp<P> {
    fn one() -> Self {
        Fp(1 % P)
    }
}

impl<const P: u32> Field for Fp<P> {
    fn characteristic() -> u64 {
        P as u64
    }

    fn from_i64(n: i64) -> Self {
        Fp(n.rem_euclid(P as i64) as u32)
    }

    fn inv(&self) -> Option<Self> {
        if self.0 == 0 {
            return None;
        }
        // Fermat: a^(p-2).
        Some(Field::pow(self, P as u64 - 2))
    }

    fn label() -> String {
        format!("Fp:{P}")
    }

    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Fp(rng.gen_range(0..P))
    }
}

/// Arbitrary-precision rationals.
pub type Q = BigRational;

impl Field for BigRational {
    fn characteristic() -> u64 {
        0
    }

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn label() -> String {
        "Q".to_string()
    }

    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let num: i64 = rng.gen_range(-6..=6);
        let den: i64 = rng.gen_range(1..=3);
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

/// Stable text of a scalar for reports: residues as integers, rationals as
/// `n` or `n/d`.
pub fn scalar_text<F: Field>(x: &F) -> String {
    x.to_string()
}


pub type F2 = Fp<2>;
pub type F3 = Fp<3>;
pub type F5 = Fp<5>;
pub type F7 = Fp<7>;
pub type F11 = Fp<11>;
pub type F13 = Fp<13>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fp_inverse_roundtrip() {
        for a in 1..7u32 {
            let x = F7::new(a);
            assert_eq!(x * x.inv().unwrap(), F7::one());
        }
        assert!(F7::zero().inv().is_none());
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(4), Some((2, 2)));
        assert_eq!(prime_power(27), Some((3, 3)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
        assert!(F3::check_prime());
    }

    #[test]
    fn rational_from_u64() {
        assert_eq!(Q::from_u64(5), Q::from_i64(5));
        assert_eq!(F3::from_u64(4), F3::one());
        assert_eq!(Field::pow(&Q::from_i64(3), 3), Q::from_i64(27));
        assert_eq!(Field::pow(&F2::zero(), 0), F2::one());
    }
}
