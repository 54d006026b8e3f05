use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use super::{BaseField, RingError};

/// The residue field `k` of a truncated polynomial ring `k[t]/(t^N)`.
pub trait ResidueField: Clone + Debug + PartialEq + Send + Sync + 'static {
    type Scalar: Clone + PartialEq + Eq + Hash + Debug + Send + Sync;

    fn zero(&self) -> Self::Scalar;
    fn one(&self) -> Self::Scalar;
    #[allow(clippy::wrong_self_convention)]
    fn from_i64(&self, n: i64) -> Self::Scalar;
    fn add(&self, a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;
    fn sub(&self, a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;
    fn neg(&self, a: &Self::Scalar) -> Self::Scalar;
    fn mul(&self, a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;
    fn inv(&self, a: &Self::Scalar) -> Option<Self::Scalar>;
    fn is_zero(&self, a: &Self::Scalar) -> bool;
    fn elements(&self) -> Option<Vec<Self::Scalar>>;
    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> Self::Scalar;
    /// Renders a scalar; the bool is true when the rendering carries a leading minus.
    fn format(&self, a: &Self::Scalar) -> (bool, String);
    fn parse_rational(&self, num: &BigInt, den: &BigInt) -> Result<Self::Scalar, RingError>;
    /// 0 for the rationals.
    fn characteristic(&self) -> u64;
    fn base_field(&self) -> BaseField;
    fn is_canonical(&self, a: &Self::Scalar) -> bool;
}

/// The field of rational numbers, with exact big-integer fractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

impl ResidueField for Rationals {
    type Scalar = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn elements(&self) -> Option<Vec<BigRational>> {
        None
    }
    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> BigRational {
        let num = rng.gen_range(-3i64..=3);
        let den = if rng.gen_bool(0.2) { 2 } else { 1 };
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn format(&self, a: &BigRational) -> (bool, String) {
        let abs = a.abs();
        let body = if abs.is_integer() {
            abs.numer().to_string()
        } else {
            format!("{}/{}", abs.numer(), abs.denom())
        };
        (a.is_negative(), body)
    }
    fn parse_rational(&self, num: &BigInt, den: &BigInt) -> Result<BigRational, RingError> {
        if den.is_zero() {
            return Err(RingError::Parse {
                input: format!("{num}/{den}"),
                reason: "zero denominator".into(),
            });
        }
        Ok(BigRational::new(num.clone(), den.clone()))
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn base_field(&self) -> BaseField {
        BaseField::Rational
    }
    fn is_canonical(&self, _: &BigRational) -> bool {
        true
    }
}

/// The prime field `F_p`, scalars stored as canonical residues in `0..p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, RingError> {
        if p < 2 || p > u32::MAX as u64 || !is_prime(p) {
            return Err(RingError::InvalidRing(format!("{p} is not a supported prime")));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl ResidueField for PrimeField {
    type Scalar = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        (a * b) % self.p
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        // a^(p-2) by square and multiply
        let (mut base, mut exp, mut acc) = (*a, self.p - 2, 1u64);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        Some(acc)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn elements(&self) -> Option<Vec<u64>> {
        Some((0..self.p).collect())
    }
    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> u64 {
        rng.gen_range(0..self.p)
    }
    fn format(&self, a: &u64) -> (bool, String) {
        (false, a.to_string())
    }
    fn parse_rational(&self, num: &BigInt, den: &BigInt) -> Result<u64, RingError> {
        let p = BigInt::from(self.p);
        let reduce = |x: &BigInt| -> u64 {
            let r = ((x % &p) + &p) % &p;
            r.to_string().parse().expect("residue fits in u64")
        };
        let d = reduce(den);
        let inv = self.inv(&d).ok_or_else(|| RingError::Parse {
            input: format!("{num}/{den}"),
            reason: format!("denominator vanishes in F_{}", self.p),
        })?;
        Ok(reduce(num) * inv % self.p)
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn base_field(&self) -> BaseField {
        BaseField::Prime(self.p)
    }
    fn is_canonical(&self, a: &u64) -> bool {
        *a < self.p
    }
}
