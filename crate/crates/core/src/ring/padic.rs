use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use rand::Rng;

use super::field::is_prime;
use super::parse::parse_polynomial;
use super::spec::RingSpec;
use super::{RingError, TruncatedRing};

/// A residue in `0..p^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZpElem(pub u64);

/// `Z/p^N` with distinguished element `t = p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimePowerIntegers {
    p: u64,
    precision: usize,
    modulus: u64,
}

impl PrimePowerIntegers {
    /// Requires `p^N < 2^62` so that products fit in `u128` and sums in `u64`.
    pub fn new(p: u64, precision: usize) -> Result<Self, RingError> {
        if !is_prime(p) {
            return Err(RingError::InvalidRing(format!("{p} is not prime")));
        }
        if precision == 0 {
            return Err(RingError::InvalidRing("precision must be positive".into()));
        }
        let modulus = (0..precision)
            .try_fold(1u64, |acc, _| acc.checked_mul(p).filter(|m| *m < 1 << 62))
            .ok_or_else(|| RingError::InvalidRing(format!("{p}^{precision} is too large")))?;
        Ok(Self { p, precision, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn reduce_big(&self, x: &BigInt) -> u64 {
        let m = BigInt::from(self.modulus);
        let r = ((x % &m) + &m) % &m;
        r.to_u64().expect("residue below modulus")
    }
}

impl TruncatedRing for PrimePowerIntegers {
    type Elem = ZpElem;

    fn precision(&self) -> usize {
        self.precision
    }
    fn zero(&self) -> ZpElem {
        ZpElem(0)
    }
    fn one(&self) -> ZpElem {
        ZpElem(1 % self.modulus)
    }
    fn t(&self) -> ZpElem {
        ZpElem(self.p % self.modulus)
    }
    fn from_i64(&self, n: i64) -> ZpElem {
        ZpElem((n as i128).rem_euclid(self.modulus as i128) as u64)
    }
    fn add(&self, a: &ZpElem, b: &ZpElem) -> ZpElem {
        ZpElem((a.0 + b.0) % self.modulus)
    }
    fn sub(&self, a: &ZpElem, b: &ZpElem) -> ZpElem {
        ZpElem((a.0 + self.modulus - b.0) % self.modulus)
    }
    fn neg(&self, a: &ZpElem) -> ZpElem {
        ZpElem((self.modulus - a.0) % self.modulus)
    }
    fn mul(&self, a: &ZpElem, b: &ZpElem) -> ZpElem {
        ZpElem(((a.0 as u128 * b.0 as u128) % self.modulus as u128) as u64)
    }
    fn is_zero(&self, a: &ZpElem) -> bool {
        a.0 == 0
    }
    fn valuation(&self, a: &ZpElem) -> usize {
        if a.0 == 0 {
            return self.precision;
        }
        let (mut x, mut v) = (a.0, 0);
        while x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        v
    }
    fn invert(&self, a: &ZpElem) -> Result<ZpElem, RingError> {
        if a.0.is_multiple_of(self.p) {
            return Err(RingError::NotAUnit(self.format(a)));
        }
        // extended Euclid on (a, p^N)
        let (mut r0, mut r1) = (self.modulus as i128, a.0 as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        Ok(ZpElem(s0.rem_euclid(self.modulus as i128) as u64))
    }
    fn shift_down(&self, a: &ZpElem, k: usize) -> ZpElem {
        debug_assert!(self.valuation(a) >= k);
        if k >= self.precision {
            return ZpElem(0);
        }
        ZpElem(a.0 / self.p.pow(k as u32))
    }
    fn elements(&self) -> Option<Vec<ZpElem>> {
        if self.modulus > 1 << 20 {
            return None;
        }
        Some((0..self.modulus).map(ZpElem).collect())
    }
    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> ZpElem {
        ZpElem(rng.gen_range(0..self.modulus))
    }
    fn format(&self, a: &ZpElem) -> String {
        a.0.to_string()
    }
    fn parse(&self, s: &str) -> Result<ZpElem, RingError> {
        let mut acc = BigInt::from(0);
        for m in parse_polynomial(s)? {
            let mut term = m.num.clone() * BigInt::from(self.p).pow(m.power as u32);
            if !m.den.is_one() {
                let den = self.reduce_big(&m.den);
                let inv = self.invert(&ZpElem(den)).map_err(|_| RingError::Parse {
                    input: s.to_string(),
                    reason: "denominator is not a unit".into(),
                })?;
                term *= BigInt::from(inv.0);
            }
            acc += term;
        }
        if acc.is_negative() {
            acc += BigInt::from(self.modulus) * (-&acc / BigInt::from(self.modulus) + 1);
        }
        Ok(ZpElem(self.reduce_big(&acc)))
    }
    fn contains(&self, a: &ZpElem) -> bool {
        a.0 < self.modulus
    }

    fn spec(&self) -> RingSpec {
        RingSpec::PrimePower {
            p: self.p,
            precision: self.precision,
        }
    }

    fn elem_to_json(&self, a: &ZpElem) -> serde_json::Value {
        serde_json::Value::from(a.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_mod_prime_power() {
        let z = PrimePowerIntegers::new(3, 3).unwrap();
        assert_eq!(z.modulus(), 27);
        assert_eq!(z.from_i64(-1), ZpElem(26));
        assert_eq!(z.mul(&z.from_i64(9), &z.t()), z.zero());
        assert_eq!(z.parse("1 + 2t").unwrap(), ZpElem(7));
        assert_eq!(z.parse("1/2").unwrap(), z.invert(&ZpElem(2)).unwrap());
        for x in z.elements().unwrap() {
            if z.is_unit(&x) {
                assert_eq!(z.mul(&x, &z.invert(&x).unwrap()), z.one());
            }
        }
    }

    #[test]
    fn rejects_oversized_moduli() {
        assert!(PrimePowerIntegers::new(2, 70).is_err());
        assert!(PrimePowerIntegers::new(4, 2).is_err());
    }
}
