//! Exact arithmetic in truncated local rings.
//!
//! Every coefficient ring in this crate is a finite-length chain ring: either
//! `k[t]/(t^N)` for a field `k` (the rationals or a prime field), or `Z/p^N`
//! with the distinguished element `t = p`. In both cases every element is a
//! unit multiple of a power of `t`, `t^N = 0`, and the ring is complete in the
//! `t`-adic topology on the nose: any `t`-adic series stops after `N` terms.

mod field;
mod padic;
mod parse;
mod spec;
mod truncated;

pub use field::{PrimeField, Rationals, ResidueField};
pub use padic::{PrimePowerIntegers, ZpElem};
pub use spec::{BaseField, RingSpec};
pub use truncated::{Digits, TruncatedPoly};

use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("element {0} is not a unit")]
    NotAUnit(String),
    #[error("cannot parse ring element {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("invalid ring description: {0}")]
    InvalidRing(String),
}

/// A commutative local ring `R` with maximal ideal `(t)` and `t^N = 0`.
///
/// Elements are plain values; all arithmetic goes through the ring so that the
/// same element type can serve rings of different precision.
pub trait TruncatedRing: Clone + Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Eq + Hash + Debug + Send + Sync;

    /// The nilpotency index `N` of `t`.
    fn precision(&self) -> usize;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    /// The distinguished element `t`.
    fn t(&self) -> Self::Elem;
    #[allow(clippy::wrong_self_convention)]
    fn from_i64(&self, n: i64) -> Self::Elem;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    /// `t`-adic valuation; the zero element has valuation `precision()`.
    fn valuation(&self, a: &Self::Elem) -> usize;

    /// Inverse of a unit.
    fn invert(&self, a: &Self::Elem) -> Result<Self::Elem, RingError>;

    /// The canonical quotient `a / t^k` for `valuation(a) >= k`.
    ///
    /// The quotient is only determined modulo `t^(N-k)`; the representative
    /// returned has its top `k` digits equal to zero.
    fn shift_down(&self, a: &Self::Elem, k: usize) -> Self::Elem;

    /// All elements, for finite rings small enough to enumerate.
    fn elements(&self) -> Option<Vec<Self::Elem>>;

    /// A random element; digits are drawn from a small range for infinite fields.
    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> Self::Elem;

    fn format(&self, a: &Self::Elem) -> String;
    fn parse(&self, s: &str) -> Result<Self::Elem, RingError>;
    fn spec(&self) -> RingSpec;

    /// Whether `a` is a well-formed element of this ring.
    fn contains(&self, a: &Self::Elem) -> bool;

    fn is_unit(&self, a: &Self::Elem) -> bool {
        self.valuation(a) == 0
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn t_pow(&self, k: usize) -> Self::Elem {
        if k >= self.precision() {
            return self.zero();
        }
        let t = self.t();
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.mul(&acc, &t);
        }
        acc
    }

    /// `a * t^k`.
    fn shift_up(&self, a: &Self::Elem, k: usize) -> Self::Elem {
        self.mul(a, &self.t_pow(k))
    }

    /// Splits `a = u * t^v` into the unit `u` (canonical) and `v`.
    ///
    /// Returns `None` for zero.
    fn unit_part(&self, a: &Self::Elem) -> Option<(Self::Elem, usize)> {
        let v = self.valuation(a);
        if v >= self.precision() {
            return None;
        }
        Some((self.shift_down(a, v), v))
    }

    fn sign(&self, negative: bool, a: &Self::Elem) -> Self::Elem {
        if negative {
            self.neg(a)
        } else {
            a.clone()
        }
    }

    fn elem_to_json(&self, a: &Self::Elem) -> serde_json::Value {
        serde_json::Value::String(self.format(a))
    }

    fn elem_from_json(&self, v: &serde_json::Value) -> Result<Self::Elem, RingError> {
        match v {
            serde_json::Value::String(s) => self.parse(s),
            serde_json::Value::Number(n) => match n.as_i64() {
                Some(i) => Ok(self.from_i64(i)),
                None => Err(RingError::Parse {
                    input: n.to_string(),
                    reason: "expected an integer".into(),
                }),
            },
            serde_json::Value::Array(digits) => {
                let t = self.t();
                let mut acc = self.zero();
                let mut power = self.one();
                for d in digits {
                    let c = self.elem_from_json(d)?;
                    acc = self.add(&acc, &self.mul(&c, &power));
                    power = self.mul(&power, &t);
                }
                Ok(acc)
            }
            other => Err(RingError::Parse {
                input: other.to_string(),
                reason: "expected a string, integer or digit array".into(),
            }),
        }
    }
}

/// `(-1)^k` as a boolean "is negative".
#[inline]
pub fn odd(k: i64) -> bool {
    k.rem_euclid(2) == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2(n: usize) -> TruncatedPoly<PrimeField> {
        TruncatedPoly::new(PrimeField::new(2).unwrap(), n).unwrap()
    }

    #[test]
    fn invert_one_plus_t_in_f2() {
        let r = f2(2);
        let x = r.parse("1+t").unwrap();
        assert_eq!(r.invert(&x).unwrap(), x);
        assert_eq!(r.invert(&r.one()).unwrap(), r.one());
    }

    #[test]
    fn invert_over_rationals_by_digit_recursion() {
        let r = TruncatedPoly::new(Rationals, 3).unwrap();
        let x = r.parse("2+t").unwrap();
        let y = r.invert(&x).unwrap();
        assert_eq!(r.mul(&x, &y), r.one());
        // 1/(2+t) = 1/2 - t/4 + t^2/8
        assert_eq!(y, r.parse("1/2 - 1/4*t + 1/8*t^2").unwrap());
    }

    #[test]
    fn non_units_refuse_inversion() {
        let r = f2(2);
        assert!(matches!(r.invert(&r.t()), Err(RingError::NotAUnit(_))));
        let z = PrimePowerIntegers::new(3, 2).unwrap();
        assert!(z.invert(&z.from_i64(6)).is_err());
        assert_eq!(z.mul(&z.invert(&z.from_i64(2)).unwrap(), &z.from_i64(2)), z.one());
    }

    #[test]
    fn t_is_nilpotent_of_exact_order() {
        for n in 1..5 {
            let r = f2(n);
            assert!(!r.is_zero(&r.t_pow(n - 1)));
            assert!(r.is_zero(&r.t_pow(n)));
            let z = PrimePowerIntegers::new(5, n).unwrap();
            assert!(!z.is_zero(&z.t_pow(n - 1)));
            assert!(z.is_zero(&z.mul(&z.t_pow(n - 1), &z.t())));
        }
    }

    #[test]
    fn shift_down_inverts_shift_up() {
        let r = TruncatedPoly::new(PrimeField::new(3).unwrap(), 4).unwrap();
        let a = r.parse("2*t + t^3").unwrap();
        let q = r.shift_down(&a, 1);
        assert_eq!(q, r.parse("2 + t^2").unwrap());
        assert_eq!(r.shift_up(&q, 1), a);
        let z = PrimePowerIntegers::new(3, 3).unwrap();
        let b = z.from_i64(18);
        assert_eq!(z.valuation(&b), 2);
        assert_eq!(z.shift_down(&b, 2), z.from_i64(2));
    }

    #[test]
    fn units_are_exactly_nonzero_constant_digit() {
        let r = f2(2);
        let units: Vec<_> = r.elements().unwrap().into_iter().filter(|x| r.is_unit(x)).collect();
        assert_eq!(units.len(), 2);
        for u in units {
            assert_eq!(r.mul(&u, &r.invert(&u).unwrap()), r.one());
        }
    }

    #[test]
    fn json_forms_agree() {
        let r = TruncatedPoly::new(Rationals, 3).unwrap();
        let a = r.elem_from_json(&serde_json::json!(["1/2", 0, -3])).unwrap();
        assert_eq!(a, r.parse("1/2 - 3*t^2").unwrap());
        assert_eq!(r.elem_from_json(&r.elem_to_json(&a)).unwrap(), a);
        assert_eq!(r.elem_from_json(&serde_json::json!(4)).unwrap(), r.from_i64(4));
    }
}
