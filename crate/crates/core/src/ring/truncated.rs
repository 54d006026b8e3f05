use rand::Rng;
use smallvec::SmallVec;

use super::field::ResidueField;
use super::parse::parse_polynomial;
use super::spec::RingSpec;
use super::{RingError, TruncatedRing};

/// Coefficients of `1, t, ..., t^(N-1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Digits<S>(pub SmallVec<[S; 4]>);

impl<S> Digits<S> {
    pub fn as_slice(&self) -> &[S] {
        &self.0
    }
}

/// `k[t]/(t^N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedPoly<F: ResidueField> {
    field: F,
    precision: usize,
}

impl<F: ResidueField> TruncatedPoly<F> {
    pub fn new(field: F, precision: usize) -> Result<Self, RingError> {
        if precision == 0 {
            return Err(RingError::InvalidRing("precision must be positive".into()));
        }
        Ok(Self { field, precision })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn from_digits(&self, digits: &[F::Scalar]) -> Digits<F::Scalar> {
        let mut out: SmallVec<[F::Scalar; 4]> = SmallVec::with_capacity(self.precision);
        for j in 0..self.precision {
            out.push(digits.get(j).cloned().unwrap_or_else(|| self.field.zero()));
        }
        Digits(out)
    }

    fn zip(
        &self,
        a: &Digits<F::Scalar>,
        b: &Digits<F::Scalar>,
        f: impl Fn(&F::Scalar, &F::Scalar) -> F::Scalar,
    ) -> Digits<F::Scalar> {
        Digits(a.0.iter().zip(b.0.iter()).map(|(x, y)| f(x, y)).collect())
    }
}

impl<F: ResidueField> TruncatedRing for TruncatedPoly<F> {
    type Elem = Digits<F::Scalar>;

    fn precision(&self) -> usize {
        self.precision
    }

    fn zero(&self) -> Self::Elem {
        Digits((0..self.precision).map(|_| self.field.zero()).collect())
    }

    fn one(&self) -> Self::Elem {
        self.from_i64(1)
    }

    fn t(&self) -> Self::Elem {
        let mut z = self.zero();
        if self.precision > 1 {
            z.0[1] = self.field.one();
        }
        z
    }

    fn from_i64(&self, n: i64) -> Self::Elem {
        let mut z = self.zero();
        z.0[0] = self.field.from_i64(n);
        z
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.zip(a, b, |x, y| self.field.add(x, y))
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.zip(a, b, |x, y| self.field.sub(x, y))
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        Digits(a.0.iter().map(|x| self.field.neg(x)).collect())
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let n = self.precision;
        let mut out = self.zero();
        for i in 0..n {
            if self.field.is_zero(&a.0[i]) {
                continue;
            }
            for j in 0..n - i {
                if self.field.is_zero(&b.0[j]) {
                    continue;
                }
                let prod = self.field.mul(&a.0[i], &b.0[j]);
                out.0[i + j] = self.field.add(&out.0[i + j], &prod);
            }
        }
        out
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.0.iter().all(|x| self.field.is_zero(x))
    }

    fn valuation(&self, a: &Self::Elem) -> usize {
        a.0.iter()
            .position(|x| !self.field.is_zero(x))
            .unwrap_or(self.precision)
    }

    fn invert(&self, a: &Self::Elem) -> Result<Self::Elem, RingError> {
        let inv0 = self
            .field
            .inv(&a.0[0])
            .ok_or_else(|| RingError::NotAUnit(self.format(a)))?;
        // b_k = -a_0^{-1} * sum_{j=1..k} a_j b_{k-j}
        let mut b = self.zero();
        b.0[0] = inv0.clone();
        for k in 1..self.precision {
            let mut acc = self.field.zero();
            for j in 1..=k {
                acc = self.field.add(&acc, &self.field.mul(&a.0[j], &b.0[k - j]));
            }
            b.0[k] = self.field.neg(&self.field.mul(&inv0, &acc));
        }
        Ok(b)
    }

    fn shift_down(&self, a: &Self::Elem, k: usize) -> Self::Elem {
        debug_assert!(self.valuation(a) >= k);
        let mut out = self.zero();
        for j in 0..self.precision.saturating_sub(k) {
            out.0[j] = a.0[j + k].clone();
        }
        out
    }

    fn elements(&self) -> Option<Vec<Self::Elem>> {
        let digits = self.field.elements()?;
        let count = (digits.len() as u64).checked_pow(self.precision as u32)?;
        if count > 1 << 20 {
            return None;
        }
        let mut out = vec![self.zero()];
        for pos in 0..self.precision {
            let mut next = Vec::with_capacity(out.len() * digits.len());
            for e in &out {
                for d in &digits {
                    let mut x = e.clone();
                    x.0[pos] = d.clone();
                    next.push(x);
                }
            }
            out = next;
        }
        Some(out)
    }

    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> Self::Elem {
        Digits((0..self.precision).map(|_| self.field.random(rng)).collect())
    }

    fn format(&self, a: &Self::Elem) -> String {
        let mut out = String::new();
        for (j, d) in a.0.iter().enumerate() {
            if self.field.is_zero(d) {
                continue;
            }
            let (neg, body) = self.field.format(d);
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match j {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{j}"),
            };
            if j == 0 {
                out.push_str(&body);
            } else if body == "1" {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{body}*{mono}"));
            }
        }
        if out.is_empty() {
            "0".to_string()
        } else {
            out
        }
    }

    fn parse(&self, s: &str) -> Result<Self::Elem, RingError> {
        let mut out = self.zero();
        for m in parse_polynomial(s)? {
            if m.power >= self.precision {
                continue;
            }
            let c = self.field.parse_rational(&m.num, &m.den)?;
            out.0[m.power] = self.field.add(&out.0[m.power], &c);
        }
        Ok(out)
    }

    fn contains(&self, a: &Self::Elem) -> bool {
        a.0.len() == self.precision && a.0.iter().all(|d| self.field.is_canonical(d))
    }

    fn spec(&self) -> RingSpec {
        RingSpec::Truncated {
            field: self.field.base_field(),
            precision: self.precision,
        }
    }
}
