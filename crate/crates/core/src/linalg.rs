//! Smith form, linear solving and kernels directly over a chain ring.
//!
//! Because every element is a unit times a power of `t`, choosing the entry of
//! least valuation as pivot always divides the rest of its row and column, so
//! elimination never leaves the ring.

use std::collections::HashMap;

use thiserror::Error;

use crate::matrix::RMatrix;
use crate::ring::TruncatedRing;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
}

/// `P * A * Q = D` with `P`, `Q` invertible and `D` diagonal, `D[k][k] = t^valuations[k]`.
#[derive(Debug, Clone)]
pub struct SmithForm<R: TruncatedRing> {
    pub p: RMatrix<R>,
    pub q: RMatrix<R>,
    /// Pivot valuations, nondecreasing, one per nonzero diagonal entry.
    pub valuations: Vec<usize>,
}

impl<R: TruncatedRing> SmithForm<R> {
    pub fn rank(&self) -> usize {
        self.valuations.len()
    }

    /// Solves `A x = b`, setting every free coordinate to zero.
    pub fn solve(&self, b: &[R::Elem]) -> Result<Option<Vec<R::Elem>>, LinalgError> {
        let ring = self.p.ring();
        if b.len() != self.p.cols() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.p.cols(),
                got: b.len(),
            });
        }
        let c = self.p.apply(b);
        let mut y = vec![ring.zero(); self.q.rows()];
        for (k, ck) in c.iter().enumerate() {
            match self.valuations.get(k) {
                Some(&v) => {
                    if ring.valuation(ck) < v {
                        return Ok(None);
                    }
                    y[k] = ring.shift_down(ck, v);
                }
                None => {
                    if !ring.is_zero(ck) {
                        return Ok(None);
                    }
                }
            }
        }
        Ok(Some(self.q.apply(&y)))
    }

    pub fn kernel(&self) -> Vec<Vec<R::Elem>> {
        let ring = self.q.ring();
        let n = ring.precision();
        let mut out = Vec::new();
        for (k, &v) in self.valuations.iter().enumerate() {
            if v >= 1 {
                out.push(self.q.column(k).iter().map(|x| ring.shift_up(x, n - v)).collect());
            }
        }
        for k in self.rank()..self.q.cols() {
            out.push(self.q.column(k));
        }
        out
    }

    /// Exponents `e` of the cyclic summands `R/(t^e)` of the cokernel, ascending;
    /// free summands appear as `precision()`.
    pub fn cokernel_exponents(&self) -> Vec<usize> {
        let n = self.p.ring().precision();
        let mut out: Vec<usize> = self.valuations.iter().copied().filter(|&v| v >= 1).collect();
        out.extend(std::iter::repeat_n(n, self.p.rows() - self.rank()));
        out.sort_unstable();
        out
    }
}

pub fn smith_form<R: TruncatedRing>(a: &RMatrix<R>) -> SmithForm<R> {
    let ring = a.ring().clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut p = RMatrix::identity(&ring, rows);
    let mut q = RMatrix::identity(&ring, cols);
    let mut valuations = Vec::new();
    for k in 0..rows.min(cols) {
        let mut best: Option<(usize, usize, usize)> = None;
        'search: for i in k..rows {
            for j in k..cols {
                let v = ring.valuation(d.get(i, j));
                if v < ring.precision() && best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                    if v == 0 {
                        break 'search;
                    }
                }
            }
        }
        let Some((v, i, j)) = best else { break };
        d.swap_rows(k, i);
        p.swap_rows(k, i);
        d.swap_cols(k, j);
        q.swap_cols(k, j);
        let (unit, _) = ring.unit_part(d.get(k, k)).expect("pivot is nonzero");
        let inv = ring.invert(&unit).expect("unit part is a unit");
        d.scale_row(k, &inv);
        p.scale_row(k, &inv);
        for i in k + 1..rows {
            if ring.is_zero(d.get(i, k)) {
                continue;
            }
            let c = ring.shift_down(d.get(i, k), v);
            d.row_sub(i, k, &c);
            p.row_sub(i, k, &c);
        }
        for j in k + 1..cols {
            if ring.is_zero(d.get(k, j)) {
                continue;
            }
            let c = ring.shift_down(d.get(k, j), v);
            // column k is t^v e_k at this point
            d.set(k, j, ring.zero());
            q.col_sub(j, k, &c);
        }
        valuations.push(v);
    }
    SmithForm { p, q, valuations }
}

/// A solution of `A x = b`, or `None` when none exists over the ring.
pub fn solve_linear<R: TruncatedRing>(a: &RMatrix<R>, b: &[R::Elem]) -> Result<Option<Vec<R::Elem>>, LinalgError> {
    if b.len() != a.rows() {
        return Err(LinalgError::DimensionMismatch {
            expected: a.rows(),
            got: b.len(),
        });
    }
    smith_form(a).solve(b)
}

/// Generators of `{x : A x = 0}`.
pub fn kernel_generators<R: TruncatedRing>(a: &RMatrix<R>) -> Vec<Vec<R::Elem>> {
    smith_form(a).kernel()
}

/// Whether `x` lies in the column span of `a`.
pub fn in_column_span<R: TruncatedRing>(a: &RMatrix<R>, x: &[R::Elem]) -> bool {
    if a.cols() == 0 {
        return x.iter().all(|e| a.ring().is_zero(e));
    }
    matches!(solve_linear(a, x), Ok(Some(_)))
}

pub fn is_invertible<R: TruncatedRing>(a: &RMatrix<R>) -> bool {
    if !a.is_square() {
        return false;
    }
    let s = smith_form(a);
    s.rank() == a.rows() && s.valuations.iter().all(|&v| v == 0)
}

/// Exact determinant by Laplace expansion along columns, memoized on row subsets.
///
/// Division-free, so it is independent of the Smith form machinery.
pub fn determinant<R: TruncatedRing>(a: &RMatrix<R>) -> Result<R::Elem, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    assert!(n <= 24, "determinant limited to 24x24");
    let ring = a.ring();
    // level j holds det of columns j.. restricted to each row subset of size n - j
    let mut memo: HashMap<u32, R::Elem> = HashMap::new();
    memo.insert(0, ring.one());
    for j in (0..n).rev() {
        let mut next: HashMap<u32, R::Elem> = HashMap::new();
        for mask in subsets_of_size(n, n - j) {
            let mut acc = ring.zero();
            let mut position = 0;
            for i in 0..n {
                if mask & (1 << i) == 0 {
                    continue;
                }
                let entry = a.get(i, j);
                if !ring.is_zero(entry) {
                    let minor = &memo[&(mask & !(1 << i))];
                    let term = ring.mul(entry, minor);
                    acc = if position % 2 == 0 {
                        ring.add(&acc, &term)
                    } else {
                        ring.sub(&acc, &term)
                    };
                }
                position += 1;
            }
            next.insert(mask, acc);
        }
        memo = next;
    }
    Ok(memo
        .remove(&((1u64 << n) as u32).wrapping_sub(1))
        .unwrap_or_else(|| ring.one()))
}

fn subsets_of_size(n: usize, k: usize) -> Vec<u32> {
    (0u32..(1u64 << n) as u32)
        .filter(|m| m.count_ones() as usize == k)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{PrimeField, PrimePowerIntegers, Rationals, TruncatedPoly};

    fn f2t2() -> TruncatedPoly<PrimeField> {
        TruncatedPoly::new(PrimeField::new(2).unwrap(), 2).unwrap()
    }

    #[test]
    fn identity_solves_to_rhs() {
        let r = TruncatedPoly::new(Rationals, 3).unwrap();
        let b = vec![r.parse("1/2 + t").unwrap(), r.parse("-3t^2").unwrap()];
        let x = solve_linear(&RMatrix::identity(&r, 2), &b).unwrap().unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn scalar_t_system_matches_enumeration() {
        let r = f2t2();
        let a = RMatrix::from_rows(&r, vec![vec![r.t()]]);
        let x = solve_linear(&a, &[r.t()]).unwrap().unwrap();
        assert_eq!(r.mul(&r.t(), &x[0]), r.t());
        assert_eq!(solve_linear(&a, &[r.one()]).unwrap(), None);
        let hits = r
            .elements()
            .unwrap()
            .into_iter()
            .filter(|x| r.mul(&r.t(), x) == r.one())
            .count();
        assert_eq!(hits, 0);
    }

    #[test]
    fn kernels_of_small_matrices() {
        let r = f2t2();
        assert!(kernel_generators(&RMatrix::identity(&r, 3)).is_empty());
        let k = kernel_generators(&RMatrix::from_rows(&r, vec![vec![r.t()]]));
        assert_eq!(k, vec![vec![r.t()]]);
        let k = kernel_generators(&RMatrix::zeros(&r, 1, 1));
        assert_eq!(k, vec![vec![r.one()]]);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let r = f2t2();
        let err = solve_linear(&RMatrix::identity(&r, 2), &[r.one()]).unwrap_err();
        assert_eq!(err, LinalgError::DimensionMismatch { expected: 2, got: 1 });
    }

    #[test]
    fn smith_form_reconstructs_diagonal() {
        let z = PrimePowerIntegers::new(3, 3).unwrap();
        let a = RMatrix::from_rows(
            &z,
            vec![
                vec![z.from_i64(6), z.from_i64(9), z.from_i64(3)],
                vec![z.from_i64(18), z.from_i64(2), z.from_i64(0)],
            ],
        );
        let s = smith_form(&a);
        let d = s.p.mul(&a).mul(&s.q);
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                let expected = match s.valuations.get(i) {
                    Some(&v) if i == j => z.t_pow(v),
                    _ => z.zero(),
                };
                assert_eq!(d.get(i, j), &expected, "entry {i},{j}");
            }
        }
        assert!(is_invertible(&s.p) && is_invertible(&s.q));
    }

    #[test]
    fn determinant_by_expansion() {
        let r = TruncatedPoly::new(Rationals, 2).unwrap();
        let a = RMatrix::from_rows(
            &r,
            vec![
                vec![r.parse("1+t").unwrap(), r.from_i64(2)],
                vec![r.from_i64(3), r.parse("t").unwrap()],
            ],
        );
        // (1+t)t - 6 = -6 + t
        assert_eq!(determinant(&a).unwrap(), r.parse("-6 + t").unwrap());
        assert_eq!(
            determinant(&RMatrix::<TruncatedPoly<Rationals>>::identity(&r, 0)).unwrap(),
            r.one()
        );
    }

    #[test]
    fn cokernel_of_diag_t() {
        let r = TruncatedPoly::new(PrimeField::new(3).unwrap(), 3).unwrap();
        let a = RMatrix::from_rows(&r, vec![vec![r.t(), r.zero()], vec![r.zero(), r.zero()]]);
        assert_eq!(smith_form(&a).cokernel_exponents(), vec![1, 3]);
    }
}
