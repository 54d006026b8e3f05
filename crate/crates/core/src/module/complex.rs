use thiserror::Error;

use crate::linalg::{kernel_generators, smith_form};
use crate::matrix::RMatrix;
use crate::ring::TruncatedRing;

use super::Vector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("window [{lo}, {hi}] needs data through degree {needed}, available through {available}")]
    WindowTooWide {
        lo: i64,
        hi: i64,
        needed: i64,
        available: i64,
    },
    #[error("malformed complex: {0}")]
    Shape(String),
}

/// A bounded complex of finitely generated `R`-modules `C_d = ⊕_k R/(t^{e_k})`.
///
/// Components are free when every exponent equals the precision. Elements of
/// `C_d` are coordinate vectors, read modulo the torsion.
#[derive(Debug, Clone, PartialEq)]
pub struct RComplex<R: TruncatedRing> {
    ring: R,
    lo: i64,
    /// `torsion[d - lo][k]` is the exponent of the `k`-th summand of `C_d`.
    torsion: Vec<Vec<usize>>,
    /// `diffs[d - lo]` is `∂_d : C_d -> C_{d-1}`.
    diffs: Vec<RMatrix<R>>,
    complete_through: Option<i64>,
}

impl<R: TruncatedRing> RComplex<R> {
    /// A complex of free modules in degrees `lo..lo + ranks.len()`.
    pub fn free(ring: &R, lo: i64, ranks: Vec<usize>, diffs: Vec<RMatrix<R>>) -> Result<Self, ComplexError> {
        let n = ring.precision();
        let torsion = ranks.iter().map(|&r| vec![n; r]).collect();
        Self::with_torsion(ring, lo, torsion, diffs)
    }

    pub fn with_torsion(
        ring: &R,
        lo: i64,
        torsion: Vec<Vec<usize>>,
        diffs: Vec<RMatrix<R>>,
    ) -> Result<Self, ComplexError> {
        if torsion.len() != diffs.len() {
            return Err(ComplexError::Shape("one differential per degree".into()));
        }
        for (k, m) in diffs.iter().enumerate() {
            let below = if k == 0 { 0 } else { torsion[k - 1].len() };
            if m.cols() != torsion[k].len() || (m.rows() != below && !(k == 0 && m.rows() == 0)) {
                return Err(ComplexError::Shape(format!(
                    "differential in degree {} is {}x{}, expected {below}x{}",
                    lo + k as i64,
                    m.rows(),
                    m.cols(),
                    torsion[k].len()
                )));
            }
        }
        if torsion.iter().flatten().any(|&e| e == 0 || e > ring.precision()) {
            return Err(ComplexError::Shape("torsion exponents must lie in 1..=N".into()));
        }
        Ok(Self {
            ring: ring.clone(),
            lo,
            torsion,
            diffs,
            complete_through: None,
        })
    }

    pub fn zero(ring: &R) -> Self {
        Self {
            ring: ring.clone(),
            lo: 0,
            torsion: vec![],
            diffs: vec![],
            complete_through: None,
        }
    }

    /// Marks the complex as a truncation: data in degrees above `c` is incomplete.
    pub fn with_complete_through(mut self, c: Option<i64>) -> Self {
        self.complete_through = c;
        self
    }

    pub fn complete_through(&self) -> Option<i64> {
        self.complete_through
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    /// Degrees with represented data, `None` when there are none.
    pub fn bounds(&self) -> Option<(i64, i64)> {
        if self.torsion.is_empty() {
            None
        } else {
            Some((self.lo, self.lo + self.torsion.len() as i64 - 1))
        }
    }

    pub fn rank(&self, d: i64) -> usize {
        self.torsion_of(d).len()
    }

    pub fn torsion_of(&self, d: i64) -> &[usize] {
        let k = d - self.lo;
        if k < 0 || k >= self.torsion.len() as i64 {
            &[]
        } else {
            &self.torsion[k as usize]
        }
    }

    pub fn differential(&self, d: i64) -> RMatrix<R> {
        let k = d - self.lo;
        if k < 0 || k >= self.diffs.len() as i64 || (k == 0 && self.diffs[0].rows() != self.rank(d - 1)) {
            return RMatrix::zeros(&self.ring, self.rank(d - 1), self.rank(d));
        }
        self.diffs[k as usize].clone()
    }

    /// Columns `t^{e_k} e_k` for the torsion summands of `C_d`.
    pub fn torsion_matrix(&self, d: i64) -> RMatrix<R> {
        let n = self.ring.precision();
        let cols: Vec<Vector<R>> = self
            .torsion_of(d)
            .iter()
            .enumerate()
            .filter(|(_, &e)| e < n)
            .map(|(k, &e)| {
                let mut v = vec![self.ring.zero(); self.rank(d)];
                v[k] = self.ring.t_pow(e);
                v
            })
            .collect();
        RMatrix::from_columns(&self.ring, self.rank(d), &cols)
    }

    /// Whether `x ∈ C_d` is zero modulo torsion.
    pub fn is_zero_element(&self, d: i64, x: &[R::Elem]) -> bool {
        x.iter()
            .zip(self.torsion_of(d))
            .all(|(c, &e)| self.ring.valuation(c) >= e)
    }

    /// Whether `∂∘∂ = 0` modulo torsion; on failure returns the degree.
    pub fn check_square_zero(&self) -> Result<(), i64> {
        let Some((lo, hi)) = self.bounds() else { return Ok(()) };
        for d in lo + 1..=hi {
            let sq = self.differential(d - 1).mul(&self.differential(d));
            for j in 0..sq.cols() {
                if !self.is_zero_element(d - 2, &sq.column(j)) {
                    return Err(d);
                }
            }
        }
        Ok(())
    }

    /// Generators of the cycles `{x ∈ C_d : ∂x ≡ 0}`, as columns.
    pub fn cycle_generators(&self, d: i64) -> RMatrix<R> {
        let r = self.rank(d);
        let stacked = self.differential(d).hstack(&self.torsion_matrix(d - 1).neg());
        let cols: Vec<Vector<R>> = kernel_generators(&stacked)
            .into_iter()
            .map(|k| k[..r].to_vec())
            .filter(|k| k.iter().any(|x| !self.ring.is_zero(x)))
            .collect();
        RMatrix::from_columns(&self.ring, r, &cols)
    }

    /// Boundaries plus torsion relations in `C_d`, as columns.
    pub fn boundary_generators(&self, d: i64) -> RMatrix<R> {
        self.differential(d + 1).hstack(&self.torsion_matrix(d))
    }

    /// Invariant factors of `H_d`: exponents `e` with `H_d ≅ ⊕ R/(t^e)`, ascending.
    ///
    /// A free summand shows up as the precision `N`.
    pub fn homology_at(&self, d: i64) -> Vec<usize> {
        let z = self.cycle_generators(d);
        if z.cols() == 0 {
            return vec![];
        }
        let w = self.boundary_generators(d);
        let stacked = z.hstack(&w.neg());
        let rels: Vec<Vector<R>> = kernel_generators(&stacked)
            .into_iter()
            .map(|k| k[..z.cols()].to_vec())
            .collect();
        let rel = RMatrix::from_columns(&self.ring, z.cols(), &rels);
        smith_form(&rel).cokernel_exponents()
    }

    /// Homology in every degree of `window`, or of the represented range by default.
    pub fn homology(&self, window: Option<(i64, i64)>) -> Result<Vec<(i64, Vec<usize>)>, ComplexError> {
        let (lo, hi) = match (window, self.bounds()) {
            (Some(w), _) => w,
            (None, Some(b)) => b,
            (None, None) => return Ok(vec![]),
        };
        if let Some(c) = self.complete_through {
            // H_d needs ∂_{d+1}, which is final only through c
            if hi + 1 > c {
                return Err(ComplexError::WindowTooWide {
                    lo,
                    hi,
                    needed: hi + 1,
                    available: c,
                });
            }
        }
        Ok((lo..=hi).map(|d| (d, self.homology_at(d))).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{PrimeField, TruncatedPoly};

    #[test]
    fn koszul_complex_homology_over_f2() {
        let r = TruncatedPoly::new(PrimeField::new(2).unwrap(), 2).unwrap();
        let c = RComplex::free(
            &r,
            0,
            vec![1, 1],
            vec![RMatrix::zeros(&r, 0, 1), RMatrix::from_rows(&r, vec![vec![r.t()]])],
        )
        .unwrap();
        let h = c.homology(None).unwrap();
        assert_eq!(h, vec![(0, vec![1]), (1, vec![1])]);
    }

    #[test]
    fn torsion_components_are_respected() {
        let r = TruncatedPoly::new(PrimeField::new(3).unwrap(), 3).unwrap();
        // R/(t^2) in degree 0
        let c = RComplex::with_torsion(&r, 0, vec![vec![2]], vec![RMatrix::zeros(&r, 0, 1)]).unwrap();
        assert_eq!(c.homology(None).unwrap(), vec![(0, vec![2])]);
        // R --t--> R/(t^2): H_0 = R/(t), and H_1 = tR ≅ R/(t^2)
        let c = RComplex::with_torsion(
            &r,
            0,
            vec![vec![2], vec![3]],
            vec![RMatrix::zeros(&r, 0, 1), RMatrix::from_rows(&r, vec![vec![r.t()]])],
        )
        .unwrap();
        assert_eq!(c.homology(None).unwrap(), vec![(0, vec![1]), (1, vec![2])]);
    }

    #[test]
    fn truncated_complexes_refuse_wide_windows() {
        let r = TruncatedPoly::new(PrimeField::new(2).unwrap(), 2).unwrap();
        let c = RComplex::free(&r, 0, vec![1], vec![RMatrix::zeros(&r, 0, 1)])
            .unwrap()
            .with_complete_through(Some(1));
        assert!(c.homology(Some((0, 0))).is_ok());
        assert!(matches!(
            c.homology(Some((0, 1))),
            Err(ComplexError::WindowTooWide { .. })
        ));
    }
}
