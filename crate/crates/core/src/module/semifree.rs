use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use crate::algebra::DgAlgebra;
use crate::matrix::RMatrix;
use crate::ring::{odd, TruncatedRing};

use super::complex::RComplex;
use super::layout::{axpy, is_zero_vec, FreeLayout};
use super::{ModuleError, Vector};

/// A semi-free DG module over a DG algebra, given by the values `∂g` on a
/// finite graded semi-basis and extended by the Leibniz rule.
#[derive(Debug, Clone)]
pub struct SemiFreeModule<R: TruncatedRing> {
    layout: FreeLayout<R>,
    diff: Vec<Vector<R>>,
    complete_through: Option<i64>,
    matrices: OnceLock<BTreeMap<i64, RMatrix<R>>>,
}

impl<R: TruncatedRing> PartialEq for SemiFreeModule<R> {
    fn eq(&self, other: &Self) -> bool {
        self.layout == other.layout && self.diff == other.diff && self.complete_through == other.complete_through
    }
}

/// Builds a semi-free module and checks `∂∘∂ = 0` and the Leibniz rule.
///
/// `values[g]` holds `∂g` in `M_{|g|-1}` (see [`FreeLayout`] for coordinates).
pub fn make_semifree<R: TruncatedRing>(
    algebra: Arc<DgAlgebra<R>>,
    degrees: Vec<i64>,
    values: Vec<Vector<R>>,
) -> Result<SemiFreeModule<R>, ModuleError> {
    let module = SemiFreeModule::new_unchecked(FreeLayout::new(algebra, degrees), values)?;
    module.validate()?;
    Ok(module)
}

impl<R: TruncatedRing> SemiFreeModule<R> {
    /// Checks only shapes; callers guarantee the DG module axioms.
    pub fn new_unchecked(layout: FreeLayout<R>, values: Vec<Vector<R>>) -> Result<Self, ModuleError> {
        if values.len() != layout.generator_count() {
            return Err(ModuleError::Shape(format!(
                "{} differential values for {} generators",
                values.len(),
                layout.generator_count()
            )));
        }
        for (g, v) in values.iter().enumerate() {
            let expected = layout.rank(layout.degree(g) - 1);
            if v.len() != expected {
                return Err(ModuleError::Shape(format!(
                    "value of generator {g} has {} coordinates, expected {expected}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !layout.ring().contains(x)) {
                return Err(ModuleError::Shape(format!("value of generator {g} leaves the ring")));
            }
        }
        Ok(Self {
            layout,
            diff: values,
            complete_through: None,
            matrices: OnceLock::new(),
        })
    }

    /// The free module `A` on one generator in degree 0.
    pub fn algebra_itself(algebra: Arc<DgAlgebra<R>>) -> Self {
        Self::new_unchecked(FreeLayout::new(algebra, vec![0]), vec![vec![]]).expect("rank one module")
    }

    pub fn zero(algebra: Arc<DgAlgebra<R>>) -> Self {
        Self::new_unchecked(FreeLayout::new(algebra, vec![]), vec![]).expect("zero module")
    }

    pub fn validate(&self) -> Result<(), ModuleError> {
        let Some((lo, hi)) = self.layout.support() else {
            return Ok(());
        };
        let ring = self.ring();
        for d in lo + 1..=hi + 1 {
            let sq = self.differential(d - 1).mul(&self.differential(d));
            for j in 0..sq.cols() {
                if !is_zero_vec(ring, &sq.column(j)) {
                    return Err(ModuleError::SquareNonzero {
                        degree: d,
                        basis: self.layout.basis_label(d, j),
                    });
                }
            }
        }
        let a = self.algebra().clone();
        for gamma in 0..a.total_rank() {
            let dg = a.degree_of(gamma);
            for d in lo..=hi {
                let act = self.layout.act_matrix(gamma, d);
                let act_below = self.layout.act_matrix(gamma, d - 1);
                let lhs = self.differential(d + dg).mul(&act);
                let mut rhs = act_below.mul(&self.differential(d));
                if odd(dg) {
                    rhs = rhs.neg();
                }
                // ∂γ · x
                for j in 0..self.layout.rank(d) {
                    let mut e = self.layout.zero_vector(d);
                    e[j] = ring.one();
                    let mut col = rhs.column(j);
                    let boundary = a.boundary(gamma);
                    for (s, c) in boundary.iter().enumerate() {
                        if ring.is_zero(c) {
                            continue;
                        }
                        let img = self.layout.act(a.global(dg - 1, s), d, &e);
                        axpy(ring, &mut col, c, &img);
                    }
                    if col != lhs.column(j) {
                        return Err(ModuleError::LeibnizViolation {
                            degree: d,
                            gamma: a.label(gamma).to_string(),
                            basis: self.layout.basis_label(d, j),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn with_complete_through(mut self, c: Option<i64>) -> Self {
        self.complete_through = c;
        self
    }

    /// `Some(c)` when this module is a truncation whose generators are final only through degree `c`.
    pub fn complete_through(&self) -> Option<i64> {
        self.complete_through
    }

    pub fn layout(&self) -> &FreeLayout<R> {
        &self.layout
    }

    pub fn algebra(&self) -> &Arc<DgAlgebra<R>> {
        self.layout.algebra()
    }

    pub fn ring(&self) -> &R {
        self.layout.ring()
    }

    pub fn degrees(&self) -> &[i64] {
        self.layout.degrees()
    }

    pub fn generator_count(&self) -> usize {
        self.layout.generator_count()
    }

    /// The stored value `∂g`.
    pub fn value(&self, g: usize) -> &[R::Elem] {
        &self.diff[g]
    }

    pub fn values(&self) -> &[Vector<R>] {
        &self.diff
    }

    pub fn rank(&self, d: i64) -> usize {
        self.layout.rank(d)
    }

    fn matrices(&self) -> &BTreeMap<i64, RMatrix<R>> {
        self.matrices.get_or_init(|| {
            let mut out = BTreeMap::new();
            if let Some((lo, hi)) = self.layout.support() {
                for d in lo..=hi + 1 {
                    out.insert(d, self.layout.derivation_matrix(&self.diff, d));
                }
            }
            out
        })
    }

    /// The matrix of `∂_d : M_d -> M_{d-1}`.
    pub fn differential(&self, d: i64) -> RMatrix<R> {
        match self.matrices().get(&d) {
            Some(m) => m.clone(),
            None => RMatrix::zeros(self.ring(), self.rank(d - 1), self.rank(d)),
        }
    }

    pub fn apply_differential(&self, d: i64, x: &[R::Elem]) -> Vector<R> {
        match self.matrices().get(&d) {
            Some(m) => m.apply(x),
            None => self.layout.zero_vector(d - 1),
        }
    }

    /// The underlying complex of `R`-modules.
    pub fn complex(&self) -> RComplex<R> {
        let Some((lo, hi)) = self.layout.support() else {
            return RComplex::zero(self.ring());
        };
        let ranks = (lo..=hi).map(|d| self.rank(d)).collect();
        let mut diffs: Vec<RMatrix<R>> = (lo..=hi).map(|d| self.differential(d)).collect();
        diffs[0] = RMatrix::zeros(self.ring(), 0, self.rank(lo));
        RComplex::free(self.ring(), lo, ranks, diffs)
            .expect("shapes agree")
            .with_complete_through(self.complete_through)
    }

    /// Minimal when every degree-0 algebra coefficient of every `∂g` lies in `tA_0`.
    pub fn is_minimal(&self) -> bool {
        let a = self.algebra();
        let ring = self.ring();
        self.diff.iter().enumerate().all(|(g, v)| {
            let d = self.layout.degree(g) - 1;
            v.iter().enumerate().all(|(pos, c)| {
                let (_, gamma) = self.layout.locate(d, pos);
                a.degree_of(gamma) > 0 || ring.valuation(c) >= 1
            })
        })
    }

    /// Direct sum with another module over the same algebra.
    pub fn direct_sum(&self, other: &Self) -> Result<Self, ModuleError> {
        if self.algebra() != other.algebra() {
            return Err(ModuleError::AlgebraMismatch);
        }
        let mut degrees = self.degrees().to_vec();
        degrees.extend_from_slice(other.degrees());
        let layout = FreeLayout::new(self.algebra().clone(), degrees);
        let n = self.generator_count();
        let mut values = Vec::new();
        for (g, v) in self.diff.iter().chain(&other.diff).enumerate() {
            let d = layout.degree(g) - 1;
            let (src, shift) = if g < n { (&self.layout, 0) } else { (&other.layout, n) };
            let mut out = layout.zero_vector(d);
            for (pos, c) in v.iter().enumerate() {
                let (h, gamma) = src.locate(d, pos);
                let (_, target) = layout.position(h + shift, gamma);
                out[target] = c.clone();
            }
            values.push(out);
        }
        Self::new_unchecked(layout, values)
    }

    /// The suspension `Σ^k M`: generators shifted up by `k`, differential signed by `(-1)^k`.
    pub fn shift(&self, k: i64) -> Self {
        let layout = FreeLayout::new(self.algebra().clone(), self.degrees().iter().map(|d| d + k).collect());
        let values = self
            .diff
            .iter()
            .map(|v| v.iter().map(|c| self.ring().sign(odd(k), c)).collect())
            .collect();
        Self::new_unchecked(layout, values).expect("same shapes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::koszul_algebra;
    use crate::ring::{PrimeField, TruncatedPoly};

    fn f2t2() -> TruncatedPoly<PrimeField> {
        TruncatedPoly::new(PrimeField::new(2).unwrap(), 2).unwrap()
    }

    #[test]
    fn algebra_is_a_module_over_itself() {
        let r = f2t2();
        let a = Arc::new(DgAlgebra::ground(&r));
        let m = make_semifree(a, vec![0], vec![vec![]]).unwrap();
        assert_eq!(m.complex().homology(None).unwrap(), vec![(0, vec![2])]);
    }

    #[test]
    fn three_step_complex_over_r() {
        let r = f2t2();
        let a = Arc::new(DgAlgebra::ground(&r));
        let m = make_semifree(a.clone(), vec![0, 1, 2], vec![vec![], vec![r.t()], vec![r.zero()]]).unwrap();
        assert!(m.differential(1).mul(&m.differential(2)).is_zero());
        let bad = make_semifree(a, vec![0, 1, 2], vec![vec![], vec![r.t()], vec![r.one()]]);
        assert!(matches!(bad, Err(ModuleError::SquareNonzero { degree: 2, .. })));
    }

    #[test]
    fn koszul_module_differential_follows_leibniz() {
        let r = f2t2();
        let k = Arc::new(koszul_algebra(&r, &[r.t()]).unwrap());
        let m = SemiFreeModule::algebra_itself(k.clone());
        assert_eq!(m.differential(1), k.differential(1));
        assert!(m.validate().is_ok());
        assert!(m.is_minimal());
    }

    #[test]
    fn unit_coefficients_are_not_minimal() {
        let r = f2t2();
        let a = Arc::new(DgAlgebra::ground(&r));
        let m = make_semifree(a.clone(), vec![0, 1], vec![vec![], vec![r.t()]]).unwrap();
        assert!(m.is_minimal());
        let m = make_semifree(a, vec![0, 1], vec![vec![], vec![r.one()]]).unwrap();
        assert!(!m.is_minimal());
    }
}
