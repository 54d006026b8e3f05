use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::algebra::{BlockAlgebra, BlockPart};
use crate::matrix::RMatrix;
use crate::ring::TruncatedRing;

use super::complex::RComplex;
use super::layout::{is_zero_vec, FreeLayout};
use super::semifree::SemiFreeModule;
use super::{ModuleError, Vector};

/// The two equation families tying `α` and `δ` together.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockRelation {
    /// `α_{i-1} α_i + t δ_i = 0`.
    AlphaSquare,
    /// `δ_i α_{i+1} = α_{i-1} δ_{i+1}`.
    DeltaCommutes,
}

impl fmt::Display for BlockRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockRelation::AlphaSquare => write!(f, "a∘a + t·d = 0"),
            BlockRelation::DeltaCommutes => write!(f, "d∘a = a∘d"),
        }
    }
}

/// A semi-free DG module `N` over `B = K^R(t) ⊗ A` in block form.
///
/// `N_i = M_{i-1} ⊕ M_i` where `M` is the semi-free `A`-module on the same
/// generators, and `∂_i = [[-α_{i-1}, δ_i], [t, α_i]]`. Each generator `b`
/// stands for `e_b = [0; b]`, so `∂ e_b = [δ(b); α(b)]`.
#[derive(Debug, Clone)]
pub struct BlockModule<R: TruncatedRing> {
    algebra: Arc<BlockAlgebra<R>>,
    layout: FreeLayout<R>,
    alpha: Vec<Vector<R>>,
    delta: Vec<Vector<R>>,
    complete_through: Option<i64>,
    total: OnceLock<SemiFreeModule<R>>,
}

impl<R: TruncatedRing> PartialEq for BlockModule<R> {
    fn eq(&self, other: &Self) -> bool {
        self.algebra == other.algebra
            && self.layout == other.layout
            && self.alpha == other.alpha
            && self.delta == other.delta
            && self.complete_through == other.complete_through
    }
}

/// Builds a block module and checks both block relations in every degree.
///
/// `alpha[g] ∈ M_{|g|-1}` and `delta[g] ∈ M_{|g|-2}`, coordinates as in [`FreeLayout`].
pub fn make_block_module<R: TruncatedRing>(
    algebra: Arc<BlockAlgebra<R>>,
    degrees: Vec<i64>,
    alpha: Vec<Vector<R>>,
    delta: Vec<Vector<R>>,
) -> Result<BlockModule<R>, ModuleError> {
    let module = BlockModule::new_unchecked(algebra, degrees, alpha, delta)?;
    module.validate()?;
    Ok(module)
}

/// `B ⊗_A M`: the block module with the same `α` and `δ = 0`.
pub fn base_change<R: TruncatedRing>(
    module: &SemiFreeModule<R>,
    algebra: Arc<BlockAlgebra<R>>,
) -> Result<BlockModule<R>, ModuleError> {
    if algebra.base() != module.algebra() {
        return Err(ModuleError::AlgebraMismatch);
    }
    let layout = module.layout();
    let delta = (0..module.generator_count())
        .map(|g| layout.zero_vector(layout.degree(g) - 2))
        .collect();
    Ok(
        BlockModule::new_unchecked(algebra, module.degrees().to_vec(), module.values().to_vec(), delta)?
            .with_complete_through(module.complete_through()),
    )
}

impl<R: TruncatedRing> BlockModule<R> {
    pub fn new_unchecked(
        algebra: Arc<BlockAlgebra<R>>,
        degrees: Vec<i64>,
        alpha: Vec<Vector<R>>,
        delta: Vec<Vector<R>>,
    ) -> Result<Self, ModuleError> {
        let layout = FreeLayout::new(algebra.base().clone(), degrees);
        let n = layout.generator_count();
        if alpha.len() != n || delta.len() != n {
            return Err(ModuleError::Shape(format!(
                "{n} generators but {} alpha and {} delta values",
                alpha.len(),
                delta.len()
            )));
        }
        for g in 0..n {
            for (name, v, shift) in [("alpha", &alpha[g], 1), ("delta", &delta[g], 2)] {
                let expected = layout.rank(layout.degree(g) - shift);
                if v.len() != expected {
                    return Err(ModuleError::Shape(format!(
                        "{name} of generator {g} has {} coordinates, expected {expected}",
                        v.len()
                    )));
                }
                if v.iter().any(|x| !layout.ring().contains(x)) {
                    return Err(ModuleError::Shape(format!("{name} of generator {g} leaves the ring")));
                }
            }
        }
        Ok(Self {
            algebra,
            layout,
            alpha,
            delta,
            complete_through: None,
            total: OnceLock::new(),
        })
    }

    pub fn validate(&self) -> Result<(), ModuleError> {
        let Some((lo, hi)) = self.layout.support() else {
            return Ok(());
        };
        let ring = self.ring();
        let t = self.algebra.t();
        for d in lo..=hi + 2 {
            let square = self.alpha_matrix(d - 1).mul(&self.alpha_matrix(d));
            let square = square.add(&self.delta_matrix(d).scale(t));
            let commute = self
                .delta_matrix(d)
                .mul(&self.alpha_matrix(d + 1))
                .sub(&self.alpha_matrix(d - 1).mul(&self.delta_matrix(d + 1)));
            for (relation, m, basis_degree) in [
                (BlockRelation::AlphaSquare, square, d),
                (BlockRelation::DeltaCommutes, commute, d + 1),
            ] {
                for j in 0..m.cols() {
                    if !is_zero_vec(ring, &m.column(j)) {
                        return Err(ModuleError::BlockRelationFails {
                            relation,
                            degree: basis_degree,
                            basis: self.layout.basis_label(basis_degree, j),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn algebra(&self) -> &Arc<BlockAlgebra<R>> {
        &self.algebra
    }

    pub fn ring(&self) -> &R {
        self.layout.ring()
    }

    /// Layout of the underlying `A`-module `M`.
    pub fn layout(&self) -> &FreeLayout<R> {
        &self.layout
    }

    pub fn degrees(&self) -> &[i64] {
        self.layout.degrees()
    }

    pub fn generator_count(&self) -> usize {
        self.layout.generator_count()
    }

    pub fn alpha(&self) -> &[Vector<R>] {
        &self.alpha
    }

    pub fn delta(&self) -> &[Vector<R>] {
        &self.delta
    }

    /// `α_d : M_d -> M_{d-1}`.
    pub fn alpha_matrix(&self, d: i64) -> RMatrix<R> {
        self.layout.derivation_matrix(&self.alpha, d)
    }

    /// `δ_d : M_d -> M_{d-2}`.
    pub fn delta_matrix(&self, d: i64) -> RMatrix<R> {
        self.layout.linear_matrix(&self.delta, &self.layout, -2, d)
    }

    /// Rank of `N_d = M_{d-1} ⊕ M_d`.
    pub fn rank(&self, d: i64) -> usize {
        self.layout.rank(d - 1) + self.layout.rank(d)
    }

    /// `∂_d` on `N_d = M_{d-1} ⊕ M_d` in block coordinates.
    pub fn block_differential(&self, d: i64) -> RMatrix<R> {
        let ring = self.ring();
        let (r2, r1, r0) = (self.layout.rank(d - 2), self.layout.rank(d - 1), self.layout.rank(d));
        let mut m = RMatrix::zeros(ring, r2 + r1, r1 + r0);
        m.paste(0, 0, &self.alpha_matrix(d - 1).neg());
        m.paste(0, r1, &self.delta_matrix(d));
        m.paste(r2, 0, &RMatrix::scalar(ring, r1, self.algebra.t()));
        m.paste(r2, r1, &self.alpha_matrix(d));
        m
    }

    /// `ξ_d`, the top-left block of `∂_{d+1}`.
    pub fn xi(&self, d: i64) -> RMatrix<R> {
        let r1 = self.layout.rank(d);
        self.block_differential(d + 1)
            .submatrix(0..self.layout.rank(d - 1), 0..r1)
    }

    /// `τ_d`, the lower-left block of `∂_{d+1}`.
    pub fn tau(&self, d: i64) -> RMatrix<R> {
        let r = self.layout.rank(d);
        self.block_differential(d + 1)
            .submatrix(self.layout.rank(d - 1)..self.layout.rank(d - 1) + r, 0..r)
    }

    /// Total-basis index in `N_d` of each block coordinate, top part first.
    pub fn block_to_total(&self, d: i64) -> Vec<usize> {
        let total = self.total();
        let tl = total.layout();
        let mut out = Vec::with_capacity(self.rank(d));
        for (part, k) in [(BlockPart::Top, d - 1), (BlockPart::Bottom, d)] {
            for pos in 0..self.layout.rank(k) {
                let (g, gamma) = self.layout.locate(k, pos);
                let (_, p) = tl.position(g, self.algebra.index(part, gamma));
                out.push(p);
            }
        }
        out
    }

    /// `[x_top; x_bottom] ∈ M_{d-1} ⊕ M_d` in total coordinates of `N_d`.
    pub fn to_total(&self, d: i64, top: &[R::Elem], bottom: &[R::Elem]) -> Vector<R> {
        let mut out = vec![self.ring().zero(); self.rank(d)];
        for (k, x) in self.block_to_total(d).into_iter().zip(top.iter().chain(bottom)) {
            out[k] = x.clone();
        }
        out
    }

    /// Splits total coordinates of `N_d` into `(top, bottom)`.
    pub fn from_total(&self, d: i64, x: &[R::Elem]) -> (Vector<R>, Vector<R>) {
        let perm = self.block_to_total(d);
        let mut flat: Vector<R> = perm.iter().map(|&k| x[k].clone()).collect();
        let bottom = flat.split_off(self.layout.rank(d - 1));
        (flat, bottom)
    }

    /// `N` as a semi-free module over the plain algebra `B`.
    pub fn total(&self) -> &SemiFreeModule<R> {
        self.total.get_or_init(|| {
            let layout = FreeLayout::new(self.algebra.total().clone(), self.degrees().to_vec());
            let values = (0..self.generator_count())
                .map(|g| {
                    let d = self.layout.degree(g) - 1;
                    let mut out = layout.zero_vector(d);
                    for (part, k, v) in [
                        (BlockPart::Top, d - 1, &self.delta[g]),
                        (BlockPart::Bottom, d, &self.alpha[g]),
                    ] {
                        for (pos, c) in v.iter().enumerate() {
                            let (h, gamma) = self.layout.locate(k, pos);
                            let (_, p) = layout.position(h, self.algebra.index(part, gamma));
                            out[p] = c.clone();
                        }
                    }
                    out
                })
                .collect();
            SemiFreeModule::new_unchecked(layout, values)
                .expect("shapes agree")
                .with_complete_through(self.complete_through)
        })
    }

    /// Marks a truncated module, as for [`SemiFreeModule::with_complete_through`].
    pub fn with_complete_through(mut self, c: Option<i64>) -> Self {
        self.complete_through = c;
        self.total = OnceLock::new();
        self
    }

    pub fn complete_through(&self) -> Option<i64> {
        self.complete_through
    }

    /// Reads a semi-free `B`-module back into block form.
    pub fn from_total_module(algebra: Arc<BlockAlgebra<R>>, module: &SemiFreeModule<R>) -> Result<Self, ModuleError> {
        if module.algebra() != algebra.total() {
            return Err(ModuleError::AlgebraMismatch);
        }
        let layout = FreeLayout::new(algebra.base().clone(), module.degrees().to_vec());
        let mut alpha = Vec::new();
        let mut delta = Vec::new();
        for g in 0..module.generator_count() {
            let d = layout.degree(g) - 1;
            let mut a = layout.zero_vector(d);
            let mut b = layout.zero_vector(d - 1);
            for (pos, c) in module.value(g).iter().enumerate() {
                let (h, beta) = module.layout().locate(d, pos);
                let (part, gamma) = algebra.split(beta);
                let (k, p) = layout.position(h, gamma);
                match part {
                    BlockPart::Top => b[p] = c.clone(),
                    BlockPart::Bottom => a[p] = c.clone(),
                }
                debug_assert_eq!(k, if part == BlockPart::Top { d - 1 } else { d });
            }
            alpha.push(a);
            delta.push(b);
        }
        Ok(Self::new_unchecked(algebra, module.degrees().to_vec(), alpha, delta)?
            .with_complete_through(module.complete_through()))
    }

    /// The `A`-module `M` with differential `α`, when `δ = 0`.
    pub fn forget(&self) -> Option<SemiFreeModule<R>> {
        if self.delta.iter().any(|v| !is_zero_vec(self.ring(), v)) {
            return None;
        }
        SemiFreeModule::new_unchecked(self.layout.clone(), self.alpha.clone()).ok()
    }

    /// Smallest `t`-adic valuation among the `δ` coefficients; the precision when `δ = 0`.
    pub fn delta_valuation(&self) -> usize {
        let ring = self.ring();
        self.delta
            .iter()
            .flatten()
            .map(|c| ring.valuation(c))
            .min()
            .unwrap_or(ring.precision())
    }

    /// The underlying `R`-complex, in block coordinates.
    pub fn block_complex(&self) -> RComplex<R> {
        let Some((lo, hi)) = self.layout.support() else {
            return RComplex::zero(self.ring());
        };
        let (lo, hi) = (lo, hi + 1);
        let ranks = (lo..=hi).map(|d| self.rank(d)).collect();
        let mut diffs: Vec<RMatrix<R>> = (lo..=hi).map(|d| self.block_differential(d)).collect();
        diffs[0] = RMatrix::zeros(self.ring(), 0, self.rank(lo));
        RComplex::free(self.ring(), lo, ranks, diffs).expect("shapes agree")
    }

    /// The underlying `R`-complex, in the total basis over `B`.
    pub fn expand_to_r_linear(&self) -> RComplex<R> {
        self.total().complex()
    }

    /// Minimal when every degree-0 coefficient of `α` and `δ` lies in `tA_0`.
    pub fn is_minimal(&self) -> bool {
        self.total().is_minimal()
    }
}
