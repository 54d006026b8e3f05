use std::sync::Arc;

use crate::algebra::DgAlgebra;
use crate::matrix::RMatrix;
use crate::ring::{odd, TruncatedRing};

use super::Vector;

/// The underlying graded module of a semi-free module: `M_d = ⊕_g A_{d-|g|}`.
///
/// The `R`-basis of `M_d` lists, generator by generator, the products `γ g`
/// with `γ` running over the basis of `A_{d-|g|}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeLayout<R: TruncatedRing> {
    algebra: Arc<DgAlgebra<R>>,
    degrees: Vec<i64>,
}

impl<R: TruncatedRing> FreeLayout<R> {
    pub fn new(algebra: Arc<DgAlgebra<R>>, degrees: Vec<i64>) -> Self {
        Self { algebra, degrees }
    }

    pub fn algebra(&self) -> &Arc<DgAlgebra<R>> {
        &self.algebra
    }

    pub fn ring(&self) -> &R {
        self.algebra.ring()
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn generator_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self, g: usize) -> i64 {
        self.degrees[g]
    }

    pub fn rank(&self, d: i64) -> usize {
        self.degrees.iter().map(|&e| self.algebra.rank(d - e)).sum()
    }

    /// Start of generator `g`'s block inside `M_d`.
    pub fn offset(&self, g: usize, d: i64) -> usize {
        self.degrees[..g].iter().map(|&e| self.algebra.rank(d - e)).sum()
    }

    /// Position of `γ g` in `M_{|γ|+|g|}`.
    pub fn position(&self, g: usize, gamma: usize) -> (i64, usize) {
        let d = self.degrees[g] + self.algebra.degree_of(gamma);
        (d, self.offset(g, d) + self.algebra.local(gamma))
    }

    /// Inverse of [`FreeLayout::position`]: `(generator, global algebra index)`.
    pub fn locate(&self, d: i64, pos: usize) -> (usize, usize) {
        let mut rest = pos;
        for (g, &e) in self.degrees.iter().enumerate() {
            let r = self.algebra.rank(d - e);
            if rest < r {
                return (g, self.algebra.global(d - e, rest));
            }
            rest -= r;
        }
        panic!("position {pos} out of range in degree {d}");
    }

    pub fn basis_label(&self, d: i64, pos: usize) -> String {
        let (g, gamma) = self.locate(d, pos);
        if gamma == self.algebra.unit() {
            format!("b{g}")
        } else {
            format!("{}*b{g}", self.algebra.label(gamma))
        }
    }

    /// Degrees where `M` can be nonzero, or `None` for the zero module.
    pub fn support(&self) -> Option<(i64, i64)> {
        let lo = *self.degrees.iter().min()?;
        let hi = *self.degrees.iter().max()? + self.algebra.top_degree();
        Some((lo, hi))
    }

    /// Highest generator degree.
    pub fn top_generator_degree(&self) -> Option<i64> {
        self.degrees.iter().copied().max()
    }

    /// The element `g` itself, in `M_{|g|}`.
    pub fn generator_vector(&self, g: usize) -> Vector<R> {
        let d = self.degrees[g];
        let mut v = vec![self.ring().zero(); self.rank(d)];
        v[self.offset(g, d)] = self.ring().one();
        v
    }

    pub fn zero_vector(&self, d: i64) -> Vector<R> {
        vec![self.ring().zero(); self.rank(d)]
    }

    /// `γ · x` for a basis element `γ` and `x ∈ M_d`.
    pub fn act(&self, gamma: usize, d: i64, x: &[R::Elem]) -> Vector<R> {
        let ring = self.ring();
        let a = &self.algebra;
        let dg = a.degree_of(gamma);
        let mut out = self.zero_vector(d + dg);
        for (pos, c) in x.iter().enumerate() {
            if ring.is_zero(c) {
                continue;
            }
            let (g, b) = self.locate(d, pos);
            let target = self.offset(g, d + dg);
            for (s, p) in a.product(gamma, b).iter().enumerate() {
                if !ring.is_zero(p) {
                    out[target + s] = ring.add(&out[target + s], &ring.mul(c, p));
                }
            }
        }
        out
    }

    /// The matrix of `x ↦ γ x` from `M_d` to `M_{d+|γ|}`.
    pub fn act_matrix(&self, gamma: usize, d: i64) -> RMatrix<R> {
        let ring = self.ring();
        let cols: Vec<Vector<R>> = (0..self.rank(d))
            .map(|pos| {
                let mut e = self.zero_vector(d);
                e[pos] = ring.one();
                self.act(gamma, d, &e)
            })
            .collect();
        RMatrix::from_columns(ring, self.rank(d + self.algebra.degree_of(gamma)), &cols)
    }

    /// Image of `γ g` under the map `f` of degree `p` into `target` that is
    /// `A`-linear in the graded sense, `f(γ g) = (-1)^{p|γ|} γ f(g)`.
    pub fn linear_column(
        &self,
        values: &[Vector<R>],
        target: &FreeLayout<R>,
        p: i64,
        g: usize,
        gamma: usize,
    ) -> Vector<R> {
        let dg = self.algebra.degree_of(gamma);
        let img = target.act(gamma, self.degrees[g] + p, &values[g]);
        if odd(p * dg) {
            img.iter().map(|x| self.ring().neg(x)).collect()
        } else {
            img
        }
    }

    /// `f(x)` for `x ∈ M_d`, with `f` given by its values on generators.
    pub fn apply_linear(
        &self,
        values: &[Vector<R>],
        target: &FreeLayout<R>,
        p: i64,
        d: i64,
        x: &[R::Elem],
    ) -> Vector<R> {
        let ring = self.ring();
        let mut out = target.zero_vector(d + p);
        for (pos, c) in x.iter().enumerate() {
            if ring.is_zero(c) {
                continue;
            }
            let (g, gamma) = self.locate(d, pos);
            if values[g].iter().all(|v| ring.is_zero(v)) {
                continue;
            }
            let col = self.linear_column(values, target, p, g, gamma);
            axpy(ring, &mut out, c, &col);
        }
        out
    }

    pub fn linear_matrix(&self, values: &[Vector<R>], target: &FreeLayout<R>, p: i64, d: i64) -> RMatrix<R> {
        let cols: Vec<Vector<R>> = (0..self.rank(d))
            .map(|pos| {
                let (g, gamma) = self.locate(d, pos);
                self.linear_column(values, target, p, g, gamma)
            })
            .collect();
        RMatrix::from_columns(self.ring(), target.rank(d + p), &cols)
    }

    /// `∂(γ g) = ∂γ · g + (-1)^{|γ|} γ ∂g` for a derivation with values `∂g ∈ M_{|g|-1}`.
    pub fn derivation_column(&self, values: &[Vector<R>], g: usize, gamma: usize) -> Vector<R> {
        let ring = self.ring();
        let a = &self.algebra;
        let dg = a.degree_of(gamma);
        let d = self.degrees[g] + dg;
        let mut out = self.linear_column(values, self, -1, g, gamma);
        let base = self.offset(g, d - 1);
        for (s, c) in a.boundary(gamma).iter().enumerate() {
            if !ring.is_zero(c) {
                out[base + s] = ring.add(&out[base + s], c);
            }
        }
        out
    }

    pub fn derivation_matrix(&self, values: &[Vector<R>], d: i64) -> RMatrix<R> {
        let cols: Vec<Vector<R>> = (0..self.rank(d))
            .map(|pos| {
                let (g, gamma) = self.locate(d, pos);
                self.derivation_column(values, g, gamma)
            })
            .collect();
        RMatrix::from_columns(self.ring(), self.rank(d - 1), &cols)
    }

    pub fn apply_derivation(&self, values: &[Vector<R>], d: i64, x: &[R::Elem]) -> Vector<R> {
        let ring = self.ring();
        let mut out = self.zero_vector(d - 1);
        for (pos, c) in x.iter().enumerate() {
            if ring.is_zero(c) {
                continue;
            }
            let (g, gamma) = self.locate(d, pos);
            axpy(ring, &mut out, c, &self.derivation_column(values, g, gamma));
        }
        out
    }
}

/// `out += c * x`.
pub(crate) fn axpy<R: TruncatedRing>(ring: &R, out: &mut [R::Elem], c: &R::Elem, x: &[R::Elem]) {
    for (o, v) in out.iter_mut().zip(x) {
        if !ring.is_zero(v) {
            *o = ring.add(o, &ring.mul(c, v));
        }
    }
}

pub(crate) fn is_zero_vec<R: TruncatedRing>(ring: &R, x: &[R::Elem]) -> bool {
    x.iter().all(|v| ring.is_zero(v))
}
