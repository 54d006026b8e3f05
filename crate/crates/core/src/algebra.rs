//! DG algebras with finite free components, stored by structure constants.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::matrix::RMatrix;
use crate::ring::{odd, TruncatedRing};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("element does not belong to the algebra's coefficient ring")]
    RingMismatch,
    #[error("malformed algebra data: {0}")]
    Shape(String),
}

/// A positively graded DG `R`-algebra `A_0 ⊕ ... ⊕ A_top`, each `A_i` free of finite rank.
///
/// Basis elements are numbered globally, degree by degree; global index 0 is
/// the unit. Products are a dense table of coordinate vectors.
#[derive(Clone, PartialEq)]
pub struct DgAlgebra<R: TruncatedRing> {
    ring: R,
    ranks: Vec<usize>,
    offsets: Vec<usize>,
    labels: Vec<String>,
    /// `boundary[g]` = coordinates of `∂γ_g` in degree `|γ_g| - 1`.
    boundary: Vec<Vec<R::Elem>>,
    /// `mult[a * n + b]` = coordinates of `γ_a γ_b`; empty above the top degree.
    mult: Vec<Vec<R::Elem>>,
}

impl<R: TruncatedRing> fmt::Debug for DgAlgebra<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DgAlgebra")
            .field("ring", &self.ring.spec())
            .field("ranks", &self.ranks)
            .field("labels", &self.labels)
            .finish()
    }
}

impl<R: TruncatedRing> DgAlgebra<R> {
    /// Assembles an algebra without checking any axiom; see [`validate_algebra`].
    ///
    /// `differential[i]` is the `r_{i-1} x r_i` matrix of `∂_i` (entry 0 is `0 x r_0`),
    /// and `product(a, b)` returns coordinates of `γ_a γ_b` in degree `|a| + |b|`.
    pub fn from_parts(
        ring: &R,
        ranks: Vec<usize>,
        labels: Option<Vec<String>>,
        differential: &[RMatrix<R>],
        product: impl Fn(usize, usize) -> Vec<R::Elem>,
    ) -> Result<Self, AlgebraError> {
        if ranks.first().copied().unwrap_or(0) == 0 {
            return Err(AlgebraError::Shape("degree 0 must contain the unit".into()));
        }
        let mut offsets = vec![0];
        for r in &ranks {
            offsets.push(offsets.last().unwrap() + r);
        }
        let n = *offsets.last().unwrap();
        let labels = match labels {
            Some(l) if l.len() == n => l,
            Some(l) => {
                return Err(AlgebraError::Shape(format!(
                    "{} labels for {n} basis elements",
                    l.len()
                )))
            }
            None => (0..ranks.len())
                .flat_map(|d| (0..ranks[d]).map(move |s| format!("g{d}_{s}")))
                .collect(),
        };
        if differential.len() != ranks.len() {
            return Err(AlgebraError::Shape(format!(
                "{} differential matrices for {} degrees",
                differential.len(),
                ranks.len()
            )));
        }
        let mut boundary = Vec::with_capacity(n);
        for (d, m) in differential.iter().enumerate() {
            let below = if d == 0 { 0 } else { ranks[d - 1] };
            if m.rows() != below || m.cols() != ranks[d] {
                return Err(AlgebraError::Shape(format!(
                    "differential in degree {d} is {}x{}, expected {below}x{}",
                    m.rows(),
                    m.cols(),
                    ranks[d]
                )));
            }
            for s in 0..ranks[d] {
                let col = m.column(s);
                if col.iter().any(|x| !ring.contains(x)) {
                    return Err(AlgebraError::RingMismatch);
                }
                boundary.push(col);
            }
        }
        let top = ranks.len() as i64 - 1;
        let degree_of = |g: usize| offsets.partition_point(|&o| o <= g) as i64 - 1;
        let mut mult = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let d = degree_of(a) + degree_of(b);
                let v = product(a, b);
                let expected = if d <= top { ranks[d as usize] } else { 0 };
                if v.len() != expected {
                    return Err(AlgebraError::Shape(format!(
                        "product of basis elements {a} and {b} has {} coordinates, expected {expected}",
                        v.len()
                    )));
                }
                if v.iter().any(|x| !ring.contains(x)) {
                    return Err(AlgebraError::RingMismatch);
                }
                mult.push(v);
            }
        }
        Ok(Self {
            ring: ring.clone(),
            ranks,
            offsets,
            labels,
            boundary,
            mult,
        })
    }

    /// `R` concentrated in degree 0.
    pub fn ground(ring: &R) -> Self {
        Self::from_parts(
            ring,
            vec![1],
            Some(vec!["1".into()]),
            &[RMatrix::zeros(ring, 0, 1)],
            |_, _| vec![ring.one()],
        )
        .expect("ground algebra is well formed")
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn top_degree(&self) -> i64 {
        self.ranks.len() as i64 - 1
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank(&self, d: i64) -> usize {
        if d < 0 || d > self.top_degree() {
            0
        } else {
            self.ranks[d as usize]
        }
    }

    pub fn total_rank(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Global index of the first basis element of degree `d`.
    pub fn offset(&self, d: i64) -> usize {
        self.offsets[d.clamp(0, self.ranks.len() as i64) as usize]
    }

    pub fn global(&self, d: i64, s: usize) -> usize {
        debug_assert!(s < self.rank(d));
        self.offset(d) + s
    }

    pub fn degree_of(&self, g: usize) -> i64 {
        self.offsets.partition_point(|&o| o <= g) as i64 - 1
    }

    /// Position of a global basis element within its degree.
    pub fn local(&self, g: usize) -> usize {
        g - self.offset(self.degree_of(g))
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn boundary(&self, g: usize) -> &[R::Elem] {
        &self.boundary[g]
    }

    pub fn product(&self, a: usize, b: usize) -> &[R::Elem] {
        &self.mult[a * self.total_rank() + b]
    }

    /// The matrix of `∂_d : A_d -> A_{d-1}`.
    pub fn differential(&self, d: i64) -> RMatrix<R> {
        let cols: Vec<Vec<R::Elem>> = (0..self.rank(d))
            .map(|s| self.boundary(self.global(d, s)).to_vec())
            .collect();
        RMatrix::from_columns(&self.ring, self.rank(d - 1), &cols)
    }

    /// Product of homogeneous elements given by coordinates.
    pub fn multiply(&self, da: i64, a: &[R::Elem], db: i64, b: &[R::Elem]) -> Vec<R::Elem> {
        let ring = &self.ring;
        let mut out = vec![ring.zero(); self.rank(da + db)];
        if out.is_empty() {
            return out;
        }
        for (i, x) in a.iter().enumerate() {
            if ring.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if ring.is_zero(y) {
                    continue;
                }
                let c = ring.mul(x, y);
                let prod = self.product(self.global(da, i), self.global(db, j));
                for (o, p) in out.iter_mut().zip(prod) {
                    if !ring.is_zero(p) {
                        *o = ring.add(o, &ring.mul(&c, p));
                    }
                }
            }
        }
        out
    }

    pub fn apply_differential(&self, d: i64, x: &[R::Elem]) -> Vec<R::Elem> {
        let ring = &self.ring;
        let mut out = vec![ring.zero(); self.rank(d - 1)];
        for (s, c) in x.iter().enumerate() {
            if ring.is_zero(c) {
                continue;
            }
            for (o, b) in out.iter_mut().zip(self.boundary(self.global(d, s))) {
                *o = ring.add(o, &ring.mul(c, b));
            }
        }
        out
    }

    pub fn unit(&self) -> usize {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    PositivelyGraded,
    DifferentialSquaresZero,
    Unit,
    Leibniz,
    Associativity,
    GradedCommutativity,
    OddSquaresZero,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    /// Global basis indices of a failing tuple.
    pub witness: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, axiom: Axiom) -> &AxiomCheck {
        self.checks
            .iter()
            .find(|c| c.axiom == axiom)
            .expect("every axiom is checked")
    }
}

/// Checks every DG algebra axiom on all basis pairs and triples.
pub fn validate_algebra<R: TruncatedRing>(a: &DgAlgebra<R>) -> ValidationReport {
    let ring = a.ring();
    let n = a.total_rank();
    let is_zero = |v: &[R::Elem]| v.iter().all(|x| ring.is_zero(x));
    let unit_vec = |g: usize| -> Vec<R::Elem> {
        let d = a.degree_of(g);
        let mut v = vec![ring.zero(); a.rank(d)];
        v[a.local(g)] = ring.one();
        v
    };
    let mut checks = vec![AxiomCheck {
        axiom: Axiom::PositivelyGraded,
        passed: true,
        witness: None,
    }];
    let mut record = |axiom, witness: Option<Vec<usize>>| {
        checks.push(AxiomCheck {
            axiom,
            passed: witness.is_none(),
            witness,
        })
    };

    let square = (0..n).find(|&g| {
        let d = a.degree_of(g);
        !is_zero(&a.apply_differential(d - 1, a.boundary(g)))
    });
    record(Axiom::DifferentialSquaresZero, square.map(|g| vec![g]));

    let unit = (0..n).find(|&g| {
        let e = unit_vec(g);
        a.degree_of(0) != 0 || a.product(0, g) != e.as_slice() || a.product(g, 0) != e.as_slice()
    });
    record(Axiom::Unit, unit.map(|g| vec![g]));

    let leibniz = pairs(n).find(|&(x, y)| {
        let (dx, dy) = (a.degree_of(x), a.degree_of(y));
        let lhs = a.apply_differential(dx + dy, a.product(x, y));
        let left = a.multiply(dx - 1, a.boundary(x), dy, &unit_vec(y));
        let right = a.multiply(dx, &unit_vec(x), dy - 1, a.boundary(y));
        let rhs: Vec<R::Elem> = left
            .iter()
            .zip(&right)
            .map(|(l, r)| ring.add(l, &ring.sign(odd(dx), r)))
            .collect();
        lhs != rhs
    });
    record(Axiom::Leibniz, leibniz.map(|(x, y)| vec![x, y]));

    let assoc = (0..n)
        .flat_map(|x| (0..n).flat_map(move |y| (0..n).map(move |z| (x, y, z))))
        .find(|&(x, y, z)| {
            let (dx, dy, dz) = (a.degree_of(x), a.degree_of(y), a.degree_of(z));
            let xy_z = a.multiply(dx + dy, a.product(x, y), dz, &unit_vec(z));
            let x_yz = a.multiply(dx, &unit_vec(x), dy + dz, a.product(y, z));
            xy_z != x_yz
        });
    record(Axiom::Associativity, assoc.map(|(x, y, z)| vec![x, y, z]));

    let comm = pairs(n).find(|&(x, y)| {
        let sign = odd(a.degree_of(x) * a.degree_of(y));
        let yx: Vec<R::Elem> = a.product(y, x).iter().map(|c| ring.sign(sign, c)).collect();
        a.product(x, y) != yx.as_slice()
    });
    record(Axiom::GradedCommutativity, comm.map(|(x, y)| vec![x, y]));

    let odd_sq = (0..n).find(|&x| odd(a.degree_of(x)) && !is_zero(a.product(x, x)));
    record(Axiom::OddSquaresZero, odd_sq.map(|x| vec![x]));

    ValidationReport { checks }
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |x| (0..n).map(move |y| (x, y)))
}

/// Subsets of `{0..n-1}` of size `d`, in tower order:
/// those containing `n-1` first (recursively ordered), then those that do not.
///
/// This is the order in which iterating [`tensor_with_koszul`] lists its basis,
/// so the two constructions differ only by signs.
pub fn koszul_subsets(n: usize, d: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    if d > 0 {
        for mut s in koszul_subsets(n - 1, d - 1) {
            s.push(n - 1);
            out.push(s);
        }
    }
    out.extend(koszul_subsets(n - 1, d));
    out
}

/// The Koszul complex `K^R(t_1, ..., t_n)` as an exterior algebra, `∂e_k = t_k`.
pub fn koszul_algebra<R: TruncatedRing>(ring: &R, elements: &[R::Elem]) -> Result<DgAlgebra<R>, AlgebraError> {
    if elements.iter().any(|x| !ring.contains(x)) {
        return Err(AlgebraError::RingMismatch);
    }
    let n = elements.len();
    let basis: Vec<Vec<Vec<usize>>> = (0..=n).map(|d| koszul_subsets(n, d)).collect();
    let ranks: Vec<usize> = basis.iter().map(Vec::len).collect();
    let position = |s: &[usize]| -> usize {
        basis[s.len()]
            .iter()
            .position(|b| b == s)
            .expect("subset is in the basis")
    };
    let labels = basis
        .iter()
        .flatten()
        .map(|s| {
            if s.is_empty() {
                "1".to_string()
            } else {
                s.iter().map(|k| format!("e{}", k + 1)).collect()
            }
        })
        .collect();
    let mut differential = vec![RMatrix::zeros(ring, 0, 1)];
    for d in 1..=n {
        let mut m = RMatrix::zeros(ring, ranks[d - 1], ranks[d]);
        for (col, s) in basis[d].iter().enumerate() {
            // ∂(e_{s_1} ... e_{s_d}) = Σ (-1)^j t_{s_j} e_{s without s_j}, s increasing
            for (j, &k) in s.iter().enumerate() {
                let rest: Vec<usize> = s.iter().copied().filter(|&x| x != k).collect();
                let row = position(&rest);
                m.add_to(row, col, &ring.sign(j % 2 == 1, &elements[k]));
            }
        }
        differential.push(m);
    }
    let flat: Vec<&Vec<usize>> = basis.iter().flatten().collect();
    DgAlgebra::from_parts(ring, ranks.clone(), Some(labels), &differential, |a, b| {
        let (sa, sb) = (flat[a], flat[b]);
        let d = sa.len() + sb.len();
        if d > n {
            return vec![];
        }
        let mut out = vec![ring.zero(); ranks[d]];
        if sa.iter().any(|x| sb.contains(x)) {
            return out;
        }
        // sign of the shuffle sorting sa ++ sb
        let inversions = sa.iter().map(|x| sb.iter().filter(|y| *y < x).count()).sum::<usize>();
        let mut merged: Vec<usize> = sa.iter().chain(sb).copied().collect();
        merged.sort_unstable();
        out[position(&merged)] = ring.sign(inversions % 2 == 1, &ring.one());
        out
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockPart {
    /// The `e ⊗ A_{i-1}` summand of `B_i`.
    Top,
    /// The `1 ⊗ A_i` summand of `B_i`.
    Bottom,
}

/// `B = K^R(t) ⊗ A` together with the identification `B_i = A_{i-1} ⊕ A_i`.
#[derive(Debug, Clone)]
pub struct BlockAlgebra<R: TruncatedRing> {
    base: Arc<DgAlgebra<R>>,
    total: Arc<DgAlgebra<R>>,
    t: R::Elem,
}

impl<R: TruncatedRing> PartialEq for BlockAlgebra<R> {
    fn eq(&self, other: &Self) -> bool {
        self.t == other.t && self.base == other.base
    }
}

impl<R: TruncatedRing> BlockAlgebra<R> {
    /// The algebra `A`.
    pub fn base(&self) -> &Arc<DgAlgebra<R>> {
        &self.base
    }

    /// The algebra `B` with its plain basis.
    pub fn total(&self) -> &Arc<DgAlgebra<R>> {
        &self.total
    }

    pub fn t(&self) -> &R::Elem {
        &self.t
    }

    pub fn ring(&self) -> &R {
        self.base.ring()
    }

    /// Global `B` index of `[γ; 0]` or `[0; γ]` for a global `A` index `γ`.
    pub fn index(&self, part: BlockPart, a_global: usize) -> usize {
        let d = self.base.degree_of(a_global);
        let local = self.base.local(a_global);
        match part {
            BlockPart::Top => self.total.global(d + 1, local),
            BlockPart::Bottom => self.total.global(d, self.base.rank(d - 1) + local),
        }
    }

    /// Inverse of [`BlockAlgebra::index`].
    pub fn split(&self, b_global: usize) -> (BlockPart, usize) {
        let d = self.total.degree_of(b_global);
        let local = self.total.local(b_global);
        let top = self.base.rank(d - 1);
        if local < top {
            (BlockPart::Top, self.base.global(d - 1, local))
        } else {
            (BlockPart::Bottom, self.base.global(d, local - top))
        }
    }
}

/// Builds `B = K^R(t) ⊗_R A` in the block basis.
pub fn tensor_with_koszul<R: TruncatedRing>(a: Arc<DgAlgebra<R>>, t: R::Elem) -> Result<BlockAlgebra<R>, AlgebraError> {
    let ring = a.ring().clone();
    if !ring.contains(&t) {
        return Err(AlgebraError::RingMismatch);
    }
    let top = a.top_degree();
    let ranks: Vec<usize> = (0..=top + 1).map(|i| a.rank(i - 1) + a.rank(i)).collect();
    let mut labels = Vec::new();
    for i in 0..=top + 1 {
        for s in 0..a.rank(i - 1) {
            let g = a.label(a.global(i - 1, s));
            labels.push(if g == "1" { "e".to_string() } else { format!("e*{g}") });
        }
        for s in 0..a.rank(i) {
            labels.push(a.label(a.global(i, s)).to_string());
        }
    }
    // ∂_i = [[-∂_{i-1}, 0], [t, ∂_i]]
    let mut differential = Vec::new();
    for i in 0..=top + 1 {
        let (r2, r1, r0) = (a.rank(i - 2), a.rank(i - 1), a.rank(i));
        let mut m = RMatrix::zeros(&ring, r2 + r1, r1 + r0);
        m.paste(0, 0, &a.differential(i - 1).neg());
        m.paste(r2, 0, &RMatrix::scalar(&ring, r1, &t));
        m.paste(r2, r1, &a.differential(i));
        differential.push(m);
    }
    let mut offsets = vec![0];
    for r in &ranks {
        offsets.push(offsets.last().unwrap() + r);
    }
    let split = |g: usize| -> (BlockPart, usize, i64) {
        let d = offsets.partition_point(|&o| o <= g) as i64 - 1;
        let local = g - offsets[d as usize];
        let top_rank = a.rank(d - 1);
        if local < top_rank {
            (BlockPart::Top, a.global(d - 1, local), d)
        } else {
            (BlockPart::Bottom, a.global(d, local - top_rank), d)
        }
    };
    let total = DgAlgebra::from_parts(&ring, ranks.clone(), Some(labels), &differential, |x, y| {
        let (px, ax, dx) = split(x);
        let (py, ay, dy) = split(y);
        let d = dx + dy;
        if d > top + 1 {
            return vec![];
        }
        let mut out = vec![ring.zero(); ranks[d as usize]];
        let prod = a.product(ax, ay);
        let (place_top, sign) = match (px, py) {
            (BlockPart::Top, BlockPart::Top) => return out,
            (BlockPart::Top, BlockPart::Bottom) => (true, false),
            (BlockPart::Bottom, BlockPart::Top) => (true, odd(dx)),
            (BlockPart::Bottom, BlockPart::Bottom) => (false, false),
        };
        let shift = if place_top { 0 } else { a.rank(d - 1) };
        for (s, c) in prod.iter().enumerate() {
            out[shift + s] = ring.sign(sign, c);
        }
        out
    })?;
    Ok(BlockAlgebra {
        base: a,
        total: Arc::new(total),
        t,
    })
}

/// The stages `A_k = K^R(t_k) ⊗ A_{k-1}`, `A_0 = R`, for `k = 1..=n`.
pub fn koszul_tower<R: TruncatedRing>(ring: &R, elements: &[R::Elem]) -> Result<Vec<BlockAlgebra<R>>, AlgebraError> {
    let mut stages: Vec<BlockAlgebra<R>> = Vec::new();
    let mut current = Arc::new(DgAlgebra::ground(ring));
    for t in elements {
        let stage = tensor_with_koszul(current, t.clone())?;
        current = stage.total().clone();
        stages.push(stage);
    }
    Ok(stages)
}

/// Signs `σ_g` with tower basis element `g` equal to `σ_g` times Koszul basis element `g`.
///
/// The tower lists `e_{s_d} ⊗ ... ⊗ e_{s_1}` for `s` increasing, which is
/// `(-1)^{d(d-1)/2} e_{s_1} ... e_{s_d}` in the exterior algebra.
pub fn tower_signs(n: usize) -> Vec<bool> {
    (0..=n)
        .flat_map(|d| std::iter::repeat_n((d * d.saturating_sub(1) / 2) % 2 == 1, koszul_subsets(n, d).len()))
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
    fn empty_koszul_is_ground_ring() {
        let r = f2t2();
        let k = koszul_algebra(&r, &[]).unwrap();
        assert_eq!(k.ranks(), &[1]);
        assert!(validate_algebra(&k).all_passed());
    }

    #[test]
    fn single_variable_koszul() {
        let r = TruncatedPoly::new(Rationals, 3).unwrap();
        let k = koszul_algebra(&r, &[r.t()]).unwrap();
        assert_eq!(k.ranks(), &[1, 1]);
        assert_eq!(k.differential(1), RMatrix::from_rows(&r, vec![vec![r.t()]]));
        assert!(k.product(1, 1).is_empty());
        assert!(validate_algebra(&k).all_passed());
    }

    #[test]
    fn two_variable_koszul_differential_squares_to_zero() {
        let r = f2t2();
        let t = r.t();
        let k = koszul_algebra(&r, &[t.clone(), t.clone()]).unwrap();
        assert_eq!(k.ranks(), &[1, 2, 1]);
        assert_eq!(
            k.differential(1),
            RMatrix::from_rows(&r, vec![vec![t.clone(), t.clone()]])
        );
        assert_eq!(
            k.differential(2),
            RMatrix::from_rows(&r, vec![vec![t.clone()], vec![t.clone()]])
        );
        assert!(k.differential(1).mul(&k.differential(2)).is_zero());
    }

    #[test]
    fn koszul_axioms_hold_up_to_three_generators() {
        let z = PrimePowerIntegers::new(3, 2).unwrap();
        let ts = [z.from_i64(3), z.from_i64(6), z.from_i64(0)];
        for n in 0..=3 {
            let report = validate_algebra(&koszul_algebra(&z, &ts[..n]).unwrap());
            assert!(report.all_passed(), "{report:?}");
        }
    }

    #[test]
    fn broken_differential_is_reported() {
        let r = f2t2();
        let bad = DgAlgebra::from_parts(
            &r,
            vec![1, 1, 1],
            None,
            &[
                RMatrix::zeros(&r, 0, 1),
                RMatrix::from_rows(&r, vec![vec![r.one()]]),
                RMatrix::from_rows(&r, vec![vec![r.one()]]),
            ],
            |a, b| {
                let d = a + b;
                if d > 2 {
                    return vec![];
                }
                let mut v = vec![r.zero()];
                if a == 0 || b == 0 {
                    v[0] = r.one();
                }
                v
            },
        )
        .unwrap();
        let report = validate_algebra(&bad);
        let sq = report.check(Axiom::DifferentialSquaresZero);
        assert!(!sq.passed);
        assert_eq!(sq.witness, Some(vec![2]));
    }

    #[test]
    fn block_differential_matches_formula() {
        let r = TruncatedPoly::new(PrimeField::new(3).unwrap(), 2).unwrap();
        let a = Arc::new(koszul_algebra(&r, &[r.t()]).unwrap());
        let b = tensor_with_koszul(a.clone(), r.t()).unwrap();
        assert!(validate_algebra(b.total()).all_passed());
        for i in 0..=2 {
            let d = b.total().differential(i);
            let (r2, r1) = (a.rank(i - 2), a.rank(i - 1));
            assert_eq!(d.submatrix(0..r2, 0..r1), a.differential(i - 1).neg());
            assert_eq!(
                d.submatrix(r2..d.rows(), 0..r1),
                RMatrix::scalar(&r, r1, &r.t()).submatrix(0..d.rows() - r2, 0..r1)
            );
            assert_eq!(d.submatrix(r2..d.rows(), r1..d.cols()), a.differential(i));
            assert!(d.submatrix(0..r2, r1..d.cols()).is_zero());
        }
        for g in 0..b.total().total_rank() {
            let (part, ag) = b.split(g);
            assert_eq!(b.index(part, ag), g);
        }
    }

    #[test]
    fn tower_matches_koszul_up_to_signs() {
        let r = TruncatedPoly::new(Rationals, 3).unwrap();
        let ts = [r.t(), r.parse("t + t^2").unwrap(), r.parse("2t").unwrap()];
        for n in 1..=3 {
            let k = koszul_algebra(&r, &ts[..n]).unwrap();
            let tower = koszul_tower(&r, &ts[..n]).unwrap();
            let top = tower.last().unwrap().total().clone();
            assert_eq!(top.ranks(), k.ranks());
            let signs = tower_signs(n);
            let m = k.total_rank();
            let to_k = |g: usize, v: &[<TruncatedPoly<Rationals> as TruncatedRing>::Elem], d: i64| {
                v.iter()
                    .enumerate()
                    .map(|(s, c)| r.sign(signs[k.global(d, s)] ^ signs[g], c))
                    .collect::<Vec<_>>()
            };
            for x in 0..m {
                let dx = k.degree_of(x);
                assert_eq!(to_k(x, top.boundary(x), dx - 1), k.boundary(x), "boundary of {x}");
                for y in 0..m {
                    let dy = k.degree_of(y);
                    if dx + dy > n as i64 {
                        continue;
                    }
                    let tv: Vec<_> = top
                        .product(x, y)
                        .iter()
                        .enumerate()
                        .map(|(s, c)| r.sign(signs[x] ^ signs[y] ^ signs[k.global(dx + dy, s)], c))
                        .collect();
                    assert_eq!(tv.as_slice(), k.product(x, y), "product {x} {y}");
                }
            }
        }
    }
}
