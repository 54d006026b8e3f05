use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{BlockAlgebra, BlockPart, DgAlgebra};
use crate::matrix::RMatrix;
use crate::ring::{odd, TruncatedRing};

use super::complex::RComplex;
use super::layout::axpy;
use super::semifree::SemiFreeModule;
use super::Vector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneralModuleError {
    #[error("malformed module data: {0}")]
    Shape(String),
    #[error("differential does not square to zero in degree {0}")]
    SquareNonzero(i64),
    #[error("action of {gamma} is not well defined on degree {degree}")]
    TorsionNotPreserved { gamma: String, degree: i64 },
    #[error("Leibniz rule fails for {gamma} in degree {degree}")]
    LeibnizViolation { gamma: String, degree: i64 },
    #[error("action is not associative for {left} and {right} in degree {degree}")]
    NotAssociative { left: String, right: String, degree: i64 },
}

/// A DG module over `A` whose underlying complex is a bounded complex of
/// finitely generated `R`-modules, with the action given by matrices.
#[derive(Debug, Clone)]
pub struct DgModule<R: TruncatedRing> {
    algebra: Arc<DgAlgebra<R>>,
    complex: RComplex<R>,
    /// `(γ, d) ↦` matrix of `x ↦ γx` on `C_d`, for non-unit basis elements.
    actions: HashMap<(usize, i64), RMatrix<R>>,
    semifree: Option<SemiFreeModule<R>>,
}

impl<R: TruncatedRing> DgModule<R> {
    /// `action(γ, d)` gives the matrix `C_d -> C_{d+|γ|}` of a non-unit basis element.
    pub fn new(
        algebra: Arc<DgAlgebra<R>>,
        complex: RComplex<R>,
        action: impl Fn(usize, i64) -> RMatrix<R>,
    ) -> Result<Self, GeneralModuleError> {
        if complex.ring() != algebra.ring() {
            return Err(GeneralModuleError::Shape(
                "complex and algebra use different rings".into(),
            ));
        }
        let mut actions = HashMap::new();
        if let Some((lo, hi)) = complex.bounds() {
            for gamma in 1..algebra.total_rank() {
                let dg = algebra.degree_of(gamma);
                for d in lo..=hi {
                    if complex.rank(d + dg) == 0 {
                        continue;
                    }
                    let m = action(gamma, d);
                    if m.rows() != complex.rank(d + dg) || m.cols() != complex.rank(d) {
                        return Err(GeneralModuleError::Shape(format!(
                            "action of {} on degree {d} is {}x{}",
                            algebra.label(gamma),
                            m.rows(),
                            m.cols()
                        )));
                    }
                    actions.insert((gamma, d), m);
                }
            }
        }
        let module = Self {
            algebra,
            complex,
            actions,
            semifree: None,
        };
        module.validate()?;
        Ok(module)
    }

    pub fn from_semifree(m: &SemiFreeModule<R>) -> Self {
        let complex = m.complex();
        let mut actions = HashMap::new();
        if let Some((lo, hi)) = complex.bounds() {
            for gamma in 1..m.algebra().total_rank() {
                for d in lo..=hi {
                    actions.insert((gamma, d), m.layout().act_matrix(gamma, d));
                }
            }
        }
        Self {
            algebra: m.algebra().clone(),
            complex,
            actions,
            semifree: Some(m.clone()),
        }
    }

    /// A complex of `R`-modules viewed as a module over `R` itself.
    pub fn over_ground(complex: RComplex<R>) -> Self {
        Self {
            algebra: Arc::new(DgAlgebra::ground(complex.ring())),
            complex,
            actions: HashMap::new(),
            semifree: None,
        }
    }

    /// `B ⊗_A D` with `(B ⊗ D)_i = D_{i-1} ⊕ D_i`, the top summand being `e ⊗ D_{i-1}`.
    pub fn base_change(&self, algebra: &Arc<BlockAlgebra<R>>) -> Result<Self, GeneralModuleError> {
        if algebra.base() != &self.algebra {
            return Err(GeneralModuleError::Shape(
                "module does not live over the base algebra".into(),
            ));
        }
        let ring = self.ring().clone();
        let c = &self.complex;
        let Some((lo, hi)) = c.bounds() else {
            return Self::new(algebra.total().clone(), RComplex::zero(&ring), |_, _| {
                RMatrix::zeros(&ring, 0, 0)
            });
        };
        let r = |d: i64| c.rank(d);
        let (nlo, nhi) = (lo, hi + 1);
        let torsion: Vec<Vec<usize>> = (nlo..=nhi)
            .map(|i| [c.torsion_of(i - 1), c.torsion_of(i)].concat())
            .collect();
        // ∂ = [[-∂, 0], [t, ∂]]
        let diffs: Vec<RMatrix<R>> = (nlo..=nhi)
            .map(|i| {
                if i == nlo {
                    return RMatrix::zeros(&ring, 0, r(i - 1) + r(i));
                }
                let mut m = RMatrix::zeros(&ring, r(i - 2) + r(i - 1), r(i - 1) + r(i));
                m.paste(0, 0, &c.differential(i - 1).neg());
                m.paste(r(i - 2), 0, &RMatrix::scalar(&ring, r(i - 1), algebra.t()));
                m.paste(r(i - 2), r(i - 1), &c.differential(i));
                m
            })
            .collect();
        let complex = RComplex::with_torsion(&ring, nlo, torsion, diffs)
            .map_err(|e| GeneralModuleError::Shape(e.to_string()))?
            .with_complete_through(c.complete_through().map(|x| x + 1));
        let a = &self.algebra;
        Self::new(algebra.total().clone(), complex, |gamma, i| {
            let (part, x) = algebra.split(gamma);
            let dx = a.degree_of(x);
            match part {
                // x (e u, v) = ((-1)^{|x|} e x u, x v)
                BlockPart::Bottom => {
                    let mut m = RMatrix::zeros(&ring, r(i + dx - 1) + r(i + dx), r(i - 1) + r(i));
                    let top = self.action_matrix(x, i - 1);
                    m.paste(0, 0, &if odd(dx) { top.neg() } else { top });
                    m.paste(r(i + dx - 1), r(i - 1), &self.action_matrix(x, i));
                    m
                }
                // e x (e u, v) = (x v, 0)
                BlockPart::Top => {
                    let mut m = RMatrix::zeros(&ring, r(i + dx) + r(i + dx + 1), r(i - 1) + r(i));
                    m.paste(0, r(i - 1), &self.action_matrix(x, i));
                    m
                }
            }
        })
    }

    fn validate(&self) -> Result<(), GeneralModuleError> {
        let c = &self.complex;
        c.check_square_zero().map_err(GeneralModuleError::SquareNonzero)?;
        let Some((lo, hi)) = c.bounds() else { return Ok(()) };
        let a = &self.algebra;
        let ring = a.ring();
        for gamma in 1..a.total_rank() {
            let dg = a.degree_of(gamma);
            let label = || a.label(gamma).to_string();
            for d in lo..=hi {
                let act = self.action_matrix(gamma, d);
                // torsion relations map to torsion relations
                let tm = c.torsion_matrix(d);
                let img = act.mul(&tm);
                for j in 0..img.cols() {
                    if !c.is_zero_element(d + dg, &img.column(j)) {
                        return Err(GeneralModuleError::TorsionNotPreserved {
                            gamma: label(),
                            degree: d,
                        });
                    }
                }
                for j in 0..c.rank(d) {
                    let mut e = vec![ring.zero(); c.rank(d)];
                    e[j] = ring.one();
                    let lhs = c.differential(d + dg).apply(&act.apply(&e));
                    let mut rhs = self.act_boundary(gamma, d, &e);
                    let second = self.act(gamma, d - 1, &c.differential(d).apply(&e));
                    axpy(ring, &mut rhs, &ring.sign(odd(dg), &ring.one()), &second);
                    let diff: Vector<R> = lhs.iter().zip(&rhs).map(|(x, y)| ring.sub(x, y)).collect();
                    if !c.is_zero_element(d + dg - 1, &diff) {
                        return Err(GeneralModuleError::LeibnizViolation {
                            gamma: label(),
                            degree: d,
                        });
                    }
                    for delta in 1..a.total_rank() {
                        let dd = a.degree_of(delta);
                        if d + dg + dd > hi || dg + dd > a.top_degree() {
                            continue;
                        }
                        let lhs = self.act(gamma, d + dd, &self.act(delta, d, &e));
                        let mut rhs = vec![ring.zero(); c.rank(d + dg + dd)];
                        for (s, p) in a.product(gamma, delta).iter().enumerate() {
                            if !ring.is_zero(p) {
                                axpy(ring, &mut rhs, p, &self.act(a.global(dg + dd, s), d, &e));
                            }
                        }
                        let diff: Vector<R> = lhs.iter().zip(&rhs).map(|(x, y)| ring.sub(x, y)).collect();
                        if !c.is_zero_element(d + dg + dd, &diff) {
                            return Err(GeneralModuleError::NotAssociative {
                                left: label(),
                                right: a.label(delta).to_string(),
                                degree: d,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn algebra(&self) -> &Arc<DgAlgebra<R>> {
        &self.algebra
    }

    pub fn ring(&self) -> &R {
        self.algebra.ring()
    }

    pub fn complex(&self) -> &RComplex<R> {
        &self.complex
    }

    /// The semi-free presentation, when the module was built from one.
    pub fn as_semifree(&self) -> Option<&SemiFreeModule<R>> {
        self.semifree.as_ref()
    }

    pub fn action_matrix(&self, gamma: usize, d: i64) -> RMatrix<R> {
        let dg = self.algebra.degree_of(gamma);
        if gamma == self.algebra.unit() {
            return RMatrix::identity(self.ring(), self.complex.rank(d));
        }
        match self.actions.get(&(gamma, d)) {
            Some(m) => m.clone(),
            None => RMatrix::zeros(self.ring(), self.complex.rank(d + dg), self.complex.rank(d)),
        }
    }

    /// `γ x` for a basis element `γ` and `x ∈ C_d`.
    pub fn act(&self, gamma: usize, d: i64, x: &[R::Elem]) -> Vector<R> {
        if gamma == self.algebra.unit() {
            return x.to_vec();
        }
        let dg = self.algebra.degree_of(gamma);
        match self.actions.get(&(gamma, d)) {
            Some(m) => m.apply(x),
            None => vec![self.ring().zero(); self.complex.rank(d + dg)],
        }
    }

    /// `(∂γ) x`.
    fn act_boundary(&self, gamma: usize, d: i64, x: &[R::Elem]) -> Vector<R> {
        let a = &self.algebra;
        let ring = a.ring();
        let dg = a.degree_of(gamma);
        let mut out = vec![ring.zero(); self.complex.rank(d + dg - 1)];
        for (s, c) in a.boundary(gamma).iter().enumerate() {
            if !ring.is_zero(c) {
                axpy(ring, &mut out, c, &self.act(a.global(dg - 1, s), d, x));
            }
        }
        out
    }

    /// `Σ_s c_s γ_s x` for an algebra element `c` of degree `k`.
    pub fn act_element(&self, k: i64, c: &[R::Elem], d: i64, x: &[R::Elem]) -> Vector<R> {
        let ring = self.ring();
        let mut out = vec![ring.zero(); self.complex.rank(d + k)];
        for (s, coef) in c.iter().enumerate() {
            if !ring.is_zero(coef) {
                axpy(ring, &mut out, coef, &self.act(self.algebra.global(k, s), d, x));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::koszul_algebra;
    use crate::ring::{PrimeField, TruncatedPoly};

    #[test]
    fn residue_field_over_koszul() {
        let r = TruncatedPoly::new(PrimeField::new(2).unwrap(), 2).unwrap();
        let k = Arc::new(koszul_algebra(&r, &[r.t()]).unwrap());
        let c = RComplex::with_torsion(&r, 0, vec![vec![1]], vec![RMatrix::zeros(&r, 0, 1)]).unwrap();
        let d = DgModule::new(k.clone(), c.clone(), |_, _| RMatrix::zeros(&r, 0, 1)).unwrap();
        assert_eq!(d.complex().homology(None).unwrap(), vec![(0, vec![1])]);
        // over R/(t^2) instead the Leibniz rule fails: ∂(e·1) = t·1 != 0
        let c2 = RComplex::free(
            &r,
            0,
            vec![1, 1],
            vec![RMatrix::zeros(&r, 0, 1), RMatrix::zeros(&r, 1, 1)],
        )
        .unwrap();
        let bad = DgModule::new(k, c2, |_, _| RMatrix::identity(&r, 1));
        assert!(matches!(bad, Err(GeneralModuleError::LeibnizViolation { .. })));
    }

    #[test]
    fn general_base_change_matches_semifree() {
        let r = TruncatedPoly::new(PrimeField::new(3).unwrap(), 2).unwrap();
        let a = Arc::new(koszul_algebra(&r, &[r.t()]).unwrap());
        let b = Arc::new(crate::algebra::tensor_with_koszul(a.clone(), r.t()).unwrap());
        let m = crate::module::make_semifree(a, vec![0, 1], vec![vec![], vec![r.t()]]).unwrap();
        let general = DgModule::from_semifree(&m).base_change(&b).unwrap();
        let block = crate::module::base_change(&m, b.clone()).unwrap();
        let d = DgModule::from_semifree(block.total());
        assert_eq!(
            general.complex().homology(None).unwrap(),
            d.complex().homology(None).unwrap()
        );
        // torsion input: R/(t) over R, then over K(t)
        let c = RComplex::with_torsion(&r, 0, vec![vec![1]], vec![RMatrix::zeros(&r, 0, 1)]).unwrap();
        let k1 = Arc::new(crate::algebra::tensor_with_koszul(Arc::new(DgAlgebra::ground(&r)), r.t()).unwrap());
        let bc = DgModule::over_ground(c).base_change(&k1).unwrap();
        assert_eq!(bc.complex().homology(None).unwrap(), vec![(0, vec![1]), (1, vec![1])]);
    }

    #[test]
    fn semifree_modules_embed() {
        let r = TruncatedPoly::new(PrimeField::new(2).unwrap(), 2).unwrap();
        let k = Arc::new(koszul_algebra(&r, &[r.t()]).unwrap());
        let m = SemiFreeModule::algebra_itself(k);
        let d = DgModule::from_semifree(&m);
        assert!(d.validate().is_ok());
        assert!(d.as_semifree().is_some());
    }
}
