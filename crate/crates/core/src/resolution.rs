//! Semi-free resolutions by killing cycles, degree by degree.

use std::sync::Arc;

use thiserror::Error;

use crate::algebra::BlockAlgebra;
use crate::linalg::{in_column_span, kernel_generators};
use crate::matrix::RMatrix;
use crate::module::{BlockModule, DgModule, FreeLayout, ModuleError, RComplex, SemiFreeModule, Vector};
use crate::ring::TruncatedRing;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolutionError {
    #[error("homology in degree {degree} lies outside the window [{lo}, {hi}]")]
    WindowExhausted { degree: i64, lo: i64, hi: i64 },
    #[error("module lives over a different algebra")]
    AlgebraMismatch,
    #[error(transparent)]
    Module(#[from] ModuleError),
}

/// A semi-free module `F` with a map `Φ : F -> D` given on generators.
///
/// `Φ` is a quasi-isomorphism in degrees below `complete_through` (all
/// degrees when the resolution is complete).
#[derive(Debug, Clone)]
pub struct Resolution<R: TruncatedRing> {
    pub module: SemiFreeModule<R>,
    /// `phi[g] ∈ D_{|g|}`.
    pub phi: Vec<Vector<R>>,
}

struct Builder<'a, R: TruncatedRing> {
    target: &'a DgModule<R>,
    degrees: Vec<i64>,
    diff: Vec<Vector<R>>,
    phi: Vec<Vector<R>>,
}

impl<'a, R: TruncatedRing> Builder<'a, R> {
    fn module(&self) -> SemiFreeModule<R> {
        let layout = FreeLayout::new(self.target.algebra().clone(), self.degrees.clone());
        let diff = self
            .diff
            .iter()
            .enumerate()
            .map(|(g, v)| {
                let mut v = v.clone();
                v.resize(layout.rank(self.degrees[g] - 1), self.target.ring().zero());
                v
            })
            .collect();
        SemiFreeModule::new_unchecked(layout, diff).expect("padded shapes")
    }

    fn phi_matrix(&self, f: &SemiFreeModule<R>, d: i64) -> RMatrix<R> {
        let d_complex = self.target.complex();
        let cols: Vec<Vector<R>> = (0..f.rank(d))
            .map(|pos| {
                let (g, gamma) = f.layout().locate(d, pos);
                self.target.act(gamma, self.degrees[g], &self.phi[g])
            })
            .collect();
        RMatrix::from_columns(self.target.ring(), d_complex.rank(d), &cols)
    }

    fn add(&mut self, degree: i64, diff: Vector<R>, phi: Vector<R>) {
        self.degrees.push(degree);
        self.diff.push(diff);
        self.phi.push(phi);
    }

    /// Adds the generators of degree `d`; returns how many were added.
    fn step(&mut self, d: i64) -> usize {
        let before = self.degrees.len();
        let dc = self.target.complex().clone();
        let ring = self.target.ring().clone();
        // injectivity on H_{d-1}: kill cycles mapping to boundaries
        let f = self.module();
        let zg = f.complex().cycle_generators(d - 1);
        if zg.cols() > 0 {
            let stacked = self
                .phi_matrix(&f, d - 1)
                .mul(&zg)
                .hstack(&dc.differential(d).neg())
                .hstack(&dc.torsion_matrix(d - 1).neg());
            for k in kernel_generators(&stacked) {
                let (lambda, rest) = k.split_at(zg.cols());
                let c = zg.apply(lambda);
                let f = self.module();
                if in_column_span(&f.differential(d), &c) {
                    continue;
                }
                let y = rest[..dc.rank(d)].to_vec();
                self.add(d, c, y);
            }
        }
        // surjectivity on H_d
        let zd = dc.cycle_generators(d);
        for j in 0..zd.cols() {
            let f = self.module();
            let span = self
                .phi_matrix(&f, d)
                .mul(&f.complex().cycle_generators(d))
                .hstack(&dc.boundary_generators(d));
            let z = zd.column(j);
            if !in_column_span(&span, &z) {
                let zero = vec![ring.zero(); f.rank(d - 1)];
                self.add(d, zero, z);
            }
        }
        self.degrees.len() - before
    }

    fn finish(self, complete_through: Option<i64>) -> Resolution<R> {
        let module = self.module().with_complete_through(complete_through);
        Resolution { module, phi: self.phi }
    }
}

/// Resolves `D` over its algebra through degree `hi`, starting at `lo`.
///
/// The default window starts at the bottom of `D` and ends at its top.
/// The result is exact (`complete_through = None`) when no further
/// generators are needed, otherwise complete through `hi`.
pub fn semi_free_resolution<R: TruncatedRing>(
    target: &DgModule<R>,
    window: Option<(i64, i64)>,
) -> Result<Resolution<R>, ResolutionError> {
    if let Some(m) = target.as_semifree() {
        let phi = (0..m.generator_count())
            .map(|g| m.layout().generator_vector(g))
            .collect();
        return Ok(Resolution { module: m.clone(), phi });
    }
    let dc = target.complex();
    let Some((dlo, dhi)) = dc.bounds() else {
        return Ok(Resolution {
            module: SemiFreeModule::zero(target.algebra().clone()),
            phi: vec![],
        });
    };
    let (lo, hi) = window.unwrap_or((dlo, dhi));
    for d in dlo..=dhi {
        if (d < lo || d > hi) && !dc.homology_at(d).is_empty() {
            return Err(ResolutionError::WindowExhausted { degree: d, lo, hi });
        }
    }
    let mut b = Builder {
        target,
        degrees: vec![],
        diff: vec![],
        phi: vec![],
    };
    for d in lo..=hi {
        b.step(d);
    }
    // probe whether the construction has stopped for good
    let mut probe = Builder {
        target,
        degrees: b.degrees.clone(),
        diff: b.diff.clone(),
        phi: b.phi.clone(),
    };
    let limit = probe.module().layout().support().map_or(dhi, |s| s.1.max(dhi)) + 1;
    let complete = (hi + 1..=limit).all(|d| probe.step(d) == 0);
    Ok(b.finish(if complete { None } else { Some(hi) }))
}

/// Resolution of a module over `B` in block form.
pub fn semi_free_resolution_block<R: TruncatedRing>(
    target: &DgModule<R>,
    algebra: Arc<BlockAlgebra<R>>,
    window: Option<(i64, i64)>,
) -> Result<(BlockModule<R>, Resolution<R>), ResolutionError> {
    if target.algebra() != algebra.total() {
        return Err(ResolutionError::AlgebraMismatch);
    }
    let res = semi_free_resolution(target, window)?;
    let block = BlockModule::from_total_module(algebra, &res.module)?;
    Ok((block, res))
}

/// Whether `Φ` induces isomorphisms `H_d(F) -> H_d(D)` for `d` in `lo..hi`,
/// tested by acyclicity of the mapping cone in degrees `lo..=hi`.
pub fn verify_quasi_isomorphism<R: TruncatedRing>(
    f: &SemiFreeModule<R>,
    target: &DgModule<R>,
    phi: &[Vector<R>],
    lo: i64,
    hi: i64,
) -> bool {
    let ring = f.ring();
    let dc = target.complex();
    let n = ring.precision();
    let phi_matrix = |d: i64| -> RMatrix<R> {
        let cols: Vec<Vector<R>> = (0..f.rank(d))
            .map(|pos| {
                let (g, gamma) = f.layout().locate(d, pos);
                target.act(gamma, f.layout().degree(g), &phi[g])
            })
            .collect();
        RMatrix::from_columns(ring, dc.rank(d), &cols)
    };
    // C_d = F_{d-1} ⊕ D_d, ∂(x, y) = (-∂x, Φx + ∂y)
    let (clo, chi) = (lo - 1, hi + 1);
    let torsion: Vec<Vec<usize>> = (clo..=chi)
        .map(|d| {
            let mut t = vec![n; f.rank(d - 1)];
            t.extend_from_slice(dc.torsion_of(d));
            t
        })
        .collect();
    let diffs: Vec<RMatrix<R>> = (clo..=chi)
        .map(|d| {
            let (f1, d0) = (f.rank(d - 1), dc.rank(d));
            if d == clo {
                return RMatrix::zeros(ring, 0, f1 + d0);
            }
            let (f2, d1) = (f.rank(d - 2), dc.rank(d - 1));
            let mut m = RMatrix::zeros(ring, f2 + d1, f1 + d0);
            m.paste(0, 0, &f.differential(d - 1).neg());
            m.paste(f2, 0, &phi_matrix(d - 1));
            m.paste(f2, f1, &dc.differential(d));
            m
        })
        .collect();
    let cone = match RComplex::with_torsion(ring, clo, torsion, diffs) {
        Ok(c) => c,
        Err(_) => return false,
    };
    cone.check_square_zero().is_ok() && (lo..=hi).all(|d| cone.homology_at(d).is_empty())
}
