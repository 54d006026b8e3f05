//! Quasi-lifting along `R -> K^R(t_1, ..., t_n)`, one Koszul variable at a time.
//!
//! The Koszul algebra is identified with the tower `K^R(t_n) ⊗ ... ⊗ K^R(t_1)`
//! up to the basis signs of [`tower_signs`]. Variables are peeled from the
//! last to the first: resolve over the current stage, lift, repeat.

use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{koszul_algebra, koszul_tower, tower_signs, AlgebraError, BlockAlgebra, DgAlgebra};
use crate::ext::{ext_is_zero, ExtReport};
use crate::hom::HomError;
use crate::lifting::{lift, LiftError, LiftOptions, LiftResult};
use crate::module::{make_semifree, BlockModule, DgModule, GeneralModuleError, ModuleError, SemiFreeModule, Vector};
use crate::resolution::{semi_free_resolution, semi_free_resolution_block, Resolution, ResolutionError};
use crate::ring::TruncatedRing;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IteratedError {
    #[error("lifting along variable {variable} failed: {source}")]
    Lift { variable: usize, source: LiftError },
    #[error("module does not live over the Koszul algebra on the given elements")]
    AlgebraMismatch,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error(transparent)]
    General(#[from] GeneralModuleError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Hom(#[from] HomError),
}

/// What happened while peeling one variable.
#[derive(Debug, Clone)]
pub struct PeelStage<R: TruncatedRing> {
    /// Index into the element list.
    pub variable: usize,
    pub resolution: Resolution<R>,
    pub block: BlockModule<R>,
    /// `Ext^2` of the resolved module over the stage algebra.
    pub ext2: ExtReport<R>,
    pub lift: LiftResult<R>,
}

#[derive(Debug, Clone)]
pub struct IteratedResult<R: TruncatedRing> {
    /// The quasi-lift, a semi-free module over `R`, i.e. a complex of free modules.
    pub complex: SemiFreeModule<R>,
    pub stages: Vec<PeelStage<R>>,
}

/// Rewrites coordinates of a semi-free module between two algebras whose bases
/// agree up to the signs `signs[γ]`.
pub fn transport_semifree<R: TruncatedRing>(
    m: &SemiFreeModule<R>,
    to: &Arc<DgAlgebra<R>>,
    signs: &[bool],
) -> Result<SemiFreeModule<R>, ModuleError> {
    let ring = m.ring();
    let layout = m.layout();
    let values: Vec<Vector<R>> = (0..m.generator_count())
        .map(|g| {
            let d = layout.degree(g) - 1;
            m.value(g)
                .iter()
                .enumerate()
                .map(|(pos, c)| ring.sign(signs[layout.locate(d, pos).1], c))
                .collect()
        })
        .collect();
    Ok(make_semifree(to.clone(), m.degrees().to_vec(), values)?.with_complete_through(m.complete_through()))
}

/// As [`transport_semifree`] for a module given by action matrices.
pub fn transport_module<R: TruncatedRing>(
    d: &DgModule<R>,
    to: &Arc<DgAlgebra<R>>,
    signs: &[bool],
) -> Result<DgModule<R>, IteratedError> {
    if let Some(m) = d.as_semifree() {
        return Ok(DgModule::from_semifree(&transport_semifree(m, to, signs)?));
    }
    Ok(DgModule::new(to.clone(), d.complex().clone(), |gamma, deg| {
        let m = d.action_matrix(gamma, deg);
        if signs[gamma] {
            m.neg()
        } else {
            m
        }
    })?)
}

/// Quasi-lifts `D` over `K^R(t_1, ..., t_n)` to a complex over `R`.
///
/// Each stage records `Ext^2` of its resolved module; a nonzero value is not
/// an error by itself, only a failed homotopy solve is.
pub fn lift_iterated<R: TruncatedRing>(
    d: &DgModule<R>,
    elements: &[R::Elem],
    window: Option<(i64, i64)>,
    opts: &LiftOptions,
) -> Result<IteratedResult<R>, IteratedError> {
    let ring = d.ring().clone();
    let koszul = koszul_algebra(&ring, elements)?;
    if **d.algebra() != koszul {
        return Err(IteratedError::AlgebraMismatch);
    }
    let tower: Vec<Arc<BlockAlgebra<R>>> = koszul_tower(&ring, elements)?.into_iter().map(Arc::new).collect();
    let mut current = match tower.last() {
        Some(top) => transport_module(d, top.total(), &tower_signs(elements.len()))?,
        None => d.clone(),
    };
    let mut stages = Vec::new();
    for (variable, stage) in tower.iter().enumerate().rev() {
        let (block, resolution) = semi_free_resolution_block(&current, stage.clone(), window)?;
        let ext2 = ext_is_zero(2, block.total(), block.total(), window, opts.exec)?;
        let lifted = lift(&block, opts).map_err(|source| IteratedError::Lift { variable, source })?;
        current = DgModule::from_semifree(&lifted.lifted);
        stages.push(PeelStage {
            variable,
            resolution,
            block,
            ext2,
            lift: lifted,
        });
    }
    let complex = match current.as_semifree() {
        Some(m) => m.clone(),
        // no variables: the input is a module over R, resolve it by free modules
        None => semi_free_resolution(&current, window)?.module,
    };
    Ok(IteratedResult { complex, stages })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::ext_is_zero;
    use crate::matrix::RMatrix;
    use crate::module::RComplex;
    use crate::par::Execution;
    use crate::random::plant_through_tower;
    use crate::ring::{PrimeField, TruncatedPoly};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn koszul_algebra_over_itself_lifts_to_r() {
        let r = TruncatedPoly::new(PrimeField::new(2).unwrap(), 2).unwrap();
        let ts = [r.t(), r.t()];
        let k = Arc::new(koszul_algebra(&r, &ts).unwrap());
        let d = DgModule::from_semifree(&SemiFreeModule::algebra_itself(k));
        let res = lift_iterated(&d, &ts, None, &LiftOptions::default()).unwrap();
        assert_eq!(
            res.complex,
            SemiFreeModule::algebra_itself(Arc::new(DgAlgebra::ground(&r)))
        );
        assert_eq!(res.stages.iter().map(|s| s.variable).collect::<Vec<_>>(), vec![1, 0]);
        assert!(res.stages.iter().all(|s| s.ext2.is_zero()));
    }

    #[test]
    fn planted_complex_is_recovered() {
        let r = TruncatedPoly::new(PrimeField::new(2).unwrap(), 2).unwrap();
        let ts = [r.t(), r.t()];
        let tower: Vec<Arc<BlockAlgebra<_>>> = koszul_tower(&r, &ts).unwrap().into_iter().map(Arc::new).collect();
        let ground = Arc::new(DgAlgebra::ground(&r));
        // R <-t- R plus a contractible pair, spanning degrees 0..2
        let c = make_semifree(
            ground,
            vec![0, 1, 1, 2],
            vec![vec![], vec![r.t()], vec![r.one()], vec![r.one(), r.t()]],
        )
        .unwrap();
        let k = Arc::new(koszul_algebra(&r, &ts).unwrap());
        let certified = |n: &BlockModule<TruncatedPoly<PrimeField>>| {
            [1, 2].iter().all(|&i| {
                ext_is_zero(i, n.total(), n.total(), None, Execution::Sequential)
                    .unwrap()
                    .is_zero()
            })
        };
        let mut recovered = 0;
        for seed in 0..40 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let planted = plant_through_tower(&mut rng, &c, &tower);
            if planted.iter().all(|n| n.delta_valuation() == r.precision()) || !planted.iter().all(certified) {
                continue;
            }
            let top = planted.last().unwrap().total();
            let d = transport_module(&DgModule::from_semifree(top), &k, &tower_signs(2)).unwrap();
            let res = lift_iterated(&d, &ts, None, &LiftOptions::default()).unwrap();
            assert_eq!(
                res.complex.complex().homology(None).unwrap(),
                c.complex().homology(None).unwrap()
            );
            recovered += 1;
        }
        assert!(recovered >= 3);
    }

    #[test]
    fn torsion_input_outside_the_hypotheses_is_obstructed() {
        // Ext^2 of K(t, t) ⊗ R/(t) over K(t, t) is nonzero, and the zero tie-break
        // runs into the obstruction even though R/(t) itself is a quasi-lift
        let r = TruncatedPoly::new(PrimeField::new(2).unwrap(), 2).unwrap();
        let ts = [r.t(), r.t()];
        let tower: Vec<Arc<BlockAlgebra<_>>> = koszul_tower(&r, &ts).unwrap().into_iter().map(Arc::new).collect();
        let c = RComplex::with_torsion(&r, 0, vec![vec![1]], vec![RMatrix::zeros(&r, 0, 1)]).unwrap();
        let d = DgModule::over_ground(c)
            .base_change(&tower[0])
            .unwrap()
            .base_change(&tower[1])
            .unwrap();
        let k = Arc::new(koszul_algebra(&r, &ts).unwrap());
        let d = transport_module(&d, &k, &tower_signs(2)).unwrap();
        assert!(matches!(
            lift_iterated(&d, &ts, Some((0, 6)), &LiftOptions::default()),
            Err(IteratedError::Lift {
                variable: 1,
                source: LiftError::ObstructionNonzero { .. }
            })
        ));
    }

    #[test]
    fn wrong_algebra_is_rejected() {
        let r = TruncatedPoly::new(PrimeField::new(2).unwrap(), 2).unwrap();
        let k = Arc::new(koszul_algebra(&r, &[r.t()]).unwrap());
        let d = DgModule::from_semifree(&SemiFreeModule::algebra_itself(k));
        assert!(matches!(
            lift_iterated(&d, &[r.t(), r.t()], None, &LiftOptions::default()),
            Err(IteratedError::AlgebraMismatch)
        ));
    }
}
