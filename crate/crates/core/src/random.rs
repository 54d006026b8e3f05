//! Seeded generators for random valid modules.
//!
//! Semi-free modules are built generator by generator: a new generator of
//! degree `d` gets a random combination of cycles of `F_{d-1}` as its
//! boundary, so every output passes validation without filtering. Block
//! modules with `δ != 0` come from base changes conjugated by `[[1, s], [0, 1]]`.

use std::sync::Arc;

use rand::Rng;

use crate::algebra::{BlockAlgebra, DgAlgebra};
use crate::module::{base_change, make_block_module, BlockModule, FreeLayout, SemiFreeModule, Vector};
use crate::ring::TruncatedRing;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModuleShape {
    pub max_generators: usize,
    /// Inclusive range of generator degrees.
    pub degrees: (i64, i64),
    /// Keep every coefficient in the maximal ideal.
    pub minimal: bool,
}

impl Default for ModuleShape {
    fn default() -> Self {
        Self {
            max_generators: 4,
            degrees: (0, 2),
            minimal: false,
        }
    }
}

fn coefficient<R: TruncatedRing>(ring: &R, rng: &mut impl Rng, minimal: bool) -> R::Elem {
    if rng.gen_bool(0.4) {
        return ring.zero();
    }
    let c = ring.random(rng);
    if minimal {
        ring.mul(&c, &ring.t())
    } else {
        c
    }
}

fn random_vector<R: TruncatedRing>(ring: &R, rng: &mut impl Rng, len: usize, minimal: bool) -> Vector<R> {
    (0..len).map(|_| coefficient(ring, rng, minimal)).collect()
}

/// A random semi-free module with at least one generator.
pub fn random_semifree<R: TruncatedRing>(
    rng: &mut impl Rng,
    algebra: &Arc<DgAlgebra<R>>,
    shape: &ModuleShape,
) -> SemiFreeModule<R> {
    let ring = algebra.ring().clone();
    let count = rng.gen_range(1..=shape.max_generators.max(1));
    let mut degrees: Vec<i64> = (0..count)
        .map(|_| rng.gen_range(shape.degrees.0..=shape.degrees.1))
        .collect();
    degrees.sort_unstable();
    let mut values: Vec<Vector<R>> = Vec::with_capacity(count);
    for (g, &d) in degrees.iter().enumerate() {
        // generators are sorted, so M_{d-1} is already complete
        let current =
            SemiFreeModule::new_unchecked(FreeLayout::new(algebra.clone(), degrees[..g].to_vec()), values.clone())
                .expect("values have the right shape");
        let cycles = current.complex().cycle_generators(d - 1);
        let mut value = vec![ring.zero(); current.rank(d - 1)];
        for j in 0..cycles.cols() {
            let c = coefficient(&ring, rng, shape.minimal);
            for (v, x) in value.iter_mut().zip(cycles.column(j)) {
                *v = ring.add(v, &ring.mul(&c, &x));
            }
        }
        values.push(value);
    }
    SemiFreeModule::new_unchecked(FreeLayout::new(algebra.clone(), degrees), values)
        .expect("values have the right shape")
}

/// A random block module with `δ != 0` in general, together with how it was made.
#[derive(Debug, Clone)]
pub struct ConjugatedBlock<R: TruncatedRing> {
    pub module: BlockModule<R>,
    /// `M` with `module ≅ B ⊗ M`.
    pub base: SemiFreeModule<R>,
    /// Values of the degree `-1` map `s`.
    pub conjugator: Vec<Vector<R>>,
}

/// Conjugates `B ⊗ M` by `[[1, s], [0, 1]]`: `α' = α - t s`, `δ' = α s + s α - t s s`.
pub fn conjugate<R: TruncatedRing>(
    m: &SemiFreeModule<R>,
    algebra: &Arc<BlockAlgebra<R>>,
    s: &[Vector<R>],
) -> BlockModule<R> {
    let ring = m.ring();
    let layout = m.layout();
    let t = algebra.t();
    let mut alpha = Vec::new();
    let mut delta = Vec::new();
    for g in 0..m.generator_count() {
        let d = layout.degree(g);
        let a: Vector<R> = m
            .value(g)
            .iter()
            .zip(&s[g])
            .map(|(x, y)| ring.sub(x, &ring.mul(t, y)))
            .collect();
        let as_ = layout.apply_derivation(m.values(), d - 1, &s[g]);
        let sa = layout.apply_linear(s, layout, -1, d - 1, m.value(g));
        let ss = layout.apply_linear(s, layout, -1, d - 1, &s[g]);
        let dl: Vector<R> = as_
            .iter()
            .zip(&sa)
            .zip(&ss)
            .map(|((x, y), z)| ring.sub(&ring.add(x, y), &ring.mul(t, z)))
            .collect();
        alpha.push(a);
        delta.push(dl);
    }
    make_block_module(algebra.clone(), m.degrees().to_vec(), alpha, delta).expect("conjugation preserves validity")
}

pub fn random_block<R: TruncatedRing>(
    rng: &mut impl Rng,
    algebra: &Arc<BlockAlgebra<R>>,
    shape: &ModuleShape,
) -> ConjugatedBlock<R> {
    let base = random_semifree(rng, algebra.base(), shape);
    let conjugator = random_conjugator(rng, &base);
    let module = conjugate(&base, algebra, &conjugator);
    ConjugatedBlock {
        module,
        base,
        conjugator,
    }
}

/// A random degree `-1` conjugator for `m`.
pub fn random_conjugator<R: TruncatedRing>(rng: &mut impl Rng, m: &SemiFreeModule<R>) -> Vec<Vector<R>> {
    let layout = m.layout();
    (0..m.generator_count())
        .map(|g| random_vector(m.ring(), rng, layout.rank(layout.degree(g) - 1), false))
        .collect()
}

/// Base-changes `c` up a Koszul tower, conjugating randomly at every stage.
///
/// Returns the block module at each stage, bottom first; the last one's total
/// module hides `c` behind `tower.len()` conjugations.
pub fn plant_through_tower<R: TruncatedRing>(
    rng: &mut impl Rng,
    c: &SemiFreeModule<R>,
    tower: &[Arc<BlockAlgebra<R>>],
) -> Vec<BlockModule<R>> {
    let mut m = c.clone();
    let mut out = Vec::new();
    for stage in tower {
        let s = random_conjugator(rng, &m);
        let n = conjugate(&m, stage, &s);
        m = n.total().clone();
        out.push(n);
    }
    out
}

/// Raw `(degrees, α, δ)` data, valid about half the time.
pub fn random_block_candidate<R: TruncatedRing>(
    rng: &mut impl Rng,
    algebra: &Arc<BlockAlgebra<R>>,
    shape: &ModuleShape,
) -> (Vec<i64>, Vec<Vector<R>>, Vec<Vector<R>>) {
    let valid = random_block(rng, algebra, shape).module;
    let ring = valid.ring().clone();
    let degrees = valid.degrees().to_vec();
    let mut alpha = valid.alpha().to_vec();
    let mut delta = valid.delta().to_vec();
    if rng.gen_bool(0.5) {
        let g = rng.gen_range(0..degrees.len());
        let target = if rng.gen_bool(0.5) {
            &mut alpha[g]
        } else {
            &mut delta[g]
        };
        if !target.is_empty() {
            let i = rng.gen_range(0..target.len());
            target[i] = ring.add(&target[i], &ring.random(rng));
        }
    }
    (degrees, alpha, delta)
}

/// `B ⊗ M` for a random `M`.
pub fn random_base_change<R: TruncatedRing>(
    rng: &mut impl Rng,
    algebra: &Arc<BlockAlgebra<R>>,
    shape: &ModuleShape,
) -> (SemiFreeModule<R>, BlockModule<R>) {
    let m = random_semifree(rng, algebra.base(), shape);
    let n = base_change(&m, algebra.clone()).expect("base algebra matches");
    (m, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{koszul_algebra, tensor_with_koszul};
    use crate::ring::{PrimeField, TruncatedPoly};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_modules_are_valid() {
        let r = TruncatedPoly::new(PrimeField::new(3).unwrap(), 2).unwrap();
        let a = Arc::new(koszul_algebra(&r, &[r.t()]).unwrap());
        let b = Arc::new(tensor_with_koszul(a.clone(), r.t()).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let m = random_semifree(&mut rng, &a, &ModuleShape::default());
            assert!(m.validate().is_ok());
            let c = random_block(&mut rng, &b, &ModuleShape::default());
            assert!(c.module.validate().is_ok());
            assert!(c.module.total().validate().is_ok());
        }
    }

    #[test]
    fn minimal_shape_gives_minimal_modules() {
        let r = TruncatedPoly::new(PrimeField::new(2).unwrap(), 3).unwrap();
        let a = Arc::new(DgAlgebra::ground(&r));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let shape = ModuleShape {
            minimal: true,
            ..Default::default()
        };
        for _ in 0..20 {
            assert!(random_semifree(&mut rng, &a, &shape).is_minimal());
        }
    }
}
