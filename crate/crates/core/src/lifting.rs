//! Lifting DG modules along `A -> B = K^R(t) ⊗ A`.
//!
//! A block module `N` with differential `[[-α, δ], [t, α]]` is lifted by
//! driving `δ` to zero one power of `t` at a time. Each stage solves a
//! homotopy equation in `Hom_B(N, N)` and conjugates by an elementary
//! isomorphism; after `N_prec` stages `δ = 0` and `N = B ⊗ M` exactly.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::BlockAlgebra;
use crate::hom::{
    base_change_hom, block_pieces, compose, has_unit_determinants, hom_differential, hom_slice, is_cycle,
    is_isomorphism, null_homotopy, GradedMap, HomError,
};
use crate::linalg::kernel_generators;
use crate::module::{
    base_change, make_block_module, make_semifree, BlockModule, ComplexError, DgModule, ModuleError, SemiFreeModule,
    Vector,
};
use crate::par::Execution;
use crate::ring::TruncatedRing;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LiftError {
    #[error("obstruction at stage {stage}: the degree -2 cycle is not null-homotopic")]
    ObstructionNonzero {
        stage: usize,
        transcript: Vec<StageRecord>,
        /// `δ_red(b)` per generator; the failing cycle is `e_b -> [0; δ_red(b)]`.
        cycle: Vec<Vec<serde_json::Value>>,
    },
    #[error("lifting element {0} is a unit, so the ring is not complete along it")]
    UnitElement(String),
    #[error("delta is not divisible by t^{needed} (valuation {valuation})")]
    Shape { needed: usize, valuation: usize },
    #[error("reduced delta does not commute with alpha")]
    NotACycle,
    #[error("the given map does not solve the homotopy equation")]
    NotAHomotopy,
    #[error("the given map is not an isomorphism of base changes")]
    NotAnIso,
    #[error("Ext^1 obstruction at stage {0}")]
    Ext1Obstruction(usize),
    #[error("modules live over different algebras")]
    AlgebraMismatch,
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Hom(#[from] HomError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// One line of the lifting transcript.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageRecord {
    pub n: usize,
    pub solved: bool,
    /// Valuation of `δ` after the stage; the precision once `δ = 0`.
    pub delta_valuation: usize,
    /// Coordinates of the homotopy, formatted.
    pub params: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LiftOptions {
    pub exec: Execution,
    /// Adds a seeded random cycle to each homotopy, giving a different valid lift.
    pub perturb: Option<u64>,
}

/// Powers of the lifting element `t_k = u t^m` and exact division by them.
#[derive(Debug, Clone)]
pub(crate) struct LiftElement<R: TruncatedRing> {
    ring: R,
    t: R::Elem,
    unit: Option<(R::Elem, usize)>,
}

impl<R: TruncatedRing> LiftElement<R> {
    pub(crate) fn new(ring: &R, t: &R::Elem) -> Result<Self, LiftError> {
        if ring.is_unit(t) {
            return Err(LiftError::UnitElement(ring.format(t)));
        }
        Ok(Self {
            ring: ring.clone(),
            t: t.clone(),
            unit: ring.unit_part(t),
        })
    }

    pub(crate) fn pow(&self, n: usize) -> R::Elem {
        let mut acc = self.ring.one();
        for _ in 0..n {
            acc = self.ring.mul(&acc, &self.t);
        }
        acc
    }

    /// Least `n` with `t_k^n = 0`; the number of lifting stages.
    pub(crate) fn nilpotency(&self) -> usize {
        match &self.unit {
            None => 1,
            Some((_, m)) => self.ring.precision().div_ceil(*m),
        }
    }

    /// Some `y` with `x = t_k^n y`.
    pub(crate) fn divide(&self, x: &R::Elem, n: usize) -> Option<R::Elem> {
        if n == 0 {
            return Some(x.clone());
        }
        let ring = &self.ring;
        match &self.unit {
            None => ring.is_zero(x).then(|| ring.zero()),
            Some((u, m)) => {
                if ring.valuation(x) < m * n {
                    return None;
                }
                let inv = ring.invert(u).expect("unit part is a unit");
                let mut y = ring.shift_down(x, m * n);
                for _ in 0..n {
                    y = ring.mul(&y, &inv);
                }
                Some(y)
            }
        }
    }
}

/// `N^{(n)}` with `δ = t^n δ_red`; `α α + t^{n+1} δ_red = 0` and `δ_red α = α δ_red`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftStage<R: TruncatedRing> {
    module: BlockModule<R>,
    delta_red: Vec<Vector<R>>,
    done: usize,
}

impl<R: TruncatedRing> LiftStage<R> {
    pub fn new(module: BlockModule<R>) -> Self {
        let delta_red = module.delta().to_vec();
        Self {
            module,
            delta_red,
            done: 0,
        }
    }

    /// Treats `module` as the output of `done` stages, dividing `δ` by `t^done`.
    pub fn from_block(module: BlockModule<R>, done: usize) -> Result<Self, LiftError> {
        let tk = LiftElement::new(module.ring(), module.algebra().t())?;
        let valuation = module.delta_valuation();
        let shape = || LiftError::Shape {
            needed: done,
            valuation,
        };
        let delta_red: Vec<Vector<R>> = module
            .delta()
            .iter()
            .map(|v| v.iter().map(|x| tk.divide(x, done).ok_or_else(shape)).collect())
            .collect::<Result<_, _>>()?;
        let reduced = BlockModule::new_unchecked(
            module.algebra().clone(),
            module.degrees().to_vec(),
            module.alpha().to_vec(),
            delta_red.clone(),
        )?;
        let stage = Self {
            module,
            delta_red,
            done,
        };
        if !is_cycle(&stage.delta_cycle(&reduced), reduced.total(), reduced.total()) {
            return Err(LiftError::NotACycle);
        }
        Ok(stage)
    }

    pub fn module(&self) -> &BlockModule<R> {
        &self.module
    }

    pub fn delta_red(&self) -> &[Vector<R>] {
        &self.delta_red
    }

    /// Stages completed so far.
    pub fn done(&self) -> usize {
        self.done
    }

    /// The degree `-2` map with values `[0; δ_red(b)]` on `on`.
    fn delta_cycle(&self, on: &BlockModule<R>) -> GradedMap<R> {
        let values = self
            .delta_red
            .iter()
            .enumerate()
            .map(|(g, v)| {
                let d = on.layout().degree(g) - 2;
                on.to_total(d, &on.layout().zero_vector(d - 1), v)
            })
            .collect();
        GradedMap { degree: -2, values }
    }

    /// Runs stage `done + 1`.
    pub fn step(&self, opts: &LiftOptions, rng: Option<&mut ChaCha8Rng>) -> Result<StepResult<R>, LiftError> {
        let n = self.done + 1;
        let ring = self.module.ring().clone();
        let nm = &self.module;
        let total = nm.total();
        let f = self.delta_cycle(nm);
        let mut s = match null_homotopy(&f, total, total, opts.exec) {
            Ok(s) => s,
            Err(HomError::NotNullHomotopic { .. }) => {
                return Err(LiftError::ObstructionNonzero {
                    stage: n,
                    transcript: vec![StageRecord {
                        n,
                        solved: false,
                        delta_valuation: nm.delta_valuation(),
                        params: vec![],
                    }],
                    cycle: self
                        .delta_red
                        .iter()
                        .map(|v| v.iter().map(|x| ring.elem_to_json(x)).collect())
                        .collect(),
                })
            }
            Err(e) => return Err(e.into()),
        };
        if let Some(rng) = rng {
            let slice = hom_slice(total, total, -1, opts.exec)?;
            let mut params = s.params();
            for k in kernel_generators(&slice.differential) {
                let c = ring.random(rng);
                for (p, x) in params.iter_mut().zip(&k) {
                    *p = ring.add(p, &ring.mul(&c, x));
                }
            }
            s = slice.to_map(&params);
        }
        self.step_with_homotopy(s)
    }

    /// Runs stage `done + 1` with a caller-chosen solution `S` of `∂S + S∂ = [0; δ_red]`.
    pub fn step_with_homotopy(&self, s: GradedMap<R>) -> Result<StepResult<R>, LiftError> {
        let n = self.done + 1;
        let ring = self.module.ring().clone();
        let nm = &self.module;
        let total = nm.total();
        s.check_shape(total, total)?;
        if s.degree != -1 || hom_differential(&s, total, total) != self.delta_cycle(nm) {
            return Err(LiftError::NotAHomotopy);
        }
        let (z, v) = block_pieces(&s, nm, nm);
        let layout = nm.layout();
        let m_view = SemiFreeModule::new_unchecked(layout.clone(), nm.alpha().to_vec())?;
        let tk = LiftElement::new(&ring, nm.algebra().t())?;
        let tn = tk.pow(n);
        let tn1 = tk.pow(n - 1);
        let alpha: Vec<Vector<R>> = nm
            .alpha()
            .iter()
            .zip(&z.values)
            .map(|(a, zb)| a.iter().zip(zb).map(|(x, y)| ring.add(x, &ring.mul(&tn, y))).collect())
            .collect();
        let zz = compose(&z, &z, &m_view, &m_view, &m_view);
        let delta_red: Vec<Vector<R>> = v
            .values
            .iter()
            .zip(&zz.values)
            .map(|(vb, zzb)| {
                vb.iter()
                    .zip(zzb)
                    .map(|(x, y)| ring.sub(x, &ring.mul(&tn1, y)))
                    .collect()
            })
            .collect();
        let delta: Vec<Vector<R>> = delta_red
            .iter()
            .map(|v| v.iter().map(|x| ring.mul(&tn, x)).collect())
            .collect();
        let next = make_block_module(nm.algebra().clone(), nm.degrees().to_vec(), alpha, delta)?
            .with_complete_through(nm.complete_through());
        let iso_values = (0..nm.generator_count())
            .map(|g| {
                let d = layout.degree(g);
                let top: Vector<R> = z.values[g].iter().map(|x| ring.neg(&ring.mul(&tn1, x))).collect();
                next.to_total(d, &top, &layout.generator_vector(g))
            })
            .collect();
        let record = StageRecord {
            n,
            solved: true,
            delta_valuation: next.delta_valuation(),
            params: s.params().iter().map(|x| ring.format(x)).collect(),
        };
        Ok(StepResult {
            next: LiftStage {
                module: next,
                delta_red,
                done: n,
            },
            homotopy: s,
            z,
            v,
            elementary_iso: GradedMap {
                degree: 0,
                values: iso_values,
            },
            record,
        })
    }
}

#[derive(Debug, Clone)]
pub struct StepResult<R: TruncatedRing> {
    pub next: LiftStage<R>,
    /// The solution `S` of `∂S + S∂ = [[δ_red, 0], [0, δ_red]]`.
    pub homotopy: GradedMap<R>,
    /// `S(e_b) = [v(b); z(b)]`.
    pub z: GradedMap<R>,
    pub v: GradedMap<R>,
    /// `N^{(n-1)} -> N^{(n)}`, values `[-t^{n-1} z(b); b]`.
    pub elementary_iso: GradedMap<R>,
    pub record: StageRecord,
}

/// Stage `n` on a block module whose `δ` is divisible by `t^{n-1}`.
pub fn lift_one_step<R: TruncatedRing>(
    module: &BlockModule<R>,
    n: usize,
    opts: &LiftOptions,
) -> Result<StepResult<R>, LiftError> {
    assert!(n >= 1, "stages are numbered from 1");
    let stage = LiftStage::from_block(module.clone(), n - 1)?;
    let mut rng = opts.perturb.map(ChaCha8Rng::seed_from_u64);
    stage.step(opts, rng.as_mut())
}

#[derive(Debug, Clone)]
pub struct LiftResult<R: TruncatedRing> {
    /// `M` over `A` with `B ⊗ M ≅ N`.
    pub lifted: SemiFreeModule<R>,
    /// `N -> B ⊗ M`, values `[-Σ t^j z^{(j)}(b); b]`.
    pub iso: GradedMap<R>,
    pub elementary_isos: Vec<GradedMap<R>>,
    pub corrections: Vec<(GradedMap<R>, GradedMap<R>)>,
    pub transcript: Vec<StageRecord>,
}

impl<R: TruncatedRing> LiftResult<R> {
    /// One JSON object per stage, newline separated.
    pub fn transcript_jsonl(&self) -> String {
        self.transcript
            .iter()
            .map(|r| serde_json::to_string(r).expect("records serialize") + "\n")
            .collect()
    }

    pub fn corrections_vanish(&self, ring: &R) -> bool {
        self.corrections.iter().all(|(z, v)| z.is_zero(ring) && v.is_zero(ring))
    }

    /// `B ⊗ lifted -> N`; the inverse of `iso` negates its off-diagonal block.
    pub fn inverse_iso(&self, module: &BlockModule<R>) -> GradedMap<R> {
        let ring = module.ring();
        let values = self
            .iso
            .values
            .iter()
            .enumerate()
            .map(|(g, x)| {
                let d = module.layout().degree(g);
                let (top, bottom) = module.from_total(d, x);
                let top: Vector<R> = top.iter().map(|y| ring.neg(y)).collect();
                module.to_total(d, &top, &bottom)
            })
            .collect();
        GradedMap { degree: 0, values }
    }
}

/// `Υ = other.iso ∘ first.iso^{-1} : B ⊗ first.lifted -> B ⊗ other.lifted` for two lifts of `module`.
pub fn connecting_iso<R: TruncatedRing>(
    module: &BlockModule<R>,
    first: &LiftResult<R>,
    other: &LiftResult<R>,
) -> Result<GradedMap<R>, LiftError> {
    let bc1 = base_change(&first.lifted, module.algebra().clone())?;
    let bc2 = base_change(&other.lifted, module.algebra().clone())?;
    Ok(compose(
        &other.iso,
        &first.inverse_iso(module),
        bc1.total(),
        module.total(),
        bc2.total(),
    ))
}

/// Lifts `N` to `A`, one stage per power of `t` until `t^n = 0`.
pub fn lift<R: TruncatedRing>(module: &BlockModule<R>, opts: &LiftOptions) -> Result<LiftResult<R>, LiftError> {
    let ring = module.ring().clone();
    let tk = LiftElement::new(&ring, module.algebra().t())?;
    let mut rng = opts.perturb.map(ChaCha8Rng::seed_from_u64);
    let mut stage = LiftStage::new(module.clone());
    let mut transcript = Vec::new();
    let mut corrections = Vec::new();
    let mut elementary_isos = Vec::new();
    let layout = module.layout();
    // Σ t^j z^{(j)}(b), accumulated
    let mut shift: Vec<Vector<R>> = (0..module.generator_count())
        .map(|g| layout.zero_vector(layout.degree(g) - 1))
        .collect();
    for _ in 0..tk.nilpotency() {
        let step = match stage.step(opts, rng.as_mut()) {
            Ok(s) => s,
            Err(LiftError::ObstructionNonzero {
                stage,
                transcript: t,
                cycle,
            }) => {
                transcript.extend(t);
                return Err(LiftError::ObstructionNonzero {
                    stage,
                    transcript,
                    cycle,
                });
            }
            Err(e) => return Err(e),
        };
        let tj = tk.pow(stage.done());
        for (acc, zb) in shift.iter_mut().zip(&step.z.values) {
            for (a, x) in acc.iter_mut().zip(zb) {
                *a = ring.add(a, &ring.mul(&tj, x));
            }
        }
        transcript.push(step.record.clone());
        corrections.push((step.z.clone(), step.v.clone()));
        elementary_isos.push(step.elementary_iso.clone());
        stage = step.next;
    }
    let last = stage.module();
    debug_assert_eq!(last.delta_valuation(), ring.precision());
    let lifted = make_semifree(
        last.algebra().base().clone(),
        last.degrees().to_vec(),
        last.alpha().to_vec(),
    )?
    .with_complete_through(last.complete_through());
    let iso = GradedMap {
        degree: 0,
        values: (0..module.generator_count())
            .map(|g| {
                let top: Vector<R> = shift[g].iter().map(|x| ring.neg(x)).collect();
                last.to_total(layout.degree(g), &top, &layout.generator_vector(g))
            })
            .collect(),
    };
    Ok(LiftResult {
        lifted,
        iso,
        elementary_isos,
        corrections,
        transcript,
    })
}

/// Whether `iso : N -> B ⊗ lifted` from a lift is an isomorphism of DG `B`-modules.
pub fn verify_lift<R: TruncatedRing>(module: &BlockModule<R>, result: &LiftResult<R>) -> bool {
    match base_change(&result.lifted, module.algebra().clone()) {
        Ok(bc) => is_isomorphism(&result.iso, module.total(), bc.total()),
        Err(_) => false,
    }
}

/// Whether `B ⊗ lifted` and `target` have the same homology in every degree of `window`.
pub fn verify_quasilift<R: TruncatedRing>(
    lifted: &SemiFreeModule<R>,
    algebra: &Arc<BlockAlgebra<R>>,
    target: &DgModule<R>,
    window: (i64, i64),
) -> Result<bool, LiftError> {
    if target.algebra() != algebra.total() {
        return Err(LiftError::AlgebraMismatch);
    }
    let bc = base_change(lifted, algebra.clone())?;
    let ours = bc.expand_to_r_linear().homology(Some(window))?;
    let theirs = target.complex().homology(Some(window))?;
    Ok(ours == theirs)
}

#[derive(Debug, Clone)]
pub struct UniquenessResult<R: TruncatedRing> {
    /// `z + tξ : M -> M'`.
    pub iso: GradedMap<R>,
    /// `u^{(j)}` with `ξ = Σ t^j u^{(j)}`.
    pub xi_terms: Vec<GradedMap<R>>,
    /// `Some(true)` when `A_0 = R` is local; `None` when locality is not established.
    pub local: Option<bool>,
}

/// Turns an isomorphism `Υ : B ⊗ M -> B ⊗ M'` into an isomorphism `M -> M'`.
pub fn uniqueness_iso<R: TruncatedRing>(
    m: &SemiFreeModule<R>,
    m2: &SemiFreeModule<R>,
    algebra: &Arc<BlockAlgebra<R>>,
    upsilon: &GradedMap<R>,
    exec: Execution,
) -> Result<UniquenessResult<R>, LiftError> {
    let ring = m.ring().clone();
    let n = base_change(m, algebra.clone())?;
    let n2 = base_change(m2, algebra.clone())?;
    if upsilon.check_shape(n.total(), n2.total()).is_err() || !is_isomorphism(upsilon, n.total(), n2.total()) {
        return Err(LiftError::NotAnIso);
    }
    let tk = LiftElement::new(&ring, algebra.t())?;
    let (z, v) = block_pieces(upsilon, &n, &n2);
    let mut p = v;
    let mut xi_terms = Vec::new();
    for stage in 0..tk.nilpotency() {
        let f = base_change_hom(&p, &n, &n2);
        let t = match null_homotopy(&f, n.total(), n2.total(), exec) {
            Ok(t) => t,
            Err(HomError::NotNullHomotopic { .. }) => return Err(LiftError::Ext1Obstruction(stage)),
            Err(e) => return Err(e.into()),
        };
        let (u, next) = block_pieces(&t, &n, &n2);
        xi_terms.push(u);
        p = next;
    }
    // z + t Σ t^j u^{(j)}
    let mut iso = z;
    for (j, u) in xi_terms.iter().enumerate() {
        iso = iso.add(&ring, &u.scale(&ring, &tk.pow(j + 1)));
    }
    if !is_isomorphism(&iso, m, m2) || !has_unit_determinants(&iso, m, m2) {
        return Err(LiftError::NotAnIso);
    }
    let local = (m.algebra().rank(0) == 1).then_some(true);
    Ok(UniquenessResult { iso, xi_terms, local })
}

/// Seeded generator shared by the perturbation option.
pub fn perturbation_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly random ring element; used by callers that build perturbations by hand.
pub fn random_element<R: TruncatedRing>(ring: &R, rng: &mut impl Rng) -> R::Elem {
    ring.random(rng)
}
