//! JSON forms of modules and maps.
//!
//! Ring elements are written with [`TruncatedRing::elem_to_json`] and read
//! back with [`TruncatedRing::elem_from_json`], so every emitted module can
//! be parsed and revalidated.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::algebra::{BlockAlgebra, DgAlgebra};
use crate::hom::GradedMap;
use crate::matrix::RMatrix;
use crate::module::{
    make_block_module, make_semifree, BlockModule, ComplexError, DgModule, GeneralModuleError, ModuleError, RComplex,
    SemiFreeModule, Vector,
};
use crate::ring::{RingError, TruncatedRing};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JsonError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    General(#[from] GeneralModuleError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("{0}")]
    Shape(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModuleSpec {
    /// Generator degrees and the differential on each generator.
    SemiFree { degrees: Vec<i64>, values: Vec<Vec<Value>> },
    /// A module over `B = K^R(t) ⊗ A` in block form.
    Block {
        degrees: Vec<i64>,
        alpha: Vec<Vec<Value>>,
        delta: Vec<Vec<Value>>,
    },
    /// A bounded complex of finitely generated `R`-modules with action matrices.
    Complex {
        lo: i64,
        ranks: Vec<usize>,
        /// Exponents `e` with summand `R/(t^e)`; all free when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        torsion: Option<Vec<Vec<usize>>>,
        /// `∂_d` for `d = lo + 1, lo + 2, ...`, as rows.
        #[serde(default)]
        differentials: Vec<Vec<Vec<Value>>>,
        #[serde(default)]
        actions: Vec<ActionSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    /// Global index of the algebra basis element.
    pub basis: usize,
    /// Source degree.
    pub degree: i64,
    pub matrix: Vec<Vec<Value>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub degree: i64,
    pub values: Vec<Vec<Value>>,
}

pub fn parse_vector<R: TruncatedRing>(ring: &R, v: &[Value]) -> Result<Vector<R>, JsonError> {
    Ok(v.iter().map(|x| ring.elem_from_json(x)).collect::<Result<_, _>>()?)
}

fn parse_vectors<R: TruncatedRing>(ring: &R, vs: &[Vec<Value>]) -> Result<Vec<Vector<R>>, JsonError> {
    vs.iter().map(|v| parse_vector(ring, v)).collect()
}

fn parse_matrix<R: TruncatedRing>(
    ring: &R,
    rows: &[Vec<Value>],
    shape: (usize, usize),
) -> Result<RMatrix<R>, JsonError> {
    let rows = parse_vectors(ring, rows)?;
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(JsonError::Shape(format!("expected a {}x{} matrix", shape.0, shape.1)));
    }
    if shape.0 == 0 {
        return Ok(RMatrix::zeros(ring, 0, shape.1));
    }
    Ok(RMatrix::from_rows(ring, rows))
}

pub fn vector_to_json<R: TruncatedRing>(ring: &R, v: &[R::Elem]) -> Vec<Value> {
    v.iter().map(|x| ring.elem_to_json(x)).collect()
}

fn vectors_to_json<R: TruncatedRing>(ring: &R, vs: &[Vector<R>]) -> Vec<Vec<Value>> {
    vs.iter().map(|v| vector_to_json(ring, v)).collect()
}

impl ModuleSpec {
    pub fn from_semifree<R: TruncatedRing>(m: &SemiFreeModule<R>) -> Self {
        ModuleSpec::SemiFree {
            degrees: m.degrees().to_vec(),
            values: vectors_to_json(m.ring(), m.values()),
        }
    }

    pub fn from_block<R: TruncatedRing>(n: &BlockModule<R>) -> Self {
        ModuleSpec::Block {
            degrees: n.degrees().to_vec(),
            alpha: vectors_to_json(n.ring(), n.alpha()),
            delta: vectors_to_json(n.ring(), n.delta()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ModuleSpec::SemiFree { .. } => "semi_free",
            ModuleSpec::Block { .. } => "block",
            ModuleSpec::Complex { .. } => "complex",
        }
    }

    /// A validated semi-free module over `algebra`.
    pub fn to_semifree<R: TruncatedRing>(&self, algebra: &Arc<DgAlgebra<R>>) -> Result<SemiFreeModule<R>, JsonError> {
        match self {
            ModuleSpec::SemiFree { degrees, values } => Ok(make_semifree(
                algebra.clone(),
                degrees.clone(),
                parse_vectors(algebra.ring(), values)?,
            )?),
            other => Err(JsonError::Shape(format!(
                "expected a semi_free module, got {}",
                other.kind()
            ))),
        }
    }

    /// A validated block module; a semi-free module over `B` is read into block form.
    pub fn to_block<R: TruncatedRing>(&self, algebra: &Arc<BlockAlgebra<R>>) -> Result<BlockModule<R>, JsonError> {
        match self {
            ModuleSpec::Block { degrees, alpha, delta } => {
                let ring = algebra.ring();
                Ok(make_block_module(
                    algebra.clone(),
                    degrees.clone(),
                    parse_vectors(ring, alpha)?,
                    parse_vectors(ring, delta)?,
                )?)
            }
            ModuleSpec::SemiFree { .. } => {
                let total = self.to_semifree(algebra.total())?;
                Ok(BlockModule::from_total_module(algebra.clone(), &total)?)
            }
            other => Err(JsonError::Shape(format!(
                "expected a block module, got {}",
                other.kind()
            ))),
        }
    }

    /// Any module kind as a DG module over `algebra`; block modules need `block`.
    pub fn to_dg_module<R: TruncatedRing>(
        &self,
        algebra: &Arc<DgAlgebra<R>>,
        block: Option<&Arc<BlockAlgebra<R>>>,
    ) -> Result<DgModule<R>, JsonError> {
        let ring = algebra.ring();
        match self {
            ModuleSpec::SemiFree { .. } => Ok(DgModule::from_semifree(&self.to_semifree(algebra)?)),
            ModuleSpec::Block { .. } => {
                let b = block.ok_or_else(|| JsonError::Shape("block modules need a Koszul element".into()))?;
                if b.total() != algebra {
                    return Err(JsonError::Shape("block module over a different algebra".into()));
                }
                Ok(DgModule::from_semifree(self.to_block(b)?.total()))
            }
            ModuleSpec::Complex {
                lo,
                ranks,
                torsion,
                differentials,
                actions,
            } => {
                let n = ring.precision();
                let torsion = match torsion {
                    Some(t) => t.clone(),
                    None => ranks.iter().map(|&r| vec![n; r]).collect(),
                };
                if torsion.len() != ranks.len() || torsion.iter().zip(ranks).any(|(t, &r)| t.len() != r) {
                    return Err(JsonError::Shape("torsion does not match ranks".into()));
                }
                if differentials.len() > ranks.len().saturating_sub(1) {
                    return Err(JsonError::Shape("more differentials than degrees".into()));
                }
                let mut diffs = Vec::new();
                for (k, &r) in ranks.iter().enumerate() {
                    if k == 0 {
                        diffs.push(RMatrix::zeros(ring, 0, r));
                        continue;
                    }
                    let shape = (ranks[k - 1], r);
                    diffs.push(match differentials.get(k - 1) {
                        Some(rows) => parse_matrix(ring, rows, shape)?,
                        None => RMatrix::zeros(ring, shape.0, shape.1),
                    });
                }
                let complex = RComplex::with_torsion(ring, *lo, torsion, diffs)?;
                let mut parsed = std::collections::HashMap::new();
                for a in actions {
                    if a.basis == 0 || a.basis >= algebra.total_rank() {
                        return Err(JsonError::Shape(format!("no algebra basis element {}", a.basis)));
                    }
                    let target = a.degree + algebra.degree_of(a.basis);
                    let shape = (complex.rank(target), complex.rank(a.degree));
                    parsed.insert((a.basis, a.degree), parse_matrix(ring, &a.matrix, shape)?);
                }
                Ok(DgModule::new(algebra.clone(), complex.clone(), |gamma, d| {
                    parsed.get(&(gamma, d)).cloned().unwrap_or_else(|| {
                        RMatrix::zeros(ring, complex.rank(d + algebra.degree_of(gamma)), complex.rank(d))
                    })
                })?)
            }
        }
    }
}

impl MapSpec {
    pub fn from_map<R: TruncatedRing>(ring: &R, f: &GradedMap<R>) -> Self {
        MapSpec {
            degree: f.degree,
            values: vectors_to_json(ring, &f.values),
        }
    }

    pub fn to_map<R: TruncatedRing>(&self, ring: &R) -> Result<GradedMap<R>, JsonError> {
        Ok(GradedMap {
            degree: self.degree,
            values: parse_vectors(ring, &self.values)?,
        })
    }
}
