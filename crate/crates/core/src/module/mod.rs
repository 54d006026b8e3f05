//! DG modules: semi-free modules over a DG algebra, their block form over
//! `B = K^R(t) ⊗ A`, finite complexes with torsion, and homology.

mod block;
mod complex;
mod general;
mod layout;
mod semifree;

pub use block::{base_change, make_block_module, BlockModule, BlockRelation};
pub use complex::{ComplexError, RComplex};
pub use general::{DgModule, GeneralModuleError};
pub use layout::FreeLayout;
pub use semifree::{make_semifree, SemiFreeModule};

use thiserror::Error;

/// Coordinates of a homogeneous element over `R`.
pub type Vector<R> = Vec<<R as crate::ring::TruncatedRing>::Elem>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("modules live over different algebras")]
    AlgebraMismatch,
    #[error("malformed module data: {0}")]
    Shape(String),
    #[error("differential does not square to zero: d(d({basis})) != 0 in degree {degree}")]
    SquareNonzero { degree: i64, basis: String },
    #[error("Leibniz rule fails for {gamma} acting on {basis} in degree {degree}")]
    LeibnizViolation { degree: i64, gamma: String, basis: String },
    #[error("block relation {relation} fails on {basis} in degree {degree}")]
    BlockRelationFails {
        relation: BlockRelation,
        degree: i64,
        basis: String,
    },
}
