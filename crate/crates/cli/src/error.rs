use std::path::PathBuf;

use dglift::algebra::AlgebraError;
use dglift::hom::HomError;
use dglift::iterated::IteratedError;
use dglift::json::JsonError;
use dglift::lifting::LiftError;
use dglift::module::{ComplexError, GeneralModuleError, ModuleError};
use dglift::resolution::ResolutionError;
use dglift::ring::RingError;
use thiserror::Error;

/// Usage and validation failures; all exit with code 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("problem does not match the schema: {0}")]
    Schema(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Json(#[from] JsonError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    General(#[from] GeneralModuleError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Hom(#[from] HomError),
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Iterated(#[from] IteratedError),
    #[error("cannot access {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}
