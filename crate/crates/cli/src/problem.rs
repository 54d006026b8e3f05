//! Problem files: schema validation, then strict parsing.

use dglift::json::{MapSpec, ModuleSpec};
use dglift::ring::RingSpec;
use serde::Deserialize;
use serde_json::Value;

use crate::error::CliError;
use crate::Options;

pub const SCHEMA: &str = include_str!("../schema/problem.schema.json");

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    #[serde(default)]
    pub ring: Option<RingField>,
    #[serde(default)]
    pub algebra: Option<AlgebraSpec>,
    /// Koszul element `t`; modules then live over `K^R(t) ⊗ A`.
    #[serde(default)]
    pub lift_along: Option<Value>,
    pub module: ModuleSpec,
    #[serde(default)]
    pub other: Option<ModuleSpec>,
    #[serde(default)]
    pub upsilon: Option<MapSpec>,
    #[serde(default)]
    pub window: Option<(i64, i64)>,
    #[serde(default)]
    pub degree: Option<i64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum RingField {
    Text(String),
    Spec(RingSpec),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub koszul: Vec<Value>,
}

pub fn load(text: &str) -> Result<Problem, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Input(format!("problem is not JSON: {e}")))?;
    let schema: Value = serde_json::from_str(SCHEMA).expect("published schema is JSON");
    let validator = jsonschema::validator_for(&schema).expect("published schema compiles");
    let errors: Vec<String> = validator
        .iter_errors(&value)
        .map(|e| {
            let at = e.instance_path.to_string();
            if at.is_empty() {
                e.to_string()
            } else {
                format!("{at}: {e}")
            }
        })
        .collect();
    if !errors.is_empty() {
        return Err(CliError::Schema(errors.join("; ")));
    }
    serde_json::from_value(value).map_err(|e| CliError::Input(e.to_string()))
}

/// The ring from `--ring`/`--precision`, falling back to the problem file.
pub fn ring_spec(problem: &Problem, opts: &Options) -> Result<RingSpec, CliError> {
    let spec = match (&opts.ring, &problem.ring) {
        (Some(text), _) | (None, Some(RingField::Text(text))) => RingSpec::parse(text, opts.precision)?,
        (None, Some(RingField::Spec(spec))) => opts.precision.map_or(*spec, |n| spec.with_precision(n)),
        (None, None) => return Err(CliError::Input("no ring given; pass --ring or set \"ring\"".into())),
    };
    if spec.precision() == 0 {
        return Err(CliError::Input("precision must be positive".into()));
    }
    Ok(spec)
}
