use std::fmt;

use serde::{Deserialize, Serialize};

use super::RingError;

/// Residue field of a truncated polynomial ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseField {
    Rational,
    Prime(u64),
}

/// Serializable description of a coefficient ring.
///
/// JSON forms: `{"field": "Q" | {"Fp": p}, "precision": N}` or
/// `{"Zp": p, "precision": N}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingSpec {
    Truncated { field: BaseField, precision: usize },
    PrimePower { p: u64, precision: usize },
}

impl RingSpec {
    pub fn precision(&self) -> usize {
        match self {
            RingSpec::Truncated { precision, .. } | RingSpec::PrimePower { precision, .. } => *precision,
        }
    }

    pub fn with_precision(self, n: usize) -> Self {
        match self {
            RingSpec::Truncated { field, .. } => RingSpec::Truncated { field, precision: n },
            RingSpec::PrimePower { p, .. } => RingSpec::PrimePower { p, precision: n },
        }
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Truncated {
                field: BaseField::Rational,
                precision,
            } => write!(f, "Q[t]/(t^{precision})"),
            RingSpec::Truncated {
                field: BaseField::Prime(p),
                precision,
            } => write!(f, "F{p}[t]/(t^{precision})"),
            RingSpec::PrimePower { p, precision } => write!(f, "Z/{p}^{precision}"),
        }
    }
}

impl RingSpec {
    /// Reads `Q[t]/(t^N)`, `F5[t]/(t^N)`, `Z/3^N`, or the bare `Q`, `F5`, `Z/3`
    /// with the precision supplied separately. An explicit `precision` wins.
    pub fn parse(text: &str, precision: Option<usize>) -> Result<Self, RingError> {
        let bad = |reason: &str| RingError::InvalidRing(format!("{text:?}: {reason}"));
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let number = |x: &str| x.parse::<u64>().map_err(|_| bad("expected a number"));
        let (base, given) = if let Some(rest) = s.strip_prefix("Z/") {
            match rest.split_once('^') {
                Some((p, n)) => (format!("Z{p}"), Some(number(n)? as usize)),
                None => (format!("Z{rest}"), None),
            }
        } else if let Some((head, tail)) = s.split_once("[t]") {
            let n = tail
                .strip_prefix("/(t^")
                .and_then(|x| x.strip_suffix(')'))
                .ok_or_else(|| bad("expected [t]/(t^N)"))?;
            (head.to_string(), Some(number(n)? as usize))
        } else {
            (s.clone(), None)
        };
        let precision = precision.or(given).ok_or_else(|| bad("no precision given"))?;
        if precision == 0 {
            return Err(bad("precision must be positive"));
        }
        if base == "Q" {
            return Ok(RingSpec::Truncated {
                field: BaseField::Rational,
                precision,
            });
        }
        if let Some(p) = base.strip_prefix('Z') {
            return Ok(RingSpec::PrimePower {
                p: number(p)?,
                precision,
            });
        }
        let p = base
            .strip_prefix("GF")
            .or_else(|| base.strip_prefix('F'))
            .ok_or_else(|| bad("unknown base"))?;
        Ok(RingSpec::Truncated {
            field: BaseField::Prime(number(p.trim_start_matches('_'))?),
            precision,
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FieldRepr {
    Named(String),
    Prime {
        #[serde(rename = "Fp")]
        fp: u64,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SpecRepr {
    Truncated {
        field: FieldRepr,
        precision: usize,
    },
    PrimePower {
        #[serde(rename = "Zp")]
        zp: u64,
        precision: usize,
    },
}

impl Serialize for RingSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let repr = match *self {
            RingSpec::Truncated { field, precision } => SpecRepr::Truncated {
                field: match field {
                    BaseField::Rational => FieldRepr::Named("Q".into()),
                    BaseField::Prime(p) => FieldRepr::Prime { fp: p },
                },
                precision,
            },
            RingSpec::PrimePower { p, precision } => SpecRepr::PrimePower { zp: p, precision },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RingSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match SpecRepr::deserialize(d)? {
            SpecRepr::Truncated { field, precision } => {
                let field = match field {
                    FieldRepr::Named(name) if name == "Q" => BaseField::Rational,
                    FieldRepr::Named(name) => return Err(serde::de::Error::custom(format!("unknown field {name:?}"))),
                    FieldRepr::Prime { fp } => BaseField::Prime(fp),
                };
                Ok(RingSpec::Truncated { field, precision })
            }
            SpecRepr::PrimePower { zp, precision } => Ok(RingSpec::PrimePower { p: zp, precision }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        for text in [
            r#"{"field":"Q","precision":3}"#,
            r#"{"field":{"Fp":2},"precision":2}"#,
            r#"{"Zp":5,"precision":4}"#,
        ] {
            let spec: RingSpec = serde_json::from_str(text).unwrap();
            assert_eq!(serde_json::to_string(&spec).unwrap(), text);
        }
        assert!(serde_json::from_str::<RingSpec>(r#"{"field":"R","precision":3}"#).is_err());
    }

    #[test]
    fn text_forms() {
        for text in ["F2[t]/(t^2)", "Q[t]/(t^3)", "Z/3^4"] {
            assert_eq!(RingSpec::parse(text, None).unwrap().to_string(), text);
        }
        assert_eq!(RingSpec::parse("F3", Some(2)).unwrap().to_string(), "F3[t]/(t^2)");
        assert_eq!(RingSpec::parse("Z/5", Some(3)).unwrap().to_string(), "Z/5^3");
        assert_eq!(RingSpec::parse("F2[t]/(t^2)", Some(4)).unwrap().precision(), 4);
        assert!(RingSpec::parse("F2", None).is_err());
        assert!(RingSpec::parse("R[t]/(t^2)", None).is_err());
    }
}
