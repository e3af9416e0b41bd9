//! Space descriptors: which admissibility families act, with which weights.
//!
//! A descriptor is either a finite list of (family, weight) pairs, or a full
//! weight sequence `theta_1, theta_2, ...` understood to weight splittings
//! into `n` successive parts for every `n`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coeffs::CoefficientSeq;
use crate::error::{Error, Result};
use crate::families::Family;
use crate::scalar::{self, Rational};

/// One admissibility family together with its weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedEntry {
    pub family: Family,
    #[serde(with = "scalar::serde_rational")]
    pub theta: Rational,
}

/// A description of a mixed Tsirelson-type space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form")]
pub enum SpaceSpec {
    /// Finitely many weighted families: the norm takes, for each entry, the
    /// best weighted sum over splittings admissible for that family.
    FiniteMixed { entries: Vec<WeightedEntry> },
    /// A weight for every splitting arity `n >= 1`; a splitting into `n`
    /// successive parts carries weight `sup_{m >= n} theta_m`.
    AdmissibleSeq { coeffs: CoefficientSeq },
}

impl SpaceSpec {
    pub fn finite_mixed(pairs: Vec<(Family, Rational)>) -> Self {
        SpaceSpec::FiniteMixed {
            entries: pairs
                .into_iter()
                .map(|(family, theta)| WeightedEntry { family, theta })
                .collect(),
        }
    }

    pub fn admissible_seq(coeffs: CoefficientSeq) -> Self {
        SpaceSpec::AdmissibleSeq { coeffs }
    }

    /// Validate and canonicalize in place; returns accumulated warnings.
    pub fn validate(&mut self) -> Result<Vec<String>> {
        match self {
            SpaceSpec::FiniteMixed { entries } => {
                if entries.is_empty() {
                    return Err(Error::Invalid("FiniteMixed requires at least one entry".into()));
                }
                let mut warnings = Vec::new();
                for (i, e) in entries.iter_mut().enumerate() {
                    scalar::require_unit_coefficient(&e.theta, &format!("entry {i} theta"))?;
                    warnings.extend(e.family.validate()?);
                }
                Ok(warnings)
            }
            SpaceSpec::AdmissibleSeq { coeffs } => {
                coeffs.validate()?;
                if let CoefficientSeq::ExplicitList { tail: None, values } = coeffs {
                    return Err(Error::MissingTail(values.len(), values.len() + 1));
                }
                Ok(Vec::new())
            }
        }
    }

    /// The weighted families seen by the norm engine: unions are split into
    /// their parts (each carrying the union's weight), since a splitting is
    /// admissible for a union exactly when it is admissible for some part.
    pub fn flattened_entries(&self) -> Result<Vec<WeightedEntry>> {
        match self {
            SpaceSpec::FiniteMixed { entries } => {
                let mut out = Vec::new();
                for e in entries {
                    flatten_into(&e.family, &e.theta, &mut out);
                }
                Ok(out)
            }
            SpaceSpec::AdmissibleSeq { .. } => Err(Error::Invalid(
                "weight-sequence spaces have no finite family list".into(),
            )),
        }
    }
}

fn flatten_into(family: &Family, theta: &Rational, out: &mut Vec<WeightedEntry>) {
    match family {
        Family::Union { parts } => {
            for p in parts {
                flatten_into(p, theta, out);
            }
        }
        other => out.push(WeightedEntry { family: other.clone(), theta: theta.clone() }),
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::FiniteMixed { entries } => {
                write!(f, "T[")?;
                for (i, e) in entries.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "({}, {})", e.family, scalar::format_rational(&e.theta))?;
                }
                write!(f, "]")
            }
            SpaceSpec::AdmissibleSeq { coeffs } => write!(f, "T[(A_n, {coeffs})_n]"),
        }
    }
}
