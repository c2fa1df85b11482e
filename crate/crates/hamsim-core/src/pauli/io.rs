//! JSON wire format for operators:
//! `{ "n_sites": int, "terms": [ { "coeff": float, "string": "IXZY..." } ] }`
//! with strings over I,X,Y,Z of length `n_sites`, site 0 first. Terms
//! serialize in canonical (sorted) order, so output is byte-stable.

use super::{PauliOperator, PauliString};
use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coeff: f64,
    string: String,
}

#[derive(Serialize, Deserialize)]
struct OperatorRepr {
    n_sites: usize,
    terms: Vec<TermRepr>,
}

impl PauliOperator {
    pub fn to_json(&self) -> String {
        let repr = OperatorRepr {
            n_sites: self.n_sites(),
            terms: self
                .terms()
                .map(|(s, c)| TermRepr {
                    coeff: c,
                    string: s.to_string(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&repr).expect("operator serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<PauliOperator> {
        let repr: OperatorRepr =
            serde_json::from_str(text).map_err(|e| CoreError::Format(e.to_string()))?;
        if repr.n_sites == 0 {
            return Err(CoreError::Format("n_sites must be positive".into()));
        }
        let mut op = PauliOperator::zero(repr.n_sites);
        for t in repr.terms {
            let s = PauliString::parse(&t.string)?;
            if s.n_sites() != repr.n_sites {
                return Err(CoreError::Format(format!(
                    "string {:?} has {} sites, operator declares {}",
                    t.string,
                    s.n_sites(),
                    repr.n_sites
                )));
            }
            op.add_term(s, t.coeff)?;
        }
        Ok(op)
    }
}

impl Serialize for PauliOperator {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = OperatorRepr {
            n_sites: self.n_sites(),
            terms: self
                .terms()
                .map(|(s, c)| TermRepr {
                    coeff: c,
                    string: s.to_string(),
                })
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PauliOperator {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = OperatorRepr::deserialize(deserializer)?;
        if repr.n_sites == 0 {
            return Err(serde::de::Error::custom("n_sites must be positive"));
        }
        let mut op = PauliOperator::zero(repr.n_sites);
        for t in repr.terms {
            let s = PauliString::parse(&t.string).map_err(serde::de::Error::custom)?;
            if s.n_sites() != repr.n_sites {
                return Err(serde::de::Error::custom(format!(
                    "string {:?} has wrong length for n_sites {}",
                    t.string, repr.n_sites
                )));
            }
            op.add_term(s, t.coeff).map_err(serde::de::Error::custom)?;
        }
        Ok(op)
    }
}
