//! Split-factor sequences `a_n` shared by both builders.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactgeom::Scalar;

/// Rule producing the split factor `a_n` for generation `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ARule {
    /// `a_n = 2^-(n + offset)`.
    Dyadic { offset: u32 },
    /// `a_n = value` for every `n`.
    Constant { value: Scalar },
    /// Explicit prefix, then the last value repeats.
    List { values: Vec<Scalar> },
}

impl Default for ARule {
    fn default() -> Self {
        ARule::Dyadic { offset: 3 }
    }
}

impl ARule {
    pub fn a(&self, n: u32) -> Scalar {
        match self {
            ARule::Dyadic { offset } => Scalar::pow2(-((n + offset) as i64)),
            ARule::Constant { value } => value.clone(),
            ARule::List { values } => values
                .get(n as usize)
                .or(values.last())
                .cloned()
                .unwrap_or_else(Scalar::zero),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |v: &Scalar| {
            if v.is_positive() && *v < Scalar::one() {
                Ok(())
            } else {
                Err(Error::param("a_n", format!("0 < a_n < 1, got {v}")))
            }
        };
        match self {
            ARule::Dyadic { offset } => {
                if *offset == 0 {
                    return Err(Error::param("a_rule.offset", "offset >= 1 so that a_0 < 1"));
                }
                Ok(())
            }
            ARule::Constant { value } => check(value),
            ARule::List { values } => {
                if values.is_empty() {
                    return Err(Error::param("a_rule.values", "at least one value"));
                }
                values.iter().try_for_each(check)
            }
        }
    }

    /// Exact `prod_{k<n} (1 - a_k)^-1`.
    pub fn aspect_at(&self, n: u32) -> Scalar {
        (0..n).fold(Scalar::one(), |acc, k| acc / (Scalar::one() - self.a(k)))
    }

    /// A rational upper bound for the infinite product `prod (1 - a_k)^-1`,
    /// via `prod (1 - a_k) >= 1 - sum a_k`. `None` when the bound is not
    /// available (divergent or too large a sum).
    pub fn aspect_limit_bound(&self) -> Option<Scalar> {
        let sum = match self {
            ARule::Dyadic { offset } => Scalar::pow2(1 - *offset as i64),
            ARule::Constant { .. } => return None,
            ARule::List { .. } => return None,
        };
        (sum < Scalar::one()).then(|| (Scalar::one() - sum).recip())
    }
}
