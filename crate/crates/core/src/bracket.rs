use serde::{Deserialize, Serialize};

use crate::exactgeom::{Interval, Scalar};

/// Certified enclosure of a function value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalResult {
    pub bracket: Interval,
    /// Generation of the node that resolved the value.
    pub generation: u32,
    /// True when the requested width was not reached.
    pub partial: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cause: Option<String>,
}

impl EvalResult {
    pub fn exact(v: Scalar, generation: u32) -> Self {
        EvalResult {
            bracket: Interval::point(v),
            generation,
            partial: false,
            cause: None,
        }
    }

    pub fn bracket(bracket: Interval, generation: u32) -> Self {
        EvalResult {
            bracket,
            generation,
            partial: false,
            cause: None,
        }
    }

    pub fn partial(bracket: Interval, generation: u32, cause: impl Into<String>) -> Self {
        EvalResult {
            bracket,
            generation,
            partial: true,
            cause: Some(cause.into()),
        }
    }

    pub fn width(&self) -> Scalar {
        self.bracket.length()
    }

    pub fn is_exact(&self) -> bool {
        self.bracket.lo == self.bracket.hi
    }

    pub fn mid(&self) -> Scalar {
        self.bracket.mid()
    }
}
