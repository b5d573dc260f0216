//! The serializable description of one invocation.
//!
//! A [`Request`] captures everything that determines a command's stdout:
//! the action with all parameters resolved (defaults included), the output
//! format, and which volume table file was used.  Manifests store the
//! request verbatim, so replaying one is just deserializing and executing.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    #[serde(flatten)]
    pub action: Action,
    pub format: Format,
    /// Path of the volume table in use; `None` means the builtin table.
    pub table: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Action {
    Volume {
        genus: u32,
        boundaries: u32,
        /// Boundary lengths to evaluate at; `None` prints the polynomial only
        /// (boundary-free surfaces always evaluate, at the empty vector).
        lengths: Option<Vec<f64>>,
    },
    Integrals {
        #[serde(flatten)]
        operation: IntegralOp,
    },
    Estimate {
        genus: u64,
        /// `Some` when `--L` was given; otherwise the window comes from
        /// `L0(genus)` at execution time.
        window: Option<f64>,
        window_from_l0: bool,
        n_terms: u32,
        eps: f64,
        delta: f64,
    },
    Bound {
        genus: u64,
        boundaries: u64,
        window: f64,
    },
    Simulate {
        trials: u64,
        seed: u64,
        window: f64,
        points: Vec<f64>,
        inversion_grid: u32,
    },
}

impl Action {
    pub fn command_name(&self) -> &'static str {
        match self {
            Action::Volume { .. } => "volume",
            Action::Integrals { .. } => "integrals",
            Action::Estimate { .. } => "estimate",
            Action::Bound { .. } => "bound",
            Action::Simulate { .. } => "simulate",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Action::Simulate { seed, .. } => Some(*seed),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "operation", rename_all = "snake_case")]
pub enum IntegralOp {
    I { length: f64 },
    T { length: f64 },
    TInverse { target: f64 },
    L0 { genus: u64 },
    C,
}

/// Parse a genus given either as a plain integer or in scientific notation
/// (`1e6`, `2.5e3`); the value must be an exact nonnegative integer.
pub fn parse_genus(text: &str) -> Result<u64, String> {
    let trimmed = text.trim();
    let (mantissa, exponent) = match trimmed.split_once(['e', 'E']) {
        Some((head, tail)) => (
            head,
            tail.parse::<i32>()
                .map_err(|_| format!("bad exponent in genus '{trimmed}'"))?,
        ),
        None => (trimmed, 0),
    };
    let (integer_part, fraction_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits: String = [integer_part, fraction_part].concat();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("genus '{trimmed}' is not a nonnegative integer"));
    }
    let mut value: u128 = digits
        .parse()
        .map_err(|_| format!("genus '{trimmed}' is out of range"))?;
    let scale = exponent - fraction_part.len() as i32;
    if scale >= 0 {
        for _ in 0..scale {
            value = value
                .checked_mul(10)
                .ok_or_else(|| format!("genus '{trimmed}' is out of range"))?;
        }
    } else {
        for _ in 0..-scale {
            if value % 10 != 0 {
                return Err(format!("genus '{trimmed}' is not an integer"));
            }
            value /= 10;
        }
    }
    u64::try_from(value).map_err(|_| format!("genus '{trimmed}' is out of range"))
}
