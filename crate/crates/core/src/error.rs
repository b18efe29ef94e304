use std::time::Duration;

use crate::word::Alphabet;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("alphabet symbols must be distinct and positive, got {a} and {b}")]
    InvalidAlphabet { a: u8, b: u8 },

    #[error("symbol {symbol} is not in alphabet {alphabet}")]
    SymbolOutsideAlphabet { symbol: u8, alphabet: Alphabet },

    #[error("run {index} has length zero")]
    ZeroRun { index: usize },

    #[error("{0} requires a nonempty input")]
    Empty(&'static str),

    #[error("level index must be at least 1")]
    InvalidLevel,

    #[error("{what} needs {requested} symbols, above the materialization cap of {cap}")]
    CapExceeded {
        what: &'static str,
        requested: u128,
        cap: u64,
    },

    #[error("time budget of {limit:?} exhausted while {during}")]
    BudgetExhausted {
        limit: Duration,
        during: &'static str,
    },

    #[error("128-bit overflow while computing level {level}")]
    Overflow { level: usize },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: String,
        range: &'static str,
    },

    #[error("root solver did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
}

impl Error {
    /// Resource errors are budget problems, not wrong answers.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::CapExceeded { .. } | Error::BudgetExhausted { .. } | Error::Overflow { .. }
        )
    }
}
