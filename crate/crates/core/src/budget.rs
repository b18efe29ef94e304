use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Largest word (in symbols) any operation will materialize by default.
pub const DEFAULT_MAX_SYMBOLS: u64 = 1 << 31;

/// Default chunk length for streamed comparisons.
pub const DEFAULT_CHUNK_SIZE: usize = 1 << 20;

/// Resource limits shared by every operation that can grow with the level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_symbols: u64,
    pub time_limit: Option<Duration>,
    pub chunk_size: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_symbols: DEFAULT_MAX_SYMBOLS,
            time_limit: None,
            chunk_size: DEFAULT_CHUNK_SIZE,
        }
    }
}

impl Budget {
    pub fn with_max_symbols(mut self, max_symbols: u64) -> Self {
        self.max_symbols = max_symbols;
        self
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn with_chunk_size(mut self, chunk_size: usize) -> Self {
        self.chunk_size = chunk_size.max(1);
        self
    }

    /// Fails with [`Error::CapExceeded`] when `requested` symbols would not fit.
    pub fn check_len(&self, what: &'static str, requested: u128) -> Result<()> {
        if requested > self.max_symbols as u128 {
            return Err(Error::CapExceeded {
                what,
                requested,
                cap: self.max_symbols,
            });
        }
        Ok(())
    }

    pub fn start(&self) -> Deadline {
        Deadline {
            started: Instant::now(),
            limit: self.time_limit,
        }
    }
}

/// A running clock against an optional time limit.
#[derive(Debug, Clone, Copy)]
pub struct Deadline {
    started: Instant,
    limit: Option<Duration>,
}

impl Deadline {
    pub fn check(&self, during: &'static str) -> Result<()> {
        match self.limit {
            Some(limit) if self.started.elapsed() > limit => {
                Err(Error::BudgetExhausted { limit, during })
            }
            _ => Ok(()),
        }
    }
}
