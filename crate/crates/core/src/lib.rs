//! Generalized Kolakoski sequences `K(a, b)` and the block/pillar recursion
//! that builds `K(1, 3)`.
//!
//! The crate is split along the lines of the computation:
//!
//! * [`word`]: two-letter words, run-length encoding, the generation
//!   operator and a self-reading streamer for any `K(a, b)`.
//! * [`block_pillar`]: the tower of blocks `B_n` and pillars `P_n`, lazy
//!   streams over levels too large to materialize, and the structural
//!   verifiers.
//! * [`analytics`]: exact integer recurrences, rational densities, the Pisot
//!   root of `x^3 - 2x^2 - 1` and the spectrum of the limit matrix.
//! * [`explorer`]: bounded search for analogous decompositions in other
//!   alphabets.
//!
//! Positions reported to callers (mismatch indices, run indices in errors)
//! are 1-based.

pub mod analytics;
pub mod block_pillar;
mod budget;
mod error;
pub mod explorer;
pub mod word;

pub use analytics::{
    characteristic_polynomial, check_identity, compute_stats, density_difference, density_step,
    growth_diagnostics, limit_matrix, limit_matrix_spectrum, pisot_root, spectral_constants,
    to_decimal, GrowthReport, GrowthRow, LevelStats, SpectralConstants, Spectrum,
};
pub use block_pillar::{
    build_level, initial_level, next_level, pillar_stream, verify_block_prefix,
    verify_kolakoski_step, verify_lemma, verify_prefix, verify_step_of, BlockPillarLevel,
    BlockStream, Check, LemmaVerdict, PillarStream, PillarTally, Tower, Verdict,
};
pub use budget::{Budget, Deadline, DEFAULT_CHUNK_SIZE, DEFAULT_MAX_SYMBOLS};
pub use error::{Error, Result};
pub use explorer::{detect, Candidate, SearchBounds};
pub use word::{
    count_symbol, generate, generate_with_cap, kolakoski_stream, kolakoski_stream_with_cap,
    run_length_encode, word_as_runs, Alphabet, Kolakoski, RunLengthVector, Word,
};
