//! Experiment runner: engine matches with scripted generous starts, N sweeps, autoplay
//! handoffs and corpus validation.

mod config;
mod corpus;
mod game;
mod report;
mod sweep;

pub use config::{AdjudicationRules, MatchConfig, PlayerSpec, DEFAULT_DRAW_BAND_CP, DEFAULT_MAX_PLIES};
pub use corpus::{metrics_csv, validate_corpus, CorpusReport, CorpusRow};
pub use game::{play_game, EndReason, GameReport};
pub use report::{games_csv, run_match, GameRow, MatchReport};
pub use sweep::{effectiveness_csv, handoff_autoplay, sweep_n, EffectivenessRow, EFFECTIVENESS_HEADER};

use corrida_core::engines::EngineError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("engine failed in game {game}: {error}")]
    EngineFailure { game: usize, error: EngineError },
    #[error("corpus: {0}")]
    Corpus(String),
}

/// Mixes a game seed with a stream tag into an independent engine seed.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
