use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use corrida_core::notation::{GameResult, Termination};
use corrida_core::strategy::Adjudication;

use crate::config::MatchConfig;
use crate::game::{play_game, EndReason, GameReport};
use crate::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchReport {
    pub config: MatchConfig,
    pub games: Vec<GameReport>,
    pub wins: usize,
    pub draws: usize,
    pub losses: usize,
    /// White's score fraction.
    pub score: f64,
    /// SHA-256 over the config (worker count excluded) and every game report.
    pub hash: String,
}

impl MatchReport {
    pub fn new(config: MatchConfig, games: Vec<GameReport>) -> MatchReport {
        let count = |r: GameResult| games.iter().filter(|g| g.result == r).count();
        let (wins, draws, losses) = (count(GameResult::WhiteWins), count(GameResult::Draw), count(GameResult::BlackWins));
        let score = if games.is_empty() {
            0.0
        } else {
            games.iter().map(GameReport::white_score).sum::<f64>() / games.len() as f64
        };
        let mut hashed = config.clone();
        hashed.workers = 1;
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(&(&hashed, &games)).expect("report serializes"));
        let hash = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        MatchReport {
            config,
            games,
            wins,
            draws,
            losses,
            score,
            hash,
        }
    }

    /// The report without per-ply metrics and move text, for JSON summaries.
    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "variant": self.config.variant,
            "games": self.games.len(),
            "wins": self.wins,
            "draws": self.draws,
            "losses": self.losses,
            "score": self.score,
            "hash": self.hash,
            "results": self.games.iter().map(GameRow::from).collect::<Vec<_>>(),
        })
    }
}

/// Runs every game of `config` on a pool of `config.workers` threads.
pub fn run_match(config: &MatchConfig) -> Result<MatchReport, HarnessError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let games = pool.install(|| {
        config
            .seeds
            .par_iter()
            .enumerate()
            .map(|(i, &seed)| play_game(config, i, seed))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(MatchReport::new(config.clone(), games))
}

/// One CSV line per game.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameRow {
    pub game: usize,
    pub seed: u64,
    pub result: &'static str,
    pub termination: Option<Termination>,
    pub end: EndReason,
    pub plies: usize,
    pub score: f64,
    pub reconstruction_ply: Option<usize>,
    pub handoff_move: Option<usize>,
    pub abort: Option<String>,
    pub obligation: Option<String>,
}

impl From<&GameReport> for GameRow {
    fn from(g: &GameReport) -> GameRow {
        GameRow {
            game: g.index + 1,
            seed: g.seed,
            result: g.result.token(),
            termination: g.termination,
            end: g.end,
            plies: g.plies,
            score: g.white_score(),
            reconstruction_ply: g.reconstruction_ply,
            handoff_move: g.handoff_move,
            abort: g.abort.clone(),
            obligation: g.obligation.map(|a| match a {
                Adjudication::Ok(k) => format!("met {k}"),
                Adjudication::ForfeitWhite => "forfeit".into(),
                Adjudication::Pending => "pending".into(),
            }),
        }
    }
}

pub fn games_csv(report: &MatchReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for g in &report.games {
        w.serialize(GameRow::from(g)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 csv")
}
