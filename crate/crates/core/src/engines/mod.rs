//! Move selection: the builtin alpha-beta engine, an adapter for external UCI engines, and
//! engine-versus-engine autoplay.

mod search;
mod uci;

use std::path::PathBuf;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::chesscore::{piece_value, Color, Move, PieceKind, Position, Status, Variant};
use crate::metrics::center_occupation;
use crate::notation::{GameId, GameRecord, GameResult, Termination};

pub use search::{is_mate_score, search, SearchResult, MATE, MATE_BOUND};
pub use uci::{UciEngine, UciLimit, UciPosition};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("no legal move in a terminal position")]
    TerminalPosition,
    #[error("engine did not answer within {0:?}")]
    EngineUnresponsive(Duration),
    #[error("unexpected engine output: {0:?}")]
    ProtocolError(String),
    #[error("cannot start engine {path}: {message}")]
    Spawn { path: String, message: String },
    #[error("external engines only play 8x8 boards, not {0}")]
    UnsupportedVariant(Variant),
    #[error("invalid engine settings: {0}")]
    InvalidConfig(String),
}

/// Which engine to use, as written in configs and session requests.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EngineRef {
    Builtin {
        depth: u32,
        #[serde(default)]
        seed: u64,
    },
    External {
        path: PathBuf,
        #[serde(flatten)]
        limit: UciLimit,
    },
}

impl Default for EngineRef {
    fn default() -> Self {
        EngineRef::Builtin { depth: 2, seed: 0 }
    }
}

impl EngineRef {
    pub fn validate(&self, variant: Variant) -> Result<(), EngineError> {
        match self {
            EngineRef::Builtin { depth: 0, .. } => Err(EngineError::InvalidConfig("depth must be at least 1".into())),
            EngineRef::Builtin { .. } => Ok(()),
            EngineRef::External { limit, .. } => {
                if variant != Variant::Standard8x8 {
                    return Err(EngineError::UnsupportedVariant(variant));
                }
                match limit {
                    UciLimit::Depth(0) => Err(EngineError::InvalidConfig("depth must be at least 1".into())),
                    _ => Ok(()),
                }
            }
        }
    }

    /// Same engine with its seed replaced; external engines are returned unchanged.
    pub fn with_seed(&self, seed: u64) -> EngineRef {
        match self {
            EngineRef::Builtin { depth, .. } => EngineRef::Builtin { depth: *depth, seed },
            other => other.clone(),
        }
    }

    pub fn start(&self, variant: Variant) -> Result<Box<dyn Engine>, EngineError> {
        self.validate(variant)?;
        Ok(match self {
            EngineRef::Builtin { depth, seed } => Box::new(BuiltinEngine::new(*depth, *seed)),
            EngineRef::External { path, limit } => Box::new(UciEngine::start(path, *limit)?),
        })
    }
}

pub trait Engine: Send {
    fn name(&self) -> String;
    /// Chooses a move for the side to move. `history` holds the positions before `position`,
    /// oldest first, for engines that track repetitions.
    fn search(&mut self, position: &Position, history: &[Position]) -> Result<SearchResult, EngineError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuiltinEngine {
    pub depth: u32,
    pub seed: u64,
}

impl BuiltinEngine {
    pub fn new(depth: u32, seed: u64) -> Self {
        BuiltinEngine { depth: depth.max(1), seed }
    }
}

impl Engine for BuiltinEngine {
    fn name(&self) -> String {
        format!("builtin depth {} seed {}", self.depth, self.seed)
    }

    fn search(&mut self, position: &Position, _history: &[Position]) -> Result<SearchResult, EngineError> {
        search(position, self.depth, self.seed).ok_or(EngineError::TerminalPosition)
    }
}

/// Builtin search as a free function.
pub fn best_move(engine: &EngineRef, position: &Position) -> Result<SearchResult, EngineError> {
    engine.start(position.variant())?.search(position, &[])
}

fn material(pos: &Position, color: Color) -> i32 {
    pos.pieces_of(color)
        .filter(|(_, p)| p.kind != PieceKind::King)
        .map(|(_, p)| piece_value(p.kind))
        .sum()
}

/// Static evaluation in centipawns from the side to move's view: material, twice the mobility
/// difference and ten times the center-occupation difference.
pub fn evaluate(position: &Position) -> i32 {
    let us = position.side_to_move();
    let them = !us;
    let m = material(position, us) - material(position, them);
    let mob = position.mobility(us) - position.mobility(them);
    let center = center_occupation(position, us) as i32 - center_occupation(position, them) as i32;
    m + 2 * mob + 10 * center
}

/// Evaluation from White's view; mate sentinels for terminal positions.
pub fn evaluate_white(position: &Position) -> i32 {
    let s = match position.status() {
        Status::Checkmate => -MATE,
        Status::Stalemate | Status::DrawByRule(_) => 0,
        Status::Ongoing => evaluate(position),
    };
    match position.side_to_move() {
        Color::White => s,
        Color::Black => -s,
    }
}

/// Lets `engine` play both sides from `position` for at most `max_plies` plies. `prior` holds
/// the positions before `position`, for repetition detection.
pub fn autoplay(
    record: &mut GameRecord,
    position: &Position,
    prior: &[Position],
    engine: &mut dyn Engine,
    max_plies: usize,
) -> Result<Position, EngineError> {
    let mut history: Vec<Position> = prior.to_vec();
    let mut pos = position.clone();
    for _ in 0..max_plies {
        if pos.status_with_history(&history).is_terminal() {
            break;
        }
        let r = engine.search(&pos, &history)?;
        let next = record
            .push(&pos, r.best)
            .map_err(|e| EngineError::ProtocolError(e.to_string()))?;
        history.push(std::mem::replace(&mut pos, next));
    }
    finish_record(record, &pos, &history);
    Ok(pos)
}

/// Fills in result and termination from the final position when the game has ended by rule.
pub fn finish_record(record: &mut GameRecord, last: &Position, history: &[Position]) {
    match last.status_with_history(history) {
        Status::Checkmate => {
            record.result = match last.side_to_move() {
                Color::White => GameResult::BlackWins,
                Color::Black => GameResult::WhiteWins,
            };
            record.termination = Some(Termination::Checkmate);
        }
        Status::Stalemate | Status::DrawByRule(_) => {
            record.result = GameResult::Draw;
            record.termination = Some(Termination::Adjudicated);
        }
        Status::Ongoing => {}
    }
}

/// Autoplay from `position` into a fresh record.
pub fn autoplay_game(position: &Position, engine: &EngineRef, max_plies: usize) -> Result<GameRecord, EngineError> {
    let mut e = engine.start(position.variant())?;
    let mut record = GameRecord::new(GameId::Tag("autoplay".into()), position.clone());
    autoplay(&mut record, position, &[], e.as_mut(), max_plies)?;
    Ok(record)
}

/// Fixed-depth builtin search, used by harness traces.
pub fn search_move(position: &Position, depth: u32, seed: u64) -> Option<Move> {
    search(position, depth, seed).map(|r| r.best)
}
