//! Long-algebraic game notation (`Ng1-f3`, `e5xd6`, `d2-d1=Q+`, `o-o`) and the bundled corpus.
//!
//! Every token names both the origin and destination square, so resolution is a lookup in the
//! legal move list. `-` and `x` must agree with the board. A trailing `*` marks checkmate and
//! is verified; `+` is recorded as written.

mod corpus;
mod lexer;

use std::fmt;

use crate::chesscore::{Color, Move, PieceKind, Position, Status, Variant};
use lexer::{MoveBody, RawPly, ResultToken};

pub use corpus::{
    format_errata, game_file_name, load_corpus, load_corpus_from, parse_errata, sha256_hex, Corpus,
    CorpusError, Erratum, CORPUS_SIZE,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NotationError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("ply {ply}: {token:?} matches {candidates} legal moves")]
    AmbiguousMove {
        ply: usize,
        token: String,
        candidates: usize,
    },
    #[error("ply {ply}: capture marker in {token:?} disagrees with the board")]
    CaptureMismatch { ply: usize, token: String },
    #[error("ply {ply}: {token:?} is marked as mate but does not checkmate")]
    MateMismatch { ply: usize, token: String },
    #[error("illegal move {0}")]
    IllegalMove(String),
}

impl NotationError {
    /// Ply index (1-based) for errors raised while resolving moves.
    pub fn ply(&self) -> Option<usize> {
        match self {
            NotationError::AmbiguousMove { ply, .. }
            | NotationError::CaptureMismatch { ply, .. }
            | NotationError::MateMismatch { ply, .. } => Some(*ply),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("game {game}, ply {ply}: {reason}")]
pub struct ReplayError {
    pub game: GameId,
    pub ply: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GameId {
    Corpus(u8),
    Tag(String),
}

impl fmt::Display for GameId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameId::Corpus(n) => write!(f, "{n}"),
            GameId::Tag(t) => f.write_str(t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum GameResult {
    WhiteWins,
    BlackWins,
    Draw,
    Unfinished,
}

impl GameResult {
    pub fn token(self) -> &'static str {
        match self {
            GameResult::WhiteWins => "1-0",
            GameResult::BlackWins => "0-1",
            GameResult::Draw => "1/2-1/2",
            GameResult::Unfinished => "*",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Termination {
    Checkmate,
    Resigns,
    AgreedDraw,
    Adjudicated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ply {
    /// Token as written, without check, mate or emphasis markers.
    pub token: String,
    pub mv: Move,
    pub check: bool,
    pub mate: bool,
    /// Set when the move came from an erratum rather than the transcript.
    pub corrected: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    /// 1-based ply the note is attached to.
    pub ply: usize,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameRecord {
    pub id: GameId,
    pub variant: Variant,
    pub start: Position,
    pub plies: Vec<Ply>,
    pub result: GameResult,
    pub termination: Option<Termination>,
    pub annotations: Vec<Annotation>,
}

impl GameRecord {
    pub fn new(id: GameId, start: Position) -> Self {
        GameRecord {
            id,
            variant: start.variant(),
            start,
            plies: Vec::new(),
            result: GameResult::Unfinished,
            termination: None,
            annotations: Vec::new(),
        }
    }

    pub fn moves(&self) -> Vec<Move> {
        self.plies.iter().map(|p| p.mv).collect()
    }

    pub fn notes_at(&self, ply: usize) -> impl Iterator<Item = &str> {
        self.annotations
            .iter()
            .filter(move |a| a.ply == ply)
            .map(|a| a.note.as_str())
    }

    /// Color that made the given 1-based ply.
    pub fn mover(&self, ply: usize) -> Color {
        let first = self.start.side_to_move();
        if ply % 2 == 1 {
            first
        } else {
            !first
        }
    }

    /// Appends a legal move, filling in its token and markers.
    pub fn push(&mut self, position: &Position, mv: Move) -> Result<Position, NotationError> {
        let next = position
            .apply_move(mv)
            .map_err(|e| NotationError::IllegalMove(e.to_string()))?;
        self.plies.push(Ply {
            token: body_text(mv, position),
            mv,
            check: next.in_check(),
            mate: next.status() == Status::Checkmate,
            corrected: false,
        });
        Ok(next)
    }
}

/// Parses a game starting from the initial position of `variant`.
pub fn parse_game(text: &str, variant: Variant) -> Result<GameRecord, NotationError> {
    parse_game_from(text, &Position::initial(variant), GameId::Tag("game".into()))
}

/// Parses a game from an arbitrary start position.
pub fn parse_game_from(text: &str, start: &Position, id: GameId) -> Result<GameRecord, NotationError> {
    resolve(text, start, id, &mut |_, _, _, err| Err(err))
}

/// What to do with a ply that fails to resolve.
pub(crate) enum Recovery {
    Replace(Move),
    Truncate,
}

type FailureHook<'a> = dyn FnMut(usize, &str, &Position, NotationError) -> Result<Recovery, NotationError> + 'a;

pub(crate) fn resolve(
    text: &str,
    start: &Position,
    id: GameId,
    on_failure: &mut FailureHook<'_>,
) -> Result<GameRecord, NotationError> {
    let transcript = lexer::tokenize(
        text,
        start.fullmove_number(),
        start.side_to_move() == Color::Black,
    )?;
    let variant = start.variant();
    let mut record = GameRecord::new(id, start.clone());
    let mut pos = start.clone();
    let mut truncated = false;

    for (i, raw) in transcript.plies.iter().enumerate() {
        let ply = i + 1;
        check_bounds(raw, variant)?;
        let (mv, corrected) = match resolve_ply(&pos, raw, ply) {
            Ok(mv) => (mv, false),
            Err(err) => match on_failure(ply, &raw.text, &pos, err)? {
                Recovery::Replace(mv) => (mv, true),
                Recovery::Truncate => {
                    truncated = true;
                    break;
                }
            },
        };
        let next = pos
            .apply_move(mv)
            .map_err(|e| NotationError::IllegalMove(e.to_string()))?;
        for note in &raw.notes {
            record.annotations.push(Annotation {
                ply,
                note: note.clone(),
            });
        }
        let ply_record = if corrected {
            Ply {
                token: body_text(mv, &pos),
                mv,
                check: next.in_check(),
                mate: next.status() == Status::Checkmate,
                corrected,
            }
        } else {
            Ply {
                token: raw.text.clone(),
                mv,
                check: raw.check,
                mate: raw.mate,
                corrected,
            }
        };
        record.plies.push(ply_record);
        pos = next;
    }

    if truncated {
        return Ok(record);
    }
    let last_mover = if record.plies.is_empty() {
        None
    } else {
        Some(record.mover(record.plies.len()))
    };
    let mated = pos.status() == Status::Checkmate;
    let winner = |c: Color| match c {
        Color::White => GameResult::WhiteWins,
        Color::Black => GameResult::BlackWins,
    };
    let (result, termination) = match transcript.result {
        Some(ResultToken::Draw) | Some(ResultToken::ObviouslyDraw) => {
            (GameResult::Draw, Some(Termination::AgreedDraw))
        }
        Some(ResultToken::Resigns) => match last_mover {
            Some(c) => (winner(c), Some(Termination::Resigns)),
            None => (GameResult::Unfinished, None),
        },
        Some(ResultToken::WhiteWins) => (
            GameResult::WhiteWins,
            Some(if mated { Termination::Checkmate } else { Termination::Resigns }),
        ),
        Some(ResultToken::BlackWins) => (
            GameResult::BlackWins,
            Some(if mated { Termination::Checkmate } else { Termination::Resigns }),
        ),
        None if mated => (winner(last_mover.unwrap()), Some(Termination::Checkmate)),
        None => (GameResult::Unfinished, None),
    };
    record.result = result;
    record.termination = termination;
    Ok(record)
}

/// Resolves one move token against a position.
pub fn parse_move(token: &str, position: &Position) -> Result<Move, NotationError> {
    let t = lexer::tokenize(
        token,
        position.fullmove_number(),
        position.side_to_move() == Color::Black,
    )?;
    match t.plies.as_slice() {
        [raw] => {
            check_bounds(raw, position.variant())?;
            resolve_ply(position, raw, 1)
        }
        _ => Err(NotationError::Parse {
            line: 1,
            column: 1,
            message: format!("expected a single move, got {token:?}"),
        }),
    }
}

fn check_bounds(raw: &RawPly, variant: Variant) -> Result<(), NotationError> {
    if let MoveBody::Normal { from, to, .. } = raw.body {
        for s in [from, to] {
            if !s.in_variant(variant) {
                return Err(NotationError::Parse {
                    line: raw.line,
                    column: raw.column,
                    message: format!("square {s} is off the {variant} board"),
                });
            }
        }
    }
    Ok(())
}

fn resolve_ply(pos: &Position, raw: &RawPly, ply: usize) -> Result<Move, NotationError> {
    let legal = pos.legal_moves();
    let ambiguous = |n: usize| NotationError::AmbiguousMove {
        ply,
        token: raw.text.clone(),
        candidates: n,
    };
    let mv = match raw.body {
        MoveBody::Castle { kingside } => {
            let flag = if kingside {
                crate::chesscore::MoveFlags::CASTLE_KINGSIDE
            } else {
                crate::chesscore::MoveFlags::CASTLE_QUEENSIDE
            };
            let found: Vec<&Move> = legal.iter().filter(|m| m.flags.contains(flag)).collect();
            match found.as_slice() {
                [m] => **m,
                other => return Err(ambiguous(other.len())),
            }
        }
        MoveBody::Normal {
            piece,
            from,
            to,
            capture,
            promotion,
        } => {
            if pos.piece_at(from).map(|p| p.kind) != Some(piece) {
                return Err(ambiguous(0));
            }
            let found: Vec<&Move> = legal
                .iter()
                .filter(|m| m.from == from && m.to == to && m.promotion == promotion)
                .collect();
            let m = match found.as_slice() {
                [m] => **m,
                [] if promotion.is_none() => {
                    let promos = legal.iter().filter(|m| m.from == from && m.to == to).count();
                    return Err(ambiguous(promos));
                }
                other => return Err(ambiguous(other.len())),
            };
            if m.is_capture() != capture {
                return Err(NotationError::CaptureMismatch {
                    ply,
                    token: raw.text.clone(),
                });
            }
            m
        }
    };
    if raw.mate {
        let next = pos.play_unchecked(mv);
        if next.status() != Status::Checkmate {
            return Err(NotationError::MateMismatch {
                ply,
                token: raw.text.clone(),
            });
        }
    }
    Ok(mv)
}

fn body_text(mv: Move, pos: &Position) -> String {
    use crate::chesscore::MoveFlags;
    if mv.flags.contains(MoveFlags::CASTLE_KINGSIDE) {
        return "o-o".into();
    }
    if mv.flags.contains(MoveFlags::CASTLE_QUEENSIDE) {
        return "o-o-o".into();
    }
    let mut s = String::new();
    if let Some(p) = pos.piece_at(mv.from) {
        if p.kind != PieceKind::Pawn {
            s.push(p.kind.letter());
        }
    }
    s.push_str(&mv.from.to_string());
    s.push(if mv.is_capture() { 'x' } else { '-' });
    s.push_str(&mv.to.to_string());
    if let Some(k) = mv.promotion {
        s.push('=');
        s.push(k.letter());
    }
    s
}

/// Long-algebraic text for a legal move, with `+` for check and `*` for mate.
pub fn format_move(mv: Move, position: &Position) -> Result<String, NotationError> {
    let next = position
        .apply_move(mv)
        .map_err(|e| NotationError::IllegalMove(e.to_string()))?;
    let mut s = body_text(mv, position);
    if next.status() == Status::Checkmate {
        s.push('*');
    } else if next.in_check() {
        s.push('+');
    }
    Ok(s)
}

/// Writes a record back in the corpus grammar, one move number per line.
pub fn format_game(record: &GameRecord) -> String {
    let mut out = String::new();
    let first_black = record.start.side_to_move() == Color::Black;
    let mut number = record.start.fullmove_number();
    for (i, ply) in record.plies.iter().enumerate() {
        let n = i + 1;
        let black = (i % 2 == 1) != first_black;
        if !black {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!("{number}. "));
        } else if i == 0 {
            out.push_str(&format!("{number}... "));
        } else {
            out.push(' ');
        }
        let mut stars = false;
        for note in record.notes_at(n) {
            if note == "**" {
                stars = true;
            } else {
                out.push_str(&format!("{{{note}}} "));
            }
        }
        out.push_str(&ply.token);
        if ply.mate {
            out.push('*');
        } else if ply.check {
            out.push('+');
        }
        if stars {
            out.push_str("**");
        }
        if black {
            number += 1;
        }
    }
    let tail = match (record.result, record.termination) {
        (GameResult::Unfinished, _) => None,
        (_, Some(Termination::Resigns)) => Some("Resigns"),
        (r, _) => Some(r.token()),
    };
    if let Some(t) = tail {
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(t);
    }
    out.push('\n');
    out
}

/// Replays a record from its start position, returning every position including the start.
pub fn replay(record: &GameRecord) -> Result<Vec<Position>, ReplayError> {
    let mut positions = Vec::with_capacity(record.plies.len() + 1);
    let mut pos = record.start.clone();
    positions.push(pos.clone());
    for (i, ply) in record.plies.iter().enumerate() {
        pos = pos.apply_move(ply.mv).map_err(|e| ReplayError {
            game: record.id.clone(),
            ply: i + 1,
            reason: e.to_string(),
        })?;
        positions.push(pos.clone());
    }
    Ok(positions)
}
