//! Rules kernel for the orthodox 8×8 board and the Corrida 10×10 and 8×10 boards.
//!
//! The board is a fixed-stride mailbox; a [`Position`] is an immutable value and every
//! transition returns a fresh copy. Corrida 10×10 uses the back rank `R N N B Q K B N N R`,
//! castles by moving the king two squares toward either corner rook, and promotes on the
//! far rank. En passant and the draw rules apply to every variant.

mod fen;
mod movegen;
mod position;
mod types;

pub use position::{DrawRule, Position, Status};
pub use types::{
    CastlingRights, Color, Move, MoveFlags, Piece, PieceKind, Square, Variant, BOARD_CELLS, MAX_DIM,
};

pub(crate) use position::splitmix;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChessError {
    #[error("illegal move {mv} in {fen}")]
    IllegalMove { mv: String, fen: String },
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("invalid position: {0}")]
    InvalidPosition(String),
}

pub fn initial_position(variant: Variant) -> Position {
    Position::initial(variant)
}

pub fn legal_moves(position: &Position) -> Vec<Move> {
    position.legal_moves()
}

pub fn apply_move(position: &Position, mv: Move) -> Result<Position, ChessError> {
    position.apply_move(mv)
}

pub fn status(position: &Position) -> Status {
    position.status()
}

pub fn perft(position: &Position, depth: u32) -> u64 {
    position.perft(depth)
}

pub fn to_fen(position: &Position) -> String {
    position.to_fen()
}

pub fn from_fen(text: &str, variant: Variant) -> Result<Position, ChessError> {
    Position::from_fen(text, variant)
}

/// Material values in centipawns, shared by evaluation and exchange analysis.
pub const fn piece_value(kind: PieceKind) -> i32 {
    match kind {
        PieceKind::Pawn => 100,
        PieceKind::Knight => 300,
        PieceKind::Bishop => 310,
        PieceKind::Rook => 500,
        PieceKind::Queen => 900,
        PieceKind::King => 0,
    }
}

/// Convenience for tests and fixtures: parse a coordinate square, panicking on bad input.
pub fn sq(name: &str) -> Square {
    Square::parse(name).unwrap_or_else(|| panic!("bad square {name}"))
}
