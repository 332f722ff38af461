use std::fmt;

use super::types::*;
use super::ChessError;

/// Board state for any supported variant. Value type: every transition returns a new position.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Position {
    variant: Variant,
    board: [Option<Piece>; BOARD_CELLS],
    side_to_move: Color,
    castling: CastlingRights,
    en_passant: Option<Square>,
    halfmove_clock: u32,
    fullmove_number: u32,
    kings: [Square; 2],
}

/// Terminal classification of a position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ongoing,
    Checkmate,
    Stalemate,
    DrawByRule(DrawRule),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DrawRule {
    FiftyMove,
    Threefold,
}

impl Status {
    pub fn is_terminal(self) -> bool {
        !matches!(self, Status::Ongoing)
    }
}

pub(crate) const KNIGHT_STEPS: [(i8, i8); 8] = [
    (1, 2),
    (2, 1),
    (2, -1),
    (1, -2),
    (-1, -2),
    (-2, -1),
    (-2, 1),
    (-1, 2),
];
pub(crate) const KING_STEPS: [(i8, i8); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];
pub(crate) const ROOK_DIRS: [(i8, i8); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
pub(crate) const BISHOP_DIRS: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

impl Position {
    /// Orthodox or Corrida starting setup.
    pub fn initial(variant: Variant) -> Position {
        let mut pos = Position::empty(variant);
        let top = variant.height() - 1;
        for (file, &kind) in variant.back_rank().iter().enumerate() {
            let file = file as u8;
            pos.put(Square::new(file, 0), Some(Piece::new(Color::White, kind)));
            pos.put(Square::new(file, top), Some(Piece::new(Color::Black, kind)));
            pos.put(Square::new(file, 1), Some(Piece::new(Color::White, PieceKind::Pawn)));
            pos.put(
                Square::new(file, top - 1),
                Some(Piece::new(Color::Black, PieceKind::Pawn)),
            );
        }
        pos.castling = CastlingRights::ALL;
        pos
    }

    /// A board with no pieces; kings must be placed before the position is used.
    pub fn empty(variant: Variant) -> Position {
        Position {
            variant,
            board: [None; BOARD_CELLS],
            side_to_move: Color::White,
            castling: CastlingRights::NONE,
            en_passant: None,
            halfmove_clock: 0,
            fullmove_number: 1,
            kings: [Square::new(0, 0); 2],
        }
    }

    #[inline]
    pub fn variant(&self) -> Variant {
        self.variant
    }

    #[inline]
    pub fn side_to_move(&self) -> Color {
        self.side_to_move
    }

    #[inline]
    pub fn castling_rights(&self) -> CastlingRights {
        self.castling
    }

    #[inline]
    pub fn en_passant_target(&self) -> Option<Square> {
        self.en_passant
    }

    #[inline]
    pub fn halfmove_clock(&self) -> u32 {
        self.halfmove_clock
    }

    #[inline]
    pub fn fullmove_number(&self) -> u32 {
        self.fullmove_number
    }

    #[inline]
    pub fn king_square(&self, color: Color) -> Square {
        self.kings[color.index()]
    }

    #[inline]
    pub fn piece_at(&self, sq: Square) -> Option<Piece> {
        self.board[sq.index()]
    }

    /// All squares of the variant in rank-major order starting at a1.
    pub fn squares(&self) -> impl Iterator<Item = Square> {
        let w = self.variant.width();
        let h = self.variant.height();
        (0..h).flat_map(move |r| (0..w).map(move |f| Square::new(f, r)))
    }

    /// Occupied squares with their pieces.
    pub fn pieces(&self) -> impl Iterator<Item = (Square, Piece)> + '_ {
        self.squares()
            .filter_map(move |sq| self.piece_at(sq).map(|p| (sq, p)))
    }

    pub fn pieces_of(&self, color: Color) -> impl Iterator<Item = (Square, Piece)> + '_ {
        self.pieces().filter(move |(_, p)| p.color == color)
    }

    pub fn count(&self, piece: Piece) -> usize {
        self.pieces().filter(|&(_, p)| p == piece).count()
    }

    pub(crate) fn put(&mut self, sq: Square, piece: Option<Piece>) {
        self.board[sq.index()] = piece;
        if let Some(p) = piece {
            if p.kind == PieceKind::King {
                self.kings[p.color.index()] = sq;
            }
        }
    }

    pub(crate) fn set_side_to_move(&mut self, c: Color) {
        self.side_to_move = c;
    }

    pub(crate) fn set_castling(&mut self, c: CastlingRights) {
        self.castling = c;
    }

    pub(crate) fn set_en_passant(&mut self, ep: Option<Square>) {
        self.en_passant = ep;
    }

    pub(crate) fn set_clocks(&mut self, halfmove: u32, fullmove: u32) {
        self.halfmove_clock = halfmove;
        self.fullmove_number = fullmove;
    }

    /// Rank index a pawn of `color` starts on.
    #[inline]
    pub fn pawn_home_rank(&self, color: Color) -> u8 {
        match color {
            Color::White => 1,
            Color::Black => self.variant.height() - 2,
        }
    }

    /// Rank index a pawn of `color` promotes on.
    #[inline]
    pub fn promotion_rank(&self, color: Color) -> u8 {
        match color {
            Color::White => self.variant.height() - 1,
            Color::Black => 0,
        }
    }

    #[inline]
    pub fn back_rank_index(&self, color: Color) -> u8 {
        match color {
            Color::White => 0,
            Color::Black => self.variant.height() - 1,
        }
    }

    /// Is `sq` attacked by any piece of `by`? Pins are ignored.
    pub fn is_attacked(&self, sq: Square, by: Color) -> bool {
        let v = self.variant;
        let is = |s: Option<Square>, kinds: &[PieceKind]| -> bool {
            s.and_then(|s| self.piece_at(s))
                .is_some_and(|p| p.color == by && kinds.contains(&p.kind))
        };
        // A pawn of `by` attacks forward-diagonally; look backwards from the target.
        let back = -by.forward();
        if is(sq.offset(v, -1, back), &[PieceKind::Pawn]) || is(sq.offset(v, 1, back), &[PieceKind::Pawn]) {
            return true;
        }
        if KNIGHT_STEPS
            .iter()
            .any(|&(df, dr)| is(sq.offset(v, df, dr), &[PieceKind::Knight]))
        {
            return true;
        }
        if KING_STEPS
            .iter()
            .any(|&(df, dr)| is(sq.offset(v, df, dr), &[PieceKind::King]))
        {
            return true;
        }
        let slider = |dirs: &[(i8, i8)], kinds: &[PieceKind]| {
            dirs.iter().any(|&(df, dr)| {
                let mut cur = sq;
                while let Some(next) = cur.offset(v, df, dr) {
                    if let Some(p) = self.piece_at(next) {
                        return p.color == by && kinds.contains(&p.kind);
                    }
                    cur = next;
                }
                false
            })
        };
        slider(&ROOK_DIRS, &[PieceKind::Rook, PieceKind::Queen])
            || slider(&BISHOP_DIRS, &[PieceKind::Bishop, PieceKind::Queen])
    }

    pub fn in_check(&self) -> bool {
        self.is_attacked(self.king_square(self.side_to_move), self.side_to_move.opposite())
    }

    pub fn is_color_in_check(&self, color: Color) -> bool {
        self.is_attacked(self.king_square(color), color.opposite())
    }

    /// Plays a move known to be at least pseudo-legal. No legality check is made.
    pub fn play_unchecked(&self, mv: Move) -> Position {
        let mut next = self.clone();
        let us = self.side_to_move;
        let moving = self.piece_at(mv.from).expect("move from empty square");
        let captured = if mv.is_en_passant() {
            let victim = Square::new(mv.to.file, mv.from.rank);
            let p = next.piece_at(victim);
            next.put(victim, None);
            p
        } else {
            self.piece_at(mv.to)
        };

        next.put(mv.from, None);
        let placed = match mv.promotion {
            Some(kind) => Piece::new(us, kind),
            None => moving,
        };
        next.put(mv.to, Some(placed));

        if mv.is_castle() {
            let (rook_from, rook_to) = self.castle_rook_squares(us, mv.flags.contains(MoveFlags::CASTLE_KINGSIDE));
            let rook = next.piece_at(rook_from);
            next.put(rook_from, None);
            next.put(rook_to, rook);
        }

        // Castling rights: king moves, rooks leaving or being captured on their corners.
        if moving.kind == PieceKind::King {
            next.castling.clear_color(us);
        }
        for color in Color::ALL {
            for kingside in [true, false] {
                let corner = self.rook_corner(color, kingside);
                if mv.from == corner || mv.to == corner {
                    next.castling.set(color, kingside, false);
                }
            }
        }

        next.en_passant = if mv.flags.contains(MoveFlags::DOUBLE_STEP) {
            Some(Square::new(mv.from.file, (mv.from.rank + mv.to.rank) / 2))
        } else {
            None
        };

        if moving.kind == PieceKind::Pawn || captured.is_some() {
            next.halfmove_clock = 0;
        } else {
            next.halfmove_clock = self.halfmove_clock + 1;
        }
        if us == Color::Black {
            next.fullmove_number = self.fullmove_number + 1;
        }
        next.side_to_move = us.opposite();
        next
    }

    /// Plays `mv` after verifying that it is one of the legal moves.
    pub fn apply_move(&self, mv: Move) -> Result<Position, ChessError> {
        if self.legal_moves().contains(&mv) {
            Ok(self.play_unchecked(mv))
        } else {
            Err(ChessError::IllegalMove {
                mv: mv.to_coordinate(),
                fen: self.to_fen(),
            })
        }
    }

    pub(crate) fn rook_corner(&self, color: Color, kingside: bool) -> Square {
        let file = if kingside { self.variant.width() - 1 } else { 0 };
        Square::new(file, self.back_rank_index(color))
    }

    /// (rook from, rook to) for a castle.
    pub(crate) fn castle_rook_squares(&self, color: Color, kingside: bool) -> (Square, Square) {
        let rank = self.back_rank_index(color);
        let kf = self.variant.king_file();
        let to = if kingside { kf + 1 } else { kf - 1 };
        (self.rook_corner(color, kingside), Square::new(to, rank))
    }

    /// Status without repetition history: mate, stalemate, fifty-move rule.
    pub fn status(&self) -> Status {
        if !self.has_legal_move() {
            return if self.in_check() {
                Status::Checkmate
            } else {
                Status::Stalemate
            };
        }
        if self.halfmove_clock >= 100 {
            return Status::DrawByRule(DrawRule::FiftyMove);
        }
        Status::Ongoing
    }

    /// Status taking earlier positions of the game into account (threefold repetition).
    /// `history` holds the positions before this one, oldest first.
    pub fn status_with_history(&self, history: &[Position]) -> Status {
        match self.status() {
            Status::Ongoing => {}
            other => return other,
        }
        let key = self.repetition_key();
        let repeats = history
            .iter()
            .rev()
            .take(self.halfmove_clock as usize)
            .filter(|p| p.repetition_key() == key)
            .count();
        if repeats >= 2 {
            Status::DrawByRule(DrawRule::Threefold)
        } else {
            Status::Ongoing
        }
    }

    /// Zobrist-style 64-bit key over placement, side, castling rights and en passant file.
    pub fn zobrist(&self) -> u64 {
        let mut h = splitmix(0x5eed_u64 ^ ((self.variant as u64) << 40));
        for (sq, p) in self.pieces() {
            h ^= splitmix(((sq.index() as u64) << 8) | p.index() as u64);
        }
        if self.side_to_move == Color::Black {
            h ^= 0x9e37_79b9_7f4a_7c15;
        }
        for (i, &r) in self.castling.0.iter().enumerate() {
            if r {
                h ^= splitmix(0xCA57_0000 + i as u64);
            }
        }
        if let Some(ep) = self.en_passant {
            h ^= splitmix(0xE9_0000 + ep.index() as u64);
        }
        h
    }

    /// Key used for repetition: like `zobrist` but en passant counts only when a capture is possible.
    pub fn repetition_key(&self) -> u64 {
        let mut key = self.zobrist();
        if let Some(ep) = self.en_passant {
            if !self.legal_moves().iter().any(|m| m.is_en_passant()) {
                key ^= splitmix(0xE9_0000 + ep.index() as u64);
            }
        }
        key
    }

    /// The same position with the other side to move, as if the mover passed.
    /// `None` when the mover is in check.
    pub fn null_move(&self) -> Option<Position> {
        if self.in_check() {
            return None;
        }
        let mut out = self.clone();
        out.side_to_move = self.side_to_move.opposite();
        out.en_passant = None;
        Some(out)
    }

    /// Color-flipped copy: ranks mirrored, colors swapped, side to move swapped.
    pub fn color_flipped(&self) -> Position {
        let mut out = Position::empty(self.variant);
        for (sq, p) in self.pieces() {
            out.put(
                sq.flip_rank(self.variant),
                Some(Piece::new(p.color.opposite(), p.kind)),
            );
        }
        out.side_to_move = self.side_to_move.opposite();
        out.castling = self.castling.flipped();
        out.en_passant = self.en_passant.map(|s| s.flip_rank(self.variant));
        out.halfmove_clock = self.halfmove_clock;
        out.fullmove_number = self.fullmove_number;
        out
    }

    /// Same pieces on the same squares for `color` as in `other`.
    pub fn same_placement_for(&self, other: &Position, color: Color) -> bool {
        self.squares().all(|sq| {
            let a = self.piece_at(sq).filter(|p| p.color == color);
            let b = other.piece_at(sq).filter(|p| p.color == color);
            a == b
        })
    }

    /// Checks the structural invariants a reachable position satisfies.
    pub fn validate(&self) -> Result<(), ChessError> {
        for color in Color::ALL {
            let kings = self.count(Piece::new(color, PieceKind::King));
            if kings != 1 {
                return Err(ChessError::InvalidPosition(format!(
                    "{color} has {kings} kings"
                )));
            }
        }
        for (sq, p) in self.pieces() {
            if p.kind == PieceKind::Pawn && (sq.rank == 0 || sq.rank == self.variant.height() - 1) {
                return Err(ChessError::InvalidPosition(format!("pawn on {sq}")));
            }
        }
        if let Some(ep) = self.en_passant {
            // The target sits behind a pawn that just double-stepped.
            let expected = match self.side_to_move {
                Color::White => self.variant.height() - 3,
                Color::Black => 2,
            };
            if ep.rank != expected || !ep.in_variant(self.variant) {
                return Err(ChessError::InvalidPosition(format!(
                    "en passant target {ep} on wrong rank"
                )));
            }
            let mover = self.side_to_move.opposite();
            let pawn_sq = ep.offset(self.variant, 0, mover.forward());
            if self.piece_at(ep).is_some()
                || pawn_sq.and_then(|s| self.piece_at(s)) != Some(Piece::new(mover, PieceKind::Pawn))
            {
                return Err(ChessError::InvalidPosition(format!(
                    "en passant target {ep} without a double-stepped pawn"
                )));
            }
        }
        if self.is_color_in_check(self.side_to_move.opposite()) {
            return Err(ChessError::InvalidPosition(
                "side not to move is in check".into(),
            ));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Position({})", self.to_fen())
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in (0..self.variant.height()).rev() {
            write!(f, "{:>2} ", r + 1)?;
            for file in 0..self.variant.width() {
                let c = self
                    .piece_at(Square::new(file, r))
                    .map_or('.', Piece::fen_char);
                write!(f, "{c} ")?;
            }
            writeln!(f)?;
        }
        write!(f, "   ")?;
        for file in 0..self.variant.width() {
            write!(f, "{} ", (b'a' + file) as char)?;
        }
        writeln!(f)
    }
}
