use super::position::{Position, BISHOP_DIRS, KING_STEPS, KNIGHT_STEPS, ROOK_DIRS};
use super::types::*;

impl Position {
    /// Every legal move for the side to move.
    pub fn legal_moves(&self) -> Vec<Move> {
        let mut moves = Vec::with_capacity(48);
        self.pseudo_legal_into(&mut moves);
        let us = self.side_to_move();
        moves.retain(|&m| !self.play_unchecked(m).is_color_in_check(us));
        moves
    }

    /// Legal captures and promotions only (quiescence input).
    pub fn legal_noisy_moves(&self) -> Vec<Move> {
        let mut moves = Vec::with_capacity(16);
        self.pseudo_legal_into(&mut moves);
        let us = self.side_to_move();
        moves.retain(|&m| {
            (m.is_capture() || m.promotion.is_some()) && !self.play_unchecked(m).is_color_in_check(us)
        });
        moves
    }

    pub fn has_legal_move(&self) -> bool {
        let mut moves = Vec::with_capacity(48);
        self.pseudo_legal_into(&mut moves);
        let us = self.side_to_move();
        moves
            .into_iter()
            .any(|m| !self.play_unchecked(m).is_color_in_check(us))
    }

    /// Pseudo-legal moves: geometry and occupancy respected, own-king safety not checked
    /// (except for castling, whose path conditions are verified here).
    pub fn pseudo_legal_into(&self, out: &mut Vec<Move>) {
        let us = self.side_to_move();
        for (from, piece) in self.pieces_of(us) {
            match piece.kind {
                PieceKind::Pawn => self.pawn_moves(from, us, out),
                PieceKind::Knight => self.step_moves(from, us, &KNIGHT_STEPS, out),
                PieceKind::King => {
                    self.step_moves(from, us, &KING_STEPS, out);
                    self.castle_moves(us, out);
                }
                PieceKind::Bishop => self.slide_moves(from, us, &BISHOP_DIRS, out),
                PieceKind::Rook => self.slide_moves(from, us, &ROOK_DIRS, out),
                PieceKind::Queen => {
                    self.slide_moves(from, us, &ROOK_DIRS, out);
                    self.slide_moves(from, us, &BISHOP_DIRS, out);
                }
            }
        }
    }

    fn push_pawn(&self, from: Square, to: Square, flags: MoveFlags, us: Color, out: &mut Vec<Move>) {
        if to.rank == self.promotion_rank(us) {
            for kind in PieceKind::PROMOTIONS {
                out.push(Move {
                    from,
                    to,
                    promotion: Some(kind),
                    flags,
                });
            }
        } else {
            out.push(Move::new(from, to, flags));
        }
    }

    fn pawn_moves(&self, from: Square, us: Color, out: &mut Vec<Move>) {
        let v = self.variant();
        let fwd = us.forward();
        if let Some(one) = from.offset(v, 0, fwd) {
            if self.piece_at(one).is_none() {
                self.push_pawn(from, one, MoveFlags::empty(), us, out);
                if from.rank == self.pawn_home_rank(us) {
                    if let Some(two) = one.offset(v, 0, fwd) {
                        if self.piece_at(two).is_none() {
                            out.push(Move::new(from, two, MoveFlags::DOUBLE_STEP));
                        }
                    }
                }
            }
        }
        for df in [-1, 1] {
            let Some(to) = from.offset(v, df, fwd) else { continue };
            match self.piece_at(to) {
                Some(p) if p.color != us => self.push_pawn(from, to, MoveFlags::CAPTURE, us, out),
                None if self.en_passant_target() == Some(to) => out.push(Move::new(
                    from,
                    to,
                    MoveFlags::CAPTURE | MoveFlags::EN_PASSANT,
                )),
                _ => {}
            }
        }
    }

    fn step_moves(&self, from: Square, us: Color, steps: &[(i8, i8)], out: &mut Vec<Move>) {
        for &(df, dr) in steps {
            let Some(to) = from.offset(self.variant(), df, dr) else { continue };
            match self.piece_at(to) {
                None => out.push(Move::new(from, to, MoveFlags::empty())),
                Some(p) if p.color != us => out.push(Move::new(from, to, MoveFlags::CAPTURE)),
                _ => {}
            }
        }
    }

    fn slide_moves(&self, from: Square, us: Color, dirs: &[(i8, i8)], out: &mut Vec<Move>) {
        for &(df, dr) in dirs {
            let mut cur = from;
            while let Some(to) = cur.offset(self.variant(), df, dr) {
                match self.piece_at(to) {
                    None => out.push(Move::new(from, to, MoveFlags::empty())),
                    Some(p) => {
                        if p.color != us {
                            out.push(Move::new(from, to, MoveFlags::CAPTURE));
                        }
                        break;
                    }
                }
                cur = to;
            }
        }
    }

    fn castle_moves(&self, us: Color, out: &mut Vec<Move>) {
        let rank = self.back_rank_index(us);
        let kf = self.variant().king_file();
        let king_home = Square::new(kf, rank);
        if self.king_square(us) != king_home {
            return;
        }
        let them = us.opposite();
        for kingside in [true, false] {
            if !self.castling_rights().get(us, kingside) {
                continue;
            }
            let corner = self.rook_corner(us, kingside);
            if self.piece_at(corner) != Some(Piece::new(us, PieceKind::Rook)) {
                continue;
            }
            let (lo, hi) = if kingside {
                (kf + 1, corner.file)
            } else {
                (corner.file + 1, kf)
            };
            if (lo..hi).any(|f| self.piece_at(Square::new(f, rank)).is_some()) {
                continue;
            }
            let king_to = if kingside { kf + 2 } else { kf - 2 };
            let path_lo = kf.min(king_to);
            let path_hi = kf.max(king_to);
            if (path_lo..=path_hi).any(|f| self.is_attacked(Square::new(f, rank), them)) {
                continue;
            }
            let flag = if kingside {
                MoveFlags::CASTLE_KINGSIDE
            } else {
                MoveFlags::CASTLE_QUEENSIDE
            };
            out.push(Move::new(king_home, Square::new(king_to, rank), flag));
        }
    }

    /// Squares attacked by the piece on `from`, regardless of side to move.
    /// Includes squares occupied by either color; pawns report diagonal attacks only.
    pub fn attacks_from(&self, from: Square) -> Vec<Square> {
        let Some(piece) = self.piece_at(from) else {
            return Vec::new();
        };
        let v = self.variant();
        let mut out = Vec::new();
        let steps = |steps: &[(i8, i8)], out: &mut Vec<Square>| {
            out.extend(steps.iter().filter_map(|&(df, dr)| from.offset(v, df, dr)));
        };
        let slides = |dirs: &[(i8, i8)], out: &mut Vec<Square>| {
            for &(df, dr) in dirs {
                let mut cur = from;
                while let Some(to) = cur.offset(v, df, dr) {
                    out.push(to);
                    if self.piece_at(to).is_some() {
                        break;
                    }
                    cur = to;
                }
            }
        };
        match piece.kind {
            PieceKind::Pawn => {
                let fwd = piece.color.forward();
                out.extend([-1, 1].iter().filter_map(|&df| from.offset(v, df, fwd)));
            }
            PieceKind::Knight => steps(&KNIGHT_STEPS, &mut out),
            PieceKind::King => steps(&KING_STEPS, &mut out),
            PieceKind::Bishop => slides(&BISHOP_DIRS, &mut out),
            PieceKind::Rook => slides(&ROOK_DIRS, &mut out),
            PieceKind::Queen => {
                slides(&ROOK_DIRS, &mut out);
                slides(&BISHOP_DIRS, &mut out);
            }
        }
        out
    }

    /// Pseudo-legal destination count for `color`'s non-pawn pieces, excluding castling.
    pub fn mobility(&self, color: Color) -> i32 {
        let v = self.variant();
        let mut n = 0;
        for (from, piece) in self.pieces_of(color) {
            let free = |to: Square| self.piece_at(to).is_none_or(|p| p.color != color);
            match piece.kind {
                PieceKind::Pawn => {}
                PieceKind::Knight | PieceKind::King => {
                    let steps: &[(i8, i8)] = if piece.kind == PieceKind::Knight {
                        &KNIGHT_STEPS
                    } else {
                        &KING_STEPS
                    };
                    n += steps
                        .iter()
                        .filter_map(|&(df, dr)| from.offset(v, df, dr))
                        .filter(|&to| free(to))
                        .count() as i32;
                }
                PieceKind::Bishop | PieceKind::Rook | PieceKind::Queen => {
                    let dirs: &[(i8, i8)] = match piece.kind {
                        PieceKind::Bishop => &BISHOP_DIRS,
                        PieceKind::Rook => &ROOK_DIRS,
                        _ => &KING_STEPS,
                    };
                    for &(df, dr) in dirs {
                        let mut cur = from;
                        while let Some(to) = cur.offset(v, df, dr) {
                            match self.piece_at(to) {
                                None => n += 1,
                                Some(p) => {
                                    if p.color != color {
                                        n += 1;
                                    }
                                    break;
                                }
                            }
                            cur = to;
                        }
                    }
                }
            }
        }
        n
    }

    /// Leaf count of the legal move tree.
    pub fn perft(&self, depth: u32) -> u64 {
        if depth == 0 {
            return 1;
        }
        let moves = self.legal_moves();
        if depth == 1 {
            return moves.len() as u64;
        }
        moves
            .into_iter()
            .map(|m| self.play_unchecked(m).perft(depth - 1))
            .sum()
    }
}
