use crate::chesscore::{piece_value, Color, PieceKind, Position, Square, Status};

use super::ThreatPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Threat {
    InCheck,
    /// The attacker can force mate within this many of its own moves.
    MateIn(u32),
    /// Static exchange on the square nets the attacker at least `loss` centipawns.
    HangingPiece { square: Square, loss: i32 },
}

/// Stand-in value for a king used as a capturer: recapturing it ends the exchange.
const KING_EXCHANGE_VALUE: i32 = 20_000;

fn exchange_value(kind: PieceKind) -> i32 {
    match kind {
        PieceKind::King => KING_EXCHANGE_VALUE,
        k => piece_value(k),
    }
}

/// Squares holding pieces of `by` that attack `target`.
pub fn attackers(position: &Position, target: Square, by: Color) -> Vec<Square> {
    position
        .pieces_of(by)
        .filter(|&(from, _)| position.attacks_from(from).contains(&target))
        .map(|(from, _)| from)
        .collect()
}

/// Static exchange evaluation: best material `by` can net by capturing on `target`, with either
/// side free to stop at any point. Pins are ignored; sliders behind a capturer join in.
pub fn see(position: &Position, target: Square, by: Color) -> i32 {
    match position.piece_at(target) {
        Some(p) if p.color != by => {
            let mut board = position.clone();
            exchange(&mut board, target, by)
        }
        _ => 0,
    }
}

fn exchange(board: &mut Position, target: Square, side: Color) -> i32 {
    let Some(victim) = board.piece_at(target) else {
        return 0;
    };
    let mut by_kind: [Option<Square>; 6] = [None; 6];
    for from in attackers(board, target, side) {
        let kind = board.piece_at(from).unwrap().kind;
        by_kind[kind.index()].get_or_insert(from);
    }
    let mut best = 0;
    for from in by_kind.into_iter().flatten() {
        let capturer = board.piece_at(from);
        board.put(from, None);
        board.put(target, capturer);
        let gain = exchange_value(victim.kind) - exchange(board, target, !side);
        board.put(target, Some(victim));
        board.put(from, capturer);
        best = best.max(gain);
    }
    best
}

/// Shortest forced mate for the side to move within `k` of its moves.
pub fn mate_in(position: &Position, k: u32) -> Option<u32> {
    (1..=k).find(|&d| forced_mate(position, d))
}

fn forced_mate(pos: &Position, depth: u32) -> bool {
    pos.legal_moves().into_iter().any(|m| {
        let next = pos.play_unchecked(m);
        let replies = next.legal_moves();
        if replies.is_empty() {
            return next.in_check();
        }
        depth > 1
            && replies
                .into_iter()
                .all(|r| forced_mate(&next.play_unchecked(r), depth - 1))
    })
}

/// Dangers facing `defender` in `position` under `policy`. When the defender is to move, the
/// mate scan asks what the attacker could do if the defender passed.
pub fn detect_threats(position: &Position, defender: Color, policy: &ThreatPolicy) -> Vec<Threat> {
    let attacker = !defender;
    let mut out = Vec::new();
    if policy.check_abort && position.is_color_in_check(defender) {
        out.push(Threat::InCheck);
    }
    if policy.mate_in_k_scan > 0 && position.status() == Status::Ongoing {
        let view = if position.side_to_move() == attacker {
            Some(position.clone())
        } else {
            position.null_move()
        };
        if let Some(d) = view.and_then(|v| mate_in(&v, policy.mate_in_k_scan)) {
            out.push(Threat::MateIn(d));
        }
    }
    let threshold = policy.hanging_material_threshold as i32;
    for (square, piece) in position.pieces_of(defender) {
        if piece.kind == PieceKind::King || attackers(position, square, attacker).is_empty() {
            continue;
        }
        let loss = see(position, square, attacker);
        if loss > 0 && loss >= threshold {
            out.push(Threat::HangingPiece { square, loss });
        }
    }
    out
}
