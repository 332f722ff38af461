use crate::chesscore::{piece_value, splitmix, Move, PieceKind, Position};

use super::evaluate;

pub const MATE: i32 = 100_000;
/// Scores beyond this magnitude encode a forced mate.
pub const MATE_BOUND: i32 = MATE - 1_000;
const QUIESCENCE_PLIES: u32 = 4;
const INF: i32 = MATE + 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub best: Move,
    /// Centipawns from the mover's view; `MATE - plies` for a forced mate.
    pub eval: i32,
    pub pv: Vec<Move>,
    pub nodes: u64,
}

pub fn is_mate_score(score: i32) -> bool {
    score.abs() >= MATE_BOUND
}

fn tie_break(seed: u64, key: u64, mv: Move) -> u64 {
    let code = mv.from.index() as u64
        | (mv.to.index() as u64) << 8
        | (mv.promotion.map_or(0, |k| k.index() as u64 + 1)) << 16;
    splitmix(seed ^ splitmix(key ^ code.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

fn victim_value(pos: &Position, mv: Move) -> i32 {
    if mv.is_en_passant() {
        return piece_value(PieceKind::Pawn);
    }
    pos.piece_at(mv.to).map_or(0, |p| piece_value(p.kind))
}

/// MVV-LVA for captures, then promotions, then quiet moves in generation order.
fn order(pos: &Position, moves: &mut [Move]) {
    moves.sort_by_cached_key(|&m| {
        let attacker = pos.piece_at(m.from).map_or(0, |p| piece_value(p.kind));
        let promo = m.promotion.map_or(0, piece_value);
        if m.is_capture() {
            -(10_000 + victim_value(pos, m) * 16 - attacker / 16 + promo)
        } else if promo > 0 {
            -(5_000 + promo)
        } else {
            0
        }
    });
}

struct Searcher {
    nodes: u64,
}

impl Searcher {
    fn negamax(&mut self, pos: &Position, depth: u32, mut alpha: i32, beta: i32, ply: i32) -> (i32, Vec<Move>) {
        self.nodes += 1;
        let mut moves = pos.legal_moves();
        if moves.is_empty() {
            return (if pos.in_check() { -(MATE - ply) } else { 0 }, Vec::new());
        }
        if pos.halfmove_clock() >= 100 {
            return (0, Vec::new());
        }
        if depth == 0 {
            return (self.quiesce(pos, alpha, beta, QUIESCENCE_PLIES), Vec::new());
        }
        order(pos, &mut moves);
        let mut best_line = Vec::new();
        let mut best = -INF;
        for m in moves {
            let (s, line) = self.negamax(&pos.play_unchecked(m), depth - 1, -beta, -alpha, ply + 1);
            let score = -s;
            if score > best {
                best = score;
                best_line = std::iter::once(m).chain(line).collect();
            }
            if score > alpha {
                alpha = score;
            }
            if alpha >= beta {
                break;
            }
        }
        (best, best_line)
    }

    fn quiesce(&mut self, pos: &Position, mut alpha: i32, beta: i32, left: u32) -> i32 {
        self.nodes += 1;
        let stand = evaluate(pos);
        if left == 0 || stand >= beta {
            return stand;
        }
        alpha = alpha.max(stand);
        let mut captures = pos.legal_noisy_moves();
        captures.retain(Move::is_capture);
        order(pos, &mut captures);
        for m in captures {
            let score = -self.quiesce(&pos.play_unchecked(m), -beta, -alpha, left - 1);
            if score >= beta {
                return score;
            }
            alpha = alpha.max(score);
        }
        alpha
    }
}

/// Fixed-depth alpha-beta with capture quiescence. Root moves are tried in an order fixed by
/// `seed`, and a later move must score strictly better to replace the incumbent, so equal scores
/// resolve the same way on every run. Returns `None` when there is no legal move.
pub fn search(pos: &Position, depth: u32, seed: u64) -> Option<SearchResult> {
    let depth = depth.max(1);
    let mut moves = pos.legal_moves();
    if moves.is_empty() {
        return None;
    }
    let key = pos.zobrist();
    moves.sort_by_key(|&m| std::cmp::Reverse(tie_break(seed, key, m)));
    let mut s = Searcher { nodes: 1 };
    let mut alpha = -INF;
    let mut best: Option<(Move, i32, Vec<Move>)> = None;
    for m in moves {
        let (v, line) = s.negamax(&pos.play_unchecked(m), depth - 1, -INF, -alpha, 1);
        let score = -v;
        if best.as_ref().is_none_or(|b| score > b.1) {
            best = Some((m, score, std::iter::once(m).chain(line).collect()));
            alpha = alpha.max(score);
        }
    }
    let (best, eval, pv) = best.unwrap();
    Some(SearchResult {
        best,
        eval,
        pv,
        nodes: s.nodes,
    })
}
