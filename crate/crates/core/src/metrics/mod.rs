//! Per-ply position measurements: development, coordination, center control, early queen
//! sorties, engine evaluation traces and sustained evaluation declines.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chesscore::{Color, Piece, PieceKind, Position, Square, Status};
use crate::engines::{search, EngineError, EngineRef, MATE};
use crate::notation::{replay, GameRecord, ReplayError};
use crate::strategy::reconstruction_ply;

pub const SORTIE_WINDOW: usize = 10;
pub const SORTIE_MIN_UNDEVELOPED_MINORS: usize = 1;
pub const DEPRESSION_DROP_CP: i32 = 120;
pub const DEPRESSION_MIN_LEN: usize = 5;

fn on_home_square(initial: &Position, sq: Square, piece: Piece) -> bool {
    initial.piece_at(sq) == Some(piece)
}

/// King and rook stand where one of the two castles puts them.
pub fn has_castled(position: &Position, color: Color) -> bool {
    let v = position.variant();
    let rank = position.back_rank_index(color);
    let kf = v.king_file();
    let king = Piece::new(color, PieceKind::King);
    let rook = Piece::new(color, PieceKind::Rook);
    [true, false].into_iter().any(|kingside| {
        let (king_to, rook_to) = if kingside { (kf + 2, kf + 1) } else { (kf - 2, kf - 1) };
        position.piece_at(Square::new(king_to, rank)) == Some(king)
            && position.piece_at(Square::new(rook_to, rank)) == Some(rook)
    })
}

/// Knights, bishops, rooks and queens of `color` off their initial squares, plus one if castled,
/// capped at the number of such pieces.
pub fn development_count(position: &Position, color: Color) -> usize {
    let initial = Position::initial(position.variant());
    let mut officers = 0;
    let mut moved = 0;
    for (sq, piece) in position.pieces_of(color) {
        if matches!(piece.kind, PieceKind::Pawn | PieceKind::King) {
            continue;
        }
        officers += 1;
        if !on_home_square(&initial, sq, piece) {
            moved += 1;
        }
    }
    (moved + usize::from(has_castled(position, color))).min(officers)
}

/// Minor pieces of `color` still on their initial squares.
pub fn undeveloped_minors(position: &Position, color: Color) -> usize {
    let initial = Position::initial(position.variant());
    position
        .pieces_of(color)
        .filter(|&(sq, p)| p.kind.is_minor() && on_home_square(&initial, sq, p))
        .count()
}

/// Ordered pairs of distinct `color` pieces where the first attacks the second's square.
pub fn coordination_score(position: &Position, color: Color) -> usize {
    position
        .pieces_of(color)
        .map(|(from, _)| {
            position
                .attacks_from(from)
                .into_iter()
                .filter(|&to| position.piece_at(to).is_some_and(|p| p.color == color))
                .count()
        })
        .sum()
}

/// Files and ranks of the central 2×2 block.
pub fn center_squares(position: &Position) -> [Square; 4] {
    let v = position.variant();
    let f = v.width() / 2 - 1;
    let r = v.height() / 2 - 1;
    [
        Square::new(f, r),
        Square::new(f + 1, r),
        Square::new(f, r + 1),
        Square::new(f + 1, r + 1),
    ]
}

/// `color`'s pieces and pawns on the central 2×2 block.
pub fn center_occupation(position: &Position, color: Color) -> usize {
    center_squares(position)
        .into_iter()
        .filter(|&sq| position.piece_at(sq).is_some_and(|p| p.color == color))
        .count()
}

/// Move number of `color`'s first queen move off its initial square within its first `window`
/// moves, made while at least `min_undeveloped_minors` of its minor pieces are undeveloped.
pub fn early_queen_sortie(
    record: &GameRecord,
    color: Color,
    window: usize,
    min_undeveloped_minors: usize,
) -> Result<Option<usize>, ReplayError> {
    let positions = replay(record)?;
    let initial = Position::initial(record.variant);
    let queen = Piece::new(color, PieceKind::Queen);
    let mut moves = 0;
    for (i, ply) in record.plies.iter().enumerate() {
        let before = &positions[i];
        if before.side_to_move() != color {
            continue;
        }
        moves += 1;
        if moves > window {
            break;
        }
        if before.piece_at(ply.mv.from) == Some(queen) && on_home_square(&initial, ply.mv.from, queen) {
            return Ok((undeveloped_minors(before, color) >= min_undeveloped_minors).then_some(moves));
        }
    }
    Ok(None)
}

/// `early_queen_sortie` with the default window and minor-piece threshold.
pub fn queen_sortie(record: &GameRecord, color: Color) -> Result<Option<usize>, ReplayError> {
    early_queen_sortie(record, color, SORTIE_WINDOW, SORTIE_MIN_UNDEVELOPED_MINORS)
}

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error("ply {ply}: {error}")]
    Engine { ply: usize, error: EngineError },
}

/// White-view score of a position at `depth`: mate sentinels for terminal positions.
pub fn white_view_eval(position: &Position, engine: &EngineRef, depth: u32) -> Result<i32, EngineError> {
    let mover_view = match position.status() {
        Status::Checkmate => -MATE,
        Status::Stalemate | Status::DrawByRule(_) => 0,
        Status::Ongoing => match engine {
            EngineRef::Builtin { seed, .. } => search(position, depth, *seed)
                .ok_or(EngineError::TerminalPosition)?
                .eval,
            EngineRef::External { path, limit } => {
                let limit = match limit {
                    crate::engines::UciLimit::Depth(_) => crate::engines::UciLimit::Depth(depth.max(1)),
                    other => *other,
                };
                crate::engines::best_move(&EngineRef::External { path: path.clone(), limit }, position)?.eval
            }
        },
    };
    Ok(match position.side_to_move() {
        Color::White => mover_view,
        Color::Black => -mover_view,
    })
}

/// Engine evaluation from White's view after every ply, as (1-based ply, centipawns).
pub fn eval_trace(record: &GameRecord, engine: &EngineRef, depth: u32) -> Result<Vec<(usize, i32)>, TraceError> {
    let positions = replay(record)?;
    positions
        .iter()
        .enumerate()
        .skip(1)
        .map(|(ply, pos)| {
            white_view_eval(pos, engine, depth)
                .map(|e| (ply, e))
                .map_err(|error| TraceError::Engine { ply, error })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepressionSpan {
    pub start_ply: usize,
    pub end_ply: usize,
    /// Evaluation lost over the span, in centipawns, from the affected color's view.
    pub drop_cp: i32,
}

impl DepressionSpan {
    /// Average loss per ply step.
    pub fn mean_drop(&self) -> f64 {
        let steps = (self.end_ply - self.start_ply).max(1);
        self.drop_cp as f64 / steps as f64
    }
}

/// Maximal runs of at least `min_len` consecutive trace entries over which `color`'s
/// evaluation never improves and falls by at least `drop_threshold_cp` in total.
pub fn depression_spans(
    trace: &[(usize, i32)],
    color: Color,
    drop_threshold_cp: i32,
    min_len: usize,
) -> Vec<DepressionSpan> {
    let view = |e: i32| if color == Color::White { e } else { -e };
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=trace.len() {
        let continues = i < trace.len() && view(trace[i].1) <= view(trace[i - 1].1);
        if continues {
            continue;
        }
        let end = i - 1;
        if end + 1 - start >= min_len {
            let drop = view(trace[start].1) - view(trace[end].1);
            if drop >= drop_threshold_cp {
                out.push(DepressionSpan {
                    start_ply: trace[start].0,
                    end_ply: trace[end].0,
                    drop_cp: drop,
                });
            }
        }
        start = i;
    }
    out
}

bitflags::bitflags! {
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
    pub struct RowFlags: u8 {
        const QUEEN_SORTIE = 1;
        const ABORT = 2;
        const RECONSTRUCTION = 4;
    }
}

impl fmt::Display for RowFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (RowFlags::QUEEN_SORTIE, "queen_sortie"),
            (RowFlags::ABORT, "abort"),
            (RowFlags::RECONSTRUCTION, "reconstruction"),
        ]
        .into_iter()
        .filter(|(flag, _)| self.contains(*flag))
        .map(|(_, name)| name)
        .collect();
        f.write_str(&names.join("|"))
    }
}

impl std::str::FromStr for RowFlags {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split('|')
            .filter(|t| !t.is_empty())
            .try_fold(RowFlags::empty(), |acc, t| {
                let f = match t {
                    "queen_sortie" => RowFlags::QUEEN_SORTIE,
                    "abort" => RowFlags::ABORT,
                    "reconstruction" => RowFlags::RECONSTRUCTION,
                    other => return Err(format!("unknown flag {other:?}")),
                };
                Ok(acc | f)
            })
    }
}

impl Serialize for RowFlags {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RowFlags {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One row per ply, measured on the position after that ply (ply 0 is the start).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub ply: usize,
    #[serde(rename = "dev_w")]
    pub development_white: usize,
    #[serde(rename = "dev_b")]
    pub development_black: usize,
    #[serde(rename = "coord_w")]
    pub coordination_white: usize,
    #[serde(rename = "coord_b")]
    pub coordination_black: usize,
    #[serde(rename = "center_w")]
    pub center_white: usize,
    #[serde(rename = "center_b")]
    pub center_black: usize,
    pub eval_cp: Option<i32>,
    pub flags: RowFlags,
}

impl MetricsRow {
    pub fn measure(ply: usize, position: &Position) -> MetricsRow {
        MetricsRow {
            ply,
            development_white: development_count(position, Color::White),
            development_black: development_count(position, Color::Black),
            coordination_white: coordination_score(position, Color::White),
            coordination_black: coordination_score(position, Color::Black),
            center_white: center_occupation(position, Color::White),
            center_black: center_occupation(position, Color::Black),
            eval_cp: None,
            flags: RowFlags::empty(),
        }
    }
}

pub const CSV_HEADER: [&str; 9] = [
    "ply", "dev_w", "dev_b", "coord_w", "coord_b", "center_w", "center_b", "eval_cp", "flags",
];

/// Ply of `color`'s `moves`-th move in `record`.
fn ply_of_move(record: &GameRecord, color: Color, moves: usize) -> usize {
    let offset = usize::from(record.start.side_to_move() != color);
    2 * (moves - 1) + 1 + offset
}

/// Rows for every ply of `record`, with queen-sortie and reconstruction flags set. `evals`
/// supplies optional per-ply evaluations as produced by [`eval_trace`].
pub fn metrics_trace(record: &GameRecord, evals: Option<&[(usize, i32)]>) -> Result<Vec<MetricsRow>, ReplayError> {
    let positions = replay(record)?;
    let mut rows: Vec<MetricsRow> = positions
        .iter()
        .enumerate()
        .skip(1)
        .map(|(ply, p)| MetricsRow::measure(ply, p))
        .collect();
    for &(ply, e) in evals.unwrap_or_default() {
        if let Some(row) = ply.checked_sub(1).and_then(|i| rows.get_mut(i)) {
            row.eval_cp = Some(e);
        }
    }
    let mut flag = |ply: usize, f: RowFlags| {
        if let Some(row) = ply.checked_sub(1).and_then(|i| rows.get_mut(i)) {
            row.flags |= f;
        }
    };
    for color in Color::ALL {
        if let Some(m) = queen_sortie(record, color)? {
            flag(ply_of_move(record, color, m), RowFlags::QUEEN_SORTIE);
        }
    }
    if let Some(k) = reconstruction_ply(&positions, Color::White) {
        flag(ply_of_move(record, Color::White, k), RowFlags::RECONSTRUCTION);
    }
    Ok(rows)
}

/// CSV with a header line and one line per row.
pub fn to_csv(rows: &[MetricsRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(CSV_HEADER).expect("in-memory write");
    }
    for row in rows {
        w.serialize(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 csv")
}

pub fn from_csv(text: &str) -> Result<Vec<MetricsRow>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chesscore::{sq, Variant};

    #[test]
    fn initial_counts() {
        for v in Variant::ALL {
            let p = Position::initial(v);
            for c in Color::ALL {
                assert_eq!(development_count(&p, c), 0);
                assert_eq!(center_occupation(&p, c), 0);
            }
        }
    }

    #[test]
    fn castled_king_counts() {
        let p = Position::from_fen(
            "r1bqk2r/pppp1ppp/2n2n2/2b1p3/2B1P3/5N2/PPPP1PPP/RNBQ1RK1 b kq - 5 4",
            Variant::Standard8x8,
        )
        .unwrap();
        assert!(has_castled(&p, Color::White));
        assert_eq!(development_count(&p, Color::White), 4);
        assert_eq!(development_count(&p, Color::Black), 3);
    }

    #[test]
    fn center_after_e4() {
        let p = Position::initial(Variant::Standard8x8);
        let p = p.apply_move(crate::notation::parse_move("e2-e4", &p).unwrap()).unwrap();
        assert_eq!(center_occupation(&p, Color::White), 1);
        assert_eq!(center_squares(&p)[0], sq("d4"));
    }

    #[test]
    fn flags_round_trip() {
        let f = RowFlags::QUEEN_SORTIE | RowFlags::RECONSTRUCTION;
        assert_eq!(f.to_string(), "queen_sortie|reconstruction");
        assert_eq!("queen_sortie|reconstruction".parse::<RowFlags>().unwrap(), f);
        assert_eq!("".parse::<RowFlags>().unwrap(), RowFlags::empty());
    }

    #[test]
    fn constructed_depressions() {
        let rising: Vec<(usize, i32)> = (1..=10).map(|i| (i, -(i as i32) * 40)).collect();
        assert!(depression_spans(&rising, Color::White, 100, 4).len() == 1);
        assert!(depression_spans(&rising, Color::Black, 100, 4).is_empty());
        let drop: Vec<(usize, i32)> = (1..=6).map(|i| (i, 200 - 30 * i as i32)).collect();
        assert_eq!(
            depression_spans(&drop, Color::White, 100, 4),
            vec![DepressionSpan { start_ply: 1, end_ply: 6, drop_cp: 150 }]
        );
    }
}
