//! Generous-start opening scripts: knight dances that hand the opponent free tempi and end with
//! White's setup restored, plus the threat watch that cuts a dance short and the Corrida
//! reconstruction obligation.

mod reconstruction;
mod threats;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chesscore::{sq, Color, Move, PieceKind, Position, Square, Variant};

pub use reconstruction::{corrida_adjudicate, reconstruction_ply, Adjudication, DEFAULT_DEADLINE};
pub use threats::{attackers, detect_threats, mate_in, see, Threat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TrackShape {
    SingleShuttle,
    TwoKnightShuttle,
    LeafLoops,
    ParallelTracks,
    LongTour,
}

impl TrackShape {
    pub const ALL: [TrackShape; 5] = [
        TrackShape::SingleShuttle,
        TrackShape::TwoKnightShuttle,
        TrackShape::LeafLoops,
        TrackShape::ParallelTracks,
        TrackShape::LongTour,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TrackShape::SingleShuttle => "SINGLE_SHUTTLE",
            TrackShape::TwoKnightShuttle => "TWO_KNIGHT_SHUTTLE",
            TrackShape::LeafLoops => "LEAF_LOOPS",
            TrackShape::ParallelTracks => "PARALLEL_TRACKS",
            TrackShape::LongTour => "LONG_TOUR",
        }
    }

    /// Is `n` a script length this shape supports?
    pub fn feasible(self, n: usize) -> bool {
        match self {
            TrackShape::SingleShuttle => (2..=MAX_FREE_MOVES).contains(&n) && n.is_multiple_of(2),
            TrackShape::TwoKnightShuttle => (4..=MAX_FREE_MOVES).contains(&n) && n.is_multiple_of(2),
            TrackShape::LeafLoops | TrackShape::ParallelTracks => n == 8,
            TrackShape::LongTour => n == 10,
        }
    }
}

impl fmt::Display for TrackShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TrackShape {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        TrackShape::ALL
            .into_iter()
            .find(|t| t.name() == norm)
            .ok_or_else(|| StrategyError::BadScript(format!("unknown track shape {s:?}")))
    }
}

pub const MAX_FREE_MOVES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StrategyError {
    #[error("{shape} cannot be played with N = {n}")]
    InfeasibleScript { shape: TrackShape, n: usize },
    #[error("bad script: {0}")]
    BadScript(String),
}

/// One planned knight move of a script.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PlannedMove {
    pub from: Square,
    pub to: Square,
}

impl fmt::Display for PlannedMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N{}-{}", self.from, self.to)
    }
}

impl FromStr for PlannedMove {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || StrategyError::BadScript(format!("bad planned move {s:?}"));
        let body = s.trim().strip_prefix('N').ok_or_else(bad)?;
        let (from, to) = body.split_once('-').ok_or_else(bad)?;
        Ok(PlannedMove {
            from: Square::parse(from).ok_or_else(bad)?,
            to: Square::parse(to).ok_or_else(bad)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThreatPolicy {
    pub check_abort: bool,
    /// Minimum static-exchange loss, in centipawns, that counts as a hanging piece.
    pub hanging_material_threshold: u32,
    /// Attacker mates searched up to this many attacker moves; 0 disables the scan.
    pub mate_in_k_scan: u32,
}

impl Default for ThreatPolicy {
    fn default() -> Self {
        ThreatPolicy {
            check_abort: true,
            hanging_material_threshold: 200,
            mate_in_k_scan: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpeningScript {
    pub shape: TrackShape,
    pub variant: Variant,
    pub planned: Vec<PlannedMove>,
    pub abort_policy: ThreatPolicy,
}

impl OpeningScript {
    /// Number of free moves the script hands over.
    pub fn n(&self) -> usize {
        self.planned.len()
    }

    pub fn with_policy(mut self, policy: ThreatPolicy) -> Self {
        self.abort_policy = policy;
        self
    }
}

struct Knights {
    king: [Square; 8],
    queen: [Square; 4],
    tour: [Square; 4],
}

fn knights(variant: Variant) -> Knights {
    let s = |names: &[&str]| -> Vec<Square> { names.iter().map(|n| sq(n)).collect() };
    let (king, queen, tour) = match variant {
        Variant::Corrida10x10 => (
            // home, shuttle square, leaf loop (3 squares), parallel loop (3 squares)
            s(&["i1", "h3", "j3", "i5", "h3", "h3", "i5", "j3"]),
            s(&["b1", "c3", "b5", "a3"]),
            s(&["j3", "h4", "f3", "a3"]),
        ),
        Variant::Standard8x8 | Variant::Corrida8x10 => (
            s(&["g1", "f3", "h3", "g5", "f3", "f3", "g5", "h3"]),
            s(&["b1", "c3", "b5", "a3"]),
            s(&["h3", "f4", "d3", "a3"]),
        ),
    };
    Knights {
        king: king.try_into().unwrap(),
        queen: queen.try_into().unwrap(),
        tour: tour.try_into().unwrap(),
    }
}

fn path(squares: &[Square]) -> Vec<PlannedMove> {
    squares
        .windows(2)
        .map(|w| PlannedMove { from: w[0], to: w[1] })
        .collect()
}

/// Builds the planned White moves for a shape.
///
/// Interleavings: TWO_KNIGHT_SHUTTLE plays the queenside knight's ceil(S/2) shuttles before the
/// kingside knight's, S = N/2. LEAF_LOOPS plays three kingside legs, the whole queenside loop,
/// then the kingside return. PARALLEL_TRACKS alternates the two loops leg by leg, kingside first.
/// LONG_TOUR runs the kingside knight out three squares and back, shuttles the queenside knight
/// to the rim, then shuttles the kingside knight once.
pub fn generate_script(shape: TrackShape, n: usize, variant: Variant) -> Result<OpeningScript, StrategyError> {
    if !shape.feasible(n) {
        return Err(StrategyError::InfeasibleScript { shape, n });
    }
    let k = knights(variant);
    let [kh, ks, l1, l2, l3, p1, p2, p3] = k.king;
    let [qh, qs, q2, q3] = k.queen;
    let shuttle = |home: Square, out: Square, times: usize| -> Vec<PlannedMove> {
        (0..times)
            .flat_map(|_| path(&[home, out, home]))
            .collect()
    };
    let planned = match shape {
        TrackShape::SingleShuttle => shuttle(kh, ks, n / 2),
        TrackShape::TwoKnightShuttle => {
            let s = n / 2;
            let mut v = shuttle(qh, qs, s.div_ceil(2));
            v.extend(shuttle(kh, ks, s / 2));
            v
        }
        TrackShape::LeafLoops => {
            let king_loop = path(&[kh, l1, l2, l3, kh]);
            let mut v = king_loop[..3].to_vec();
            v.extend(path(&[qh, qs, q2, q3, qh]));
            v.push(king_loop[3]);
            v
        }
        TrackShape::ParallelTracks => {
            let a = path(&[kh, p1, p2, p3, kh]);
            let b = path(&[qh, qs, q2, q3, qh]);
            a.into_iter().zip(b).flat_map(|(x, y)| [x, y]).collect()
        }
        TrackShape::LongTour => {
            let [t1, t2, t3, rim] = k.tour;
            let mut v = path(&[kh, t1, t2, t3, t2, t1, kh]);
            v.extend(path(&[qh, rim, qh]));
            v.extend(path(&[kh, ks, kh]));
            v
        }
    };
    debug_assert_eq!(planned.len(), n);
    Ok(OpeningScript {
        shape,
        variant,
        planned,
        abort_policy: ThreatPolicy::default(),
    })
}

/// Checks that a move list is a dance: knight moves only, and White's setup restored at the end
/// when the opponent passes throughout.
pub fn validate_plan(variant: Variant, planned: &[PlannedMove]) -> Result<(), StrategyError> {
    let start = Position::initial(variant);
    let mut pos = start.clone();
    for pm in planned {
        let mv = find_planned(&pos, *pm).ok_or_else(|| {
            StrategyError::BadScript(format!("{pm} is not a legal knight move on an empty opponent side"))
        })?;
        pos = pos.apply_move(mv).expect("legal").null_move().expect("not in check");
    }
    if planned.is_empty() || !pos.same_placement_for(&start, Color::White) {
        return Err(StrategyError::BadScript("the dance does not restore White's setup".into()));
    }
    Ok(())
}

fn find_planned(pos: &Position, pm: PlannedMove) -> Option<Move> {
    let piece = pos.piece_at(pm.from)?;
    if piece.kind != PieceKind::Knight || piece.color != pos.side_to_move() {
        return None;
    }
    pos.legal_moves()
        .into_iter()
        .find(|m| m.from == pm.from && m.to == pm.to && !m.is_capture())
}

impl fmt::Display for OpeningScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}:", self.shape, self.n(), self.variant)?;
        for pm in &self.planned {
            write!(f, " {pm}")?;
        }
        Ok(())
    }
}

/// Script text: `SHAPE N [VARIANT][: Nxx-yy ...]`. Without a move list the canonical dance is
/// generated; with one, the list must be a valid dance of length N.
impl FromStr for OpeningScript {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (head, moves) = match s.split_once(':') {
            Some((h, m)) => (h, Some(m)),
            None => (s, None),
        };
        let mut words = head.split_whitespace();
        let shape: TrackShape = words
            .next()
            .ok_or_else(|| StrategyError::BadScript("empty script".into()))?
            .parse()?;
        let n: usize = words
            .next()
            .and_then(|w| w.parse().ok())
            .ok_or_else(|| StrategyError::BadScript(format!("missing N in {s:?}")))?;
        let variant = match words.next() {
            Some(w) => w.parse().map_err(|_| StrategyError::BadScript(format!("unknown variant {w:?}")))?,
            None => Variant::Standard8x8,
        };
        if let Some(extra) = words.next() {
            return Err(StrategyError::BadScript(format!("unexpected {extra:?}")));
        }
        let mut script = generate_script(shape, n, variant)?;
        if let Some(m) = moves.filter(|m| !m.trim().is_empty()) {
            let planned = m
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<Vec<PlannedMove>, _>>()?;
            if planned.len() != n {
                return Err(StrategyError::BadScript(format!(
                    "{} planned moves for N = {n}",
                    planned.len()
                )));
            }
            validate_plan(variant, &planned)?;
            script.planned = planned;
        }
        Ok(script)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AbortReason {
    Threat(Threat),
    /// White's earlier moves in the history are not the script's.
    OffScript { white_move: usize },
    /// The planned move is not legal here, typically because a square is occupied.
    Blocked(PlannedMove),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScriptStep {
    ScriptMove(Move),
    Abort(AbortReason),
    Done,
}

/// Next action of a script given the game so far. `history` holds the moves from the variant's
/// initial position up to `position`, which must have White to move.
pub fn script_next(script: &OpeningScript, position: &Position, history: &[Move]) -> ScriptStep {
    let start = Position::initial(script.variant);
    let mut pos = start;
    let mut white_moves = Vec::new();
    for &mv in history {
        if pos.side_to_move() == Color::White {
            white_moves.push(mv);
        }
        pos = pos.play_unchecked(mv);
    }
    let index = white_moves.len();
    for (i, (&played, planned)) in white_moves.iter().zip(&script.planned).enumerate() {
        if played.from != planned.from || played.to != planned.to {
            return ScriptStep::Abort(AbortReason::OffScript { white_move: i + 1 });
        }
    }
    if index >= script.n() {
        return ScriptStep::Done;
    }
    if position.side_to_move() != Color::White {
        return ScriptStep::Abort(AbortReason::OffScript { white_move: index + 1 });
    }
    let policy = &script.abort_policy;
    if policy.check_abort && position.in_check() {
        return ScriptStep::Abort(AbortReason::Threat(Threat::InCheck));
    }
    let planned = script.planned[index];
    let Some(mv) = find_planned(position, planned) else {
        return ScriptStep::Abort(AbortReason::Blocked(planned));
    };
    let after = position.play_unchecked(mv);
    if let Some(t) = detect_threats(&after, Color::White, policy).into_iter().next() {
        return ScriptStep::Abort(AbortReason::Threat(t));
    }
    ScriptStep::ScriptMove(mv)
}

/// Opponent that never attacks: shuttles its kingside knight between home and the rim, falling
/// back to the first quiet legal move in generation order.
pub fn passive_reply(position: &Position) -> Option<Move> {
    let moves = position.legal_moves();
    let color = position.side_to_move();
    let v = position.variant();
    let (home, rim) = match v {
        Variant::Corrida10x10 => (sq("i1"), sq("j3")),
        _ => (sq("g1"), sq("h3")),
    };
    let (home, rim) = match color {
        Color::White => (home, rim),
        Color::Black => (home.flip_rank(v), rim.flip_rank(v)),
    };
    let pick = |from: Square, to: Square| moves.iter().copied().find(|m| m.from == from && m.to == to);
    pick(home, rim)
        .or_else(|| pick(rim, home))
        .or_else(|| moves.iter().copied().find(|m| !m.is_capture()))
        .or_else(|| moves.first().copied())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(s: &OpeningScript) -> Vec<String> {
        s.planned.iter().map(|p| p.to_string()).collect()
    }

    #[test]
    fn shuttle_examples() {
        let s = generate_script(TrackShape::SingleShuttle, 4, Variant::Standard8x8).unwrap();
        assert_eq!(names(&s), ["Ng1-f3", "Nf3-g1", "Ng1-f3", "Nf3-g1"]);
        let s = generate_script(TrackShape::TwoKnightShuttle, 6, Variant::Standard8x8).unwrap();
        assert_eq!(
            names(&s),
            ["Nb1-c3", "Nc3-b1", "Nb1-c3", "Nc3-b1", "Ng1-f3", "Nf3-g1"]
        );
    }

    #[test]
    fn loops_follow_corpus_order() {
        let s = generate_script(TrackShape::LeafLoops, 8, Variant::Standard8x8).unwrap();
        assert_eq!(
            names(&s),
            ["Ng1-h3", "Nh3-g5", "Ng5-f3", "Nb1-c3", "Nc3-b5", "Nb5-a3", "Na3-b1", "Nf3-g1"]
        );
        let s = generate_script(TrackShape::ParallelTracks, 8, Variant::Standard8x8).unwrap();
        assert_eq!(
            names(&s),
            ["Ng1-f3", "Nb1-c3", "Nf3-g5", "Nc3-b5", "Ng5-h3", "Nb5-a3", "Nh3-g1", "Na3-b1"]
        );
        let s = generate_script(TrackShape::LongTour, 10, Variant::Standard8x8).unwrap();
        assert_eq!(
            names(&s),
            [
                "Ng1-h3", "Nh3-f4", "Nf4-d3", "Nd3-f4", "Nf4-h3", "Nh3-g1", "Nb1-a3", "Na3-b1",
                "Ng1-f3", "Nf3-g1"
            ]
        );
    }

    #[test]
    fn infeasible_lengths() {
        for (shape, n) in [
            (TrackShape::SingleShuttle, 3),
            (TrackShape::SingleShuttle, 14),
            (TrackShape::TwoKnightShuttle, 2),
            (TrackShape::LeafLoops, 6),
            (TrackShape::ParallelTracks, 10),
            (TrackShape::LongTour, 8),
        ] {
            assert_eq!(
                generate_script(shape, n, Variant::Standard8x8),
                Err(StrategyError::InfeasibleScript { shape, n })
            );
        }
    }

    #[test]
    fn every_dance_is_valid_on_every_board() {
        for v in Variant::ALL {
            for shape in TrackShape::ALL {
                for n in 1..=MAX_FREE_MOVES {
                    if let Ok(s) = generate_script(shape, n, v) {
                        validate_plan(v, &s.planned).unwrap_or_else(|e| panic!("{shape} {n} {v}: {e}"));
                    }
                }
            }
        }
    }

    #[test]
    fn script_text_round_trip() {
        let s = generate_script(TrackShape::LeafLoops, 8, Variant::Corrida10x10).unwrap();
        let text = s.to_string();
        assert!(text.starts_with("LEAF_LOOPS 8 "));
        assert_eq!(text.parse::<OpeningScript>().unwrap(), s);
        let short: OpeningScript = "two_knight_shuttle 4".parse().unwrap();
        assert_eq!(short.planned.len(), 4);
        let custom: OpeningScript = "SINGLE_SHUTTLE 2: Ng1-h3 Nh3-g1".parse().unwrap();
        assert_eq!(custom.planned[0].to, sq("h3"));
        assert!("SINGLE_SHUTTLE 2: Ng1-h3 Nh3-f4".parse::<OpeningScript>().is_err());
        assert!("SINGLE_SHUTTLE 2: Ng1-f3".parse::<OpeningScript>().is_err());
    }
}
