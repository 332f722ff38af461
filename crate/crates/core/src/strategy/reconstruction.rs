use crate::chesscore::{Color, Position};

/// Default number of White moves allowed for restoring the initial setup on Corrida boards.
pub const DEFAULT_DEADLINE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Adjudication {
    /// White restored its setup; the move number of the latest restoration within the deadline.
    Ok(usize),
    ForfeitWhite,
    /// Deadline not reached and no restoration yet.
    Pending,
}

/// Move numbers k ≥ 2 after which `color`'s pieces all stand on their initial squares.
fn restorations(history: &[Position], color: Color) -> Vec<usize> {
    let Some(first) = history.first() else {
        return Vec::new();
    };
    let initial = Position::initial(first.variant());
    let mut out = Vec::new();
    let mut k = 0;
    for pair in history.windows(2) {
        if pair[0].side_to_move() != color {
            continue;
        }
        k += 1;
        if k >= 2 && pair[1].same_placement_for(&initial, color) {
            out.push(k);
        }
    }
    out
}

/// The move number of `color`'s latest return to its initial setup (from its second move on).
/// `history` holds the positions of a game, starting position first.
pub fn reconstruction_ply(history: &[Position], color: Color) -> Option<usize> {
    restorations(history, color).last().copied()
}

fn moves_made(history: &[Position], color: Color) -> usize {
    history
        .windows(2)
        .filter(|p| p[0].side_to_move() == color)
        .count()
}

/// Judges the Corrida obligation with a deadline of `deadline` White moves.
pub fn corrida_adjudicate(history: &[Position], deadline: usize) -> Adjudication {
    match restorations(history, Color::White)
        .into_iter()
        .take_while(|&k| k <= deadline)
        .last()
    {
        Some(k) => Adjudication::Ok(k),
        None if moves_made(history, Color::White) >= deadline => Adjudication::ForfeitWhite,
        None => Adjudication::Pending,
    }
}
