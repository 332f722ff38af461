use serde::Serialize;

use corrida_core::chesscore::{piece_value, Color, PieceKind, Position, Status};
use corrida_core::metrics::{metrics_trace, queen_sortie, MetricsRow};
use corrida_core::notation::{load_corpus, replay, GameId, GameRecord, Termination};
use corrida_core::strategy::reconstruction_ply;

use crate::HarnessError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusRow {
    pub game: u8,
    /// "legal", or the first illegal ply and reason.
    pub verdict: String,
    pub plies: usize,
    pub result: &'static str,
    pub termination: Option<Termination>,
    pub final_status: String,
    /// Plies replaced from the errata ledger.
    pub errata: usize,
    pub material_white: i32,
    pub material_black: i32,
    /// Black's move number of an early queen sortie.
    pub queen_sortie_black: Option<usize>,
    /// White's move number of its latest return to the initial setup.
    pub reconstruction: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusReport {
    pub rows: Vec<CorpusRow>,
    pub metrics: Vec<(u8, Vec<MetricsRow>)>,
}

impl CorpusReport {
    pub fn rows_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 csv")
    }

    pub fn metrics_csv(&self) -> String {
        metrics_csv(&self.metrics)
    }
}

fn material(pos: &Position, color: Color) -> i32 {
    pos.pieces_of(color)
        .filter(|(_, p)| p.kind != PieceKind::King)
        .map(|(_, p)| piece_value(p.kind))
        .sum()
}

/// Per-ply metrics of several games, with a leading `game` label column.
pub fn metrics_csv<L: ToString>(games: &[(L, Vec<MetricsRow>)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["game"];
    header.extend(corrida_core::metrics::CSV_HEADER);
    w.write_record(&header).expect("in-memory write");
    for (game, rows) in games {
        for r in rows {
            w.write_record([
                game.to_string(),
                r.ply.to_string(),
                r.development_white.to_string(),
                r.development_black.to_string(),
                r.coordination_white.to_string(),
                r.coordination_black.to_string(),
                r.center_white.to_string(),
                r.center_black.to_string(),
                r.eval_cp.map(|e| e.to_string()).unwrap_or_default(),
                r.flags.to_string(),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 csv")
}

fn ordinal(record: &GameRecord) -> u8 {
    match record.id {
        GameId::Corpus(n) => n,
        GameId::Tag(_) => 0,
    }
}

fn validate_game(record: &GameRecord) -> (CorpusRow, Vec<MetricsRow>) {
    let game = ordinal(record);
    let errata = record.plies.iter().filter(|p| p.corrected).count();
    let mut row = CorpusRow {
        game,
        verdict: "legal".into(),
        plies: record.plies.len(),
        result: record.result.token(),
        termination: record.termination,
        final_status: String::new(),
        errata,
        material_white: 0,
        material_black: 0,
        queen_sortie_black: None,
        reconstruction: None,
    };
    let positions = match replay(record) {
        Ok(p) => p,
        Err(e) => {
            row.verdict = format!("illegal at ply {}: {}", e.ply, e.reason);
            return (row, Vec::new());
        }
    };
    let last = positions.last().expect("start position");
    row.final_status = match last.status_with_history(&positions[..positions.len() - 1]) {
        Status::Ongoing => "ongoing".into(),
        Status::Checkmate => "checkmate".into(),
        Status::Stalemate => "stalemate".into(),
        Status::DrawByRule(r) => format!("{r:?}").to_lowercase(),
    };
    row.material_white = material(last, Color::White);
    row.material_black = material(last, Color::Black);
    row.queen_sortie_black = queen_sortie(record, Color::Black).ok().flatten();
    row.reconstruction = reconstruction_ply(&positions, Color::White);
    let metrics = metrics_trace(record, None).unwrap_or_default();
    (row, metrics)
}

/// Replays the bundled corpus: one row per game plus every game's metrics.
pub fn validate_corpus() -> Result<CorpusReport, HarnessError> {
    let corpus = load_corpus().map_err(|e| HarnessError::Corpus(e.to_string()))?;
    let (rows, metrics) = corpus
        .games
        .iter()
        .map(|g| {
            let (row, m) = validate_game(g);
            (row, (ordinal(g), m))
        })
        .unzip();
    Ok(CorpusReport { rows, metrics })
}
