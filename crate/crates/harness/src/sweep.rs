use serde::{Deserialize, Serialize};

use corrida_core::engines::EngineRef;
use corrida_core::strategy::{generate_script, OpeningScript, TrackShape};

use crate::config::{MatchConfig, PlayerSpec};
use crate::report::{run_match, MatchReport};
use crate::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectivenessRow {
    pub n: usize,
    pub games: usize,
    /// White's score fraction.
    pub score: f64,
    pub abort_rate: f64,
    /// Mean over games where White restored its setup; empty when none did.
    pub mean_reconstruction_ply: Option<f64>,
    pub wins: usize,
    pub draws: usize,
    pub losses: usize,
}

pub const EFFECTIVENESS_HEADER: [&str; 8] = [
    "n", "games", "score", "abort_rate", "mean_reconstruction_ply", "wins", "draws", "losses",
];

impl EffectivenessRow {
    fn from_report(n: usize, r: &MatchReport) -> EffectivenessRow {
        let games = r.games.len();
        let aborts = r.games.iter().filter(|g| g.abort.is_some()).count();
        let recon: Vec<f64> = r.games.iter().filter_map(|g| g.reconstruction_ply).map(|k| k as f64).collect();
        EffectivenessRow {
            n,
            games,
            score: r.score,
            abort_rate: if games == 0 { 0.0 } else { aborts as f64 / games as f64 },
            mean_reconstruction_ply: (!recon.is_empty()).then(|| recon.iter().sum::<f64>() / recon.len() as f64),
            wins: r.wins,
            draws: r.draws,
            losses: r.losses,
        }
    }
}

/// White's engine in `base`, or the default builtin.
fn white_engine(base: &MatchConfig) -> EngineRef {
    base.white.engine_ref().cloned().unwrap_or_default()
}

/// `base` with White playing `shape` for `n` moves; `n = 0` lets the engine play White throughout.
fn with_generosity(base: &MatchConfig, shape: TrackShape, n: usize) -> Result<MatchConfig, HarnessError> {
    let engine = white_engine(base);
    let white = if n == 0 {
        PlayerSpec::engine(engine)
    } else {
        let script = generate_script(shape, n, base.variant).map_err(|e| HarnessError::Config(e.to_string()))?;
        match &base.white {
            PlayerSpec::Scripted { policy, .. } => PlayerSpec::scripted(&script.with_policy(*policy), engine),
            _ => PlayerSpec::scripted(&script, engine),
        }
    };
    Ok(MatchConfig { white, ..base.clone() })
}

/// One row per distinct value of `ns`, in ascending order. Every N plays the seeds of `base`.
pub fn sweep_n(base: &MatchConfig, shape: TrackShape, ns: &[usize]) -> Result<Vec<(EffectivenessRow, MatchReport)>, HarnessError> {
    if ns.is_empty() {
        return Err(HarnessError::Config("no N values".into()));
    }
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let configs = ns
        .iter()
        .map(|&n| with_generosity(base, shape, n))
        .collect::<Result<Vec<_>, _>>()?;
    ns.into_iter()
        .zip(configs)
        .map(|(n, c)| {
            let report = run_match(&c)?;
            Ok((EffectivenessRow::from_report(n, &report), report))
        })
        .collect()
}

pub fn effectiveness_csv(rows: &[EffectivenessRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(EFFECTIVENESS_HEADER).expect("in-memory write");
    }
    for row in rows {
        w.serialize(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 csv")
}

/// White follows `script`, after which `engine` plays both sides; without a script the engine
/// plays both sides from the initial position.
pub fn handoff_autoplay(
    script: Option<&OpeningScript>,
    engine: &EngineRef,
    base: &MatchConfig,
) -> Result<MatchReport, HarnessError> {
    let white = match script {
        Some(s) => PlayerSpec::scripted(s, engine.clone()),
        None => PlayerSpec::engine(engine.clone()),
    };
    let config = MatchConfig {
        variant: script.map_or(base.variant, |s| s.variant),
        white,
        black: PlayerSpec::engine(engine.clone()),
        ..base.clone()
    };
    run_match(&config)
}
