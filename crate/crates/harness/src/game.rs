use serde::Serialize;

use corrida_core::chesscore::{Color, DrawRule, Move, Position, Status};
use corrida_core::engines::{finish_record, Engine, EngineError, EngineRef};
use corrida_core::metrics::{metrics_trace, white_view_eval, MetricsRow, RowFlags};
use corrida_core::notation::{format_game, GameId, GameRecord, GameResult, Termination};
use corrida_core::strategy::{
    corrida_adjudicate, passive_reply, reconstruction_ply, Adjudication, OpeningScript, ScriptStep,
};

use crate::config::{MatchConfig, PlayerSpec};
use crate::{derive_seed, HarnessError};

/// Why a game stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    Checkmate,
    Stalemate,
    FiftyMove,
    Threefold,
    /// Ply cap reached; decided by evaluation.
    PlyCap,
    /// White missed the reconstruction deadline on a Corrida board.
    Forfeit,
}

impl EndReason {
    fn from_status(status: Status) -> Option<EndReason> {
        match status {
            Status::Ongoing => None,
            Status::Checkmate => Some(EndReason::Checkmate),
            Status::Stalemate => Some(EndReason::Stalemate),
            Status::DrawByRule(DrawRule::FiftyMove) => Some(EndReason::FiftyMove),
            Status::DrawByRule(DrawRule::Threefold) => Some(EndReason::Threefold),
        }
    }

    /// The status a replay of the game ends in.
    pub fn status(self) -> Status {
        match self {
            EndReason::Checkmate => Status::Checkmate,
            EndReason::Stalemate => Status::Stalemate,
            EndReason::FiftyMove => Status::DrawByRule(DrawRule::FiftyMove),
            EndReason::Threefold => Status::DrawByRule(DrawRule::Threefold),
            EndReason::PlyCap | EndReason::Forfeit => Status::Ongoing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameReport {
    pub index: usize,
    pub seed: u64,
    pub result: GameResult,
    pub termination: Option<Termination>,
    pub end: EndReason,
    pub plies: usize,
    /// The game in the corpus notation.
    pub moves: String,
    pub final_fen: String,
    /// White's move number of its latest return to the initial setup.
    pub reconstruction_ply: Option<usize>,
    /// Why the script was abandoned, if it was.
    pub abort: Option<String>,
    /// White move number at which the fallback engine took over.
    pub handoff_move: Option<usize>,
    /// Reconstruction verdict on Corrida boards.
    pub obligation: Option<Adjudication>,
    pub metrics: Vec<MetricsRow>,
    #[serde(skip)]
    pub record: GameRecord,
}

impl GameReport {
    /// White's score: 1 for a win, 1/2 for a draw.
    pub fn white_score(&self) -> f64 {
        match self.result {
            GameResult::WhiteWins => 1.0,
            GameResult::Draw => 0.5,
            _ => 0.0,
        }
    }
}

enum Player {
    Script {
        script: OpeningScript,
        fallback: Box<dyn Engine>,
        active: bool,
    },
    Engine(Box<dyn Engine>),
    Passive,
}

impl Player {
    fn new(spec: &PlayerSpec, config: &MatchConfig, seed: u64) -> Result<Player, EngineError> {
        let start = |e: &EngineRef| e.with_seed(seed).start(config.variant);
        Ok(match spec {
            PlayerSpec::Scripted { fallback, .. } => Player::Script {
                script: spec
                    .opening_script()
                    .map_err(|e| EngineError::InvalidConfig(e.to_string()))?
                    .expect("scripted spec"),
                fallback: start(fallback)?,
                active: true,
            },
            PlayerSpec::Engine { engine } => Player::Engine(start(engine)?),
            PlayerSpec::Passive => Player::Passive,
        })
    }
}

struct Choice {
    mv: Move,
    /// White-view evaluation, when an engine searched.
    eval: Option<i32>,
}

fn engine_choice(engine: &mut dyn Engine, pos: &Position, history: &[Position]) -> Result<Choice, EngineError> {
    let r = engine.search(pos, history)?;
    let eval = match pos.side_to_move() {
        Color::White => r.eval,
        Color::Black => -r.eval,
    };
    Ok(Choice { mv: r.best, eval: Some(eval) })
}

/// Plays game `index` of `config` with `seed`.
pub fn play_game(config: &MatchConfig, index: usize, seed: u64) -> Result<GameReport, HarnessError> {
    let fail = |error: EngineError| HarnessError::EngineFailure { game: index, error };
    let mut white = Player::new(&config.white, config, derive_seed(seed, 1)).map_err(fail)?;
    let mut black = Player::new(&config.black, config, derive_seed(seed, 2)).map_err(fail)?;
    let rules = &config.adjudication;
    let deadline = rules.corrida_deadline.filter(|_| config.variant.is_corrida());

    let start = Position::initial(config.variant);
    let mut record = GameRecord::new(GameId::Tag(format!("game{:03}", index + 1)), start.clone());
    let mut positions = vec![start.clone()];
    let mut moves: Vec<Move> = Vec::new();
    let mut evals: Vec<(usize, i32)> = Vec::new();
    let mut pos = start;
    let mut abort: Option<(usize, String)> = None;
    let mut handoff_move = None;
    let mut end = None;

    while end.is_none() {
        let history = &positions[..positions.len() - 1];
        let status = if rules.rule_draws {
            pos.status_with_history(history)
        } else {
            pos.status()
        };
        if let Some(reason) = EndReason::from_status(status) {
            end = Some(reason);
            break;
        }
        if let Some(m) = deadline {
            if corrida_adjudicate(&positions, m) == Adjudication::ForfeitWhite {
                record.result = GameResult::BlackWins;
                record.termination = Some(Termination::Adjudicated);
                end = Some(EndReason::Forfeit);
                break;
            }
        }
        if moves.len() >= config.max_plies {
            end = Some(EndReason::PlyCap);
            break;
        }
        let white_move = moves.len() / 2 + 1;
        let player = match pos.side_to_move() {
            Color::White => &mut white,
            Color::Black => &mut black,
        };
        let choice = match player {
            Player::Script { script, fallback, active } => {
                let mut scripted = None;
                if *active {
                    match corrida_core::strategy::script_next(script, &pos, &moves) {
                        ScriptStep::ScriptMove(mv) => scripted = Some(Choice { mv, eval: None }),
                        ScriptStep::Abort(reason) => {
                            abort = Some((moves.len() + 1, format!("{reason:?}")));
                            *active = false;
                        }
                        ScriptStep::Done => *active = false,
                    }
                    if !*active {
                        handoff_move = Some(white_move);
                    }
                }
                match scripted {
                    Some(c) => c,
                    None => engine_choice(fallback.as_mut(), &pos, history).map_err(fail)?,
                }
            }
            Player::Engine(engine) => engine_choice(engine.as_mut(), &pos, history).map_err(fail)?,
            Player::Passive => Choice {
                mv: passive_reply(&pos).ok_or(fail(EngineError::TerminalPosition))?,
                eval: None,
            },
        };
        let next = record
            .push(&pos, choice.mv)
            .map_err(|e| fail(EngineError::ProtocolError(e.to_string())))?;
        moves.push(choice.mv);
        if let Some(e) = choice.eval {
            evals.push((moves.len(), e));
        }
        positions.push(next.clone());
        pos = next;
    }
    let end = end.expect("loop ends with a reason");

    match end {
        EndReason::Forfeit => {}
        EndReason::PlyCap => {
            let depth = rules.eval_depth.max(1);
            let e = white_view_eval(&pos, &EngineRef::Builtin { depth, seed: 0 }, depth).map_err(fail)?;
            record.result = if e.abs() <= rules.draw_band_cp {
                GameResult::Draw
            } else if e > 0 {
                GameResult::WhiteWins
            } else {
                GameResult::BlackWins
            };
            record.termination = Some(Termination::Adjudicated);
        }
        _ => finish_record(&mut record, &pos, &positions[..positions.len() - 1]),
    }

    let mut metrics = metrics_trace(&record, Some(&evals)).map_err(|e| fail(EngineError::ProtocolError(e.reason)))?;
    if let Some((ply, _)) = &abort {
        if let Some(row) = metrics.get_mut(ply - 1) {
            row.flags |= RowFlags::ABORT;
        }
    }
    Ok(GameReport {
        index,
        seed,
        result: record.result,
        termination: record.termination,
        end,
        plies: moves.len(),
        moves: format_game(&record),
        final_fen: pos.to_fen(),
        reconstruction_ply: reconstruction_ply(&positions, Color::White),
        abort: abort.map(|(ply, reason)| format!("ply {ply}: {reason}")),
        handoff_move,
        obligation: deadline.map(|m| corrida_adjudicate(&positions, m)),
        metrics,
        record,
    })
}
