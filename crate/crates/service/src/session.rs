use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use corrida_core::chesscore::{Color, Move, Position, Status, Variant};
use corrida_core::engines::EngineRef;
use corrida_core::metrics::MetricsRow;
use corrida_core::notation::{format_move, parse_move, GameId, GameRecord, GameResult, Termination};
use corrida_core::strategy::{
    corrida_adjudicate, generate_script, script_next, Adjudication, OpeningScript, ScriptStep, TrackShape,
    DEFAULT_DEADLINE,
};

use crate::ServiceError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptRequest {
    pub shape: TrackShape,
    pub n: usize,
}

/// Parameters of a new session, as posted by clients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CreateSession {
    pub variant: Variant,
    pub human_color: Color,
    #[serde(default)]
    pub engine: EngineRef,
    /// Attach a generated opening script for the human side.
    #[serde(default)]
    pub script: Option<ScriptRequest>,
    /// Reconstruction deadline in White moves on Corrida boards.
    #[serde(default)]
    pub deadline: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "ply")]
pub enum ObligationStatus {
    Pending,
    Met(usize),
    Forfeited,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obligation {
    pub deadline: usize,
    #[serde(flatten)]
    pub status: ObligationStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    MoveApplied,
    EngineThinking,
    GameOver,
    ObligationUpdate,
    MetricsUpdate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub session: String,
    pub seq: u64,
    pub kind: EventKind,
    pub payload: Value,
}

/// Client view of a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub id: String,
    pub variant: Variant,
    pub human_color: Color,
    pub engine: EngineRef,
    pub seq: u64,
    pub fen: String,
    pub side_to_move: Color,
    pub ply: usize,
    /// Moves so far in the corpus notation.
    pub history: Vec<String>,
    pub legal_moves: Vec<String>,
    pub last_move: Option<String>,
    pub obligation: Option<Obligation>,
    pub metrics: MetricsRow,
    pub result: GameResult,
    pub termination: Option<Termination>,
    pub game_over: bool,
    pub engine_thinking: bool,
    pub script: Option<String>,
    /// Next scripted move for the human, or why the script no longer applies.
    pub script_hint: Option<String>,
}

/// Game state and event log of one session. All mutation goes through here.
#[derive(Debug, Clone)]
pub struct SessionCore {
    pub id: String,
    pub params: CreateSession,
    script: Option<OpeningScript>,
    record: GameRecord,
    positions: Vec<Position>,
    events: Vec<Event>,
    obligation: Option<Obligation>,
    over: bool,
}

impl SessionCore {
    pub fn new(id: String, params: CreateSession) -> Result<SessionCore, ServiceError> {
        params
            .engine
            .validate(params.variant)
            .map_err(|e| ServiceError::UnsupportedCombination(e.to_string()))?;
        let script = match &params.script {
            Some(s) => {
                if params.human_color != Color::White {
                    return Err(ServiceError::UnsupportedCombination("opening scripts are for White".into()));
                }
                Some(
                    generate_script(s.shape, s.n, params.variant)
                        .map_err(|e| ServiceError::UnsupportedCombination(e.to_string()))?,
                )
            }
            None => None,
        };
        let start = Position::initial(params.variant);
        let obligation = params.variant.is_corrida().then(|| Obligation {
            deadline: params.deadline.unwrap_or(DEFAULT_DEADLINE).max(1),
            status: ObligationStatus::Pending,
        });
        let mut core = SessionCore {
            id: id.clone(),
            record: GameRecord::new(GameId::Tag(id), start.clone()),
            positions: vec![start],
            params,
            script,
            events: Vec::new(),
            obligation,
            over: false,
        };
        core.after_move();
        Ok(core)
    }

    pub fn position(&self) -> &Position {
        self.positions.last().expect("start position")
    }

    /// Positions before the current one, oldest first.
    pub fn history(&self) -> &[Position] {
        &self.positions[..self.positions.len() - 1]
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn record(&self) -> &GameRecord {
        &self.record
    }

    pub fn seq(&self) -> u64 {
        self.events.len() as u64
    }

    pub fn is_over(&self) -> bool {
        self.over
    }

    /// Events with sequence numbers above `from`.
    pub fn events_after(&self, from: u64) -> &[Event] {
        &self.events[(from as usize).min(self.events.len())..]
    }

    pub fn engine_to_move(&self) -> bool {
        !self.over && self.position().side_to_move() != self.params.human_color
    }

    fn emit(&mut self, kind: EventKind, payload: Value) {
        let seq = self.seq() + 1;
        self.events.push(Event {
            session: self.id.clone(),
            seq,
            kind,
            payload,
        });
    }

    /// Resolves move text (corpus notation or coordinates such as `g1h3`) against the current position.
    pub fn resolve(&self, text: &str) -> Result<Move, ServiceError> {
        let pos = self.position();
        let text = text.trim();
        let ply = self.record.plies.len() + 1;
        if let Some(mv) = pos.legal_moves().into_iter().find(|m| m.to_coordinate() == text) {
            return Ok(mv);
        }
        parse_move(text, pos).map_err(|e| ServiceError::IllegalMove {
            reason: e.to_string(),
            ply,
        })
    }

    /// Applies a move by the human player.
    pub fn submit(&mut self, text: &str) -> Result<usize, ServiceError> {
        if self.over {
            return Err(ServiceError::SessionClosed);
        }
        if self.engine_to_move() {
            return Err(ServiceError::NotYourTurn);
        }
        let mv = self.resolve(text)?;
        self.play(mv)
    }

    /// Applies a move by the engine.
    pub fn engine_move(&mut self, mv: Move) -> Result<usize, ServiceError> {
        if self.over {
            return Err(ServiceError::SessionClosed);
        }
        if !self.engine_to_move() {
            return Err(ServiceError::NotYourTurn);
        }
        self.play(mv)
    }

    /// Applies a logged move regardless of whose turn it is.
    pub(crate) fn restore_move(&mut self, text: &str) -> Result<usize, ServiceError> {
        if self.over {
            return Err(ServiceError::SessionClosed);
        }
        let mv = self.resolve(text)?;
        self.play(mv)
    }

    /// Text of the latest move, as written to the move log.
    pub fn last_move_text(&self) -> Option<String> {
        let ply = self.record.plies.last()?;
        format_move(ply.mv, &self.positions[self.positions.len() - 2]).ok()
    }

    /// Ends the game after an engine failure.
    pub fn engine_failed(&mut self, message: &str) {
        if self.over {
            return;
        }
        self.over = true;
        self.emit(
            EventKind::GameOver,
            json!({ "result": GameResult::Unfinished.token(), "termination": null, "reason": format!("engine failure: {message}") }),
        );
    }

    fn play(&mut self, mv: Move) -> Result<usize, ServiceError> {
        let ply = self.record.plies.len() + 1;
        let pos = self.position().clone();
        let text = format_move(mv, &pos).map_err(|e| ServiceError::IllegalMove {
            reason: e.to_string(),
            ply,
        })?;
        let next = self.record.push(&pos, mv).map_err(|e| ServiceError::IllegalMove {
            reason: e.to_string(),
            ply,
        })?;
        self.positions.push(next);
        let fen = self.position().to_fen();
        self.emit(
            EventKind::MoveApplied,
            json!({ "ply": ply, "by": pos.side_to_move(), "move": text, "coordinate": mv.to_coordinate(), "fen": fen }),
        );
        let row = MetricsRow::measure(ply, self.position());
        self.emit(EventKind::MetricsUpdate, serde_json::to_value(row).expect("row serializes"));
        self.after_move();
        Ok(ply)
    }

    fn finish(&mut self, result: GameResult, termination: Termination, reason: &str) {
        self.record.result = result;
        self.record.termination = Some(termination);
        self.over = true;
        self.emit(
            EventKind::GameOver,
            json!({ "result": result.token(), "termination": termination, "reason": reason }),
        );
    }

    fn after_move(&mut self) {
        if let Some(ob) = self.obligation {
            if ob.status == ObligationStatus::Pending {
                let status = match corrida_adjudicate(&self.positions, ob.deadline) {
                    Adjudication::Ok(k) => ObligationStatus::Met(k),
                    Adjudication::ForfeitWhite => ObligationStatus::Forfeited,
                    Adjudication::Pending => ObligationStatus::Pending,
                };
                if status != ObligationStatus::Pending {
                    let ob = Obligation { status, ..ob };
                    self.obligation = Some(ob);
                    self.emit(EventKind::ObligationUpdate, serde_json::to_value(ob).expect("obligation serializes"));
                }
            }
        }
        let status = self.position().status_with_history(self.history());
        match status {
            Status::Checkmate => {
                let result = match self.position().side_to_move() {
                    Color::White => GameResult::BlackWins,
                    Color::Black => GameResult::WhiteWins,
                };
                self.finish(result, Termination::Checkmate, "checkmate");
            }
            Status::Stalemate => self.finish(GameResult::Draw, Termination::Adjudicated, "stalemate"),
            Status::DrawByRule(rule) => {
                let reason = serde_json::to_value(rule).expect("rule serializes");
                self.finish(GameResult::Draw, Termination::Adjudicated, reason.as_str().unwrap_or("draw"));
            }
            Status::Ongoing => {
                if self.obligation.map(|o| o.status) == Some(ObligationStatus::Forfeited) {
                    self.finish(GameResult::BlackWins, Termination::Adjudicated, "reconstruction deadline missed");
                } else if self.engine_to_move() {
                    let ply = self.record.plies.len() + 1;
                    self.emit(EventKind::EngineThinking, json!({ "ply": ply }));
                }
            }
        }
    }

    fn script_hint(&self) -> Option<String> {
        let script = self.script.as_ref()?;
        if self.over || self.engine_to_move() {
            return None;
        }
        Some(match script_next(script, self.position(), &self.record.moves()) {
            ScriptStep::ScriptMove(mv) => format_move(mv, self.position()).unwrap_or_else(|_| mv.to_coordinate()),
            ScriptStep::Abort(reason) => format!("abort: {reason:?}"),
            ScriptStep::Done => "done".into(),
        })
    }

    pub fn snapshot(&self) -> Snapshot {
        let pos = self.position();
        let legal_moves = if self.over {
            Vec::new()
        } else {
            pos.legal_moves()
                .into_iter()
                .filter_map(|m| format_move(m, pos).ok())
                .collect()
        };
        let history: Vec<String> = self
            .record
            .plies
            .iter()
            .zip(&self.positions)
            .map(|(p, before)| format_move(p.mv, before).unwrap_or_else(|_| p.token.clone()))
            .collect();
        Snapshot {
            id: self.id.clone(),
            variant: self.params.variant,
            human_color: self.params.human_color,
            engine: self.params.engine.clone(),
            seq: self.seq(),
            fen: pos.to_fen(),
            side_to_move: pos.side_to_move(),
            ply: self.record.plies.len(),
            last_move: self.record.plies.last().map(|p| p.mv.to_coordinate()),
            history,
            legal_moves,
            obligation: self.obligation,
            metrics: MetricsRow::measure(self.record.plies.len(), pos),
            result: self.record.result,
            termination: self.record.termination,
            game_over: self.over,
            engine_thinking: self.engine_to_move(),
            script: self.script.as_ref().map(|s| s.to_string()),
            script_hint: self.script_hint(),
        }
    }
}
