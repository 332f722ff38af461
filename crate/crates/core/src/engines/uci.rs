use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::chesscore::{Move, Position, Variant};

use super::{Engine, EngineError, SearchResult, MATE};

const HANDSHAKE_TIMEOUT: Duration = Duration::from_secs(5);
const DEPTH_SEARCH_TIMEOUT: Duration = Duration::from_secs(60);
const MOVETIME_GRACE: Duration = Duration::from_secs(5);
const STOP_GRACE: Duration = Duration::from_secs(1);

/// First tokens an engine may legitimately send.
const KNOWN_REPLIES: [&str; 8] = [
    "id",
    "option",
    "uciok",
    "readyok",
    "info",
    "bestmove",
    "copyprotection",
    "registration",
];

/// Search limit for an external engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UciLimit {
    Depth(u32),
    /// Milliseconds per move.
    Movetime(u64),
}

impl UciLimit {
    fn go_command(self) -> String {
        match self {
            UciLimit::Depth(d) => format!("go depth {d}"),
            UciLimit::Movetime(ms) => format!("go movetime {ms}"),
        }
    }

    fn default_timeout(self) -> Duration {
        match self {
            UciLimit::Depth(_) => DEPTH_SEARCH_TIMEOUT,
            UciLimit::Movetime(ms) => Duration::from_millis(ms) + MOVETIME_GRACE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UciPosition {
    Fen(String),
    StartPos(Vec<String>),
}

impl UciPosition {
    fn command(&self) -> String {
        match self {
            UciPosition::Fen(fen) => format!("position fen {fen}"),
            UciPosition::StartPos(moves) if moves.is_empty() => "position startpos".to_string(),
            UciPosition::StartPos(moves) => format!("position startpos moves {}", moves.join(" ")),
        }
    }
}

/// A child process speaking UCI. Every wait is bounded; a search that overruns is sent `stop`.
pub struct UciEngine {
    path: PathBuf,
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
    limit: UciLimit,
    search_timeout: Duration,
    name: Option<String>,
}

impl UciEngine {
    pub fn start(path: &Path, limit: UciLimit) -> Result<UciEngine, EngineError> {
        let spawn_err = |e: std::io::Error| EngineError::Spawn {
            path: path.display().to_string(),
            message: e.to_string(),
        };
        let mut child = Command::new(path)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(spawn_err)?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, lines) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let mut engine = UciEngine {
            path: path.to_path_buf(),
            child,
            stdin,
            lines,
            limit,
            search_timeout: limit.default_timeout(),
            name: None,
        };
        engine.handshake()?;
        Ok(engine)
    }

    /// Overrides the bound on how long a `go` may take before `stop` is sent.
    pub fn set_search_timeout(&mut self, timeout: Duration) {
        self.search_timeout = timeout;
    }

    pub fn engine_name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    fn send(&mut self, command: &str) -> Result<(), EngineError> {
        writeln!(self.stdin, "{command}")
            .and_then(|_| self.stdin.flush())
            .map_err(|e| EngineError::ProtocolError(format!("write failed: {e}")))
    }

    /// Next non-empty line before `deadline`, rejecting unknown replies.
    fn next_line(&mut self, deadline: Instant, waited: Duration) -> Result<Option<String>, EngineError> {
        loop {
            let left = deadline.saturating_duration_since(Instant::now());
            match self.lines.recv_timeout(left) {
                Ok(line) => {
                    let Some(first) = line.split_whitespace().next() else {
                        continue;
                    };
                    if !KNOWN_REPLIES.contains(&first) {
                        return Err(EngineError::ProtocolError(line));
                    }
                    return Ok(Some(line));
                }
                Err(RecvTimeoutError::Timeout) => return Ok(None),
                Err(RecvTimeoutError::Disconnected) => {
                    return Err(EngineError::ProtocolError(format!(
                        "engine exited after {waited:?} without replying"
                    )))
                }
            }
        }
    }

    fn wait_for(&mut self, token: &str, timeout: Duration) -> Result<(), EngineError> {
        let deadline = Instant::now() + timeout;
        loop {
            match self.next_line(deadline, timeout)? {
                None => return Err(EngineError::EngineUnresponsive(timeout)),
                Some(line) => {
                    let mut words = line.split_whitespace();
                    let first = words.next();
                    if first == Some(token) {
                        return Ok(());
                    }
                    if first == Some("id") && words.next() == Some("name") {
                        self.name = Some(words.collect::<Vec<_>>().join(" "));
                    }
                }
            }
        }
    }

    fn handshake(&mut self) -> Result<(), EngineError> {
        self.send("uci")?;
        self.wait_for("uciok", HANDSHAKE_TIMEOUT)?;
        self.is_ready()
    }

    pub fn is_ready(&mut self) -> Result<(), EngineError> {
        self.send("isready")?;
        self.wait_for("readyok", HANDSHAKE_TIMEOUT)
    }

    pub fn new_game(&mut self) -> Result<(), EngineError> {
        self.send("ucinewgame")?;
        self.is_ready()
    }

    pub fn set_position(&mut self, position: &UciPosition) -> Result<(), EngineError> {
        let cmd = position.command();
        self.send(&cmd)
    }

    /// Runs `go` and returns the raw best move and the last reported score (centipawns or mate).
    pub fn go(&mut self) -> Result<(String, Option<i32>), EngineError> {
        let go = self.limit.go_command();
        self.send(&go)?;
        let timeout = self.search_timeout;
        let mut deadline = Instant::now() + timeout;
        let mut stopped = false;
        let mut score = None;
        loop {
            let line = match self.next_line(deadline, timeout)? {
                Some(line) => line,
                None if stopped => return Err(EngineError::EngineUnresponsive(timeout)),
                None => {
                    self.send("stop")?;
                    stopped = true;
                    deadline = Instant::now() + STOP_GRACE;
                    continue;
                }
            };
            let words: Vec<&str> = line.split_whitespace().collect();
            match words[0] {
                "info" => score = parse_score(&words).or(score),
                "bestmove" => {
                    if stopped {
                        return Err(EngineError::EngineUnresponsive(timeout));
                    }
                    return match words.get(1) {
                        Some(m) => Ok((m.to_string(), score)),
                        None => Err(EngineError::ProtocolError(line)),
                    };
                }
                _ => {}
            }
        }
    }

    pub fn stop(&mut self) -> Result<(), EngineError> {
        self.send("stop")
    }
}

fn parse_score(words: &[&str]) -> Option<i32> {
    let i = words.iter().position(|w| *w == "score")?;
    let value: i32 = words.get(i + 2)?.parse().ok()?;
    match *words.get(i + 1)? {
        "cp" => Some(value),
        "mate" if value > 0 => Some(MATE - (2 * value - 1)),
        "mate" => Some(-(MATE + 2 * value)),
        _ => None,
    }
}

impl Engine for UciEngine {
    fn name(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => self.path.display().to_string(),
        }
    }

    fn search(&mut self, position: &Position, _history: &[Position]) -> Result<SearchResult, EngineError> {
        if position.variant() != Variant::Standard8x8 {
            return Err(EngineError::UnsupportedVariant(position.variant()));
        }
        let moves = position.legal_moves();
        if moves.is_empty() {
            return Err(EngineError::TerminalPosition);
        }
        self.set_position(&UciPosition::Fen(position.to_fen()))?;
        let (text, score) = self.go()?;
        let best: Move = moves
            .into_iter()
            .find(|m| m.to_coordinate() == text)
            .ok_or_else(|| EngineError::ProtocolError(format!("bestmove {text}")))?;
        Ok(SearchResult {
            best,
            eval: score.unwrap_or(0),
            pv: vec![best],
            nodes: 0,
        })
    }
}

impl Drop for UciEngine {
    fn drop(&mut self) {
        let _ = self.send("quit");
        let deadline = Instant::now() + STOP_GRACE;
        while Instant::now() < deadline {
            if let Ok(Some(_)) = self.child.try_wait() {
                return;
            }
            std::thread::sleep(Duration::from_millis(10));
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
