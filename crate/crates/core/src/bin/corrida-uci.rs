//! The builtin engine behind a UCI front end. `--fault` makes it misbehave for adapter tests.

use std::io::{self, BufRead, Write};

use clap::{Parser, ValueEnum};
use corrida_core::chesscore::Position;
use corrida_core::engines::search;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Fault {
    /// Answer `go` with a line that is not UCI.
    Garbage,
    /// Never answer `go`, even after `stop`.
    Silent,
    /// Ignore `uci`.
    Mute,
}

#[derive(Parser)]
#[command(about = "UCI wrapper around the builtin corrida engine")]
struct Args {
    /// Search depth used when `go` names none.
    #[arg(long, default_value_t = 3)]
    depth: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    fault: Option<Fault>,
}

fn parse_position(words: &[&str]) -> Option<Position> {
    let (mut pos, rest) = match *words.first()? {
        "startpos" => (Position::initial(corrida_core::chesscore::Variant::Standard8x8), &words[1..]),
        "fen" => {
            let end = words.iter().position(|w| *w == "moves").unwrap_or(words.len());
            (Position::from_fen_auto(&words[1..end].join(" ")).ok()?, &words[end..])
        }
        _ => return None,
    };
    if rest.first() == Some(&"moves") {
        for text in &rest[1..] {
            let mv = pos.legal_moves().into_iter().find(|m| m.to_coordinate() == *text)?;
            pos = pos.play_unchecked(mv);
        }
    }
    Some(pos)
}

fn main() -> io::Result<()> {
    let args = Args::parse();
    let stdin = io::stdin();
    let mut out = io::stdout().lock();
    let mut pos = Position::initial(corrida_core::chesscore::Variant::Standard8x8);
    for line in stdin.lock().lines() {
        let line = line?;
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.first().copied() {
            Some("uci") if args.fault == Some(Fault::Mute) => {}
            Some("uci") => {
                writeln!(out, "id name corrida-uci")?;
                writeln!(out, "id author corrida")?;
                writeln!(out, "uciok")?;
            }
            Some("isready") => writeln!(out, "readyok")?,
            Some("ucinewgame") => pos = Position::initial(pos.variant()),
            Some("position") => match parse_position(&words[1..]) {
                Some(p) => pos = p,
                None => writeln!(out, "info string bad position")?,
            },
            Some("go") => match args.fault {
                Some(Fault::Garbage) => writeln!(out, "!!garbage {line}")?,
                Some(Fault::Silent) => {}
                _ => {
                    let depth = words
                        .iter()
                        .position(|w| *w == "depth")
                        .and_then(|i| words.get(i + 1)?.parse().ok())
                        .unwrap_or(args.depth);
                    match search(&pos, depth, args.seed) {
                        Some(r) => {
                            writeln!(out, "info depth {depth} score cp {} nodes {}", r.eval, r.nodes)?;
                            writeln!(out, "bestmove {}", r.best.to_coordinate())?;
                        }
                        None => writeln!(out, "bestmove 0000")?,
                    }
                }
            },
            Some("quit") => break,
            _ => {}
        }
        out.flush()?;
    }
    Ok(())
}
