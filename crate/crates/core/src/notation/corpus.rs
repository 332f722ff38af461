use std::collections::BTreeMap;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{parse_move, resolve, GameId, GameRecord, NotationError, Recovery};
use crate::chesscore::{Position, Variant};

pub const CORPUS_SIZE: usize = 12;

const MANIFEST: &str = include_str!("../../data/corpus/MANIFEST");
const ERRATA: &str = include_str!("../../data/corpus/errata.txt");
const GAMES: [&str; CORPUS_SIZE] = [
    include_str!("../../data/corpus/game01.txt"),
    include_str!("../../data/corpus/game02.txt"),
    include_str!("../../data/corpus/game03.txt"),
    include_str!("../../data/corpus/game04.txt"),
    include_str!("../../data/corpus/game05.txt"),
    include_str!("../../data/corpus/game06.txt"),
    include_str!("../../data/corpus/game07.txt"),
    include_str!("../../data/corpus/game08.txt"),
    include_str!("../../data/corpus/game09.txt"),
    include_str!("../../data/corpus/game10.txt"),
    include_str!("../../data/corpus/game11.txt"),
    include_str!("../../data/corpus/game12.txt"),
];

/// A known transcription defect, keyed by game ordinal and 1-based ply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Erratum {
    pub game: u8,
    pub ply: usize,
    pub recorded: String,
    /// Replacement move in the same notation; `None` truncates the game at this ply.
    pub correction: Option<String>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub games: Vec<GameRecord>,
    pub errata: Vec<Erratum>,
}

impl Corpus {
    /// Game by ordinal, 1 through 12.
    pub fn game(&self, ordinal: u8) -> &GameRecord {
        &self.games[ordinal as usize - 1]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorpusError {
    #[error("corpus file {file} fails its checksum")]
    CorpusCorrupt { file: String },
    #[error("corpus file {file} is missing")]
    Missing { file: String },
    #[error("corpus file {file}: {message}")]
    Io { file: String, message: String },
    #[error("errata line {line}: {message}")]
    BadErrata { line: usize, message: String },
    #[error("game {game}: {error}")]
    Notation { game: u8, error: NotationError },
    #[error("game {game}, ply {ply}: replay failure without an erratum: {error}")]
    Unrecorded { game: u8, ply: usize, error: NotationError },
    #[error("erratum for game {game}, ply {ply} does not match any replay failure")]
    StaleErratum { game: u8, ply: usize },
}

pub fn game_file_name(ordinal: u8) -> String {
    format!("game{ordinal:02}.txt")
}

/// Loads the corpus compiled into the library.
pub fn load_corpus() -> Result<Corpus, CorpusError> {
    let mut files = BTreeMap::new();
    for (i, text) in GAMES.iter().enumerate() {
        files.insert(game_file_name(i as u8 + 1), text.to_string());
    }
    files.insert("errata.txt".to_string(), ERRATA.to_string());
    build(MANIFEST, &files)
}

/// Loads a corpus directory laid out like the bundled one (`MANIFEST`, `errata.txt`, `gameNN.txt`).
pub fn load_corpus_from(dir: &Path) -> Result<Corpus, CorpusError> {
    let read = |name: &str| {
        std::fs::read_to_string(dir.join(name)).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => CorpusError::Missing { file: name.to_string() },
            _ => CorpusError::Io {
                file: name.to_string(),
                message: e.to_string(),
            },
        })
    };
    let manifest = read("MANIFEST")?;
    let mut files = BTreeMap::new();
    for name in manifest_entries(&manifest).into_keys() {
        files.insert(name.clone(), read(&name)?);
    }
    build(&manifest, &files)
}

fn manifest_entries(manifest: &str) -> BTreeMap<String, String> {
    manifest
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .filter_map(|l| {
            let mut parts = l.split_whitespace();
            let digest = parts.next()?.to_ascii_lowercase();
            let name = parts.next()?.to_string();
            Some((name, digest))
        })
        .collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn build(manifest: &str, files: &BTreeMap<String, String>) -> Result<Corpus, CorpusError> {
    let entries = manifest_entries(manifest);
    let mut required: Vec<String> = (1..=CORPUS_SIZE as u8).map(game_file_name).collect();
    required.push("errata.txt".into());
    for name in &required {
        let digest = entries.get(name).ok_or_else(|| CorpusError::Missing { file: name.clone() })?;
        let text = files.get(name).ok_or_else(|| CorpusError::Missing { file: name.clone() })?;
        if sha256_hex(text.as_bytes()) != *digest {
            return Err(CorpusError::CorpusCorrupt { file: name.clone() });
        }
    }

    let errata = parse_errata(&files["errata.txt"])?;
    let mut used = vec![false; errata.len()];
    let mut games = Vec::with_capacity(CORPUS_SIZE);
    let start = Position::initial(Variant::Standard8x8);
    for ordinal in 1..=CORPUS_SIZE as u8 {
        let text = &files[&game_file_name(ordinal)];
        let mut unrecorded = None;
        let mut on_failure = |ply: usize, token: &str, pos: &Position, err: NotationError| {
            let Some(idx) = errata
                .iter()
                .position(|e| e.game == ordinal && e.ply == ply && e.recorded == token)
            else {
                unrecorded = Some((ply, err.clone()));
                return Err(err);
            };
            used[idx] = true;
            match &errata[idx].correction {
                Some(c) => parse_move(c, pos).map(Recovery::Replace),
                None => Ok(Recovery::Truncate),
            }
        };
        let result = resolve(text, &start, GameId::Corpus(ordinal), &mut on_failure);
        match (result, unrecorded) {
            (Ok(record), _) => games.push(record),
            (Err(_), Some((ply, error))) => return Err(CorpusError::Unrecorded { game: ordinal, ply, error }),
            (Err(error), None) => return Err(CorpusError::Notation { game: ordinal, error }),
        }
    }
    if let Some(i) = used.iter().position(|u| !u) {
        return Err(CorpusError::StaleErratum {
            game: errata[i].game,
            ply: errata[i].ply,
        });
    }
    Ok(Corpus { games, errata })
}

/// Sidecar format: `game | ply | recorded | correction | note`, `-` for no correction.
pub fn parse_errata(text: &str) -> Result<Vec<Erratum>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: &str| CorpusError::BadErrata {
            line: i + 1,
            message: message.to_string(),
        };
        let fields: Vec<&str> = line.splitn(5, '|').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(bad("expected five '|'-separated fields"));
        }
        let game: u8 = fields[0].parse().map_err(|_| bad("bad game number"))?;
        let ply: usize = fields[1].parse().map_err(|_| bad("bad ply index"))?;
        if !(1..=CORPUS_SIZE as u8).contains(&game) || ply == 0 {
            return Err(bad("game or ply out of range"));
        }
        out.push(Erratum {
            game,
            ply,
            recorded: fields[2].to_string(),
            correction: (fields[3] != "-").then(|| fields[3].to_string()),
            note: fields[4].to_string(),
        });
    }
    Ok(out)
}

pub fn format_errata(errata: &[Erratum]) -> String {
    let mut out = String::from("# game | ply | recorded | correction | note\n");
    for e in errata {
        out.push_str(&format!(
            "{} | {} | {} | {} | {}\n",
            e.game,
            e.ply,
            e.recorded,
            e.correction.as_deref().unwrap_or("-"),
            e.note
        ));
    }
    out
}
