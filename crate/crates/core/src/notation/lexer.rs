use crate::chesscore::{PieceKind, Square};

use super::NotationError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum MoveBody {
    Castle { kingside: bool },
    Normal {
        piece: PieceKind,
        from: Square,
        to: Square,
        capture: bool,
        promotion: Option<PieceKind>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawPly {
    pub body: MoveBody,
    pub text: String,
    pub check: bool,
    pub mate: bool,
    pub notes: Vec<String>,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ResultToken {
    WhiteWins,
    BlackWins,
    Draw,
    Resigns,
    ObviouslyDraw,
}

#[derive(Debug, Default)]
pub(crate) struct Transcript {
    pub plies: Vec<RawPly>,
    pub result: Option<ResultToken>,
}

struct Word<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn words(text: &str) -> Vec<Word<'_>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let mut start: Option<usize> = None;
        let mut in_comment = false;
        for (i, c) in line.char_indices() {
            if in_comment {
                if c == '}' {
                    let s = start.take().unwrap();
                    out.push(Word { text: &line[s..=i], line: ln + 1, column: s + 1 });
                    in_comment = false;
                }
                continue;
            }
            if c.is_whitespace() || c == ',' {
                if let Some(s) = start.take() {
                    out.push(Word { text: &line[s..i], line: ln + 1, column: s + 1 });
                }
            } else if c == '{' {
                if let Some(s) = start.take() {
                    out.push(Word { text: &line[s..i], line: ln + 1, column: s + 1 });
                }
                start = Some(i);
                in_comment = true;
            } else if start.is_none() {
                start = Some(i);
            }
        }
        if let Some(s) = start {
            out.push(Word { text: &line[s..], line: ln + 1, column: s + 1 });
        }
    }
    out
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> NotationError {
    NotationError::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Splits a leading move number (`12.`, `55...`) off a word.
fn split_number(word: &str) -> Option<(u32, bool, &str)> {
    let digits = word.bytes().take_while(u8::is_ascii_digit).count();
    if digits == 0 {
        return None;
    }
    let rest = &word[digits..];
    let dots = rest.bytes().take_while(|&b| b == b'.').count();
    if dots == 0 {
        return None;
    }
    let number = word[..digits].parse().ok()?;
    Some((number, dots >= 3, &rest[dots..]))
}

fn result_token(word: &str) -> Option<ResultToken> {
    let w = word.trim_end_matches('.');
    match w {
        "1-0" => Some(ResultToken::WhiteWins),
        "0-1" => Some(ResultToken::BlackWins),
        "1/2-1/2" | "½-½" => Some(ResultToken::Draw),
        _ if w.eq_ignore_ascii_case("resigns") => Some(ResultToken::Resigns),
        _ => None,
    }
}

/// Reads `<file><rank>` with the rank taken greedily (up to two digits).
fn take_square(s: &str, at: usize, line: usize, column: usize) -> Result<(Square, usize), NotationError> {
    let bytes = s.as_bytes();
    let bad = || parse_error(line, column + at, format!("expected a square in {s:?}"));
    let f = *bytes.get(at).ok_or_else(bad)?;
    if !(b'a'..=b'j').contains(&f) {
        return Err(bad());
    }
    let mut end = at + 1;
    while end < bytes.len() && end < at + 3 && bytes[end].is_ascii_digit() {
        end += 1;
    }
    let sq = Square::parse(&s[at..end]).ok_or_else(bad)?;
    Ok((sq, end))
}

fn parse_body(text: &str, line: usize, column: usize) -> Result<MoveBody, NotationError> {
    let lower = text.to_ascii_lowercase().replace('0', "o");
    if lower == "o-o" {
        return Ok(MoveBody::Castle { kingside: true });
    }
    if lower == "o-o-o" {
        return Ok(MoveBody::Castle { kingside: false });
    }
    let bytes = text.as_bytes();
    let mut i = 0;
    let piece = match bytes.first().and_then(|&b| PieceKind::from_letter(b as char)) {
        Some(k) if k != PieceKind::Pawn && bytes[0].is_ascii_uppercase() => {
            i = 1;
            k
        }
        _ => PieceKind::Pawn,
    };
    let (from, next) = take_square(text, i, line, column)?;
    let capture = match bytes.get(next) {
        Some(b'-') => false,
        Some(b'x') | Some(b':') => true,
        _ => return Err(parse_error(line, column + next, format!("expected '-' or 'x' in {text:?}"))),
    };
    let (to, mut next) = take_square(text, next + 1, line, column)?;
    let mut promotion = None;
    if bytes.get(next) == Some(&b'=') {
        let k = bytes
            .get(next + 1)
            .and_then(|&b| PieceKind::from_letter(b as char))
            .filter(|k| PieceKind::PROMOTIONS.contains(k))
            .ok_or_else(|| parse_error(line, column + next, "bad promotion piece"))?;
        promotion = Some(k);
        next += 2;
    }
    if next != bytes.len() {
        return Err(parse_error(line, column + next, format!("unexpected trailing text in {text:?}")));
    }
    Ok(MoveBody::Normal {
        piece,
        from,
        to,
        capture,
        promotion,
    })
}

/// Tokenizes a move list whose first ply is `first_number` (and Black's move when `black_first`).
pub(crate) fn tokenize(text: &str, first_number: u32, black_first: bool) -> Result<Transcript, NotationError> {
    let ws = words(text);
    let mut out = Transcript::default();
    let mut pending_notes: Vec<String> = Vec::new();
    let mut expected_black = black_first;
    let mut move_number = first_number;
    let mut i = 0;
    while i < ws.len() {
        let Word { text: mut w, line, mut column } = ws[i];
        i += 1;

        if out.result.is_some() {
            return Err(parse_error(line, column, format!("unexpected {w:?} after the result")));
        }
        if w.starts_with('{') {
            pending_notes.push(w.trim_start_matches('{').trim_end_matches('}').trim().to_string());
            continue;
        }
        if w == "-" {
            continue;
        }
        if w == "**" || w == "+" {
            let last = out
                .plies
                .last_mut()
                .ok_or_else(|| parse_error(line, column, format!("{w:?} before any move")))?;
            if w == "+" {
                last.check = true;
            } else {
                last.notes.push("**".to_string());
            }
            continue;
        }
        if w.eq_ignore_ascii_case("obviously") {
            match ws.get(i) {
                Some(next) if next.text.trim_end_matches('.').eq_ignore_ascii_case("draw") => {
                    i += 1;
                    out.result = Some(ResultToken::ObviouslyDraw);
                    continue;
                }
                _ => return Err(parse_error(line, column, "expected \"Obviously draw\"")),
            }
        }
        if let Some(r) = result_token(w) {
            out.result = Some(r);
            continue;
        }
        if let Some((n, black, rest)) = split_number(w) {
            let (want_n, want_black) = (move_number, expected_black);
            if n != want_n || black != want_black {
                return Err(parse_error(
                    line,
                    column,
                    format!("move number {n} out of sequence (expected {want_n})"),
                ));
            }
            column += w.len() - rest.len();
            w = rest;
            if w.is_empty() {
                continue;
            }
        }

        let mut notes = std::mem::take(&mut pending_notes);
        if let Some(stripped) = w.strip_prefix("**") {
            w = stripped;
            column += 2;
            notes.push("**".to_string());
        }
        if let Some(stripped) = w.strip_suffix("**") {
            w = stripped;
            if !notes.iter().any(|n| n == "**") {
                notes.push("**".to_string());
            }
        }
        let w = w.trim_end_matches('.');
        let (mut body_text, mut check, mut mate) = (w, false, false);
        loop {
            if let Some(s) = body_text.strip_suffix('+') {
                check = true;
                body_text = s;
            } else if let Some(s) = body_text.strip_suffix('*').or_else(|| body_text.strip_suffix('#')) {
                mate = true;
                body_text = s;
            } else {
                break;
            }
        }
        if body_text.is_empty() {
            return Err(parse_error(line, column, "empty move token"));
        }
        let body = parse_body(body_text, line, column)?;
        out.plies.push(RawPly {
            body,
            text: body_text.to_string(),
            check,
            mate,
            notes,
            line,
            column,
        });
        if expected_black {
            move_number += 1;
        }
        expected_black = !expected_black;
    }
    if !pending_notes.is_empty() {
        if let Some(last) = out.plies.last_mut() {
            last.notes.append(&mut pending_notes);
        }
    }
    Ok(out)
}
