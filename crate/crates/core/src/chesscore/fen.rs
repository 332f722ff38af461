//! Extended FEN. Non-8×8 boards carry a leading `WxH ` field; run lengths may take two digits.

use super::position::Position;
use super::types::*;
use super::ChessError;

impl Position {
    pub fn to_fen(&self) -> String {
        let v = self.variant();
        let mut out = String::new();
        if v != Variant::Standard8x8 {
            out.push_str(&format!("{}x{} ", v.width(), v.height()));
        }
        for r in (0..v.height()).rev() {
            let mut empty = 0;
            for f in 0..v.width() {
                match self.piece_at(Square::new(f, r)) {
                    Some(p) => {
                        if empty > 0 {
                            out.push_str(&empty.to_string());
                            empty = 0;
                        }
                        out.push(p.fen_char());
                    }
                    None => empty += 1,
                }
            }
            if empty > 0 {
                out.push_str(&empty.to_string());
            }
            if r > 0 {
                out.push('/');
            }
        }
        out.push(' ');
        out.push(match self.side_to_move() {
            Color::White => 'w',
            Color::Black => 'b',
        });
        out.push(' ');
        let rights = self.castling_rights();
        let mut any = false;
        for (i, c) in ['K', 'Q', 'k', 'q'].into_iter().enumerate() {
            if rights.0[i] {
                out.push(c);
                any = true;
            }
        }
        if !any {
            out.push('-');
        }
        out.push(' ');
        match self.en_passant_target() {
            Some(sq) => out.push_str(&sq.to_string()),
            None => out.push('-'),
        }
        out.push_str(&format!(
            " {} {}",
            self.halfmove_clock(),
            self.fullmove_number()
        ));
        out
    }

    /// Parses extended FEN for `variant`. A dimension prefix, when present, must match it.
    pub fn from_fen(text: &str, variant: Variant) -> Result<Position, ChessError> {
        let err = |offset: usize, message: &str| ChessError::Parse {
            offset,
            message: message.to_string(),
        };
        let fields = split_fields(text);
        let mut fields = fields.into_iter().peekable();

        let Some(&(first_off, first)) = fields.peek() else {
            return Err(err(0, "empty FEN"));
        };
        if let Some((w, h)) = parse_dims(first) {
            if w != variant.width() || h != variant.height() {
                return Err(err(first_off, "dimension field does not match variant"));
            }
            fields.next();
        } else if variant != Variant::Standard8x8 && first.contains('x') {
            return Err(err(first_off, "malformed dimension field"));
        }

        let (place_off, placement) = fields.next().ok_or_else(|| err(text.len(), "missing placement"))?;
        let mut pos = Position::empty(variant);
        let rows: Vec<&str> = placement.split('/').collect();
        if rows.len() != variant.height() as usize {
            return Err(err(place_off, "wrong number of rank rows"));
        }
        let mut row_off = place_off;
        for (i, row) in rows.iter().enumerate() {
            let rank = variant.height() - 1 - i as u8;
            let bytes = row.as_bytes();
            let mut file: u32 = 0;
            let mut j = 0;
            while j < bytes.len() {
                let b = bytes[j];
                if b.is_ascii_digit() {
                    let start = j;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    let run: u32 = row[start..j].parse().map_err(|_| err(row_off + start, "bad run length"))?;
                    if run == 0 {
                        return Err(err(row_off + start, "zero run length"));
                    }
                    file += run;
                    if file > variant.width() as u32 {
                        return Err(err(row_off + start, "rank row overflows board width"));
                    }
                    continue;
                }
                let piece = Piece::from_fen_char(b as char)
                    .ok_or_else(|| err(row_off + j, "unknown piece letter"))?;
                if file >= variant.width() as u32 {
                    return Err(err(row_off + j, "rank row overflows board width"));
                }
                pos.put(Square::new(file as u8, rank), Some(piece));
                file += 1;
                j += 1;
            }
            if file != variant.width() as u32 {
                return Err(err(row_off, "rank row does not fill board width"));
            }
            row_off += row.len() + 1;
        }

        let (side_off, side) = fields.next().ok_or_else(|| err(text.len(), "missing side to move"))?;
        pos.set_side_to_move(match side {
            "w" => Color::White,
            "b" => Color::Black,
            _ => return Err(err(side_off, "side to move must be w or b")),
        });

        let (cast_off, cast) = fields.next().unwrap_or((text.len(), "-"));
        let mut rights = CastlingRights::NONE;
        if cast != "-" {
            for (k, c) in cast.char_indices() {
                let idx = match c {
                    'K' => 0,
                    'Q' => 1,
                    'k' => 2,
                    'q' => 3,
                    _ => return Err(err(cast_off + k, "bad castling field")),
                };
                rights.0[idx] = true;
            }
        }
        pos.set_castling(rights);

        let (ep_off, ep) = fields.next().unwrap_or((text.len(), "-"));
        if ep != "-" {
            let sq = Square::parse(ep)
                .filter(|s| s.in_variant(variant))
                .ok_or_else(|| err(ep_off, "bad en passant square"))?;
            pos.set_en_passant(Some(sq));
        }

        let (hm_off, hm) = fields.next().unwrap_or((text.len(), "0"));
        let halfmove: u32 = hm.parse().map_err(|_| err(hm_off, "bad halfmove clock"))?;
        let (fm_off, fm) = fields.next().unwrap_or((text.len(), "1"));
        let fullmove: u32 = fm.parse().map_err(|_| err(fm_off, "bad fullmove number"))?;
        if fullmove == 0 {
            return Err(err(fm_off, "fullmove number must be at least 1"));
        }
        if let Some((off, _)) = fields.next() {
            return Err(err(off, "trailing fields"));
        }
        pos.set_clocks(halfmove, fullmove);
        pos.validate().map_err(|e| err(place_off, &e.to_string()))?;
        Ok(pos)
    }

    /// Parses FEN, taking the variant from the dimension prefix (absent = 8×8).
    pub fn from_fen_auto(text: &str) -> Result<Position, ChessError> {
        let first = text.split_whitespace().next().unwrap_or("");
        let variant = match parse_dims(first) {
            Some((w, h)) => Variant::from_dims(w, h).ok_or_else(|| ChessError::Parse {
                offset: 0,
                message: format!("unsupported board {w}x{h}"),
            })?,
            None => Variant::Standard8x8,
        };
        Position::from_fen(text, variant)
    }
}

fn split_fields(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &text[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &text[s..]));
    }
    out
}

fn parse_dims(field: &str) -> Option<(u8, u8)> {
    let (w, h) = field.split_once('x')?;
    Some((w.parse().ok()?, h.parse().ok()?))
}
