//! Brute-force move generator used only as a test oracle.
//!
//! Works from the FEN text alone, keeps its own char-grid board, and decides legality by
//! generating every reply of the opponent and looking for a king capture. It shares no code
//! with the library's generator.

#![allow(dead_code)]

#[derive(Clone)]
pub struct OracleBoard {
    w: i32,
    h: i32,
    cells: Vec<Option<char>>,
    white: bool,
    rights: [bool; 4], // K Q k q
    ep: Option<(i32, i32)>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Kind {
    Plain,
    Double,
    EnPassant,
    CastleK,
    CastleQ,
}

#[derive(Clone, Copy, Debug)]
pub struct OracleMove {
    from: (i32, i32),
    to: (i32, i32),
    promo: Option<char>,
    kind: Kind,
}

impl OracleMove {
    pub fn coordinate(&self) -> String {
        let name = |(f, r): (i32, i32)| format!("{}{}", (b'a' + f as u8) as char, r + 1);
        let mut s = format!("{}{}", name(self.from), name(self.to));
        if let Some(p) = self.promo {
            s.push(p.to_ascii_lowercase());
        }
        s
    }
}

impl OracleBoard {
    pub fn from_fen(fen: &str) -> OracleBoard {
        let mut parts: Vec<&str> = fen.split_whitespace().collect();
        let (w, h) = if parts[0].contains('x') && !parts[0].contains('/') {
            let (a, b) = parts[0].split_once('x').unwrap();
            let dims = (a.parse().unwrap(), b.parse().unwrap());
            parts.remove(0);
            dims
        } else {
            (8, 8)
        };
        let mut cells = vec![None; (w * h) as usize];
        for (i, row) in parts[0].split('/').enumerate() {
            let r = h - 1 - i as i32;
            let mut f = 0;
            let mut num = String::new();
            for c in row.chars() {
                if c.is_ascii_digit() {
                    num.push(c);
                    continue;
                }
                if !num.is_empty() {
                    f += num.parse::<i32>().unwrap();
                    num.clear();
                }
                cells[(r * w + f) as usize] = Some(c);
                f += 1;
            }
        }
        let white = parts[1] == "w";
        let c = parts.get(2).copied().unwrap_or("-");
        let rights = [c.contains('K'), c.contains('Q'), c.contains('k'), c.contains('q')];
        let ep = parts.get(3).and_then(|s| {
            if *s == "-" {
                None
            } else {
                let f = s.as_bytes()[0] as i32 - 'a' as i32;
                let r: i32 = s[1..].parse().unwrap();
                Some((f, r - 1))
            }
        });
        OracleBoard { w, h, cells, white, rights, ep }
    }

    fn at(&self, f: i32, r: i32) -> Option<char> {
        if f < 0 || r < 0 || f >= self.w || r >= self.h {
            None
        } else {
            self.cells[(r * self.w + f) as usize]
        }
    }

    fn inside(&self, f: i32, r: i32) -> bool {
        f >= 0 && r >= 0 && f < self.w && r < self.h
    }

    fn set(&mut self, f: i32, r: i32, c: Option<char>) {
        self.cells[(r * self.w + f) as usize] = c;
    }

    fn mine(c: char, white: bool) -> bool {
        c.is_ascii_uppercase() == white
    }

    fn king_file(&self) -> i32 {
        if self.w == 10 {
            5
        } else {
            4
        }
    }

    /// Squares the given side attacks, computed forward from each piece.
    fn attack_set(&self, white: bool) -> Vec<(i32, i32)> {
        let mut out = Vec::new();
        for r in 0..self.h {
            for f in 0..self.w {
                let Some(c) = self.at(f, r) else { continue };
                if Self::mine(c, white) {
                    out.extend(self.piece_attacks(f, r, c));
                }
            }
        }
        out
    }

    fn piece_attacks(&self, f: i32, r: i32, c: char) -> Vec<(i32, i32)> {
        let white = c.is_ascii_uppercase();
        let mut out = Vec::new();
        {
            {
                let up = if white { 1 } else { -1 };
                match c.to_ascii_lowercase() {
                    'p' => {
                        for df in [-1, 1] {
                            if self.inside(f + df, r + up) {
                                out.push((f + df, r + up));
                            }
                        }
                    }
                    'n' => {
                        for (df, dr) in [(1, 2), (2, 1), (-1, 2), (-2, 1), (1, -2), (2, -1), (-1, -2), (-2, -1)] {
                            if self.inside(f + df, r + dr) {
                                out.push((f + df, r + dr));
                            }
                        }
                    }
                    'k' => {
                        for df in -1..=1 {
                            for dr in -1..=1 {
                                if (df, dr) != (0, 0) && self.inside(f + df, r + dr) {
                                    out.push((f + df, r + dr));
                                }
                            }
                        }
                    }
                    p => {
                        let mut dirs = Vec::new();
                        if p == 'r' || p == 'q' {
                            dirs.extend([(1, 0), (-1, 0), (0, 1), (0, -1)]);
                        }
                        if p == 'b' || p == 'q' {
                            dirs.extend([(1, 1), (1, -1), (-1, 1), (-1, -1)]);
                        }
                        for (df, dr) in dirs {
                            let (mut x, mut y) = (f + df, r + dr);
                            while self.inside(x, y) {
                                out.push((x, y));
                                if self.at(x, y).is_some() {
                                    break;
                                }
                                x += df;
                                y += dr;
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn king_of(&self, white: bool) -> (i32, i32) {
        let k = if white { 'K' } else { 'k' };
        for r in 0..self.h {
            for f in 0..self.w {
                if self.at(f, r) == Some(k) {
                    return (f, r);
                }
            }
        }
        panic!("no king");
    }

    fn pseudo(&self) -> Vec<OracleMove> {
        let white = self.white;
        let mut out = Vec::new();
        let last = if white { self.h - 1 } else { 0 };
        let home = if white { 1 } else { self.h - 2 };
        let up = if white { 1 } else { -1 };
        let promos = if white { ['Q', 'R', 'B', 'N'] } else { ['q', 'r', 'b', 'n'] };
        let push_pawn = |out: &mut Vec<OracleMove>, from, to: (i32, i32), kind| {
            if to.1 == last {
                for p in promos {
                    out.push(OracleMove { from, to, promo: Some(p), kind });
                }
            } else {
                out.push(OracleMove { from, to, promo: None, kind });
            }
        };
        for r in 0..self.h {
            for f in 0..self.w {
                let Some(c) = self.at(f, r) else { continue };
                if !Self::mine(c, white) {
                    continue;
                }
                let free_or_enemy = |x: i32, y: i32| match self.at(x, y) {
                    None => self.inside(x, y),
                    Some(o) => !Self::mine(o, white),
                };
                match c.to_ascii_lowercase() {
                    'p' => {
                        if self.inside(f, r + up) && self.at(f, r + up).is_none() {
                            push_pawn(&mut out, (f, r), (f, r + up), Kind::Plain);
                            if r == home && self.inside(f, r + 2 * up) && self.at(f, r + 2 * up).is_none() {
                                out.push(OracleMove { from: (f, r), to: (f, r + 2 * up), promo: None, kind: Kind::Double });
                            }
                        }
                        for df in [-1, 1] {
                            let t = (f + df, r + up);
                            if let Some(o) = self.at(t.0, t.1) {
                                if !Self::mine(o, white) {
                                    push_pawn(&mut out, (f, r), t, Kind::Plain);
                                }
                            } else if self.ep == Some(t) {
                                out.push(OracleMove { from: (f, r), to: t, promo: None, kind: Kind::EnPassant });
                            }
                        }
                    }
                    'n' => {
                        for (df, dr) in [(1, 2), (2, 1), (-1, 2), (-2, 1), (1, -2), (2, -1), (-1, -2), (-2, -1)] {
                            if free_or_enemy(f + df, r + dr) {
                                out.push(OracleMove { from: (f, r), to: (f + df, r + dr), promo: None, kind: Kind::Plain });
                            }
                        }
                    }
                    'k' => {
                        for df in -1..=1 {
                            for dr in -1..=1 {
                                if (df, dr) != (0, 0) && free_or_enemy(f + df, r + dr) {
                                    out.push(OracleMove { from: (f, r), to: (f + df, r + dr), promo: None, kind: Kind::Plain });
                                }
                            }
                        }
                    }
                    p => {
                        let mut dirs = Vec::new();
                        if p == 'r' || p == 'q' {
                            dirs.extend([(1, 0), (-1, 0), (0, 1), (0, -1)]);
                        }
                        if p == 'b' || p == 'q' {
                            dirs.extend([(1, 1), (1, -1), (-1, 1), (-1, -1)]);
                        }
                        for (df, dr) in dirs {
                            let (mut x, mut y) = (f + df, r + dr);
                            while self.inside(x, y) {
                                match self.at(x, y) {
                                    None => out.push(OracleMove { from: (f, r), to: (x, y), promo: None, kind: Kind::Plain }),
                                    Some(o) => {
                                        if !Self::mine(o, white) {
                                            out.push(OracleMove { from: (f, r), to: (x, y), promo: None, kind: Kind::Plain });
                                        }
                                        break;
                                    }
                                }
                                x += df;
                                y += dr;
                            }
                        }
                    }
                }
            }
        }
        // Castling.
        let rank = if white { 0 } else { self.h - 1 };
        let kf = self.king_file();
        let king = if white { 'K' } else { 'k' };
        let rook = if white { 'R' } else { 'r' };
        if self.at(kf, rank) == Some(king) {
            let enemy = self.attack_set(!white);
            for (idx, side) in [(0usize, 1i32), (1, -1)] {
                let ri = if white { idx } else { idx + 2 };
                if !self.rights[ri] {
                    continue;
                }
                let rook_file = if side == 1 { self.w - 1 } else { 0 };
                if self.at(rook_file, rank) != Some(rook) {
                    continue;
                }
                let mut clear = true;
                let mut x = kf + side;
                while x != rook_file {
                    if self.at(x, rank).is_some() {
                        clear = false;
                    }
                    x += side;
                }
                let safe = (0..=2).all(|i| !enemy.contains(&(kf + side * i, rank)));
                if clear && safe {
                    let kind = if side == 1 { Kind::CastleK } else { Kind::CastleQ };
                    out.push(OracleMove { from: (kf, rank), to: (kf + 2 * side, rank), promo: None, kind });
                }
            }
        }
        out
    }

    fn make(&self, m: &OracleMove) -> OracleBoard {
        let mut b = self.clone();
        let piece = b.at(m.from.0, m.from.1).unwrap();
        b.set(m.from.0, m.from.1, None);
        b.set(m.to.0, m.to.1, Some(m.promo.unwrap_or(piece)));
        if m.kind == Kind::EnPassant {
            b.set(m.to.0, m.from.1, None);
        }
        let rank = m.from.1;
        match m.kind {
            Kind::CastleK => {
                let r = b.at(self.w - 1, rank);
                b.set(self.w - 1, rank, None);
                b.set(self.king_file() + 1, rank, r);
            }
            Kind::CastleQ => {
                let r = b.at(0, rank);
                b.set(0, rank, None);
                b.set(self.king_file() - 1, rank, r);
            }
            _ => {}
        }
        if piece == 'K' {
            b.rights[0] = false;
            b.rights[1] = false;
        }
        if piece == 'k' {
            b.rights[2] = false;
            b.rights[3] = false;
        }
        let corners = [(self.w - 1, 0), (0, 0), (self.w - 1, self.h - 1), (0, self.h - 1)];
        for (i, c) in corners.iter().enumerate() {
            if m.from == *c || m.to == *c {
                b.rights[i] = false;
            }
        }
        b.ep = if m.kind == Kind::Double {
            Some((m.from.0, (m.from.1 + m.to.1) / 2))
        } else {
            None
        };
        b.white = !self.white;
        b
    }

    pub fn legal(&self) -> Vec<OracleMove> {
        self.pseudo()
            .into_iter()
            .filter(|m| {
                let next = self.make(m);
                let k = next.king_of(self.white);
                !next.attack_set(!self.white).contains(&k)
            })
            .collect()
    }

    pub fn perft(&self, depth: u32) -> u64 {
        if depth == 0 {
            return 1;
        }
        self.legal().iter().map(|m| self.make(m).perft(depth - 1)).sum()
    }

    pub fn play(&self, m: &OracleMove) -> OracleBoard {
        self.make(m)
    }

    pub fn in_check(&self) -> bool {
        let k = self.king_of(self.white);
        self.attack_set(!self.white).contains(&k)
    }

    pub fn is_checkmate(&self) -> bool {
        self.in_check() && self.legal().is_empty()
    }

    /// Some move of the side to move mates at once.
    pub fn has_mate_in_one(&self) -> bool {
        self.legal().iter().any(|m| self.make(m).is_checkmate())
    }

    /// Exhaustive capture-sequence value on `target` for `white`: every attacker is tried at
    /// every step and either side may stop. Kings count 20000 so recapturing one ends it.
    pub fn exchange(&self, target: &str, white: bool) -> i32 {
        let f = target.as_bytes()[0] as i32 - 'a' as i32;
        let r: i32 = target[1..].parse::<i32>().unwrap() - 1;
        match self.at(f, r) {
            Some(c) if Self::mine(c, !white) => self.exchange_at((f, r), white),
            _ => 0,
        }
    }

    fn exchange_at(&self, (f, r): (i32, i32), white: bool) -> i32 {
        let value = |c: char| match c.to_ascii_lowercase() {
            'p' => 100,
            'n' => 300,
            'b' => 310,
            'r' => 500,
            'q' => 900,
            _ => 20_000,
        };
        let victim = self.at(f, r).unwrap();
        let mut best = 0;
        for y in 0..self.h {
            for x in 0..self.w {
                let Some(c) = self.at(x, y) else { continue };
                if !Self::mine(c, white) || !self.piece_attacks(x, y, c).contains(&(f, r)) {
                    continue;
                }
                let mut b = self.clone();
                b.set(x, y, None);
                b.set(f, r, Some(c));
                best = best.max(value(victim) - b.exchange_at((f, r), !white));
            }
        }
        best
    }

    pub fn legal_coordinates(&self) -> Vec<String> {
        let mut v: Vec<String> = self.legal().iter().map(OracleMove::coordinate).collect();
        v.sort();
        v
    }

    fn own_pieces(&self, white: bool) -> Vec<(i32, i32, char)> {
        let mut out = Vec::new();
        for r in 0..self.h {
            for f in 0..self.w {
                if let Some(c) = self.at(f, r) {
                    if Self::mine(c, white) {
                        out.push((f, r, c));
                    }
                }
            }
        }
        out
    }

    /// Ordered (defender, defended) pairs among one side's pieces.
    pub fn coordination(&self, white: bool) -> usize {
        self.own_pieces(white)
            .into_iter()
            .map(|(f, r, c)| {
                self.piece_attacks(f, r, c)
                    .into_iter()
                    .filter(|&(x, y)| self.at(x, y).is_some_and(|d| Self::mine(d, white)))
                    .count()
            })
            .sum()
    }

    /// Non-pawn destinations that are empty or hold an enemy piece.
    pub fn mobility(&self, white: bool) -> i32 {
        self.own_pieces(white)
            .into_iter()
            .filter(|&(_, _, c)| !c.eq_ignore_ascii_case(&'p'))
            .map(|(f, r, c)| {
                self.piece_attacks(f, r, c)
                    .into_iter()
                    .filter(|&(x, y)| !self.at(x, y).is_some_and(|d| Self::mine(d, white)))
                    .count() as i32
            })
            .sum()
    }

    pub fn center(&self, white: bool) -> i32 {
        let (f0, r0) = (self.w / 2 - 1, self.h / 2 - 1);
        self.own_pieces(white)
            .into_iter()
            .filter(|&(f, r, _)| (f == f0 || f == f0 + 1) && (r == r0 || r == r0 + 1))
            .count() as i32
    }

    pub fn material(&self, white: bool) -> i32 {
        self.own_pieces(white)
            .into_iter()
            .map(|(_, _, c)| match c.to_ascii_lowercase() {
                'p' => 100,
                'n' => 300,
                'b' => 310,
                'r' => 500,
                'q' => 900,
                _ => 0,
            })
            .sum()
    }

    /// Material + 2 x mobility + 10 x center, as a difference from the mover's side.
    pub fn static_eval(&self) -> i32 {
        let us = self.white;
        (self.material(us) - self.material(!us))
            + 2 * (self.mobility(us) - self.mobility(!us))
            + 10 * (self.center(us) - self.center(!us))
    }

    pub fn moves_with_children(&self) -> Vec<(String, OracleBoard)> {
        self.legal()
            .into_iter()
            .map(|m| (m.coordinate(), self.play(&m)))
            .collect()
    }
}
