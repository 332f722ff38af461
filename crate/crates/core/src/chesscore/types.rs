use std::fmt;

use bitflags::bitflags;
use serde::{Deserialize, Serialize};

/// Largest supported board edge. Boards are stored with a fixed stride of this width.
pub const MAX_DIM: u8 = 10;
pub const BOARD_CELLS: usize = (MAX_DIM as usize) * (MAX_DIM as usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Variant {
    #[serde(rename = "STANDARD_8x8", alias = "standard")]
    Standard8x8,
    #[serde(rename = "CORRIDA_10x10", alias = "corrida")]
    Corrida10x10,
    #[serde(rename = "CORRIDA_8x10", alias = "corrida8x10")]
    Corrida8x10,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Standard8x8, Variant::Corrida10x10, Variant::Corrida8x10];

    pub const fn width(self) -> u8 {
        match self {
            Variant::Standard8x8 | Variant::Corrida8x10 => 8,
            Variant::Corrida10x10 => 10,
        }
    }

    pub const fn height(self) -> u8 {
        match self {
            Variant::Standard8x8 => 8,
            Variant::Corrida10x10 | Variant::Corrida8x10 => 10,
        }
    }

    pub const fn is_corrida(self) -> bool {
        !matches!(self, Variant::Standard8x8)
    }

    /// Looks a variant up by its board dimensions.
    pub fn from_dims(width: u8, height: u8) -> Option<Variant> {
        Variant::ALL
            .into_iter()
            .find(|v| v.width() == width && v.height() == height)
    }

    pub fn contains(self, file: i8, rank: i8) -> bool {
        file >= 0 && rank >= 0 && file < self.width() as i8 && rank < self.height() as i8
    }

    /// Back-rank piece order, file a first.
    pub fn back_rank(self) -> &'static [PieceKind] {
        use PieceKind::*;
        match self {
            Variant::Standard8x8 | Variant::Corrida8x10 => {
                &[Rook, Knight, Bishop, Queen, King, Bishop, Knight, Rook]
            }
            Variant::Corrida10x10 => &[
                Rook, Knight, Knight, Bishop, Queen, King, Bishop, Knight, Knight, Rook,
            ],
        }
    }

    pub fn king_file(self) -> u8 {
        self.back_rank()
            .iter()
            .position(|&k| k == PieceKind::King)
            .expect("back rank has a king") as u8
    }

    pub const fn name(self) -> &'static str {
        match self {
            Variant::Standard8x8 => "STANDARD_8x8",
            Variant::Corrida10x10 => "CORRIDA_10x10",
            Variant::Corrida8x10 => "CORRIDA_8x10",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "standard" | "standard_8x8" | "8x8" => Ok(Variant::Standard8x8),
            "corrida" | "corrida_10x10" | "10x10" => Ok(Variant::Corrida10x10),
            "corrida8x10" | "corrida_8x10" | "8x10" => Ok(Variant::Corrida8x10),
            other => Err(format!("unknown variant `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub const ALL: [Color; 2] = [Color::White, Color::Black];

    #[inline]
    pub const fn opposite(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }

    #[inline]
    pub const fn index(self) -> usize {
        self as usize
    }

    /// Rank step a pawn of this color advances by.
    #[inline]
    pub const fn forward(self) -> i8 {
        match self {
            Color::White => 1,
            Color::Black => -1,
        }
    }
}

impl std::ops::Not for Color {
    type Output = Color;

    fn not(self) -> Color {
        self.opposite()
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::White => "white",
            Color::Black => "black",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PieceKind {
    Pawn,
    Knight,
    Bishop,
    Rook,
    Queen,
    King,
}

impl PieceKind {
    pub const ALL: [PieceKind; 6] = [
        PieceKind::Pawn,
        PieceKind::Knight,
        PieceKind::Bishop,
        PieceKind::Rook,
        PieceKind::Queen,
        PieceKind::King,
    ];
    pub const PROMOTIONS: [PieceKind; 4] = [
        PieceKind::Queen,
        PieceKind::Rook,
        PieceKind::Bishop,
        PieceKind::Knight,
    ];

    pub const fn letter(self) -> char {
        match self {
            PieceKind::Pawn => 'P',
            PieceKind::Knight => 'N',
            PieceKind::Bishop => 'B',
            PieceKind::Rook => 'R',
            PieceKind::Queen => 'Q',
            PieceKind::King => 'K',
        }
    }

    pub fn from_letter(c: char) -> Option<PieceKind> {
        Some(match c.to_ascii_uppercase() {
            'P' => PieceKind::Pawn,
            'N' => PieceKind::Knight,
            'B' => PieceKind::Bishop,
            'R' => PieceKind::Rook,
            'Q' => PieceKind::Queen,
            'K' => PieceKind::King,
            _ => return None,
        })
    }

    #[inline]
    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn is_minor(self) -> bool {
        matches!(self, PieceKind::Knight | PieceKind::Bishop)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Piece {
    pub color: Color,
    pub kind: PieceKind,
}

impl Piece {
    pub const fn new(color: Color, kind: PieceKind) -> Self {
        Piece { color, kind }
    }

    /// FEN letter: uppercase for White.
    pub fn fen_char(self) -> char {
        let c = self.kind.letter();
        match self.color {
            Color::White => c,
            Color::Black => c.to_ascii_lowercase(),
        }
    }

    pub fn from_fen_char(c: char) -> Option<Piece> {
        let kind = PieceKind::from_letter(c)?;
        let color = if c.is_ascii_uppercase() {
            Color::White
        } else {
            Color::Black
        };
        Some(Piece { color, kind })
    }

    #[inline]
    pub const fn index(self) -> usize {
        self.color.index() * 6 + self.kind.index()
    }
}

/// A board coordinate. File 0 is `a`, rank 0 is the first rank.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Square {
    pub file: u8,
    pub rank: u8,
}

impl Square {
    pub const fn new(file: u8, rank: u8) -> Self {
        Square { file, rank }
    }

    #[inline]
    pub const fn index(self) -> usize {
        self.rank as usize * MAX_DIM as usize + self.file as usize
    }

    #[inline]
    pub const fn from_index(idx: usize) -> Self {
        Square {
            file: (idx % MAX_DIM as usize) as u8,
            rank: (idx / MAX_DIM as usize) as u8,
        }
    }

    /// Offsets the square, returning `None` when leaving the variant's board.
    #[inline]
    pub fn offset(self, variant: Variant, df: i8, dr: i8) -> Option<Square> {
        let f = self.file as i8 + df;
        let r = self.rank as i8 + dr;
        variant
            .contains(f, r)
            .then(|| Square::new(f as u8, r as u8))
    }

    /// Parses `e4`, `j10` and the like. Bounds against a variant are checked by callers.
    pub fn parse(s: &str) -> Option<Square> {
        let mut chars = s.chars();
        let f = chars.next()?;
        if !('a'..='j').contains(&f) {
            return None;
        }
        let digits = chars.as_str();
        if digits.is_empty() || digits.len() > 2 || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let rank: u8 = digits.parse().ok()?;
        if rank == 0 || rank > MAX_DIM || digits.starts_with('0') {
            return None;
        }
        Some(Square::new(f as u8 - b'a', rank - 1))
    }

    pub fn in_variant(self, variant: Variant) -> bool {
        variant.contains(self.file as i8, self.rank as i8)
    }

    /// Mirror across the horizontal midline of the given variant.
    pub fn flip_rank(self, variant: Variant) -> Square {
        Square::new(self.file, variant.height() - 1 - self.rank)
    }

    pub fn is_light(self) -> bool {
        (self.file + self.rank) % 2 == 1
    }
}

impl fmt::Display for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", (b'a' + self.file) as char, self.rank + 1)
    }
}

impl fmt::Debug for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

bitflags! {
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
    pub struct MoveFlags: u8 {
        const CAPTURE = 0b0000_0001;
        const EN_PASSANT = 0b0000_0010;
        const CASTLE_KINGSIDE = 0b0000_0100;
        const CASTLE_QUEENSIDE = 0b0000_1000;
        const DOUBLE_STEP = 0b0001_0000;
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub from: Square,
    pub to: Square,
    pub promotion: Option<PieceKind>,
    pub flags: MoveFlags,
}

impl Move {
    pub const fn new(from: Square, to: Square, flags: MoveFlags) -> Self {
        Move {
            from,
            to,
            promotion: None,
            flags,
        }
    }

    pub fn is_capture(&self) -> bool {
        self.flags.contains(MoveFlags::CAPTURE)
    }

    pub fn is_en_passant(&self) -> bool {
        self.flags.contains(MoveFlags::EN_PASSANT)
    }

    pub fn is_castle(&self) -> bool {
        self.flags
            .intersects(MoveFlags::CASTLE_KINGSIDE | MoveFlags::CASTLE_QUEENSIDE)
    }

    /// Coordinate form (`g1f3`, `a7a8q`), as used by UCI.
    pub fn to_coordinate(&self) -> String {
        let mut s = format!("{}{}", self.from, self.to);
        if let Some(p) = self.promotion {
            s.push(p.letter().to_ascii_lowercase());
        }
        s
    }
}

impl fmt::Debug for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_coordinate())
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_coordinate())
    }
}

/// Castling rights in the order White kingside, White queenside, Black kingside, Black queenside.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CastlingRights(pub [bool; 4]);

impl CastlingRights {
    pub const ALL: CastlingRights = CastlingRights([true; 4]);
    pub const NONE: CastlingRights = CastlingRights([false; 4]);

    #[inline]
    pub fn index(color: Color, kingside: bool) -> usize {
        color.index() * 2 + usize::from(!kingside)
    }

    pub fn get(&self, color: Color, kingside: bool) -> bool {
        self.0[Self::index(color, kingside)]
    }

    pub fn set(&mut self, color: Color, kingside: bool, value: bool) {
        self.0[Self::index(color, kingside)] = value;
    }

    pub fn clear_color(&mut self, color: Color) {
        self.set(color, true, false);
        self.set(color, false, false);
    }

    pub fn flipped(self) -> CastlingRights {
        let [wk, wq, bk, bq] = self.0;
        CastlingRights([bk, bq, wk, wq])
    }
}
