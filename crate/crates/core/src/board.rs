//! Board geometry, the four conflict rules and occupancy bookkeeping.
//!
//! Rows and columns are numbered `0..n`. A queen at `(r, c)` claims its row,
//! its column, the falling diagonal `r + c` and the rising diagonal `r - c`.
//! Occupancy keeps one set per family; a cell is available iff none of its
//! four indices is taken.

use std::fmt;

use crate::error::BoardError;

/// Largest supported board side.
pub const MAX_N: usize = 32;
/// Largest board side the packed [`CompactOccupancy`] can hold.
pub const COMPACT_MAX_N: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dims {
    n: u8,
}

impl Dims {
    pub fn new(n: usize) -> Result<Self, BoardError> {
        if n == 0 || n > MAX_N {
            return Err(BoardError::InvalidSize(n));
        }
        Ok(Dims { n: n as u8 })
    }

    #[inline]
    pub fn n(self) -> usize {
        self.n as usize
    }

    /// `(n - 1) div 2`: the last row/column of the upper-left half.
    #[inline]
    pub fn half(self) -> usize {
        (self.n as usize - 1) / 2
    }

    #[inline]
    pub fn contains(self, p: Position) -> bool {
        (p.row as usize) < self.n() && (p.col as usize) < self.n()
    }

    pub fn center(self) -> Option<Position> {
        (self.n % 2 == 1).then(|| Position::new(self.half(), self.half()))
    }

    /// All cells in row-major order.
    pub fn cells(self) -> impl Iterator<Item = Position> {
        let n = self.n();
        (0..n).flat_map(move |r| (0..n).map(move |c| Position::new(r, c)))
    }

    fn check(self, p: Position) -> Result<(), BoardError> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(BoardError::OutOfBounds { pos: p, n: self.n() })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub row: u8,
    pub col: u8,
}

impl Position {
    #[inline]
    pub const fn new(row: usize, col: usize) -> Self {
        Position { row: row as u8, col: col as u8 }
    }

    #[inline]
    pub fn row(self) -> usize {
        self.row as usize
    }

    #[inline]
    pub fn col(self) -> usize {
        self.col as usize
    }

    #[inline]
    fn falling(self) -> usize {
        self.row() + self.col()
    }

    /// `row - col + (n - 1)`, shifted to be non-negative.
    #[inline]
    fn rising(self, n: usize) -> usize {
        self.row() + n - 1 - self.col()
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    /// Player making game move `index` (0-based).
    pub fn for_move_index(index: usize) -> Player {
        if index.is_multiple_of(2) {
            Player::One
        } else {
            Player::Two
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Player::One => 1,
            Player::Two => 2,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "player {}", self.number())
    }
}

/// The line two queens share when they attack each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Conflict {
    Row,
    Column,
    FallingDiagonal,
    RisingDiagonal,
}

impl Conflict {
    pub fn as_str(self) -> &'static str {
        match self {
            Conflict::Row => "row",
            Conflict::Column => "column",
            Conflict::FallingDiagonal => "falling diagonal",
            Conflict::RisingDiagonal => "rising diagonal",
        }
    }
}

impl fmt::Display for Conflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// First shared line of two queens, checked in row, column, falling, rising order.
pub fn conflict(a: Position, b: Position) -> Option<Conflict> {
    if a.row == b.row {
        Some(Conflict::Row)
    } else if a.col == b.col {
        Some(Conflict::Column)
    } else if a.falling() == b.falling() {
        Some(Conflict::FallingDiagonal)
    } else if a.row as i32 - a.col as i32 == b.row as i32 - b.col as i32 {
        Some(Conflict::RisingDiagonal)
    } else {
        None
    }
}

/// Whether queens on two distinct cells attack each other.
pub fn attacks(a: Position, b: Position) -> Result<bool, BoardError> {
    if a == b {
        return Err(BoardError::SamePosition(a));
    }
    Ok(conflict(a, b).is_some())
}

/// Half-turn image `(n-1-r, n-1-c)`.
#[inline]
pub fn mirror(p: Position, dims: Dims) -> Position {
    let m = dims.n() - 1;
    Position::new(m - p.row(), m - p.col())
}

/// Representatives of the empty board's eight symmetry classes:
/// `col <= (n-1) div 2` and `row <= col`, row-major.
pub fn canonical_first_moves(dims: Dims) -> Vec<Position> {
    let half = dims.half();
    (0..=half)
        .flat_map(|r| (r..=half).map(move |c| Position::new(r, c)))
        .collect()
}

pub fn is_canonical_first_move(p: Position, dims: Dims) -> bool {
    p.col() <= dims.half() && p.row <= p.col
}

/// Mask of the low `n` bits.
#[inline]
pub(crate) fn col_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Attack bookkeeping for the four line families.
///
/// `occupy` and `release` trust their caller: `occupy` expects an available
/// cell and `release` a cell previously occupied, in LIFO order.
pub trait Occupancy: Clone + fmt::Debug {
    fn empty(dims: Dims) -> Self;
    fn dims(&self) -> Dims;
    fn is_free(&self, p: Position) -> bool;
    fn occupy(&mut self, p: Position);
    fn release(&mut self, p: Position);
    /// Columns of `row` that are still available, as a bit mask.
    fn free_cols_in_row(&self, row: usize) -> u32;
    /// Set-bit counts of rows, columns, falling and rising diagonals.
    fn counts(&self) -> [u32; 4];
}

/// All four masks packed in machine words. Only valid for `n <= 16`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompactOccupancy {
    dims: Dims,
    rows: u16,
    cols: u16,
    falling: u32,
    rising: u32,
}

impl CompactOccupancy {
    pub fn try_empty(dims: Dims) -> Result<Self, BoardError> {
        if dims.n() > COMPACT_MAX_N {
            return Err(BoardError::CompactTooLarge(dims.n()));
        }
        Ok(Self::empty(dims))
    }
}

impl Occupancy for CompactOccupancy {
    fn empty(dims: Dims) -> Self {
        assert!(dims.n() <= COMPACT_MAX_N, "compact occupancy needs n <= 16");
        CompactOccupancy { dims, rows: 0, cols: 0, falling: 0, rising: 0 }
    }

    #[inline]
    fn dims(&self) -> Dims {
        self.dims
    }

    #[inline]
    fn is_free(&self, p: Position) -> bool {
        let n = self.dims.n();
        (self.rows >> p.row) & 1 == 0
            && (self.cols >> p.col) & 1 == 0
            && (self.falling >> p.falling()) & 1 == 0
            && (self.rising >> p.rising(n)) & 1 == 0
    }

    #[inline]
    fn occupy(&mut self, p: Position) {
        let n = self.dims.n();
        self.rows |= 1 << p.row;
        self.cols |= 1 << p.col;
        self.falling |= 1 << p.falling();
        self.rising |= 1 << p.rising(n);
    }

    #[inline]
    fn release(&mut self, p: Position) {
        let n = self.dims.n();
        self.rows &= !(1 << p.row);
        self.cols &= !(1 << p.col);
        self.falling &= !(1 << p.falling());
        self.rising &= !(1 << p.rising(n));
    }

    #[inline]
    fn free_cols_in_row(&self, row: usize) -> u32 {
        let n = self.dims.n();
        if (self.rows >> row) & 1 != 0 {
            return 0;
        }
        let falling = self.falling >> row;
        // Bit c of the result must read rising index row + n - 1 - c.
        let rising = self.rising.reverse_bits() >> (32 - row - n);
        !(self.cols as u32 | falling | rising) & col_mask(n)
    }

    fn counts(&self) -> [u32; 4] {
        [
            self.rows.count_ones(),
            self.cols.count_ones(),
            self.falling.count_ones(),
            self.rising.count_ones(),
        ]
    }
}

/// Plain flag arrays; works for every supported size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneralOccupancy {
    dims: Dims,
    rows: [bool; MAX_N],
    cols: [bool; MAX_N],
    falling: [bool; 2 * MAX_N - 1],
    rising: [bool; 2 * MAX_N - 1],
}

impl Occupancy for GeneralOccupancy {
    fn empty(dims: Dims) -> Self {
        GeneralOccupancy {
            dims,
            rows: [false; MAX_N],
            cols: [false; MAX_N],
            falling: [false; 2 * MAX_N - 1],
            rising: [false; 2 * MAX_N - 1],
        }
    }

    #[inline]
    fn dims(&self) -> Dims {
        self.dims
    }

    #[inline]
    fn is_free(&self, p: Position) -> bool {
        let n = self.dims.n();
        !(self.rows[p.row()]
            || self.cols[p.col()]
            || self.falling[p.falling()]
            || self.rising[p.rising(n)])
    }

    fn occupy(&mut self, p: Position) {
        self.set(p, true);
    }

    fn release(&mut self, p: Position) {
        self.set(p, false);
    }

    fn free_cols_in_row(&self, row: usize) -> u32 {
        let n = self.dims.n();
        if self.rows[row] {
            return 0;
        }
        (0..n)
            .filter(|&c| self.is_free(Position::new(row, c)))
            .fold(0, |mask, c| mask | 1 << c)
    }

    fn counts(&self) -> [u32; 4] {
        let count = |flags: &[bool]| flags.iter().filter(|&&f| f).count() as u32;
        [count(&self.rows), count(&self.cols), count(&self.falling), count(&self.rising)]
    }
}

impl GeneralOccupancy {
    fn set(&mut self, p: Position, value: bool) {
        let n = self.dims.n();
        self.rows[p.row()] = value;
        self.cols[p.col()] = value;
        self.falling[p.falling()] = value;
        self.rising[p.rising(n)] = value;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Representation {
    /// Compact for `n <= 16`, general otherwise.
    #[default]
    Auto,
    Compact,
    General,
}

impl Representation {
    pub fn resolve(self, dims: Dims) -> Result<Representation, BoardError> {
        match self {
            Representation::Auto if dims.n() <= COMPACT_MAX_N => Ok(Representation::Compact),
            Representation::Auto => Ok(Representation::General),
            Representation::Compact if dims.n() > COMPACT_MAX_N => {
                Err(BoardError::CompactTooLarge(dims.n()))
            }
            other => Ok(other),
        }
    }
}

/// Either representation, chosen at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnyOccupancy {
    Compact(CompactOccupancy),
    General(GeneralOccupancy),
}

impl AnyOccupancy {
    pub fn with_representation(dims: Dims, repr: Representation) -> Result<Self, BoardError> {
        Ok(match repr.resolve(dims)? {
            Representation::Compact => AnyOccupancy::Compact(CompactOccupancy::empty(dims)),
            _ => AnyOccupancy::General(GeneralOccupancy::empty(dims)),
        })
    }

    pub fn representation(&self) -> Representation {
        match self {
            AnyOccupancy::Compact(_) => Representation::Compact,
            AnyOccupancy::General(_) => Representation::General,
        }
    }
}

macro_rules! dispatch {
    ($self:expr, $o:ident => $body:expr) => {
        match $self {
            AnyOccupancy::Compact($o) => $body,
            AnyOccupancy::General($o) => $body,
        }
    };
}

impl Occupancy for AnyOccupancy {
    fn empty(dims: Dims) -> Self {
        Self::with_representation(dims, Representation::Auto).expect("auto always resolves")
    }

    fn dims(&self) -> Dims {
        dispatch!(self, o => o.dims())
    }

    fn is_free(&self, p: Position) -> bool {
        dispatch!(self, o => o.is_free(p))
    }

    fn occupy(&mut self, p: Position) {
        dispatch!(self, o => o.occupy(p))
    }

    fn release(&mut self, p: Position) {
        dispatch!(self, o => o.release(p))
    }

    fn free_cols_in_row(&self, row: usize) -> u32 {
        dispatch!(self, o => o.free_cols_in_row(row))
    }

    fn counts(&self) -> [u32; 4] {
        dispatch!(self, o => o.counts())
    }
}

/// A game in progress: the ordered moves plus derived occupancy.
///
/// Even move indices belong to player 1. `rotsym` stays true while every
/// player-2 move was the half-turn image of the player-1 move before it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameState {
    dims: Dims,
    moves: Vec<Position>,
    occupancy: AnyOccupancy,
    rotsym: bool,
}

impl GameState {
    pub fn new(dims: Dims) -> Self {
        Self::with_representation(dims, Representation::Auto).expect("auto always resolves")
    }

    pub fn with_representation(dims: Dims, repr: Representation) -> Result<Self, BoardError> {
        Ok(GameState {
            dims,
            moves: Vec::with_capacity(dims.n()),
            occupancy: AnyOccupancy::with_representation(dims, repr)?,
            rotsym: true,
        })
    }

    /// Replays `moves` from the empty board.
    pub fn from_moves(dims: Dims, moves: &[Position]) -> Result<Self, BoardError> {
        let mut state = GameState::new(dims);
        for &p in moves {
            state.place(p)?;
        }
        Ok(state)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn moves(&self) -> &[Position] {
        &self.moves
    }

    pub fn last_move(&self) -> Option<Position> {
        self.moves.last().copied()
    }

    pub fn occupancy(&self) -> &AnyOccupancy {
        &self.occupancy
    }

    pub fn rotsym(&self) -> bool {
        self.rotsym
    }

    pub fn to_move(&self) -> Player {
        Player::for_move_index(self.moves.len())
    }

    pub fn is_available(&self, p: Position) -> bool {
        self.dims.contains(p) && self.occupancy.is_free(p)
    }

    /// Why `p` cannot be played, naming the first queen (in move order) it
    /// conflicts with.
    pub fn blocking_queen(&self, p: Position) -> Option<(Position, Conflict)> {
        self.moves.iter().find_map(|&q| {
            if q == p {
                Some((q, Conflict::Row))
            } else {
                conflict(q, p).map(|c| (q, c))
            }
        })
    }

    pub fn place(&mut self, p: Position) -> Result<(), BoardError> {
        self.dims.check(p)?;
        if !self.occupancy.is_free(p) {
            let (queen, conflict) = self
                .blocking_queen(p)
                .expect("an unavailable cell is attacked by some queen");
            return Err(BoardError::IllegalMove { pos: p, conflict, queen });
        }
        if let (Player::Two, Some(prev)) = (self.to_move(), self.last_move()) {
            self.rotsym = self.rotsym && p == mirror(prev, self.dims);
        }
        self.moves.push(p);
        self.occupancy.occupy(p);
        Ok(())
    }

    pub fn unplace_last(&mut self) -> Result<Position, BoardError> {
        let p = self.moves.pop().ok_or(BoardError::NoMoveToUndo)?;
        self.occupancy.release(p);
        self.rotsym = Self::mirrored_replies(&self.moves, self.dims);
        Ok(p)
    }

    fn mirrored_replies(moves: &[Position], dims: Dims) -> bool {
        moves.chunks_exact(2).all(|pair| pair[1] == mirror(pair[0], dims))
    }

    /// Available cells in row-major order.
    pub fn available_positions(&self) -> Vec<Position> {
        let n = self.dims.n();
        let mut out = Vec::new();
        for r in 0..n {
            let mut mask = self.occupancy.free_cols_in_row(r);
            while mask != 0 {
                out.push(Position::new(r, mask.trailing_zeros() as usize));
                mask &= mask - 1;
            }
        }
        out
    }

    pub fn has_available(&self) -> bool {
        (0..self.dims.n()).any(|r| self.occupancy.free_cols_in_row(r) != 0)
    }

    /// Whether the queen set equals its half-turn image.
    pub fn is_half_turn_symmetric(&self) -> bool {
        self.moves.iter().all(|&p| self.moves.contains(&mirror(p, self.dims)))
    }

    /// Text diagram: `*` unavailable, `.` available, `Q` for queens when
    /// `show_queens` is set (otherwise queens render as `*`).
    pub fn render(&self, show_queens: bool) -> String {
        let n = self.dims.n();
        let mut out = String::with_capacity(n * 2 * n);
        for r in 0..n {
            let line: Vec<&str> = (0..n)
                .map(|c| {
                    let p = Position::new(r, c);
                    if show_queens && self.moves.contains(&p) {
                        "Q"
                    } else if self.occupancy.is_free(p) {
                        "."
                    } else {
                        "*"
                    }
                })
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(true))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pos(r: usize, c: usize) -> Position {
        Position::new(r, c)
    }

    fn dims(n: usize) -> Dims {
        Dims::new(n).unwrap()
    }

    #[test]
    fn dims_bounds() {
        assert!(Dims::new(0).is_err());
        assert!(Dims::new(33).is_err());
        assert_eq!(dims(16).half(), 7);
        assert_eq!(dims(5).half(), 2);
        assert_eq!(dims(1).half(), 0);
    }

    #[test]
    fn attacks_examples() {
        assert!(attacks(pos(0, 0), pos(1, 1)).unwrap());
        assert!(!attacks(pos(0, 1), pos(2, 2)).unwrap());
        assert!(attacks(pos(3, 0), pos(0, 3)).unwrap());
        assert!(matches!(attacks(pos(2, 2), pos(2, 2)), Err(BoardError::SamePosition(_))));
    }

    #[test]
    fn mirror_examples() {
        assert_eq!(mirror(pos(0, 1), dims(5)), pos(4, 3));
        assert_eq!(mirror(pos(2, 2), dims(5)), pos(2, 2));
        assert_eq!(mirror(pos(1, 2), dims(16)), pos(14, 13));
    }

    #[test]
    fn availability_matches_diagram_for_n4() {
        let mut s = GameState::new(dims(4));
        assert!(dims(4).cells().all(|p| s.is_available(p)));
        s.place(pos(1, 1)).unwrap();
        assert!(s.is_available(pos(0, 3)));
        assert!(!s.is_available(pos(0, 0)));
        assert_eq!(s.available_positions(), vec![pos(0, 3), pos(2, 3), pos(3, 0), pos(3, 2)]);
        assert_eq!(s.render(false), "* * * .\n* * * *\n* * * .\n. * . *\n");
        assert_eq!(s.render(true).lines().nth(1), Some("* Q * *"));
    }

    #[test]
    fn available_positions_small_boards() {
        assert_eq!(GameState::new(dims(1)).available_positions(), vec![pos(0, 0)]);
        let s = GameState::from_moves(dims(2), &[pos(0, 0)]).unwrap();
        assert!(s.available_positions().is_empty());
        assert!(!s.has_available());
    }

    #[test]
    fn place_tracks_rotsym() {
        let mut s = GameState::new(dims(5));
        s.place(pos(2, 2)).unwrap();
        assert_eq!(s.moves().len(), 1);
        assert!(s.rotsym());
        s.place(pos(0, 1)).unwrap();
        assert!(!s.rotsym());

        let mut s = GameState::new(dims(5));
        s.place(pos(0, 1)).unwrap();
        s.place(pos(4, 3)).unwrap();
        assert!(s.rotsym());
        s.place(pos(2, 2)).unwrap();
        assert!(s.rotsym());
    }

    #[test]
    fn illegal_move_names_constraint_and_queen() {
        let mut s = GameState::from_moves(dims(5), &[pos(2, 2)]).unwrap();
        let err = s.place(pos(2, 4)).unwrap_err();
        assert_eq!(
            err,
            BoardError::IllegalMove { pos: pos(2, 4), conflict: Conflict::Row, queen: pos(2, 2) }
        );
        let err = s.place(pos(0, 4)).unwrap_err();
        assert!(matches!(err, BoardError::IllegalMove { conflict: Conflict::FallingDiagonal, .. }));
        let err = s.place(pos(4, 4)).unwrap_err();
        assert!(matches!(err, BoardError::IllegalMove { conflict: Conflict::RisingDiagonal, .. }));
        assert!(matches!(s.place(pos(5, 0)), Err(BoardError::OutOfBounds { .. })));
        assert_eq!(s.moves(), &[pos(2, 2)]);
    }

    #[test]
    fn unplace_restores_everything() {
        let mut s = GameState::from_moves(dims(6), &[pos(0, 1)]).unwrap();
        let before = s.clone();
        s.place(pos(5, 4)).unwrap();
        s.unplace_last().unwrap();
        assert_eq!(s, before);

        let mut s = GameState::new(dims(6));
        for p in [pos(0, 1), pos(2, 0), pos(4, 3)] {
            s.place(p).unwrap();
        }
        for _ in 0..3 {
            s.unplace_last().unwrap();
        }
        assert_eq!(s, GameState::new(dims(6)));
        assert_eq!(s.unplace_last(), Err(BoardError::NoMoveToUndo));
    }

    #[test]
    fn canonical_first_moves_examples() {
        assert_eq!(canonical_first_moves(dims(16)).len(), 36);
        assert_eq!(canonical_first_moves(dims(1)), vec![pos(0, 0)]);
        assert_eq!(canonical_first_moves(dims(4)), vec![pos(0, 0), pos(0, 1), pos(1, 1)]);
    }

    #[test]
    fn compact_rejects_large_boards() {
        assert!(CompactOccupancy::try_empty(dims(17)).is_err());
        assert!(GameState::with_representation(dims(17), Representation::Compact).is_err());
        let s = GameState::new(dims(17));
        assert_eq!(s.occupancy().representation(), Representation::General);
        let s = GameState::new(dims(16));
        assert_eq!(s.occupancy().representation(), Representation::Compact);
    }

    #[test]
    fn counts_equal_queens() {
        let s = GameState::from_moves(dims(8), &[pos(0, 0), pos(1, 2), pos(2, 4)]).unwrap();
        assert_eq!(s.occupancy().counts(), [3; 4]);
    }

    #[test]
    fn free_cols_in_row_on_largest_boards() {
        for n in [16, 31, 32] {
            let d = dims(n);
            let mut s = GameState::with_representation(d, Representation::General).unwrap();
            s.place(pos(n - 1, 0)).unwrap();
            s.place(pos(0, 1)).unwrap();
            let naive: Vec<_> = d.cells().filter(|&p| s.is_available(p)).collect();
            assert_eq!(s.available_positions(), naive);
        }
    }
}
