//! Player-2 answer tables for the first two rounds.
//!
//! `T` maps each canonical first move to player 2's reply. `A` maps a first
//! move to a 1-based sub-table index (0 outside the canonical region), and
//! `B[k]` maps player 1's second move to player 2's second reply. Replies
//! are one byte each: high nibble row, low nibble column, `0xFF` for "no
//! reply expected".
//!
//! Text format (`QPTABLES v1`):
//!
//! ```text
//! QPTABLES v1 n=10
//! # A indexes B sub-tables 1..k in canonical first-move order
//! T
//! FF FF ...        n lines of n hex bytes, row-major
//! A
//! 01 02 ...
//! B1
//! ...
//! ```

use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;

use crate::board::{
    attacks, canonical_first_moves, is_canonical_first_move, mirror, Dims, GameState, Position,
};
use crate::error::{SolveError, TableError};
use crate::solver::{wins, ProgressSink, SearchOptions};

pub const HEADER_PREFIX: &str = "QPTABLES v1";
const INDEX_COMMENT: &str = "# A indexes B sub-tables 1..k in canonical first-move order";

/// Default largest `n` [`generate_tables`] accepts without opting in.
pub const GENERATE_DEFAULT_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ReplyByte(pub u8);

impl ReplyByte {
    pub const INVALID: ReplyByte = ReplyByte(0xFF);

    /// Packs a position with row and column below 16.
    pub fn encode(p: Position) -> Option<ReplyByte> {
        (p.row < 16 && p.col < 16).then_some(ReplyByte(p.row << 4 | p.col))
            .filter(|b| *b != ReplyByte::INVALID)
    }

    pub fn decode(self) -> Option<Position> {
        (self != ReplyByte::INVALID).then(|| Position::new((self.0 >> 4) as usize, (self.0 & 0x0F) as usize))
    }

    pub fn is_invalid(self) -> bool {
        self == ReplyByte::INVALID
    }
}

impl fmt::Display for ReplyByte {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02X}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnswerTables {
    dims: Dims,
    t: Vec<ReplyByte>,
    a: Vec<u8>,
    b: Vec<Vec<ReplyByte>>,
}

impl AnswerTables {
    /// Empty tables: every reply invalid, every index 0, no sub-tables.
    pub fn new(n: usize) -> Result<Self, TableError> {
        if n > 16 {
            return Err(TableError::UnsupportedSize(n));
        }
        let dims = Dims::new(n).map_err(|_| TableError::UnsupportedSize(n))?;
        Ok(AnswerTables {
            dims,
            t: vec![ReplyByte::INVALID; n * n],
            a: vec![0; n * n],
            b: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.dims.n()
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    fn idx(&self, p: Position) -> usize {
        debug_assert!(self.dims.contains(p));
        p.row() * self.n() + p.col()
    }

    pub fn t(&self, first: Position) -> ReplyByte {
        self.t[self.idx(first)]
    }

    pub fn a(&self, first: Position) -> u8 {
        self.a[self.idx(first)]
    }

    pub fn b(&self, index: u8, third: Position) -> Option<ReplyByte> {
        let i = self.idx(third);
        self.b.get((index as usize).checked_sub(1)?).map(|sub| sub[i])
    }

    pub fn sub_table_count(&self) -> usize {
        self.b.len()
    }

    pub fn set_t(&mut self, first: Position, reply: ReplyByte) {
        let i = self.idx(first);
        self.t[i] = reply;
    }

    pub fn set_a(&mut self, first: Position, index: u8) {
        let i = self.idx(first);
        self.a[i] = index;
    }

    /// Appends an all-invalid sub-table and returns its 1-based index.
    pub fn push_sub_table(&mut self) -> u8 {
        let n = self.n();
        self.b.push(vec![ReplyByte::INVALID; n * n]);
        self.b.len() as u8
    }

    pub fn set_b(&mut self, index: u8, third: Position, reply: ReplyByte) {
        let i = self.idx(third);
        self.b[index as usize - 1][i] = reply;
    }

    pub fn lookup_round1(&self, first: Position) -> Result<Position, TableError> {
        if !self.dims.contains(first) || !is_canonical_first_move(first, self.dims) {
            return Err(TableError::NotCanonical(first));
        }
        self.t(first).decode().ok_or(TableError::UnexpectedFirstMove(first))
    }

    pub fn lookup_round2(&self, first: Position, third: Position) -> Result<Position, TableError> {
        if !self.dims.contains(first) {
            return Err(TableError::InvalidByDesign(first));
        }
        let index = self.a(first);
        if index == 0 {
            return Err(TableError::InvalidByDesign(first));
        }
        if !self.dims.contains(third) {
            return Err(TableError::UnexpectedThirdMove { first, third });
        }
        self.b(index, third)
            .ok_or(TableError::IndexOutOfRange { first, index })?
            .decode()
            .ok_or(TableError::UnexpectedThirdMove { first, third })
    }

    /// Checks every table invariant; an empty list means the tables are sound.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let dims = self.dims;
        let mut push = |table, index, rule| out.push(Violation { table, index, rule });

        for p in dims.cells() {
            let canonical = is_canonical_first_move(p, dims);
            let entry = self.t(p);
            if !canonical {
                if !entry.is_invalid() {
                    push(TableRef::T, Some(p), Rule::UnusedEntrySet);
                }
            } else if let Some(reply) = entry.decode() {
                if !dims.contains(reply) {
                    push(TableRef::T, Some(p), Rule::OffBoard);
                } else if reply == p || attacks(p, reply).unwrap_or(true) {
                    push(TableRef::T, Some(p), Rule::ReplyAttacksEarlierQueen);
                }
            }

            let index = self.a(p);
            match (canonical, index) {
                (false, 0) => {}
                (false, _) => push(TableRef::A, Some(p), Rule::IndexOutsideCanonical),
                (true, 0) => push(TableRef::A, Some(p), Rule::MissingIndex),
                (true, k) if k as usize > self.b.len() => {
                    push(TableRef::A, Some(p), Rule::IndexOutOfRange)
                }
                _ => {}
            }
        }

        for (slot, sub) in self.b.iter().enumerate() {
            let k = (slot + 1) as u8;
            let owners: Vec<Position> = dims
                .cells()
                .filter(|&p| is_canonical_first_move(p, dims) && self.a(p) == k)
                .collect();
            if owners.is_empty() {
                push(TableRef::B(k), None, Rule::UnreferencedSubTable);
                continue;
            }
            for third in dims.cells() {
                let Some(reply) = sub[self.idx(third)].decode() else { continue };
                if !dims.contains(reply) {
                    push(TableRef::B(k), Some(third), Rule::OffBoard);
                    continue;
                }
                for &first in &owners {
                    let rule = match self.round2_position(first, third) {
                        Err(rule) => Some(rule),
                        Ok(Some(state)) if !state.is_available(reply) => {
                            Some(Rule::ReplyAttacksEarlierQueen)
                        }
                        Ok(_) => None,
                    };
                    if let Some(rule) = rule {
                        push(TableRef::B(k), Some(third), rule);
                        break;
                    }
                }
            }
        }
        out
    }

    /// Position after (first, T reply, third), or the rule that prevents it.
    /// `None` when the T reply itself is broken, which is reported on T.
    fn round2_position(&self, first: Position, third: Position) -> Result<Option<GameState>, Rule> {
        let reply = self.t(first).decode().ok_or(Rule::NoRound1Reply)?;
        let Ok(mut state) = GameState::from_moves(self.dims, &[first, reply]) else {
            return Ok(None);
        };
        state.place(third).map_err(|_| Rule::ThirdMoveIllegal)?;
        Ok(Some(state))
    }

    /// Root checks left when every first move that is itself a tabulated
    /// reply to an earlier checked first move gets skipped.
    pub fn round1_actual_checks(&self) -> usize {
        let mut skipped = Vec::new();
        let mut count = 0;
        for first in canonical_first_moves(self.dims) {
            if skipped.contains(&first) {
                continue;
            }
            count += 1;
            if let Some(reply) = self.t(first).decode() {
                if is_canonical_first_move(reply, self.dims) {
                    skipped.push(reply);
                }
            }
        }
        count
    }

    pub fn to_text(&self) -> String {
        let n = self.n();
        let mut out = String::new();
        writeln!(out, "{HEADER_PREFIX} n={n}").unwrap();
        writeln!(out, "{INDEX_COMMENT}").unwrap();
        let grid = |out: &mut String, cells: &mut dyn Iterator<Item = u8>| {
            let bytes: Vec<u8> = cells.collect();
            for row in bytes.chunks(n) {
                let line: Vec<String> = row.iter().map(|b| format!("{b:02X}")).collect();
                writeln!(out, "{}", line.join(" ")).unwrap();
            }
        };
        out.push_str("T\n");
        grid(&mut out, &mut self.t.iter().map(|b| b.0));
        out.push_str("A\n");
        grid(&mut out, &mut self.a.iter().copied());
        for (i, sub) in self.b.iter().enumerate() {
            writeln!(out, "B{}", i + 1).unwrap();
            grid(&mut out, &mut sub.iter().map(|b| b.0));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, TableError> {
        let parse_err = |line: usize, message: String| TableError::Parse { line, message };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (line_no, header) = lines.next().ok_or_else(|| parse_err(1, "empty file".into()))?;
        let n: usize = header
            .strip_prefix(HEADER_PREFIX)
            .and_then(|rest| rest.trim().strip_prefix("n="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| parse_err(line_no, format!("expected `{HEADER_PREFIX} n=<n>`")))?;
        let mut tables = AnswerTables::new(n).map_err(|e| parse_err(line_no, e.to_string()))?;

        let mut read_grid = |name: &str| -> Result<Vec<u8>, TableError> {
            let (line_no, title) =
                lines.next().ok_or_else(|| parse_err(0, format!("missing section {name}")))?;
            if title != name {
                return Err(parse_err(line_no, format!("expected section {name}, found `{title}`")));
            }
            let mut bytes = Vec::with_capacity(n * n);
            for _ in 0..n {
                let (line_no, row) = lines
                    .next()
                    .ok_or_else(|| parse_err(0, format!("section {name} is truncated")))?;
                let values: Vec<&str> = row.split_whitespace().collect();
                if values.len() != n {
                    return Err(parse_err(line_no, format!("expected {n} bytes, got {}", values.len())));
                }
                for v in values {
                    if v.len() != 2 {
                        return Err(parse_err(line_no, format!("`{v}` is not a two-digit hex byte")));
                    }
                    let b = u8::from_str_radix(v, 16)
                        .map_err(|_| parse_err(line_no, format!("`{v}` is not a hex byte")))?;
                    bytes.push(b);
                }
            }
            Ok(bytes)
        };

        tables.t = read_grid("T")?.into_iter().map(ReplyByte).collect();
        tables.a = read_grid("A")?;
        let mut k = 1;
        loop {
            match read_grid(&format!("B{k}")) {
                Ok(bytes) => tables.b.push(bytes.into_iter().map(ReplyByte).collect()),
                Err(TableError::Parse { line: 0, message }) if message.starts_with("missing section") => {
                    break
                }
                Err(e) => return Err(e),
            }
            k += 1;
        }
        Ok(tables)
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        fs::write(path, self.to_text())
    }

    pub fn load(path: &Path) -> Result<Self, LoadError> {
        let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(AnswerTables::from_text(&text)?)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Table(#[from] TableError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableRef {
    T,
    A,
    B(u8),
}

impl fmt::Display for TableRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableRef::T => f.write_str("T"),
            TableRef::A => f.write_str("A"),
            TableRef::B(k) => write!(f, "B{k}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    UnusedEntrySet,
    OffBoard,
    ReplyAttacksEarlierQueen,
    IndexOutsideCanonical,
    MissingIndex,
    IndexOutOfRange,
    UnreferencedSubTable,
    NoRound1Reply,
    ThirdMoveIllegal,
}

impl Rule {
    pub fn describe(self) -> &'static str {
        match self {
            Rule::UnusedEntrySet => "entry outside the canonical region must be FF",
            Rule::OffBoard => "reply lies off the board",
            Rule::ReplyAttacksEarlierQueen => "reply is attacked by an earlier queen",
            Rule::IndexOutsideCanonical => "index must be 0 outside the canonical region",
            Rule::MissingIndex => "canonical first move has no sub-table index",
            Rule::IndexOutOfRange => "index points past the last sub-table",
            Rule::UnreferencedSubTable => "sub-table is not referenced from A",
            Rule::NoRound1Reply => "sub-table entry set but the first move has no T reply",
            Rule::ThirdMoveIllegal => "entry set for a third move that is itself illegal",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Violation {
    pub table: TableRef,
    pub index: Option<Position>,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(p) => write!(f, "{}[{}]: {}", self.table, p, self.rule.describe()),
            None => write!(f, "{}: {}", self.table, self.rule.describe()),
        }
    }
}

/// Root checks needed at size `n` when each of the `half + 1` diagonal first
/// moves gets a canonical substitute reply that is later skipped.
pub fn round1_checks_with_diagonal_substitutes(dims: Dims) -> usize {
    canonical_first_moves(dims).len() - (dims.half() + 1)
}

/// Builds answer tables from scratch by search.
///
/// Every canonical first move gets a winning player-2 reply (the mirror
/// reply when it wins; for diagonal first moves a canonical substitute
/// when one wins), and every legal third move gets a winning second reply.
/// Fails with [`TableError::NotPlayer2Win`] if some first move cannot be
/// answered, i.e. player 1 wins at this size.
pub fn generate_tables<S: ProgressSink>(
    n: usize,
    opts: &SearchOptions,
    size_limit: usize,
    mut sink: S,
) -> Result<AnswerTables, TableError> {
    if n % 2 == 1 || n > 16 || n == 0 {
        return Err(TableError::UnsupportedSize(n));
    }
    if n > size_limit {
        return Err(TableError::TooExpensive { n, limit: size_limit });
    }
    let search = SearchOptions {
        tables: None,
        force_inner_start_even_small: false,
        odd_n_strategy_mode: false,
        ..opts.clone()
    };
    let mut tables = AnswerTables::new(n)?;
    let dims = tables.dims;

    let mut is_winning_reply = |state: &mut GameState, reply: Position| -> Result<bool, TableError> {
        state.place(reply).map_err(SolveError::from)?;
        let report = wins(state, &search, &mut sink);
        state.unplace_last().map_err(SolveError::from)?;
        Ok(!report?.mover_wins)
    };

    for first in canonical_first_moves(dims) {
        let mut state = GameState::from_moves(dims, &[first]).map_err(SolveError::from)?;
        let mut candidates = preferred_replies(&state, first);
        if first.row == first.col {
            // Diagonal first moves: canonical substitutes ahead of the rest.
            candidates.sort_by_key(|&p| !is_canonical_first_move(p, dims));
        }
        let mut reply = None;
        for candidate in candidates {
            if is_winning_reply(&mut state, candidate)? {
                reply = Some(candidate);
                break;
            }
        }
        let reply = reply.ok_or(TableError::NotPlayer2Win(first))?;
        tables.set_t(first, ReplyByte::encode(reply).expect("candidates are encodable"));
        let index = tables.push_sub_table();
        tables.set_a(first, index);

        state.place(reply).map_err(SolveError::from)?;
        for third in state.available_positions() {
            state.place(third).map_err(SolveError::from)?;
            let mut second_reply = None;
            for candidate in preferred_replies(&state, third) {
                if is_winning_reply(&mut state, candidate)? {
                    second_reply = Some(candidate);
                    break;
                }
            }
            state.unplace_last().map_err(SolveError::from)?;
            // The round-1 reply wins, so every third move has an answer.
            let second_reply = second_reply.ok_or(TableError::NotPlayer2Win(first))?;
            tables.set_b(index, third, ReplyByte::encode(second_reply).expect("candidates are encodable"));
        }
    }
    Ok(tables)
}

/// Available encodable replies to `last`: its mirror first when available,
/// then row-major order. (15,15) shares its code with the invalid marker and
/// is never offered.
fn preferred_replies(state: &GameState, last: Position) -> Vec<Position> {
    let mirrored = mirror(last, state.dims());
    let mut out = Vec::new();
    if state.is_available(mirrored) {
        out.push(mirrored);
    }
    out.extend(state.available_positions().into_iter().filter(|&p| p != mirrored));
    out.retain(|&p| ReplyByte::encode(p).is_some());
    out
}
