use thiserror::Error;

use crate::board::{Conflict, Player, Position};
use crate::solver::SearchStats;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoardError {
    #[error("board size {0} is outside 1..=32")]
    InvalidSize(usize),
    #[error("compact occupancy supports n <= 16, got {0}")]
    CompactTooLarge(usize),
    #[error("position {pos} is off the {n}x{n} board")]
    OutOfBounds { pos: Position, n: usize },
    #[error("attack check needs two distinct positions, got {0} twice")]
    SamePosition(Position),
    #[error("illegal move {pos}: shares a {conflict} with the queen at {queen}")]
    IllegalMove { pos: Position, conflict: Conflict, queen: Position },
    #[error("no move to undo")]
    NoMoveToUndo,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("first move {0} is outside the canonical region")]
    NotCanonical(Position),
    #[error("no reply tabulated for first move {0}")]
    UnexpectedFirstMove(Position),
    #[error("first move {0} has no sub-table (invalid by design)")]
    InvalidByDesign(Position),
    #[error("sub-table index {index} for first move {first} is out of range")]
    IndexOutOfRange { first: Position, index: u8 },
    #[error("no reply tabulated for third move {third} after first move {first}")]
    UnexpectedThirdMove { first: Position, third: Position },
    #[error("tabulated reply {0} is not available in the current position")]
    IllegalReply(Position),
    #[error("tables target n = {tables}, search runs n = {search}")]
    SizeMismatch { tables: usize, search: usize },
    #[error("answer tables need an even n <= 16, got {0}")]
    UnsupportedSize(usize),
    #[error("table generation is limited to n <= {limit} unless explicitly allowed, got {n}")]
    TooExpensive { n: usize, limit: usize },
    #[error("player 2 has no winning reply to first move {0}; player 1 wins this size")]
    NotPlayer2Win(Position),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Solve(#[from] Box<SolveError>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Board(#[from] BoardError),
    #[error("search cancelled after {calls} calls")]
    Cancelled { calls: u64 },
    #[error(
        "inconclusive: {winner} wins only under a restriction on the other player \
         ({calls} calls)"
    )]
    Inconclusive { winner: Player, calls: u64, stats: Box<SearchStats> },
    #[error("odd-n strategy move {0} is unavailable")]
    StrategyMoveUnavailable(Position),
    #[error(transparent)]
    Table(Box<TableError>),
    #[error("oracle is limited to n <= {limit}, got {n}")]
    OracleTooLarge { n: usize, limit: usize },
}

impl From<TableError> for SolveError {
    fn from(e: TableError) -> Self {
        SolveError::Table(Box::new(e))
    }
}

impl From<SolveError> for TableError {
    fn from(e: SolveError) -> Self {
        TableError::Solve(Box::new(e))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error(transparent)]
    Board(#[from] BoardError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("{kind} cannot play n = {n}")]
    WrongSize { kind: &'static str, n: usize },
    #[error("{kind} plays {expected}, but it is {actual}'s turn")]
    WrongTurn { kind: &'static str, expected: Player, actual: Player },
    #[error("{kind} cannot continue from a position it would not have reached: {reason}")]
    Unreachable { kind: &'static str, reason: String },
    #[error("table-backed strategy needs tables for n = 16")]
    MissingTables,
    #[error("adversary move rejected: {source}")]
    IllegalAdversaryMove {
        source: BoardError,
        transcript: Vec<Position>,
    },
}
