//! Exhaustive who-wins search with the symmetry and refutation prunings.
//!
//! `wins` answers whether the player to move can force being the last to
//! place a queen. Besides plain backtracking it knows five prunings, each
//! switchable through [`SearchOptions`]:
//!
//! * half-board rows for player 1 while every player-2 reply so far was the
//!   half-turn image of the preceding player-1 move (`rotsym`);
//! * a per-node forbidden set: when the opponent refuted candidate `p0`
//!   with reply `p1`, then `p1` is losing here too (the opponent answers it
//!   with `p0`) and is skipped;
//! * reply-row rotation: from the third move on, enumeration starts in the
//!   row after the previous move and wraps around, so refuting replies tend
//!   to be found in rows that are still ahead of the parent's scan;
//! * first-move canonicalization (`col <= (n-1) div 2`, `row <= col`);
//! * player-1 restrictions: the forced inner start for even `n <= 8`, and
//!   the center-then-mirror strategy for odd `n`.
//!
//! Answer tables can additionally pin player 2's first two replies.

use std::sync::Arc;

use crate::board::{
    canonical_first_moves, col_mask, mirror, CompactOccupancy, Dims, GameState,
    GeneralOccupancy, Occupancy, Player, Position, Representation, MAX_N,
};
use crate::error::{SolveError, TableError};
use crate::tables::AnswerTables;

/// Cancellation is polled once per this many calls.
const CANCEL_POLL_MASK: u64 = (1 << 14) - 1;

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub use_rotsym_pruning: bool,
    pub use_forbidden_pruning: bool,
    pub use_first_move_canonicalization: bool,
    /// Only applies to even `n <= 8`.
    pub force_inner_start_even_small: bool,
    pub use_reply_row_rotation: bool,
    /// Only applies to odd `n`.
    pub odd_n_strategy_mode: bool,
    pub progress_interval: u64,
    pub tables: Option<Arc<AnswerTables>>,
    pub representation: Representation,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            use_rotsym_pruning: true,
            use_forbidden_pruning: true,
            use_first_move_canonicalization: true,
            force_inner_start_even_small: true,
            use_reply_row_rotation: true,
            odd_n_strategy_mode: true,
            progress_interval: 1_000_000,
            tables: None,
            representation: Representation::Auto,
        }
    }
}

impl SearchOptions {
    /// All sound prunings on, no restriction of either player.
    pub fn unrestricted() -> Self {
        SearchOptions {
            force_inner_start_even_small: false,
            odd_n_strategy_mode: false,
            ..SearchOptions::default()
        }
    }

    /// Plain backtracking: nothing pruned, nothing restricted.
    pub fn exhaustive() -> Self {
        SearchOptions {
            use_rotsym_pruning: false,
            use_forbidden_pruning: false,
            use_first_move_canonicalization: false,
            use_reply_row_rotation: false,
            ..SearchOptions::unrestricted()
        }
    }

    fn forces_inner_start(&self, dims: Dims) -> bool {
        self.force_inner_start_even_small && dims.n().is_multiple_of(2) && dims.n() <= 8
    }

    fn plays_odd_strategy(&self, dims: Dims) -> bool {
        self.odd_n_strategy_mode && dims.n() % 2 == 1
    }

    /// Short stable description of the switches, for result sidecars.
    pub fn fingerprint(&self) -> String {
        let flag = |on: bool, name: &str| if on { format!("+{name}") } else { format!("-{name}") };
        [
            flag(self.use_rotsym_pruning, "rotsym"),
            flag(self.use_forbidden_pruning, "forbidden"),
            flag(self.use_first_move_canonicalization, "canonical"),
            flag(self.force_inner_start_even_small, "inner-start"),
            flag(self.use_reply_row_rotation, "row-rotation"),
            flag(self.odd_n_strategy_mode, "odd-strategy"),
            flag(self.tables.is_some(), "tables"),
        ]
        .join(" ")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Outcome {
    pub winner: Player,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FirstMoveStat {
    pub position: Position,
    /// Winner of the game after this first move.
    pub winner: Player,
    /// Calls spent below the first move (player 2's node and its subtree).
    pub calls: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Invocations of the recursive routine, root included.
    pub calls: u64,
    pub per_first_move: Vec<FirstMoveStat>,
    /// Some restriction that can hide a win of one player was active.
    pub restricted: bool,
    /// Deepest game move count reached.
    pub max_depth: usize,
}

/// Observer of a running search. All methods run on the search thread.
pub trait ProgressSink {
    fn on_calls_milestone(&mut self, _total_calls: u64) {}
    fn on_first_move_result(&mut self, _first: Position, _winner: Player, _calls: u64) {}
    fn on_third_move_enter(&mut self, _first: Position, _third: Position) {}
    fn on_third_move_exit(&mut self, _player2_wins: bool) {}
    fn poll_cancel(&mut self) -> bool {
        false
    }
}

pub struct NoProgress;

impl ProgressSink for NoProgress {}

impl<S: ProgressSink + ?Sized> ProgressSink for &mut S {
    fn on_calls_milestone(&mut self, total_calls: u64) {
        (**self).on_calls_milestone(total_calls)
    }
    fn on_first_move_result(&mut self, first: Position, winner: Player, calls: u64) {
        (**self).on_first_move_result(first, winner, calls)
    }
    fn on_third_move_enter(&mut self, first: Position, third: Position) {
        (**self).on_third_move_enter(first, third)
    }
    fn on_third_move_exit(&mut self, player2_wins: bool) {
        (**self).on_third_move_exit(player2_wins)
    }
    fn poll_cancel(&mut self) -> bool {
        (**self).poll_cancel()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub outcome: Outcome,
    pub stats: SearchStats,
}

/// Result of [`wins`] on an arbitrary position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WinsReport {
    pub mover_wins: bool,
    /// The refuting move found when the mover wins.
    pub winning_move: Option<Position>,
    pub stats: SearchStats,
}

enum Abort {
    Cancelled,
    Failed(SolveError),
}

struct Searcher<'a, O, S> {
    dims: Dims,
    n: usize,
    half: usize,
    occ: O,
    moves: [Position; MAX_N],
    depth: usize,
    opts: &'a SearchOptions,
    tables: Option<&'a AnswerTables>,
    inner_start: bool,
    odd_strategy: bool,
    stats: SearchStats,
    sink: S,
    /// Winning move of the most recent node that returned true.
    reply: Position,
    abort: Option<Abort>,
}

impl<'a, O: Occupancy, S: ProgressSink> Searcher<'a, O, S> {
    fn new(state: &GameState, opts: &'a SearchOptions, sink: S) -> Self {
        let dims = state.dims();
        let mut occ = O::empty(dims);
        let mut moves = [Position::new(0, 0); MAX_N];
        for (slot, &p) in moves.iter_mut().zip(state.moves()) {
            occ.occupy(p);
            *slot = p;
        }
        let tables = opts.tables.as_deref();
        let inner_start = opts.forces_inner_start(dims);
        let odd_strategy = opts.plays_odd_strategy(dims);
        Searcher {
            dims,
            n: dims.n(),
            half: dims.half(),
            occ,
            moves,
            depth: state.moves().len(),
            opts,
            tables,
            inner_start,
            odd_strategy,
            stats: SearchStats {
                restricted: inner_start || odd_strategy || tables.is_some(),
                max_depth: state.moves().len(),
                ..SearchStats::default()
            },
            sink,
            reply: Position::new(0, 0),
            abort: None,
        }
    }

    #[inline]
    fn push(&mut self, p: Position) {
        self.occ.occupy(p);
        self.moves[self.depth] = p;
        self.depth += 1;
        if self.depth > self.stats.max_depth {
            self.stats.max_depth = self.depth;
        }
    }

    #[inline]
    fn pop(&mut self) {
        self.depth -= 1;
        self.occ.release(self.moves[self.depth]);
    }

    fn fail(&mut self, err: SolveError) -> bool {
        self.abort.get_or_insert(Abort::Failed(err));
        false
    }

    /// Whether the player to move wins. On `true`, `self.reply` holds the move.
    fn wins(&mut self, rotsym: bool) -> bool {
        self.stats.calls += 1;
        let calls = self.stats.calls;
        if calls.is_multiple_of(self.opts.progress_interval) {
            self.sink.on_calls_milestone(calls);
        }
        if calls & CANCEL_POLL_MASK == 0 && self.sink.poll_cancel() {
            self.abort = Some(Abort::Cancelled);
        }
        if self.abort.is_some() {
            return false;
        }
        debug_assert!(self.depth <= self.n, "more queens than rows");

        let k = self.depth;
        let player1 = k.is_multiple_of(2);

        if player1 && self.odd_strategy {
            let p = if k == 0 {
                Position::new(self.half, self.half)
            } else {
                mirror(self.moves[k - 1], self.dims)
            };
            if !self.occ.is_free(p) {
                // Only reachable if the mirror argument breaks, or when the
                // search was started from a foreign position.
                return self.fail(SolveError::StrategyMoveUnavailable(p));
            }
            let mut forbidden = [0u32; MAX_N];
            return self.try_candidate(p, rotsym, &mut forbidden);
        }

        if !player1 && (k == 1 || k == 3) {
            if let Some(tables) = self.tables {
                let looked_up = if k == 1 {
                    tables.lookup_round1(self.moves[0])
                } else {
                    tables.lookup_round2(self.moves[0], self.moves[2])
                };
                let p = match looked_up {
                    Ok(p) => p,
                    Err(e) => return self.fail(e.into()),
                };
                if !self.occ.is_free(p) {
                    return self.fail(TableError::IllegalReply(p).into());
                }
                let mut forbidden = [0u32; MAX_N];
                return self.try_candidate(p, rotsym, &mut forbidden);
            }
        }

        let start_row = if self.opts.use_reply_row_rotation && k >= 2 {
            (self.moves[k - 1].row() + 1) % self.n
        } else {
            0
        };
        let half_rows_only = player1 && rotsym && self.opts.use_rotsym_pruning;
        let mut forbidden = [0u32; MAX_N];
        let mut row = start_row;
        for _ in 0..self.n {
            if !(half_rows_only && row > self.half) {
                let mut mask = self.occ.free_cols_in_row(row);
                if k == 0 {
                    mask &= self.first_move_cols(row);
                }
                while mask != 0 {
                    let col = mask.trailing_zeros() as usize;
                    mask &= mask - 1;
                    if forbidden[row] >> col & 1 != 0 {
                        continue;
                    }
                    if self.try_candidate(Position::new(row, col), rotsym, &mut forbidden) {
                        return true;
                    }
                    if self.abort.is_some() {
                        return false;
                    }
                }
            }
            row += 1;
            if row == self.n {
                row = 0;
            }
        }
        false
    }

    /// Columns of `row` admitted as a first move.
    fn first_move_cols(&self, row: usize) -> u32 {
        if self.inner_start {
            return if row == self.half { 1 << self.half } else { 0 };
        }
        if self.opts.use_first_move_canonicalization {
            if row > self.half {
                return 0;
            }
            // row <= col <= half
            return col_mask(self.half + 1) & !col_mask(row);
        }
        col_mask(self.n)
    }

    /// Plays `p`, searches the opponent's answer and undoes `p`. Returns
    /// true iff `p` wins for the mover.
    fn try_candidate(&mut self, p: Position, rotsym: bool, forbidden: &mut [u32; MAX_N]) -> bool {
        let k = self.depth;
        let next_rotsym = if k % 2 == 1 {
            rotsym && p == mirror(self.moves[k - 1], self.dims)
        } else {
            rotsym
        };
        let calls_before = self.stats.calls;
        self.push(p);
        if k == 2 {
            self.sink.on_third_move_enter(self.moves[0], p);
        }
        let opponent_wins = self.wins(next_rotsym);
        let refutation = self.reply;
        self.pop();
        if self.abort.is_some() {
            return false;
        }
        if k == 2 {
            self.sink.on_third_move_exit(opponent_wins);
        }
        if k == 0 {
            let winner = if opponent_wins { Player::Two } else { Player::One };
            let calls = self.stats.calls - calls_before;
            self.stats.per_first_move.push(FirstMoveStat { position: p, winner, calls });
            self.sink.on_first_move_result(p, winner, calls);
        }
        if !opponent_wins {
            self.reply = p;
            return true;
        }
        if self.opts.use_forbidden_pruning {
            forbidden[refutation.row()] |= 1 << refutation.col();
        }
        false
    }

    fn finish(mut self, rotsym: bool) -> Result<(bool, Option<Position>, SearchStats), SolveError> {
        let won = self.wins(rotsym);
        match self.abort.take() {
            Some(Abort::Cancelled) => Err(SolveError::Cancelled { calls: self.stats.calls }),
            Some(Abort::Failed(e)) => Err(e),
            None => Ok((won, won.then_some(self.reply), self.stats)),
        }
    }
}

fn check_tables(opts: &SearchOptions, dims: Dims) -> Result<(), SolveError> {
    match &opts.tables {
        Some(t) if t.n() != dims.n() => Err(TableError::SizeMismatch {
            tables: t.n(),
            search: dims.n(),
        }
        .into()),
        _ => Ok(()),
    }
}

fn run<S: ProgressSink>(
    state: &GameState,
    opts: &SearchOptions,
    sink: S,
) -> Result<(bool, Option<Position>, SearchStats), SolveError> {
    let dims = state.dims();
    check_tables(opts, dims)?;
    assert!(opts.progress_interval >= 1, "progress interval must be positive");
    let rotsym = state.rotsym();
    match opts.representation.resolve(dims)? {
        Representation::Compact => {
            Searcher::<CompactOccupancy, S>::new(state, opts, sink).finish(rotsym)
        }
        _ => Searcher::<GeneralOccupancy, S>::new(state, opts, sink).finish(rotsym),
    }
}

/// Whether the player to move in `state` wins under the given prunings.
///
/// Root-only rules (canonical first moves, forced starts) apply when
/// `state` is empty; per-first-move statistics are gathered in that case.
pub fn wins<S: ProgressSink>(
    state: &GameState,
    opts: &SearchOptions,
    sink: S,
) -> Result<WinsReport, SolveError> {
    let (mover_wins, winning_move, stats) = run(state, opts, sink)?;
    Ok(WinsReport { mover_wins, winning_move, stats })
}

/// Solves the game on an empty `n x n` board.
///
/// A result is reported inconclusive when the winner only won because the
/// other side was restricted: a player-2 win while player 1 was held to a
/// forced start or strategy, or a player-1 win while player 2 replies were
/// pinned by tables.
pub fn solve<S: ProgressSink>(
    n: usize,
    opts: &SearchOptions,
    sink: S,
) -> Result<Solution, SolveError> {
    let dims = Dims::new(n)?;
    let state = GameState::with_representation(dims, opts.representation)?;
    let (player1_wins, _, stats) = run(&state, opts, sink)?;
    let winner = if player1_wins { Player::One } else { Player::Two };
    let player1_restricted = opts.forces_inner_start(dims) || opts.plays_odd_strategy(dims);
    let player2_restricted = opts.tables.is_some();
    let inconclusive = match winner {
        Player::Two => player1_restricted,
        Player::One => player2_restricted,
    };
    if inconclusive {
        return Err(SolveError::Inconclusive { winner, calls: stats.calls, stats: Box::new(stats) });
    }
    Ok(Solution { outcome: Outcome { winner }, stats })
}

/// Default oracle size guard.
pub const ORACLE_MAX_N: usize = 8;

/// Unpruned negamax over every available cell, with its own pairwise
/// conflict test. Kept independent of the occupancy masks on purpose.
pub fn oracle_solve(n: usize) -> Result<Outcome, SolveError> {
    oracle_solve_with_limit(n, ORACLE_MAX_N)
}

pub fn oracle_solve_with_limit(n: usize, limit: usize) -> Result<Outcome, SolveError> {
    let dims = Dims::new(n)?;
    if n > limit {
        return Err(SolveError::OracleTooLarge { n, limit });
    }
    let mut queens = Vec::with_capacity(n);
    let winner = if oracle_mover_wins(n, &mut queens) { Player::One } else { Player::Two };
    debug_assert!(dims.n() == n);
    Ok(Outcome { winner })
}

/// Oracle on an arbitrary position: does the player to move win?
pub fn oracle_wins(state: &GameState) -> bool {
    let mut queens = state.moves().to_vec();
    oracle_mover_wins(state.dims().n(), &mut queens)
}

fn oracle_mover_wins(n: usize, queens: &mut Vec<Position>) -> bool {
    let clash = |a: Position, b: Position| {
        a.row == b.row
            || a.col == b.col
            || a.row as i32 + a.col as i32 == b.row as i32 + b.col as i32
            || a.row as i32 - a.col as i32 == b.row as i32 - b.col as i32
    };
    for r in 0..n {
        for c in 0..n {
            let p = Position::new(r, c);
            if queens.iter().any(|&q| clash(q, p)) {
                continue;
            }
            queens.push(p);
            let opponent_wins = oracle_mover_wins(n, queens);
            queens.pop();
            if !opponent_wins {
                return true;
            }
        }
    }
    false
}

/// Canonical first moves, or the single forced start when that rule applies.
pub fn root_candidates(dims: Dims, opts: &SearchOptions) -> Vec<Position> {
    if opts.plays_odd_strategy(dims) {
        return dims.center().into_iter().collect();
    }
    if opts.forces_inner_start(dims) {
        return vec![Position::new(dims.half(), dims.half())];
    }
    if opts.use_first_move_canonicalization {
        canonical_first_moves(dims)
    } else {
        dims.cells().collect()
    }
}
