//! Move-selection policies: the two provable player-1 strategies, a
//! table-backed player-2 policy and a search-backed perfect player.

use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::board::{mirror, Dims, GameState, Player, Position};
use crate::error::{SolveError, StrategyError};
use crate::solver::{wins, ProgressSink, SearchOptions};
use crate::tables::AnswerTables;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    /// Player 1, odd n: center, then the half-turn image of every reply.
    MirrorOdd,
    /// Player 1, n = 4: an inner cell, then the single remaining cell.
    InnerFour,
    /// Player 2: answer-table replies for the first two rounds, then search.
    Tables,
    /// Either player: first winning move in row-major order.
    PerfectSearch,
}

impl StrategyKind {
    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::MirrorOdd => "mirror-odd",
            StrategyKind::InnerFour => "inner-four",
            StrategyKind::Tables => "tables",
            StrategyKind::PerfectSearch => "perfect",
        }
    }

    /// The side this policy is built for, if it is tied to one.
    pub fn player(self) -> Option<Player> {
        match self {
            StrategyKind::MirrorOdd | StrategyKind::InnerFour => Some(Player::One),
            StrategyKind::Tables => Some(Player::Two),
            StrategyKind::PerfectSearch => None,
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A chosen move and whether it is backed by a completed proof or search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Choice {
    pub position: Position,
    pub proven: bool,
}

#[derive(Clone, Debug)]
pub struct Strategy {
    kind: StrategyKind,
    tables: Option<Arc<AnswerTables>>,
    budget: Option<Duration>,
}

impl Strategy {
    pub fn mirror_odd() -> Self {
        Strategy { kind: StrategyKind::MirrorOdd, tables: None, budget: None }
    }

    pub fn inner_four() -> Self {
        Strategy { kind: StrategyKind::InnerFour, tables: None, budget: None }
    }

    pub fn perfect() -> Self {
        Strategy { kind: StrategyKind::PerfectSearch, tables: None, budget: None }
    }

    pub fn tables(tables: Arc<AnswerTables>) -> Self {
        Strategy { kind: StrategyKind::Tables, tables: Some(tables), budget: None }
    }

    /// Caps the wall time spent searching per move. When the budget runs out
    /// the first available cell is played and the choice is not proven.
    pub fn with_time_budget(mut self, budget: Duration) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    /// Checks that this policy can play a game of size `n`.
    pub fn supports(&self, dims: Dims) -> Result<(), StrategyError> {
        let n = dims.n();
        let ok = match self.kind {
            StrategyKind::MirrorOdd => n % 2 == 1,
            StrategyKind::InnerFour => n == 4,
            StrategyKind::Tables => match &self.tables {
                Some(t) => t.n() == n,
                None => return Err(StrategyError::MissingTables),
            },
            StrategyKind::PerfectSearch => true,
        };
        if ok {
            Ok(())
        } else {
            Err(StrategyError::WrongSize { kind: self.kind.name(), n })
        }
    }

    pub fn next_move(&self, state: &GameState) -> Result<Option<Position>, StrategyError> {
        Ok(self.choose(state)?.map(|c| c.position))
    }

    /// The policy's move, or `None` when no cell is available.
    pub fn choose(&self, state: &GameState) -> Result<Option<Choice>, StrategyError> {
        self.supports(state.dims())?;
        if let Some(expected) = self.kind.player() {
            if state.to_move() != expected {
                return Err(StrategyError::WrongTurn {
                    kind: self.kind.name(),
                    expected,
                    actual: state.to_move(),
                });
            }
        }
        if !state.has_available() {
            return Ok(None);
        }
        let proven = |p: Position| Ok(Some(Choice { position: p, proven: true }));
        match self.kind {
            StrategyKind::MirrorOdd => proven(self.mirror_odd_move(state)?),
            StrategyKind::InnerFour => proven(self.inner_four_move(state)?),
            StrategyKind::Tables => {
                let tables = self.tables.as_deref().expect("checked by supports");
                let moves = state.moves();
                match moves.len() {
                    1 => proven(tables.lookup_round1(moves[0])?),
                    3 => proven(tables.lookup_round2(moves[0], moves[2])?),
                    _ => self.search_move(state),
                }
            }
            StrategyKind::PerfectSearch => self.search_move(state),
        }
    }

    fn unreachable(&self, reason: impl Into<String>) -> StrategyError {
        StrategyError::Unreachable { kind: self.kind.name(), reason: reason.into() }
    }

    fn mirror_odd_move(&self, state: &GameState) -> Result<Position, StrategyError> {
        let dims = state.dims();
        let center = dims.center().expect("odd n");
        let moves = state.moves();
        if moves.is_empty() {
            return Ok(center);
        }
        if moves[0] != center {
            return Err(self.unreachable("first queen is not on the center"));
        }
        if let Some(k) = (2..moves.len()).step_by(2).find(|&k| moves[k] != mirror(moves[k - 1], dims)) {
            return Err(self.unreachable(format!("move {} is not a mirror reply", k + 1)));
        }
        let answer = mirror(*moves.last().expect("non-empty"), dims);
        if !state.is_available(answer) {
            return Err(self.unreachable(format!("mirror cell {answer} is taken")));
        }
        Ok(answer)
    }

    fn inner_four_move(&self, state: &GameState) -> Result<Position, StrategyError> {
        let start = Position::new(1, 1);
        match state.moves() {
            [] => Ok(start),
            [first, _] if *first == start => match state.available_positions().as_slice() {
                [only] => Ok(*only),
                other => Err(self.unreachable(format!("{} cells left instead of one", other.len()))),
            },
            _ => Err(self.unreachable("only the opening and the reply to it are covered")),
        }
    }

    fn search_move(&self, state: &GameState) -> Result<Option<Choice>, StrategyError> {
        let opts = SearchOptions::unrestricted();
        let mut deadline = Deadline(self.budget.map(|b| Instant::now() + b));
        let candidates = state.available_positions();
        let mut scratch = state.clone();
        for &p in &candidates {
            if deadline.poll_cancel() {
                return Ok(Some(Choice { position: candidates[0], proven: false }));
            }
            scratch.place(p)?;
            let result = wins(&scratch, &opts, &mut deadline);
            scratch.unplace_last()?;
            match result {
                Ok(report) if !report.mover_wins => {
                    return Ok(Some(Choice { position: p, proven: true }))
                }
                Ok(_) => {}
                Err(SolveError::Cancelled { .. }) => {
                    return Ok(Some(Choice { position: candidates[0], proven: false }))
                }
                Err(e) => return Err(e.into()),
            }
        }
        Ok(candidates.first().map(|&p| Choice { position: p, proven: true }))
    }
}

struct Deadline(Option<Instant>);

impl ProgressSink for Deadline {
    fn poll_cancel(&mut self) -> bool {
        self.0.is_some_and(|d| Instant::now() >= d)
    }
}

/// The other side of a playout.
pub trait Adversary {
    fn next_move(&mut self, state: &GameState) -> Position;
}

impl<F: FnMut(&GameState) -> Position> Adversary for F {
    fn next_move(&mut self, state: &GameState) -> Position {
        self(state)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Playout {
    pub winner: Player,
    pub transcript: Vec<Position>,
}

/// Plays one full game; `strategy` takes its natural side (player 1 for
/// search-backed play).
pub fn playout<A: Adversary>(
    strategy: &Strategy,
    adversary: &mut A,
    n: usize,
) -> Result<Playout, StrategyError> {
    let side = strategy.kind().player().unwrap_or(Player::One);
    playout_as(strategy, side, adversary, n)
}

pub fn playout_as<A: Adversary>(
    strategy: &Strategy,
    side: Player,
    adversary: &mut A,
    n: usize,
) -> Result<Playout, StrategyError> {
    let dims = Dims::new(n)?;
    strategy.supports(dims)?;
    let mut state = GameState::new(dims);
    while state.has_available() {
        if state.to_move() == side {
            let p = strategy
                .next_move(&state)?
                .expect("a move exists while cells are available");
            state.place(p)?;
        } else {
            let p = adversary.next_move(&state);
            if let Err(source) = state.place(p) {
                let mut transcript = state.moves().to_vec();
                transcript.push(p);
                return Err(StrategyError::IllegalAdversaryMove { source, transcript });
            }
        }
    }
    let last_mover = Player::for_move_index(state.moves().len().saturating_sub(1));
    Ok(Playout { winner: last_mover, transcript: state.moves().to_vec() })
}

/// One move per line, `k: (r,c)` with 1-based `k`.
pub fn format_transcript(moves: &[Position]) -> String {
    moves
        .iter()
        .enumerate()
        .map(|(i, p)| format!("{}: {}\n", i + 1, p))
        .collect()
}
