use std::collections::HashMap;
use std::sync::{Arc, Mutex, TryLockError};
use std::time::{Duration, Instant};

use qpgame_core::board::{Conflict, Dims, GameState, Player, Position};
use qpgame_core::error::BoardError;
use qpgame_core::strategies::{Strategy, StrategyKind};
use serde::Serialize;
use thiserror::Error;

/// Largest board the service hosts.
pub const MAX_SERVICE_N: usize = 16;

#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Boards up to this size are searched exactly, without a time budget.
    pub exact_max_n: usize,
    /// Per-move search budget above `exact_max_n`.
    pub move_budget: Duration,
    /// Sessions untouched for this long are dropped.
    pub idle_expiry: Duration,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            exact_max_n: 8,
            move_budget: Duration::from_secs(2),
            idle_expiry: Duration::from_secs(30 * 60),
        }
    }
}

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("board size must be within 1..={MAX_SERVICE_N}, got {0}")]
    SizeOutOfRange(usize),
    #[error("human side must be 1 or 2, got {0}")]
    BadSide(u8),
    #[error("unknown game {0}")]
    UnknownGame(String),
    #[error("it is not the human player's turn")]
    NotYourTurn,
    #[error("the game is already finished")]
    GameOver,
    #[error("illegal move {pos}: shares a {conflict} with the queen at {queen}")]
    IllegalMove { pos: Position, conflict: Conflict, queen: Position },
    #[error("position ({row},{col}) is off the board")]
    OffBoard { row: usize, col: usize },
    #[error("engine failure: {0}")]
    Engine(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    InProgress,
    Finished,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnginePlay {
    /// Moves come from a proven winning strategy.
    Strategy,
    /// Every engine move so far came from a completed search.
    Perfect,
    /// At least one engine move fell back after the search budget ran out.
    Heuristic,
}

/// Point-in-time view of a session, as sent to clients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Snapshot {
    pub id: String,
    pub n: usize,
    pub human: u8,
    pub to_move: Option<u8>,
    pub moves: Vec<[u8; 2]>,
    pub available: Vec<[u8; 2]>,
    pub attacked: Vec<[u8; 2]>,
    pub status: Status,
    pub winner: Option<u8>,
    pub engine_play: EnginePlay,
    pub engine_strategy: &'static str,
}

fn cell(p: Position) -> [u8; 2] {
    [p.row, p.col]
}

struct Session {
    id: String,
    state: GameState,
    human: Player,
    engine: Strategy,
    engine_play: EnginePlay,
    last_access: Instant,
}

impl Session {
    fn finished(&self) -> bool {
        !self.state.has_available()
    }

    fn snapshot(&self) -> Snapshot {
        let state = &self.state;
        let available = state.available_positions();
        let finished = available.is_empty();
        let attacked = state
            .dims()
            .cells()
            .filter(|p| !state.is_available(*p) && !state.moves().contains(p))
            .map(cell)
            .collect();
        let last_mover = state.moves().len().checked_sub(1).map(Player::for_move_index);
        Snapshot {
            id: self.id.clone(),
            n: state.dims().n(),
            human: self.human.number(),
            to_move: (!finished).then(|| state.to_move().number()),
            moves: state.moves().iter().copied().map(cell).collect(),
            available: available.into_iter().map(cell).collect(),
            attacked,
            status: if finished { Status::Finished } else { Status::InProgress },
            winner: if finished { last_mover.map(Player::number) } else { None },
            engine_play: self.engine_play,
            engine_strategy: self.engine.kind().name(),
        }
    }

    /// Applies engine moves until it is the human's turn or the game ends.
    fn engine_turns(&mut self) -> Result<(), ServiceError> {
        while !self.finished() && self.state.to_move() != self.human {
            let choice = self
                .engine
                .choose(&self.state)
                .map_err(|e| ServiceError::Engine(e.to_string()))?
                .ok_or_else(|| ServiceError::Engine("no engine move on a live board".into()))?;
            if !self.state.is_available(choice.position) {
                return Err(ServiceError::Engine(format!(
                    "engine chose unavailable cell {}",
                    choice.position
                )));
            }
            self.state
                .place(choice.position)
                .map_err(|e| ServiceError::Engine(e.to_string()))?;
            if !choice.proven {
                self.engine_play = EnginePlay::Heuristic;
            }
        }
        self.check_strategy_guarantee()
    }

    fn check_strategy_guarantee(&self) -> Result<(), ServiceError> {
        let guaranteed = self.engine.kind() == StrategyKind::MirrorOdd
            || self.engine.kind() == StrategyKind::InnerFour;
        if guaranteed && self.finished() {
            let last = Player::for_move_index(self.state.moves().len() - 1);
            if last != Player::One {
                return Err(ServiceError::Engine(format!(
                    "{} lost a game it must win",
                    self.engine.kind()
                )));
            }
        }
        Ok(())
    }
}

/// In-memory registry of live games.
pub struct GameService {
    config: EngineConfig,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
}

impl Default for GameService {
    fn default() -> Self {
        GameService::new(EngineConfig::default())
    }
}

impl GameService {
    pub fn new(config: EngineConfig) -> Self {
        GameService { config, sessions: Mutex::new(HashMap::new()) }
    }

    fn engine_for(&self, dims: Dims, engine_side: Player) -> (Strategy, EnginePlay) {
        let n = dims.n();
        match engine_side {
            Player::One if n % 2 == 1 => (Strategy::mirror_odd(), EnginePlay::Strategy),
            Player::One if n == 4 => (Strategy::inner_four(), EnginePlay::Strategy),
            _ if n <= self.config.exact_max_n => (Strategy::perfect(), EnginePlay::Perfect),
            _ => (
                Strategy::perfect().with_time_budget(self.config.move_budget),
                EnginePlay::Perfect,
            ),
        }
    }

    pub fn create_game(&self, n: usize, human: u8) -> Result<Snapshot, ServiceError> {
        if n == 0 || n > MAX_SERVICE_N {
            return Err(ServiceError::SizeOutOfRange(n));
        }
        let human = match human {
            1 => Player::One,
            2 => Player::Two,
            other => return Err(ServiceError::BadSide(other)),
        };
        let dims = Dims::new(n).map_err(|_| ServiceError::SizeOutOfRange(n))?;
        let (engine, engine_play) = self.engine_for(dims, human.opponent());
        let mut session = Session {
            id: uuid::Uuid::new_v4().simple().to_string(),
            state: GameState::new(dims),
            human,
            engine,
            engine_play,
            last_access: Instant::now(),
        };
        session.engine_turns()?;
        let snapshot = session.snapshot();
        let mut sessions = self.sessions.lock().expect("session map poisoned");
        let expiry = self.config.idle_expiry;
        sessions.retain(|_, s| {
            s.try_lock().map_or(true, |s| s.last_access.elapsed() < expiry)
        });
        sessions.insert(snapshot.id.clone(), Arc::new(Mutex::new(session)));
        Ok(snapshot)
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ServiceError> {
        self.sessions
            .lock()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownGame(id.to_string()))
    }

    pub fn get_game(&self, id: &str) -> Result<Snapshot, ServiceError> {
        let session = self.session(id)?;
        let mut session = session.lock().expect("session poisoned");
        session.last_access = Instant::now();
        Ok(session.snapshot())
    }

    /// Removing an unknown id is not an error.
    pub fn delete_game(&self, id: &str) {
        self.sessions.lock().expect("session map poisoned").remove(id);
    }

    /// Applies the human move and the engine's answer. A submission that
    /// arrives while another one for the same game is being processed is
    /// rejected as out of turn.
    pub fn submit_move(&self, id: &str, row: usize, col: usize) -> Result<Snapshot, ServiceError> {
        let session = self.session(id)?;
        let mut session = match session.try_lock() {
            Ok(guard) => guard,
            Err(TryLockError::WouldBlock) => return Err(ServiceError::NotYourTurn),
            Err(TryLockError::Poisoned(_)) => {
                return Err(ServiceError::Engine("session poisoned".into()))
            }
        };
        session.last_access = Instant::now();
        if session.finished() {
            return Err(ServiceError::GameOver);
        }
        if session.state.to_move() != session.human {
            return Err(ServiceError::NotYourTurn);
        }
        let n = session.state.dims().n();
        if row >= n || col >= n {
            return Err(ServiceError::OffBoard { row, col });
        }
        let p = Position::new(row, col);
        match session.state.place(p) {
            Ok(()) => {}
            Err(BoardError::IllegalMove { pos, conflict, queen }) => {
                return Err(ServiceError::IllegalMove { pos, conflict, queen })
            }
            Err(e) => return Err(ServiceError::Engine(e.to_string())),
        }
        session.engine_turns()?;
        Ok(session.snapshot())
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().expect("session map poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qpgame_core::board::Occupancy;

    #[test]
    fn engine_opens_center_on_odd_boards() {
        let svc = GameService::default();
        let snap = svc.create_game(5, 2).unwrap();
        assert_eq!(snap.moves, vec![[2, 2]]);
        assert_eq!(snap.to_move, Some(2));
        assert_eq!(snap.engine_play, EnginePlay::Strategy);
        let snap = svc.submit_move(&snap.id, 0, 1).unwrap();
        assert_eq!(snap.moves, vec![[2, 2], [0, 1], [4, 3]]);
    }

    #[test]
    fn inner_four_session_finishes() {
        let svc = GameService::default();
        let snap = svc.create_game(4, 2).unwrap();
        assert_eq!(snap.moves, vec![[1, 1]]);
        assert_eq!(snap.available, vec![[0, 3], [2, 3], [3, 0], [3, 2]]);
        let snap = svc.submit_move(&snap.id, 0, 3).unwrap();
        assert_eq!(snap.moves.last(), Some(&[3, 2]));
        assert_eq!(snap.status, Status::Finished);
        assert_eq!(snap.winner, Some(1));
        assert_eq!(snap.to_move, None);
        assert!(matches!(svc.submit_move(&snap.id, 0, 0), Err(ServiceError::GameOver)));
    }

    #[test]
    fn human_first_on_small_board() {
        let svc = GameService::default();
        let snap = svc.create_game(2, 1).unwrap();
        assert!(snap.moves.is_empty());
        assert_eq!(snap.to_move, Some(1));
        assert_eq!(snap.available.len(), 4);
    }

    #[test]
    fn single_cell_board_is_over_at_once() {
        let svc = GameService::default();
        let snap = svc.create_game(1, 2).unwrap();
        assert_eq!(snap.status, Status::Finished);
        assert_eq!(snap.winner, Some(1));
    }

    #[test]
    fn illegal_moves_leave_state_alone() {
        let svc = GameService::default();
        let snap = svc.create_game(5, 2).unwrap();
        let err = svc.submit_move(&snap.id, 2, 4).unwrap_err();
        assert!(matches!(
            err,
            ServiceError::IllegalMove { conflict: Conflict::Row, queen, .. } if queen == Position::new(2, 2)
        ));
        assert!(matches!(svc.submit_move(&snap.id, 9, 0), Err(ServiceError::OffBoard { .. })));
        assert_eq!(svc.get_game(&snap.id).unwrap(), snap);
    }

    #[test]
    fn snapshot_cells_partition_the_board() {
        let svc = GameService::default();
        let snap = svc.create_game(7, 2).unwrap();
        let snap = svc.submit_move(&snap.id, 0, 1).unwrap();
        let state = GameState::from_moves(
            Dims::new(7).unwrap(),
            &snap.moves.iter().map(|m| Position::new(m[0] as usize, m[1] as usize)).collect::<Vec<_>>(),
        )
        .unwrap();
        let expected: Vec<[u8; 2]> = state.available_positions().into_iter().map(cell).collect();
        assert_eq!(snap.available, expected);
        assert_eq!(snap.moves.len() + snap.available.len() + snap.attacked.len(), 49);
        assert_eq!(state.occupancy().counts(), [3; 4]);
    }

    #[test]
    fn delete_is_idempotent_and_get_fails_after() {
        let svc = GameService::default();
        let snap = svc.create_game(6, 1).unwrap();
        svc.delete_game(&snap.id);
        svc.delete_game(&snap.id);
        assert!(matches!(svc.get_game(&snap.id), Err(ServiceError::UnknownGame(_))));
        assert!(svc.is_empty());
    }

    #[test]
    fn bounds() {
        let svc = GameService::default();
        assert!(matches!(svc.create_game(17, 1), Err(ServiceError::SizeOutOfRange(17))));
        assert!(matches!(svc.create_game(0, 1), Err(ServiceError::SizeOutOfRange(0))));
        assert!(matches!(svc.create_game(5, 3), Err(ServiceError::BadSide(3))));
    }

    #[test]
    fn large_boards_use_budgeted_search() {
        let svc = GameService::new(EngineConfig {
            move_budget: Duration::from_millis(50),
            ..EngineConfig::default()
        });
        let snap = svc.create_game(12, 2).unwrap();
        assert_eq!(snap.moves.len(), 1);
        assert_eq!(snap.engine_play, EnginePlay::Heuristic);
    }
}
