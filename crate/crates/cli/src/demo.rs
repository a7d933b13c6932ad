use std::io::{BufRead, Write};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use qpgame_core::board::{Dims, GameState, Player, Position};
use qpgame_core::error::BoardError;
use qpgame_core::strategies::{format_transcript, Strategy};
use qpgame_core::tables::AnswerTables;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::args::{AdversaryArg, DemoArgs, StrategyArg};

/// Supplies the moves of the side the strategy does not play.
pub trait Opponent {
    /// `None` ends the game early (for example on end of input).
    fn next_move(&mut self, state: &GameState, out: &mut dyn Write) -> Result<Option<Position>>;
}

pub struct RandomOpponent(pub StdRng);

impl Opponent for RandomOpponent {
    fn next_move(&mut self, state: &GameState, _out: &mut dyn Write) -> Result<Option<Position>> {
        Ok(state.available_positions().choose(&mut self.0).copied())
    }
}

/// Reads `r c` (or `r,c`) lines and re-prompts until a legal cell is given.
pub struct LineOpponent<R: BufRead>(pub R);

pub fn parse_cell(line: &str) -> Option<(usize, usize)> {
    let mut parts = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty());
    let r = parts.next()?.parse().ok()?;
    let c = parts.next()?.parse().ok()?;
    parts.next().is_none().then_some((r, c))
}

impl<R: BufRead> Opponent for LineOpponent<R> {
    fn next_move(&mut self, state: &GameState, out: &mut dyn Write) -> Result<Option<Position>> {
        loop {
            write!(out, "Your move (row col): ")?;
            out.flush()?;
            let mut line = String::new();
            if self.0.read_line(&mut line)? == 0 {
                return Ok(None);
            }
            let Some((r, c)) = parse_cell(&line) else {
                writeln!(out, "Enter two numbers, for example `0 3`.")?;
                continue;
            };
            let n = state.dims().n();
            if r >= n || c >= n {
                writeln!(out, "({r},{c}) is off the board; rows and columns run from 0 to {}.", n - 1)?;
                continue;
            }
            let p = Position::new(r, c);
            match state.clone().place(p) {
                Ok(()) => return Ok(Some(p)),
                Err(BoardError::IllegalMove { conflict, queen, .. }) => {
                    writeln!(out, "{p} is attacked by the queen at {queen} ({}).", conflict.as_str())?;
                }
                Err(e) => writeln!(out, "{e}")?,
            }
        }
    }
}

pub fn build_strategy(args: &DemoArgs) -> Result<Strategy> {
    let strategy = match args.strategy {
        StrategyArg::MirrorOdd => Strategy::mirror_odd(),
        StrategyArg::InnerFour => Strategy::inner_four(),
        StrategyArg::Perfect => Strategy::perfect(),
        StrategyArg::Tables => {
            let Some(path) = &args.tables else {
                bail!("the tables strategy needs --tables FILE");
            };
            let tables = AnswerTables::load(path).with_context(|| format!("loading {}", path.display()))?;
            Strategy::tables(Arc::new(tables))
        }
    };
    let dims = Dims::new(args.n)?;
    strategy.supports(dims)?;
    Ok(strategy)
}

/// Plays one game, printing the board after every move, and returns the winner
/// (`None` if the opponent stopped early).
pub fn run_demo(
    strategy: &Strategy,
    n: usize,
    opponent: &mut dyn Opponent,
    out: &mut dyn Write,
) -> Result<Option<Player>> {
    let side = strategy.kind().player().unwrap_or(Player::One);
    let mut state = GameState::new(Dims::new(n)?);
    writeln!(out, "{} plays as {side} on a {n}x{n} board.\n", strategy.kind())?;
    while state.has_available() {
        let mover = state.to_move();
        let p = if mover == side {
            strategy.next_move(&state)?.expect("a move exists while cells are available")
        } else {
            match opponent.next_move(&state, out)? {
                Some(p) => p,
                None => {
                    writeln!(out, "\nInput ended; game abandoned.")?;
                    return Ok(None);
                }
            }
        };
        state.place(p)?;
        writeln!(out, "{}. {mover}: {p}", state.moves().len())?;
        write!(out, "{}", state.render(true))?;
        writeln!(out)?;
    }
    let winner = Player::for_move_index(state.moves().len().saturating_sub(1));
    writeln!(out, "Transcript:")?;
    write!(out, "{}", format_transcript(state.moves()))?;
    writeln!(out, "Winner: {winner}")?;
    Ok(Some(winner))
}

pub fn opponent_for(args: &DemoArgs) -> Box<dyn Opponent> {
    match args.adversary {
        AdversaryArg::Random => {
            let rng = match args.seed {
                Some(seed) => StdRng::seed_from_u64(seed),
                None => StdRng::from_entropy(),
            };
            Box::new(RandomOpponent(rng))
        }
        AdversaryArg::Stdin => Box::new(LineOpponent(std::io::stdin().lock())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_cells() {
        assert_eq!(parse_cell("2 3\n"), Some((2, 3)));
        assert_eq!(parse_cell(" 0,4 "), Some((0, 4)));
        assert_eq!(parse_cell("1"), None);
        assert_eq!(parse_cell("1 2 3"), None);
        assert_eq!(parse_cell("a b"), None);
    }

    #[test]
    fn mirror_strategy_beats_scripted_input() {
        let input = "0 0\n9 9\nx\n0 1\n";
        let mut opp = LineOpponent(input.as_bytes());
        let mut out = Vec::new();
        let winner = run_demo(&Strategy::mirror_odd(), 5, &mut opp, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("(0,0) is attacked by the queen at (2,2) (rising diagonal)."), "{text}");
        assert!(text.contains("off the board"));
        assert!(text.contains("3. player 1: (4,3)"));
        assert!(text.contains("Input ended; game abandoned."));
        assert_eq!(winner, None);
    }

    #[test]
    fn random_games_are_won_by_the_strategy() {
        for seed in 0..20 {
            let mut opp = RandomOpponent(StdRng::seed_from_u64(seed));
            let winner = run_demo(&Strategy::mirror_odd(), 7, &mut opp, &mut std::io::sink()).unwrap();
            assert_eq!(winner, Some(Player::One));
        }
        let mut opp = RandomOpponent(StdRng::seed_from_u64(1));
        let winner = run_demo(&Strategy::inner_four(), 4, &mut opp, &mut std::io::sink()).unwrap();
        assert_eq!(winner, Some(Player::One));
    }
}
