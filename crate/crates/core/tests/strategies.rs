use qpgame_core::solver::oracle_wins;
use qpgame_core::strategies::{playout, playout_as, Strategy};
use qpgame_core::{mirror, Dims, GameState, Player, Position};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

#[test]
fn mirror_strategy_wins_against_random_opponents() {
    let mut rng = StdRng::seed_from_u64(2024);
    for n in [5, 7, 9, 11] {
        let dims = Dims::new(n).unwrap();
        for _ in 0..1000 {
            let mut adversary = |s: &GameState| *s.available_positions().choose(&mut rng).unwrap();
            let game = playout(&Strategy::mirror_odd(), &mut adversary, n).unwrap();
            assert_eq!(game.winner, Player::One);
            assert_eq!(game.transcript[0], dims.center().unwrap());
            for pair in game.transcript[1..].chunks(2) {
                assert_eq!(pair[1], mirror(pair[0], dims));
            }
        }
    }
}

#[test]
fn inner_four_wins_against_every_reply() {
    let strategy = Strategy::inner_four();
    let dims = Dims::new(4).unwrap();
    let mut state = GameState::new(dims);
    state.place(strategy.next_move(&state).unwrap().unwrap()).unwrap();
    assert!([(1, 1), (1, 2), (2, 1), (2, 2)].map(|(r, c)| Position::new(r, c)).contains(&state.moves()[0]));
    let replies = state.available_positions();
    assert!(!replies.is_empty());
    for reply in replies {
        let mut s = state.clone();
        s.place(reply).unwrap();
        let answer = strategy.next_move(&s).unwrap().expect("a third move exists");
        s.place(answer).unwrap();
        assert!(!s.has_available(), "after {reply} player 2 can still move");
    }
}

#[test]
fn perfect_play_matches_the_oracle() {
    let mut rng = StdRng::seed_from_u64(11);
    for n in 1..=6 {
        for _ in 0..40 {
            let mut state = GameState::new(Dims::new(n).unwrap());
            while state.has_available() {
                let mover_wins = oracle_wins(&state);
                let choice = Strategy::perfect().choose(&state).unwrap().unwrap();
                assert!(choice.proven);
                state.place(choice.position).unwrap();
                if mover_wins {
                    assert!(!oracle_wins(&state), "n={n} {:?}", state.moves());
                }
                if let Some(&p) = state.available_positions().choose(&mut rng) {
                    state.place(p).unwrap();
                }
            }
        }
    }
}

#[test]
fn perfect_player_two_wins_ten_by_ten_from_a_random_start() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..3 {
        let mut adversary = |s: &GameState| *s.available_positions().choose(&mut rng).unwrap();
        let game = playout_as(&Strategy::perfect(), Player::Two, &mut adversary, 10).unwrap();
        assert_eq!(game.winner, Player::Two);
    }
}
