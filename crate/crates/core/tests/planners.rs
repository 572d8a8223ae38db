mod common;

use common::{compile, Counting, ToyTree};
use deceptive_games::engine::{Action, GameState};
use deceptive_games::games::{load_game, GameId};
use deceptive_games::harness::run_episode;
use deceptive_games::planners::{
    a_star_plan, greedy_best_first, mcts_select, reward_targets, AStarAgent, AgentPolicy, AgentRng,
    Budget, GreedyAgent, MctsAgent, MctsParams,
};
use rand::SeedableRng;

fn rng(seed: u64) -> AgentRng {
    AgentRng::seed_from_u64(seed)
}

fn start(id: GameId, seed: u64) -> GameState {
    GameState::init(&load_game(id).unwrap().game, seed)
}

/// One coin to the left, a 1-cell room otherwise.
const COIN_GAME: &str = "game C\ntime_limit 50\nSprites\n a : Avatar\n w : Wall\n c : Immovable\nInteractions\n a w > BlockMove\n a c > CollectScore score=1\nTermination\n timeout > win\nLevelMapping\n A > a\n w > w\n c > c\n";

#[test]
fn greedy_takes_adjacent_coin() {
    let game = compile(COIN_GAME, "wwwww\nwcA w\nwwwww\n");
    let s = GameState::init(&game, 0);
    for n in [5, 6, 50, 400] {
        assert_eq!(
            greedy_best_first(&s, Budget::Iterations(n), &mut rng(0)),
            Action::Left
        );
    }
}

#[test]
fn greedy_prefers_win_over_points_then_loss() {
    let spec = "game W\ntime_limit 1\nSprites\n a : Avatar\n w : Wall\n c : Immovable\n e : Exit\nInteractions\n a w > BlockMove\n a c > CollectScore score=1\nTermination\n touch e > win\n timeout > lose\nLevelMapping\n A > a\n w > w\n c > c\n e > e\n";
    let game = compile(spec, "wwww\nwcAw\nwwew\n");
    let s = GameState::init(&game, 0);
    // enumerate the one-ply outcomes to be sure of the setup
    let (left, o) = s.advanced(Action::Left);
    assert_eq!((o.reward, left.status().as_str()), (1, "loss"));
    let (down, o) = s.advanced(Action::Down);
    assert_eq!((o.reward, down.status().as_str()), (0, "win"));
    assert_eq!(
        greedy_best_first(&s, Budget::Iterations(20), &mut rng(1)),
        Action::Down
    );
}

#[test]
fn greedy_small_budget_takes_decepticoins_bait() {
    let s = start(GameId::DC1, 0);
    assert_eq!(
        greedy_best_first(&s, Budget::Iterations(50), &mut rng(0)),
        Action::Left
    );
}

#[test]
fn astar_heads_for_coin_three_steps_away() {
    let game = compile(COIN_GAME, "wwwwww\nwA  cw\nw    w\nwwwwww\n");
    let s = GameState::init(&game, 0);
    assert_eq!(
        a_star_plan(&s, Budget::Iterations(100), &mut rng(0)),
        Action::Right
    );
    let game = compile(COIN_GAME, "wwwww\nw  Aw\nw   w\nwc  w\nwwwww\n");
    let s = GameState::init(&game, 0);
    let first = a_star_plan(&s, Budget::Iterations(100), &mut rng(0));
    // both Down and Left start a 4-step shortest path; ties follow action order
    assert_eq!(first, Action::Down);
}

#[test]
fn astar_falls_back_when_target_unreachable() {
    let game = compile(COIN_GAME, "wwwwwww\nwA wwcw\nw  wwww\nwwwwwww\n");
    let s = Counting::new(GameState::init(&game, 0));
    let n = 40;
    let a = a_star_plan(&s, Budget::Iterations(n), &mut rng(0));
    assert!(Action::ALL.contains(&a));
    // the search exhausts the pocket, then greedy spends the rest
    assert_eq!(s.steps(), u64::from(n));
}

#[test]
fn astar_targets_flower_seeds() {
    let s = start(GameId::Flower, 0);
    let flower = s.game().class_index("flower").unwrap();
    let targets = reward_targets(&s);
    let seeds: Vec<_> = s.alive_of_class(flower).map(|(_, sp)| sp.pos).collect();
    assert_eq!(targets.len(), seeds.len());
    assert!(seeds.iter().all(|p| targets.contains(p)));
}

#[test]
fn greedy_budget_is_exact() {
    for id in GameId::ALL {
        for n in [1, 7, 50, 300] {
            let s = Counting::new(start(id, 3));
            greedy_best_first(&s, Budget::Iterations(n), &mut rng(5));
            assert_eq!(s.steps(), u64::from(n), "{id} n={n}");
        }
    }
}

#[test]
fn astar_budget_never_exceeded() {
    for id in GameId::ALL {
        for n in [1, 7, 50, 300] {
            let s = Counting::new(start(id, 3));
            a_star_plan(&s, Budget::Iterations(n), &mut rng(5));
            assert!(s.steps() <= u64::from(n), "{id} n={n}: {}", s.steps());
            assert!(s.steps() >= 1);
        }
    }
}

#[test]
fn mcts_runs_exactly_n_iterations() {
    for id in GameId::ALL {
        for n in [1, 10, 200] {
            let s = Counting::new(start(id, 3));
            mcts_select(
                &s,
                &MctsParams::default(),
                Budget::Iterations(n),
                &mut rng(2),
            );
            assert_eq!(s.forks(), u64::from(n), "{id} n={n}");
        }
    }
}

fn agents() -> Vec<Box<dyn AgentPolicy>> {
    vec![
        Box::new(GreedyAgent),
        Box::new(AStarAgent),
        Box::new(MctsAgent::default()),
    ]
}

#[test]
fn planners_leave_caller_state_untouched() {
    for id in GameId::ALL {
        let mut s = start(id, 11);
        for _ in 0..25 {
            s.advance(Action::Down);
        }
        for mut agent in agents() {
            let before = s.to_bytes();
            agent.act(&s, Budget::Iterations(150), &mut rng(9));
            assert_eq!(s.to_bytes(), before, "{} on {id}", agent.name());
        }
    }
}

#[test]
fn planners_are_seed_deterministic() {
    for id in GameId::ALL {
        let s = start(id, 4);
        for mut agent in agents() {
            for seed in 0..4 {
                let a = agent.act(&s, Budget::Iterations(120), &mut rng(seed));
                let b = agent.act(&s, Budget::Iterations(120), &mut rng(seed));
                assert_eq!(a, b, "{} on {id}", agent.name());
            }
        }
    }
}

#[test]
fn wall_clock_budget_returns() {
    let s = start(GameId::Mints, 0);
    for mut agent in agents() {
        let t = std::time::Instant::now();
        agent.act(&s, Budget::WallClockMillis(20), &mut rng(0));
        assert!(t.elapsed().as_millis() < 1000, "{}", agent.name());
    }
}

#[test]
fn mcts_two_action_micro_game() {
    let spec = "game T\ntime_limit 20\nSprites\n a : Avatar\n w : Wall\n g : Immovable\n e : Exit\nInteractions\n a w > BlockMove\n a g > KillReactor score=1\nTermination\n count g 0 > win\n touch e > win\n timeout > lose\nLevelMapping\n A > a\n w > w\n g > g\n e > e\n";
    let game = compile(spec, "wwwww\nwgAew\nwwwww\n");
    let s = GameState::init(&game, 0);
    for seed in 0..5 {
        let a = mcts_select(
            &s,
            &MctsParams::default(),
            Budget::Iterations(200),
            &mut rng(seed),
        );
        assert_eq!(a, Action::Left);
    }
}

#[test]
fn mcts_matches_brute_force_on_depth_two_tree() {
    let trees = ToyTree::random_suite(200, 17);
    for (i, tree) in trees
        .iter()
        .filter(|t| t.best_actions().len() < 5)
        .take(10)
        .enumerate()
    {
        let a = mcts_select(
            tree,
            &MctsParams::default(),
            Budget::Iterations(10_000),
            &mut rng(i as u64),
        );
        assert!(tree.best_actions().contains(&a), "tree {i}");
    }
}

#[test]
fn toy_tree_oracle_sanity() {
    // depth 1: rewards on the five root edges
    let t = ToyTree::new(1, vec![0, 1, 4, -2, 4, 0]);
    assert_eq!(t.best_return(), 4);
    assert_eq!(t.best_actions(), vec![Action::Down, Action::Right]);
}

#[test]
fn mcts_takes_decepticoins_bait() {
    let loaded = load_game(GameId::DC1).unwrap();
    let mut agent = MctsAgent::default();
    let (result, _) = run_episode(
        &mut agent,
        GameId::DC1,
        &loaded.game,
        0,
        Budget::Iterations(500),
    );
    assert_eq!(result.score, 2);
}
