mod common;

use deceptive_games::engine::{Action, Status};
use deceptive_games::games::{load_game, GameId};
use deceptive_games::harness::{
    aggregate, evaluate, read_results_csv, report, run_episode, verify_replay, write_results_csv,
    AgentSpec, EpisodeResult, HarnessError, Replay, ReplayError, ReportFormat, ScoreTable,
    DEFAULT_EPISODES,
};
use deceptive_games::planners::{Budget, MctsParams};
use proptest::prelude::*;

fn csv_of(results: &[EpisodeResult]) -> Vec<u8> {
    let mut out = Vec::new();
    write_results_csv(results, &mut out).unwrap();
    out
}

fn result(agent: &str, game: GameId, seed: u64, score: i64) -> EpisodeResult {
    EpisodeResult {
        game,
        agent: agent.to_string(),
        seed,
        score,
        status: Status::Win,
        ticks: 10,
        replay_path: None,
    }
}

#[test]
fn evaluate_is_byte_reproducible() {
    for (agent, id) in [
        (AgentSpec::Mcts(MctsParams::default()), GameId::Mints),
        (AgentSpec::Random, GameId::Invest),
        (AgentSpec::Greedy, GameId::DC2),
    ] {
        let a = evaluate(&agent, id, 12, 100, Budget::Iterations(30)).unwrap();
        let b = evaluate(&agent, id, 12, 100, Budget::Iterations(30)).unwrap();
        assert_eq!(csv_of(&a), csv_of(&b));
        for (k, r) in a.iter().enumerate() {
            assert_eq!(r.seed, 100 + k as u64);
            assert_ne!(r.status, Status::Ongoing);
        }
    }
}

#[test]
fn zero_episodes_is_a_usage_error() {
    let e = evaluate(&AgentSpec::Oracle, GameId::DC1, 0, 0, Budget::Iterations(1)).unwrap_err();
    assert!(matches!(e, HarnessError::Usage(_)));
}

#[test]
fn unknown_agent_lists_registry() {
    let e = "alphazero".parse::<AgentSpec>().unwrap_err();
    match e {
        HarnessError::Usage(msg) => {
            for name in ["greedy", "astar", "mcts", "oracle", "always", "random"] {
                assert!(msg.contains(name), "{msg}");
            }
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn oracle_on_dc1_scores_five_every_time() {
    assert_eq!(DEFAULT_EPISODES, 150);
    let results = evaluate(
        &AgentSpec::Oracle,
        GameId::DC1,
        150,
        0,
        Budget::Iterations(1),
    )
    .unwrap();
    assert_eq!(results.len(), 150);
    assert!(results
        .iter()
        .all(|r| r.score == 5 && r.status == Status::Win));
}

#[test]
fn random_agent_rarely_finds_far_path() {
    let results = evaluate(
        &AgentSpec::Random,
        GameId::DC1,
        150,
        0,
        Budget::Iterations(1),
    )
    .unwrap();
    let mean = results.iter().map(|r| r.score as f64).sum::<f64>() / 150.0;
    assert!(mean < 5.0, "{mean}");
}

#[test]
fn mints_oracle_bounded_by_gauge() {
    let results = evaluate(
        &AgentSpec::Oracle,
        GameId::Mints,
        150,
        0,
        Budget::Iterations(1),
    )
    .unwrap();
    let table = aggregate(&results).unwrap();
    let row = table.get("oracle", GameId::Mints).unwrap();
    assert!(row.max <= 9);
    assert!(row.mean <= 9.0);
    assert_eq!(row.n, 150);
}

#[test]
fn aggregate_small_examples() {
    let t = aggregate(&[
        result("a", GameId::DC1, 0, 5),
        result("a", GameId::DC1, 1, 5),
        result("a", GameId::DC1, 2, 5),
    ])
    .unwrap();
    assert_eq!((t.rows[0].mean, t.rows[0].std), (5.0, 0.0));
    let t = aggregate(&[
        result("b", GameId::Flower, 0, 2),
        result("b", GameId::Flower, 1, 4),
    ])
    .unwrap();
    assert_eq!(t.rows[0].mean, 3.0);
    assert_eq!((t.rows[0].min, t.rows[0].max), (2, 4));
    assert!(matches!(aggregate(&[]), Err(HarnessError::EmptyResults)));
}

#[test]
fn markdown_has_catalog_columns() {
    let t = aggregate(&[result("oracle", GameId::DC1, 0, 5)]).unwrap();
    let md = report(&t, ReportFormat::Markdown).unwrap();
    let lines: Vec<&str> = md.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(
        lines[0],
        "| Agent | DC 1 | DC 2 | DC 3 | Inv | Flow | Mints |"
    );
    assert!(lines[2].starts_with("| oracle |"));
}

#[test]
fn five_agents_make_a_five_by_six_grid() {
    let mut results = Vec::new();
    for agent in ["a", "b", "c", "d", "e"] {
        for (i, id) in GameId::ALL.into_iter().enumerate() {
            results.push(result(agent, id, 0, i as i64));
        }
    }
    let md = aggregate(&results).unwrap().to_markdown();
    let lines: Vec<&str> = md.lines().collect();
    assert_eq!(lines.len(), 2 + 5);
    for line in &lines {
        assert_eq!(line.matches('|').count(), 8, "{line}");
    }
    assert!(!md.contains(" - |"));
}

proptest! {
    #[test]
    fn table_csv_round_trips_and_means_are_exact(
        scores in prop::collection::vec((0usize..3, 0usize..6, -2000i64..2000), 1..80),
    ) {
        let results: Vec<EpisodeResult> = scores
            .iter()
            .enumerate()
            .map(|(k, &(a, g, s))| result(["x", "y", "z"][a], GameId::ALL[g], k as u64, s))
            .collect();
        let table = aggregate(&results).unwrap();
        for row in &table.rows {
            let raw: Vec<i64> = results
                .iter()
                .filter(|r| r.agent == row.agent && r.game == row.game)
                .map(|r| r.score)
                .collect();
            prop_assert_eq!(row.n, raw.len());
            prop_assert_eq!(row.mean, raw.iter().sum::<i64>() as f64 / raw.len() as f64);
            prop_assert!(row.min as f64 <= row.mean && row.mean <= row.max as f64);
        }
        let back = ScoreTable::from_csv(&table.to_csv().unwrap()).unwrap();
        prop_assert_eq!(back, table);
        let csv = csv_of(&results);
        prop_assert_eq!(read_results_csv(csv.as_slice()).unwrap(), results);
    }
}

fn recorded(id: GameId, agent: AgentSpec, seed: u64) -> (EpisodeResult, Replay) {
    let game = load_game(id).unwrap().game;
    let mut policy = agent.build(id);
    run_episode(policy.as_mut(), id, &game, seed, Budget::Iterations(20))
}

#[test]
fn recorded_replays_verify() {
    for id in GameId::ALL {
        for agent in [AgentSpec::Random, AgentSpec::Oracle, AgentSpec::Greedy] {
            let (res, replay) = recorded(id, agent, 7);
            assert_eq!(
                replay.steps.iter().map(|s| s.reward).sum::<i64>(),
                res.score
            );
            verify_replay(&replay).unwrap();
            let parsed = Replay::parse(&replay.to_text()).unwrap();
            assert_eq!(parsed, replay);
            verify_replay(&parsed).unwrap();
        }
    }
}

#[test]
fn flipped_action_reports_divergent_tick() {
    let (_, replay) = recorded(GameId::DC1, AgentSpec::Oracle, 0);
    for k in [0, 3, replay.steps.len() - 1] {
        let mut bad = replay.clone();
        let a = bad.steps[k].action;
        // pick a replacement that actually changes the outcome
        let alt = Action::ALL
            .into_iter()
            .find(|&b| {
                let mut m = bad.clone();
                m.steps[k].action = b;
                b != a && verify_replay(&m).is_err()
            })
            .unwrap();
        bad.steps[k].action = alt;
        match verify_replay(&bad) {
            Err(ReplayError::Divergence { tick, .. }) => assert_eq!(tick, bad.steps[k].tick),
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn edited_asset_is_a_version_mismatch() {
    let (_, replay) = recorded(GameId::DC1, AgentSpec::Oracle, 0);
    let spec = include_str!("../assets/decepticoins/game.dgdl")
        .replace("time_limit 500", "time_limit 501");
    let level = include_str!("../assets/decepticoins/level1.lvl");
    let game = common::compile(&spec, level);
    assert!(matches!(
        replay.verify_against(&game),
        Err(ReplayError::VersionMismatch { .. })
    ));
}

#[test]
fn malformed_replays_are_rejected() {
    let (_, replay) = recorded(GameId::DC1, AgentSpec::Oracle, 0);
    let text = replay.to_text();
    assert!(matches!(
        Replay::parse(&text.replacen("deceptive-games-replay 1", "deceptive-games-replay 7", 1)),
        Err(ReplayError::UnsupportedVersion(7))
    ));
    let truncated: String = text.lines().take(4).collect::<Vec<_>>().join("\n");
    assert!(matches!(
        Replay::parse(&truncated),
        Err(ReplayError::Malformed { .. })
    ));
    assert!(Replay::parse("").is_err());
}
