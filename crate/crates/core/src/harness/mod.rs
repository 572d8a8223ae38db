//! Evaluation harness: runs agents on catalog games, aggregates scores into
//! tables and records or verifies replays.

mod registry;
mod replay;
mod table;

use std::io::{Read, Write};
use std::path::PathBuf;
use std::sync::Arc;

use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{CompiledGame, GameState, Status};
use crate::games::{CatalogError, GameId};
use crate::learners::LearnError;
use crate::planners::{AgentPolicy, AgentRng, Budget};

pub use registry::{AgentSpec, AGENT_NAMES};
pub use replay::{
    state_checksum, verify_replay, verify_replay_file, Replay, ReplayError, ReplayStep,
    REPLAY_VERSION,
};
pub use table::{aggregate, report, ReportFormat, ScoreRow, ScoreTable};

/// Episodes per evaluation unless told otherwise.
pub const DEFAULT_EPISODES: usize = 150;

/// Per-move budget used by the harness when none is given. Counted in
/// iterations so that runs are reproducible.
pub const DEFAULT_BUDGET: Budget = Budget::Iterations(100);

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error("cannot aggregate an empty result list")]
    EmptyResults,
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeResult {
    #[serde(with = "game_id_serde")]
    pub game: GameId,
    pub agent: String,
    pub seed: u64,
    pub score: i64,
    #[serde(with = "status_serde")]
    pub status: Status,
    pub ticks: u32,
    #[serde(default)]
    pub replay_path: Option<PathBuf>,
}

/// Agent stream seed for an episode; kept apart from the game stream.
pub fn agent_seed(seed: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0xA5A5_5A5A_DEAD_BEEF
}

/// Plays one episode to completion and returns its result with a replay.
pub fn run_episode(
    agent: &mut dyn AgentPolicy,
    game_id: GameId,
    game: &Arc<CompiledGame>,
    seed: u64,
    budget: Budget,
) -> (EpisodeResult, Replay) {
    agent.reset();
    let mut state = GameState::init(game, seed);
    let mut rng = AgentRng::seed_from_u64(agent_seed(seed));
    let mut steps = Vec::new();
    while !state.status().is_terminal() {
        let action = agent.act(&state, budget, &mut rng);
        let tick = state.tick();
        let out = state.advance(action);
        steps.push(ReplayStep {
            tick,
            action,
            reward: out.reward,
            status: out.status,
            checksum: state_checksum(&state),
        });
    }
    let result = EpisodeResult {
        game: game_id,
        agent: agent.name().to_string(),
        seed,
        score: state.score(),
        status: state.status(),
        ticks: state.tick(),
        replay_path: None,
    };
    let replay = Replay {
        game: game_id,
        asset_hash: game.fingerprint_hex(),
        seed,
        agent: result.agent.clone(),
        steps,
        final_score: result.score,
        final_status: result.status,
    };
    (result, replay)
}

/// Runs `n_episodes` episodes with seeds `base_seed + k`. Episodes run in
/// parallel; results come back in episode order.
pub fn evaluate(
    agent: &AgentSpec,
    game_id: GameId,
    n_episodes: usize,
    base_seed: u64,
    budget: Budget,
) -> Result<Vec<EpisodeResult>, HarnessError> {
    if n_episodes == 0 {
        return Err(HarnessError::Usage(
            "episode count must be at least 1".to_string(),
        ));
    }
    let game = crate::games::load_game(game_id)?.game;
    agent.check_game(&game)?;
    Ok((0..n_episodes as u64)
        .into_par_iter()
        .map(|k| {
            let mut policy = agent.build(game_id);
            run_episode(
                policy.as_mut(),
                game_id,
                &game,
                base_seed.wrapping_add(k),
                budget,
            )
            .0
        })
        .collect())
}

/// Per-episode CSV: `game,agent,seed,score,status,ticks`.
pub fn write_results_csv<W: Write>(results: &[EpisodeResult], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for r in results {
        w.serialize(r)?;
    }
    w.flush().map_err(|source| HarnessError::Io {
        path: "<output>".to_string(),
        source,
    })?;
    Ok(())
}

pub fn read_results_csv<R: Read>(input: R) -> Result<Vec<EpisodeResult>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<Result<Vec<EpisodeResult>, _>>()?)
}

pub(crate) mod game_id_serde {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use crate::games::GameId;

    pub fn serialize<S: Serializer>(id: &GameId, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(id.as_str())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<GameId, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

mod status_serde {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use crate::engine::Status;

    pub fn serialize<S: Serializer>(st: &Status, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(st.as_str())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Status, D::Error> {
        let name = String::deserialize(d)?;
        Status::from_name(&name).ok_or_else(|| D::Error::custom(format!("bad status `{name}`")))
    }
}
