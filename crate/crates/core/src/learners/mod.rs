//! Model-free learners: tabular Q-learning and a linear n-step
//! advantage actor-critic. Both train episodically on [`Observation`]s and
//! yield a greedy policy plus a learning curve.
//!
//! [`Observation`]: crate::engine::Observation

mod ac;
mod curve;
mod features;
mod qlearn;

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{Action, CompiledGame, GameState};
use crate::planners::{AgentPolicy, AgentRng, Budget};

pub use ac::{n_step_returns, softmax, ACModel, Transition, N_ACTIONS};
pub use curve::{CurvePoint, LearningCurve};
pub use features::{encode_features, FeatureEncoder};
pub use qlearn::{state_key, EpsilonSchedule, QTable, StateKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LearnerKind {
    QLearning,
    ActorCritic,
}

impl LearnerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LearnerKind::QLearning => "q",
            LearnerKind::ActorCritic => "ac",
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LearnerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "q" | "qlearning" | "q-learning" => Ok(LearnerKind::QLearning),
            "ac" | "a2c" | "actor-critic" => Ok(LearnerKind::ActorCritic),
            _ => Err(format!("unknown learner `{s}` (expected q or ac)")),
        }
    }
}

/// Hyperparameters for [`train`]. Unused fields are ignored by the other
/// learner kind.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: EpsilonSchedule,
    pub n_steps: usize,
    pub learning_rate: f64,
    pub entropy_coef: f64,
    /// Cuts training episodes short of the game's own time limit.
    pub max_episode_ticks: Option<u32>,
    pub curve_window: usize,
    pub workers: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            alpha: 0.5,
            gamma: 0.99,
            epsilon: EpsilonSchedule::default(),
            n_steps: 5,
            learning_rate: 0.007,
            entropy_coef: 0.0,
            max_episode_ticks: None,
            curve_window: 100,
            workers: 1,
        }
    }
}

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("training needs at least one episode")]
    NoEpisodes,
    #[error("policy file: {0}")]
    Io(#[from] std::io::Error),
    #[error("policy file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("policy file format `{format}` version {version} is not supported")]
    UnsupportedFormat { format: String, version: u32 },
    #[error("policy was trained on a different game asset ({expected} vs {found})")]
    GameMismatch { expected: String, found: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LearnedModel {
    Q {
        table: QTable,
    },
    ActorCritic {
        model: ACModel,
        encoder: FeatureEncoder,
    },
}

/// A trained policy that always takes its highest-rated action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnedPolicy {
    pub game: String,
    pub fingerprint: String,
    pub model: LearnedModel,
}

pub const POLICY_FORMAT: &str = "deceptive-games-policy";
pub const POLICY_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct PolicyFile {
    format: String,
    version: u32,
    #[serde(flatten)]
    policy: LearnedPolicy,
}

#[derive(Deserialize)]
struct PolicyHeader {
    format: String,
    version: u32,
}

impl LearnedPolicy {
    pub fn greedy_action(&self, state: &GameState) -> Action {
        let obs = state.observe();
        let idx = match &self.model {
            LearnedModel::Q { table } => table.greedy(&state_key(&obs)),
            LearnedModel::ActorCritic { model, encoder } => {
                qlearn::argmax(&model.probs(&encoder.encode(&obs)))
            }
        };
        Action::ALL[idx]
    }

    pub fn to_json(&self) -> Result<String, LearnError> {
        Ok(serde_json::to_string(&PolicyFile {
            format: POLICY_FORMAT.to_string(),
            version: POLICY_FORMAT_VERSION,
            policy: self.clone(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<LearnedPolicy, LearnError> {
        let header: PolicyHeader = serde_json::from_str(text)?;
        if header.format != POLICY_FORMAT || header.version != POLICY_FORMAT_VERSION {
            return Err(LearnError::UnsupportedFormat {
                format: header.format,
                version: header.version,
            });
        }
        let file: PolicyFile = serde_json::from_str(text)?;
        Ok(file.policy)
    }

    pub fn save(&self, path: &Path) -> Result<(), LearnError> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<LearnedPolicy, LearnError> {
        LearnedPolicy::from_json(&std::fs::read_to_string(path)?)
    }

    /// Errors unless the policy was trained on exactly `game`.
    pub fn check_game(&self, game: &CompiledGame) -> Result<(), LearnError> {
        let found = game.fingerprint_hex();
        if found != self.fingerprint {
            return Err(LearnError::GameMismatch {
                expected: self.fingerprint.clone(),
                found,
            });
        }
        Ok(())
    }
}

impl AgentPolicy for LearnedPolicy {
    fn name(&self) -> &str {
        match self.model {
            LearnedModel::Q { .. } => "q",
            LearnedModel::ActorCritic { .. } => "ac",
        }
    }

    fn act(&mut self, state: &GameState, _budget: Budget, _rng: &mut AgentRng) -> Action {
        self.greedy_action(state)
    }
}

/// Trains a fresh learner for `episodes` episodes. Everything random is
/// drawn from one stream seeded by `seed`, so runs are reproducible.
pub fn train(
    game: &Arc<CompiledGame>,
    kind: LearnerKind,
    episodes: usize,
    seed: u64,
    config: &TrainConfig,
) -> Result<(LearnedPolicy, LearningCurve), LearnError> {
    if episodes == 0 {
        return Err(LearnError::NoEpisodes);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut curve = LearningCurve::new(config.curve_window);
    let model = match kind {
        LearnerKind::QLearning => {
            let mut table = QTable::new(config.alpha, config.gamma, config.epsilon);
            for ep in 0..episodes {
                let eps = config.epsilon.at(ep, episodes);
                let (ret, len) = q_episode(game, &mut table, eps, config, &mut rng);
                curve.push(ret, len);
            }
            LearnedModel::Q { table }
        }
        LearnerKind::ActorCritic => {
            let encoder = FeatureEncoder::for_game(game);
            let mut model = ACModel::new(encoder.dim());
            model.n_steps = config.n_steps.max(1);
            model.learning_rate = config.learning_rate;
            model.gamma = config.gamma;
            model.entropy_coef = config.entropy_coef;
            model.workers = config.workers.max(1);
            for _ in 0..episodes {
                let (ret, len) = ac_episode(game, &mut model, &encoder, config, &mut rng);
                curve.push(ret, len);
            }
            LearnedModel::ActorCritic { model, encoder }
        }
    };
    Ok((
        LearnedPolicy {
            game: game.spec.name.clone(),
            fingerprint: game.fingerprint_hex(),
            model,
        },
        curve,
    ))
}

fn episode_limit(game: &CompiledGame, config: &TrainConfig) -> u32 {
    config
        .max_episode_ticks
        .map_or(game.time_limit, |m| m.min(game.time_limit))
}

fn q_episode(
    game: &Arc<CompiledGame>,
    table: &mut QTable,
    eps: f64,
    config: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> (i64, u32) {
    let limit = episode_limit(game, config);
    let mut state = GameState::init(game, rng.next_u64());
    let mut key = state_key(&state.observe());
    while !state.status().is_terminal() && state.tick() < limit {
        let a = if rng.gen::<f64>() < eps {
            rng.gen_range(0..N_ACTIONS)
        } else {
            // random tie-break so unseen states do not all favour Up
            let q = table.get(&key);
            let best = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let ties: Vec<usize> = (0..N_ACTIONS).filter(|&i| q[i] == best).collect();
            ties[rng.gen_range(0..ties.len())]
        };
        let out = state.advance(Action::ALL[a]);
        let next = state_key(&state.observe());
        table.update(&key, a, out.reward as f64, &next, out.status.is_terminal());
        key = next;
    }
    (state.score(), state.tick())
}

fn sample(p: &[f64; N_ACTIONS], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        acc += pi;
        if u < acc {
            return i;
        }
    }
    N_ACTIONS - 1
}

fn ac_episode(
    game: &Arc<CompiledGame>,
    model: &mut ACModel,
    encoder: &FeatureEncoder,
    config: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> (i64, u32) {
    let limit = episode_limit(game, config);
    let mut state = GameState::init(game, rng.next_u64());
    let mut x = encoder.encode(&state.observe());
    let mut segment: Vec<Transition> = Vec::with_capacity(model.n_steps);
    while !state.status().is_terminal() && state.tick() < limit {
        let a = sample(&model.probs(&x), rng);
        let out = state.advance(Action::ALL[a]);
        let next = encoder.encode(&state.observe());
        segment.push(Transition {
            features: std::mem::replace(&mut x, next),
            action: a,
            reward: out.reward as f64,
        });
        let done = out.status.is_terminal();
        if segment.len() >= model.n_steps || done || state.tick() >= limit {
            model.update(&segment, (!done).then_some(x.as_slice()));
            segment.clear();
        }
    }
    (state.score(), state.tick())
}
