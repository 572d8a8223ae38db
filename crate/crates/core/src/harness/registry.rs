use std::path::Path;
use std::str::FromStr;

use super::HarnessError;
use crate::engine::CompiledGame;
use crate::games::{always_collect_policy, oracle_policy, GameId};
use crate::learners::LearnedPolicy;
use crate::planners::{AStarAgent, AgentPolicy, GreedyAgent, MctsAgent, MctsParams, RandomAgent};

/// Names accepted by [`AgentSpec::from_str`], besides `file:<path>`.
pub const AGENT_NAMES: [&str; 6] = ["greedy", "astar", "mcts", "oracle", "always", "random"];

/// A recipe for building fresh agents, one per episode.
#[derive(Debug, Clone)]
pub enum AgentSpec {
    Greedy,
    AStar,
    Mcts(MctsParams),
    Oracle,
    AlwaysCollect,
    Random,
    Learned(Box<LearnedPolicy>),
}

impl AgentSpec {
    pub fn build(&self, game: GameId) -> Box<dyn AgentPolicy> {
        match self {
            AgentSpec::Greedy => Box::new(GreedyAgent),
            AgentSpec::AStar => Box::new(AStarAgent),
            AgentSpec::Mcts(params) => Box::new(MctsAgent { params: *params }),
            AgentSpec::Oracle => oracle_policy(game),
            AgentSpec::AlwaysCollect => always_collect_policy(game),
            AgentSpec::Random => Box::new(RandomAgent),
            AgentSpec::Learned(p) => Box::new((**p).clone()),
        }
    }

    /// Learned policies only run on the asset they were trained on.
    pub fn check_game(&self, game: &CompiledGame) -> Result<(), HarnessError> {
        if let AgentSpec::Learned(p) = self {
            p.check_game(game)?;
        }
        Ok(())
    }

    pub fn load_policy(path: &Path) -> Result<AgentSpec, HarnessError> {
        Ok(AgentSpec::Learned(Box::new(LearnedPolicy::load(path)?)))
    }
}

impl FromStr for AgentSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(path) = s.strip_prefix("file:") {
            return AgentSpec::load_policy(Path::new(path));
        }
        match s.to_ascii_lowercase().as_str() {
            "greedy" => Ok(AgentSpec::Greedy),
            "astar" | "a*" => Ok(AgentSpec::AStar),
            "mcts" => Ok(AgentSpec::Mcts(MctsParams::default())),
            "oracle" => Ok(AgentSpec::Oracle),
            "always" => Ok(AgentSpec::AlwaysCollect),
            "random" => Ok(AgentSpec::Random),
            _ => Err(HarnessError::Usage(format!(
                "unknown agent `{s}`; registered agents: {}, file:<policy.json>",
                AGENT_NAMES.join(", ")
            ))),
        }
    }
}
