//! Forward-model planning agents: greedy best-first, A* toward rewards and
//! open-loop MCTS.

mod astar;
mod greedy;
mod mcts;

use std::time::{Duration, Instant};

use rand::RngCore;
use rand_chacha::ChaCha8Rng;

use crate::engine::{Action, GameState};

pub use astar::{a_star_plan, reward_targets, AStarAgent};
pub use greedy::{greedy_best_first, GreedyAgent};
pub use mcts::{mcts_select, MctsAgent, MctsParams};

/// Random stream handed to agents; distinct from the game's own stream.
pub type AgentRng = ChaCha8Rng;

/// Per-move search allowance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    /// Forward-model advances (greedy, A*) or tree iterations (MCTS).
    Iterations(u32),
    WallClockMillis(u32),
}

impl Budget {
    /// Real-time allowance of the planning competition track.
    pub const COMPETITION: Budget = Budget::WallClockMillis(40);

    pub(crate) fn meter(self) -> BudgetMeter {
        BudgetMeter {
            budget: self,
            used: 0,
            start: Instant::now(),
        }
    }
}

pub(crate) struct BudgetMeter {
    budget: Budget,
    used: u64,
    start: Instant,
}

impl BudgetMeter {
    /// Claims one unit; `false` once the allowance is spent.
    pub(crate) fn take(&mut self) -> bool {
        let ok = match self.budget {
            Budget::Iterations(n) => self.used < u64::from(n.max(1)),
            Budget::WallClockMillis(t) => {
                self.used == 0 || self.start.elapsed() < Duration::from_millis(u64::from(t.max(1)))
            }
        };
        if ok {
            self.used += 1;
        }
        ok
    }
}

/// Uniform agent contract used by the harness.
///
/// `act` must treat `state` as read-only; planners work on forks.
pub trait AgentPolicy: Send {
    fn name(&self) -> &str;
    fn act(&mut self, state: &GameState, budget: Budget, rng: &mut AgentRng) -> Action;
    /// Called before each episode.
    fn reset(&mut self) {}
}

/// Uniformly random actions.
#[derive(Debug, Default, Clone)]
pub struct RandomAgent;

impl AgentPolicy for RandomAgent {
    fn name(&self) -> &str {
        "random"
    }

    fn act(&mut self, _state: &GameState, _budget: Budget, rng: &mut AgentRng) -> Action {
        Action::ALL[(rng.next_u32() % 5) as usize]
    }
}

pub(crate) fn planning_seed(rng: &mut AgentRng) -> u64 {
    rng.next_u64()
}
