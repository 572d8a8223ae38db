use rand::RngCore;

use super::{AgentPolicy, AgentRng, Budget};
use crate::engine::{Action, ForwardModel, GameState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MctsParams {
    pub exploration_c: f64,
    pub rollout_depth: u32,
}

impl Default for MctsParams {
    fn default() -> Self {
        MctsParams {
            exploration_c: std::f64::consts::SQRT_2,
            rollout_depth: 10,
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Node {
    children: [Option<usize>; 5],
    visits: u64,
    total: f64,
}

/// Running bounds of observed returns, used to map values into `[0, 1]`.
#[derive(Debug, Clone, Copy)]
struct Bounds {
    min: f64,
    max: f64,
}

impl Bounds {
    fn observe(&mut self, v: f64) {
        self.min = self.min.min(v);
        self.max = self.max.max(v);
    }

    fn normalize(&self, v: f64) -> f64 {
        if self.max > self.min {
            (v - self.min) / (self.max - self.min)
        } else {
            0.5
        }
    }
}

/// Open-loop UCT. Every iteration re-simulates from a fresh fork of the
/// root, so stochastic games are sampled rather than memorised. Values are
/// score gains over the root, normalised by the running min/max of all
/// returns seen in this search. Returns the most visited root action.
pub fn mcts_select<M: ForwardModel>(
    root: &M,
    params: &MctsParams,
    budget: Budget,
    rng: &mut AgentRng,
) -> Action {
    if root.status().is_terminal() {
        return Action::Nil;
    }
    let c = params.exploration_c.max(0.0);
    let depth_limit = params.rollout_depth.max(1);
    let base = root.score() as f64;
    let mut nodes = vec![Node::default()];
    let mut bounds = Bounds {
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
    };
    let mut meter = budget.meter();
    let mut path = Vec::with_capacity(32);

    while meter.take() {
        let mut sim = root.fork(rng.next_u64());
        path.clear();
        path.push(0usize);
        let mut node = 0usize;

        // selection
        while !sim.status().is_terminal() && nodes[node].children.iter().all(Option::is_some) {
            let parent_visits = nodes[node].visits.max(1) as f64;
            let mut best: Option<(f64, usize, usize)> = None;
            for (i, child) in nodes[node].children.iter().enumerate() {
                let child = child.expect("fully expanded");
                let n = &nodes[child];
                let ucb = if n.visits == 0 {
                    f64::INFINITY
                } else {
                    bounds.normalize(n.total / n.visits as f64)
                        + c * (parent_visits.ln() / n.visits as f64).sqrt()
                };
                if best.is_none_or(|(b, _, _)| ucb > b) {
                    best = Some((ucb, i, child));
                }
            }
            let (_, action_idx, child) = best.expect("five children");
            sim.step(Action::ALL[action_idx]);
            node = child;
            path.push(node);
        }

        // expansion
        if !sim.status().is_terminal() {
            let untried: Vec<usize> = (0..5)
                .filter(|&i| nodes[node].children[i].is_none())
                .collect();
            if !untried.is_empty() {
                let pick = untried[(rng.next_u32() as usize) % untried.len()];
                let child = nodes.len();
                nodes.push(Node::default());
                nodes[node].children[pick] = Some(child);
                sim.step(Action::ALL[pick]);
                node = child;
                path.push(node);
            }
        }

        // rollout
        let mut steps = 0;
        while steps < depth_limit && !sim.status().is_terminal() {
            sim.step(Action::ALL[(rng.next_u32() % 5) as usize]);
            steps += 1;
        }

        let value = sim.score() as f64 - base;
        bounds.observe(value);
        for &n in &path {
            nodes[n].visits += 1;
            nodes[n].total += value;
        }
    }

    let root_node = &nodes[0];
    let mut best: Option<(u64, f64, Action)> = None;
    for (i, child) in root_node.children.iter().enumerate() {
        let Some(child) = child else { continue };
        let n = &nodes[*child];
        let mean = if n.visits > 0 {
            n.total / n.visits as f64
        } else {
            f64::NEG_INFINITY
        };
        let better = match best {
            None => true,
            Some((bv, bm, _)) => n.visits > bv || (n.visits == bv && mean > bm),
        };
        if better {
            best = Some((n.visits, mean, Action::ALL[i]));
        }
    }
    best.map_or(Action::Nil, |(_, _, a)| a)
}

#[derive(Debug, Clone, Default)]
pub struct MctsAgent {
    pub params: MctsParams,
}

impl AgentPolicy for MctsAgent {
    fn name(&self) -> &str {
        "mcts"
    }

    fn act(&mut self, state: &GameState, budget: Budget, rng: &mut AgentRng) -> Action {
        mcts_select(state, &self.params, budget, rng)
    }
}
