use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use super::greedy::greedy_with_meter;
use super::{planning_seed, AgentPolicy, AgentRng, Budget};
use crate::engine::{Action, ForwardModel, GameState, Pos, Status};
use crate::gdl::{Effect, Role};

/// Cells holding a sprite the avatar would gain from touching now:
/// positive `CollectScore`/`FillResource`, or any Growable (seeds are
/// worth nothing yet but grow).
pub fn reward_targets(state: &GameState) -> Vec<Pos> {
    let game = state.game();
    let mut out: Vec<Pos> = state
        .sprites()
        .iter()
        .filter(|s| s.alive)
        .filter(|s| {
            let growable = game.classes[s.class as usize].role == Role::Growable;
            match state.effect_on_touch(s.class) {
                Some((Effect::CollectScore, delta)) => delta > 0 || growable,
                Some((Effect::FillResource, delta)) => delta > 0,
                _ => false,
            }
        })
        .map(|s| s.pos)
        .collect();
    out.sort();
    out.dedup();
    out
}

struct Node<M> {
    state: M,
    g: u32,
    first_action: Action,
}

/// A* over avatar positions toward the nearest reward target, using the
/// forward model for successors (one budget unit each), unit edge cost and
/// Manhattan distance to the closest target as heuristic. Falls back to
/// greedy best-first with the remaining budget when there is no target or
/// none is reachable.
///
/// Generic over the stepping model so that wrappers can observe how many
/// advances a call makes; positions are read through `AsRef<GameState>`.
pub fn a_star_plan<M>(root: &M, budget: Budget, rng: &mut AgentRng) -> Action
where
    M: ForwardModel + AsRef<GameState>,
{
    if root.status().is_terminal() {
        return Action::Nil;
    }
    let seed = planning_seed(rng);
    let mut meter = budget.meter();
    let targets = reward_targets(root.as_ref());
    if targets.is_empty() {
        return greedy_with_meter(root, &mut meter, seed);
    }
    let h = |p: Pos| targets.iter().map(|t| t.manhattan(p)).min().unwrap_or(0);

    let start = root.fork(seed);
    let start_pos = start.as_ref().avatar_pos();
    let mut nodes = vec![Node {
        state: start,
        g: 0,
        first_action: Action::Nil,
    }];
    let mut closed: HashSet<Pos> = HashSet::from([start_pos]);
    // min-heap on (f, h, id)
    let mut open = BinaryHeap::from([Reverse((h(start_pos), h(start_pos), 0usize))]);
    let mut closest: Option<(u32, u32, usize)> = None;
    let base_score = root.score();

    while let Some(Reverse((_, _, id))) = open.pop() {
        for action in Action::ALL {
            if action == Action::Nil {
                continue;
            }
            if !meter.take() {
                return closest.map_or(Action::Nil, |(_, _, i)| nodes[i].first_action);
            }
            let mut child = nodes[id].state.clone();
            child.step(action);
            if child.status() == Status::Loss {
                continue;
            }
            let first_action = if id == 0 {
                action
            } else {
                nodes[id].first_action
            };
            let pos = child.as_ref().avatar_pos();
            if child.score() > base_score || targets.contains(&pos) {
                return first_action;
            }
            if child.status().is_terminal() || !closed.insert(pos) {
                continue;
            }
            let g = nodes[id].g + 1;
            let hv = h(pos);
            let child_id = nodes.len();
            if closest.is_none_or(|(ch, cg, _)| (hv, g) < (ch, cg)) {
                closest = Some((hv, g, child_id));
            }
            nodes.push(Node {
                state: child,
                g,
                first_action,
            });
            open.push(Reverse((g + hv, hv, child_id)));
        }
    }
    // every reachable cell explored without touching a target
    greedy_with_meter(root, &mut meter, seed)
}

#[derive(Debug, Default, Clone)]
pub struct AStarAgent;

impl AgentPolicy for AStarAgent {
    fn name(&self) -> &str {
        "astar"
    }

    fn act(&mut self, state: &GameState, budget: Budget, rng: &mut AgentRng) -> Action {
        a_star_plan(state, budget, rng)
    }
}
