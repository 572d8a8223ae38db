use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{planning_seed, AgentPolicy, AgentRng, Budget};
use crate::engine::{Action, ForwardModel, GameState};

struct Node<M> {
    state: M,
    first_action: Action,
    next_child: usize,
}

/// Ranking of a generated state: status first (win > ongoing > loss),
/// then score.
fn value_key<M: ForwardModel>(m: &M) -> (u8, i64) {
    (m.status().rank(), m.score())
}

/// Greedy best-first search. Each generated successor costs one unit of
/// `budget`. Returns the first action on the path to the best state seen;
/// among equally ranked states the one generated first wins.
pub fn greedy_best_first<M: ForwardModel>(root: &M, budget: Budget, rng: &mut AgentRng) -> Action {
    greedy_with_meter(root, &mut budget.meter(), planning_seed(rng))
}

pub(crate) fn greedy_with_meter<M: ForwardModel>(
    root: &M,
    meter: &mut super::BudgetMeter,
    seed: u64,
) -> Action {
    if root.status().is_terminal() {
        return Action::Nil;
    }
    let mut nodes: Vec<Node<M>> = vec![Node {
        state: root.fork(seed),
        first_action: Action::Nil,
        next_child: 0,
    }];
    // max-heap on (status rank, score), lowest id first among equals
    let mut open: BinaryHeap<((u8, i64), Reverse<usize>)> = BinaryHeap::new();
    open.push((value_key(&nodes[0].state), Reverse(0)));
    let mut best: Option<((u8, i64), Action)> = None;

    'search: while let Some(&(_, Reverse(id))) = open.peek() {
        if nodes[id].next_child >= Action::ALL.len() {
            open.pop();
            continue;
        }
        if !meter.take() {
            break 'search;
        }
        let action = Action::ALL[nodes[id].next_child];
        nodes[id].next_child += 1;
        let mut child = nodes[id].state.clone();
        child.step(action);
        let first_action = if id == 0 {
            action
        } else {
            nodes[id].first_action
        };
        let key = value_key(&child);
        let child_id = nodes.len();
        if best.is_none_or(|(bk, _)| key > bk) {
            best = Some((key, first_action));
        }
        let terminal = child.status().is_terminal();
        nodes.push(Node {
            state: child,
            first_action,
            next_child: 0,
        });
        if !terminal {
            open.push((key, Reverse(child_id)));
        }
    }
    best.map_or(Action::Nil, |(_, a)| a)
}

#[derive(Debug, Default, Clone)]
pub struct GreedyAgent;

impl AgentPolicy for GreedyAgent {
    fn name(&self) -> &str {
        "greedy"
    }

    fn act(&mut self, state: &GameState, budget: Budget, rng: &mut AgentRng) -> Action {
        greedy_best_first(state, budget, rng)
    }
}
