use std::collections::HashMap;

use super::nav::{first_step_toward, Navigator};
use super::GameId;
use crate::engine::{Action, EventKind, GameState, Pos, SpriteData, Status};
use crate::planners::{AgentPolicy, AgentRng, Budget};

/// Scripted optimal-strategy policy for a catalog game.
pub fn oracle_policy(id: GameId) -> Box<dyn AgentPolicy> {
    match id {
        GameId::DC1 | GameId::DC2 | GameId::DC3 => Box::new(DeceptiCoinsOracle::default()),
        GameId::Mints => Box::new(MintsOracle),
        GameId::Flower => Box::new(FlowerOracle),
        GameId::Invest => Box::new(InvestOracle),
    }
}

fn class(state: &GameState, name: &str) -> u8 {
    state
        .game()
        .class_index(name)
        .unwrap_or_else(|| panic!("game has no `{name}` class"))
}

fn positions_of(state: &GameState, class: u8) -> Vec<Pos> {
    state.alive_of_class(class).map(|(_, s)| s.pos).collect()
}

fn neighbours(state: &GameState, p: Pos) -> impl Iterator<Item = (Action, Pos)> + '_ {
    [Action::Up, Action::Down, Action::Left, Action::Right]
        .into_iter()
        .filter_map(move |a| state.game().offset(p, a.delta()).map(|q| (a, q)))
}

/// Best winning line from `root` found by breadth-first search over the
/// forward model, deduplicating states by their observation key. Only valid
/// for games without stochastic elements. Returns `(score, actions)`.
pub fn exhaustive_plan(root: &GameState, max_states: usize) -> Option<(i64, Vec<Action>)> {
    let mut states = vec![(root.clone(), usize::MAX, Action::Nil)];
    let mut seen: HashMap<Vec<u8>, ()> = HashMap::new();
    seen.insert(root.observe().packed_key_bytes(), ());
    let mut best: Option<(i64, usize)> = None;
    let mut frontier = vec![0usize];
    while !frontier.is_empty() && states.len() < max_states {
        let mut next = Vec::new();
        for &id in &frontier {
            for action in Action::ALL {
                let (child, _) = states[id].0.advanced(action);
                match child.status() {
                    Status::Loss => continue,
                    Status::Win => {
                        let score = child.score();
                        if best.is_none_or(|(b, _)| score > b) {
                            states.push((child, id, action));
                            best = Some((score, states.len() - 1));
                        }
                        continue;
                    }
                    Status::Ongoing => {}
                }
                let key = child.observe().packed_key_bytes();
                if seen.insert(key, ()).is_some() {
                    continue;
                }
                states.push((child, id, action));
                next.push(states.len() - 1);
            }
        }
        frontier = next;
    }
    let (score, mut id) = best?;
    let mut actions = Vec::new();
    while states[id].1 != usize::MAX {
        actions.push(states[id].2);
        id = states[id].1;
    }
    actions.reverse();
    Some((score, actions))
}

/// Follows the highest-scoring winning line, found by exhaustive search.
#[derive(Debug, Default, Clone)]
pub struct DeceptiCoinsOracle {
    plan: Vec<Action>,
    start_tick: u32,
}

impl AgentPolicy for DeceptiCoinsOracle {
    fn name(&self) -> &str {
        "oracle"
    }

    fn act(&mut self, state: &GameState, _budget: Budget, _rng: &mut AgentRng) -> Action {
        let idx = state.tick().wrapping_sub(self.start_tick) as usize;
        if state.tick() < self.start_tick || idx >= self.plan.len() || self.plan.is_empty() {
            self.plan = exhaustive_plan(state, 2_000_000)
                .map(|(_, p)| p)
                .unwrap_or_default();
            self.start_tick = state.tick();
            return self.plan.first().copied().unwrap_or(Action::Nil);
        }
        self.plan[idx]
    }

    fn reset(&mut self) {
        self.plan.clear();
        self.start_tick = 0;
    }
}

/// Ticks before the end at which the mints oracle starts eating.
pub const MINTS_EAT_WINDOW: u32 = 150;

/// Keeps clear of mints and of the waiter's drop cells until the last
/// [`MINTS_EAT_WINDOW`] ticks, then eats up to the gauge limit and goes
/// back to dodging.
#[derive(Debug, Default, Clone)]
pub struct MintsOracle;

impl MintsOracle {
    fn drop_cells(state: &GameState) -> Vec<Pos> {
        state
            .pending_events()
            .iter()
            .filter(|e| e.due_tick <= state.tick())
            .filter_map(|e| match e.kind {
                EventKind::SpawnDrop { at, .. } => Some(at),
                _ => None,
            })
            .collect()
    }
}

impl AgentPolicy for MintsOracle {
    fn name(&self) -> &str {
        "oracle"
    }

    fn act(&mut self, state: &GameState, _budget: Budget, _rng: &mut AgentRng) -> Action {
        let mint = class(state, "mint");
        let waiter = class(state, "waiter");
        let limit = state.game().classes[mint as usize].limit;
        let gauge = state.gauge(mint).unwrap_or(0);
        let left = state.game().time_limit.saturating_sub(state.tick());
        let danger = Self::drop_cells(state);
        let here = state.avatar_pos();

        if gauge < limit && left <= MINTS_EAT_WINDOW {
            let mints = positions_of(state, mint);
            if let Some(a) = first_step_toward(state, &mints, |p| danger.contains(&p)) {
                return a;
            }
        }
        if !danger.contains(&here) {
            return Action::Nil;
        }
        // dodge: prefer a free cell far from the waiter
        let waiters = positions_of(state, waiter);
        let far = |p: Pos| waiters.iter().map(|w| w.manhattan(p)).min().unwrap_or(0);
        let mut options: Vec<(bool, u32, Action)> = neighbours(state, here)
            .filter(|(_, q)| state.avatar_can_enter(*q) && !danger.contains(q))
            .map(|(a, q)| (state.has_class(q, mint), far(q), a))
            .filter(|(has_mint, _, _)| !has_mint || gauge + 1 < limit)
            .collect();
        options.sort_by_key(|&(has_mint, d, a)| (has_mint, std::cmp::Reverse(d), a));
        options.first().map_or(Action::Nil, |&(_, _, a)| a)
    }
}

/// Harvests flowers only at full value, otherwise waits beside the bed.
#[derive(Debug, Default, Clone)]
pub struct FlowerOracle;

impl AgentPolicy for FlowerOracle {
    fn name(&self) -> &str {
        "oracle"
    }

    fn act(&mut self, state: &GameState, _budget: Budget, _rng: &mut AgentRng) -> Action {
        let flower = class(state, "flower");
        let cap = state.game().classes[flower as usize].cap;
        let beds: Vec<Pos> = state
            .sprites()
            .iter()
            .filter(|s| s.class == flower)
            .map(|s| s.pos)
            .collect();
        let ripe: Vec<Pos> = state
            .sprites()
            .iter()
            .filter(|s| s.alive && s.class == flower)
            .filter(|s| matches!(s.data, SpriteData::Growable { value, .. } if value >= cap))
            .map(|s| s.pos)
            .collect();
        // unripe flowers would be harvested early if walked over
        let unripe = |p: Pos| state.has_class(p, flower) && !ripe.contains(&p);
        if let Some(a) = first_step_toward(state, &ripe, unripe) {
            return a;
        }
        let here = state.avatar_pos();
        let waiting: Vec<Pos> = beds
            .iter()
            .flat_map(|&b| neighbours(state, b).map(|(_, q)| q))
            .filter(|q| !beds.contains(q) && state.avatar_can_enter(*q))
            .collect();
        if waiting.contains(&here) {
            return Action::Nil;
        }
        first_step_toward(state, &waiting, unripe).unwrap_or(Action::Nil)
    }
}

/// Collects coins, then invests with every affordable banker whose payout
/// lands before the time limit, choosing the nearest; otherwise waits next
/// to the banker due back soonest.
#[derive(Debug, Default, Clone)]
pub struct InvestOracle;

const BANKERS: [&str; 3] = ["green", "red", "blue"];

impl AgentPolicy for InvestOracle {
    fn name(&self) -> &str {
        "oracle"
    }

    fn act(&mut self, state: &GameState, _budget: Budget, _rng: &mut AgentRng) -> Action {
        let game = state.game();
        let coin = class(state, "coin");
        let bankers: Vec<u8> = BANKERS.iter().map(|n| class(state, n)).collect();
        let here = state.avatar_pos();

        let nav_all = Navigator::new(state, &[here], |_| false);
        let reach = |p: Pos| nav_all.distance(p);
        let pays_in_time = |b: u8, p: Pos| {
            let info = &game.classes[b as usize];
            reach(p).is_some_and(|d| {
                state.tick() + d + info.delay < game.time_limit && state.score() >= info.cost
            })
        };

        let mut targets = positions_of(state, coin);
        for &b in &bankers {
            for p in positions_of(state, b) {
                if pays_in_time(b, p) {
                    targets.push(p);
                }
            }
        }
        let avoid = |p: Pos| {
            bankers
                .iter()
                .any(|&b| state.has_class(p, b) && !pays_in_time(b, p))
        };
        if let Some(a) = first_step_toward(state, &targets, avoid) {
            return a;
        }

        // wait beside the banker returning first
        let soonest = state
            .pending_events()
            .iter()
            .filter_map(|e| match e.kind {
                EventKind::TraderReturn { sprite, .. } => {
                    Some(state.sprites()[sprite as usize].pos)
                }
                _ => None,
            })
            .next();
        let Some(home) = soonest else {
            return Action::Nil;
        };
        let spots: Vec<Pos> = neighbours(state, home)
            .map(|(_, q)| q)
            .filter(|q| state.avatar_can_enter(*q) && !avoid(*q))
            .filter(|q| bankers.iter().all(|&b| !state.has_class(*q, b)))
            .collect();
        if spots.contains(&here) {
            return Action::Nil;
        }
        first_step_toward(state, &spots, avoid).unwrap_or(Action::Nil)
    }
}
