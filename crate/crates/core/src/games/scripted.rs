use super::nav::first_step_toward;
use super::GameId;
use crate::engine::{Action, GameState, Pos};
use crate::planners::{AgentPolicy, AgentRng, Budget};

/// Short-sighted reference policy: always heads for the nearest thing that
/// pays right now.
pub fn always_collect_policy(id: GameId) -> Box<dyn AgentPolicy> {
    let kind = match id {
        GameId::DC1 | GameId::DC2 | GameId::DC3 => CollectKind::CoinsThenExit,
        GameId::Mints => CollectKind::EatEverything,
        GameId::Flower => CollectKind::NearestFlower,
        GameId::Invest => CollectKind::CoinsOnly,
    };
    Box::new(AlwaysCollect { kind })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CollectKind {
    CoinsThenExit,
    EatEverything,
    NearestFlower,
    CoinsOnly,
}

#[derive(Debug, Clone)]
pub struct AlwaysCollect {
    kind: CollectKind,
}

fn alive(state: &GameState, name: &str) -> Vec<Pos> {
    match state.game().class_index(name) {
        Some(c) => state.alive_of_class(c).map(|(_, s)| s.pos).collect(),
        None => Vec::new(),
    }
}

fn has_any(state: &GameState, names: &[&str], p: Pos) -> bool {
    names.iter().any(|n| {
        state
            .game()
            .class_index(n)
            .is_some_and(|c| state.has_class(p, c))
    })
}

impl AgentPolicy for AlwaysCollect {
    fn name(&self) -> &str {
        "always"
    }

    fn act(&mut self, state: &GameState, _budget: Budget, _rng: &mut AgentRng) -> Action {
        let step = match self.kind {
            CollectKind::CoinsThenExit => {
                first_step_toward(state, &alive(state, "coin"), |_| false).or_else(|| {
                    let exits = exit_cells(state);
                    first_step_toward(state, &exits, |_| false)
                })
            }
            CollectKind::EatEverything => {
                first_step_toward(state, &alive(state, "mint"), |_| false)
            }
            CollectKind::NearestFlower => {
                first_step_toward(state, &alive(state, "flower"), |_| false)
            }
            CollectKind::CoinsOnly => first_step_toward(state, &alive(state, "coin"), |p| {
                has_any(state, &["green", "red", "blue"], p)
            }),
        };
        step.unwrap_or(Action::Nil)
    }
}

fn exit_cells(state: &GameState) -> Vec<Pos> {
    let Some(exit) = state.game().class_index("exit") else {
        return Vec::new();
    };
    let game = state.game();
    (0..game.width * game.height)
        .map(|c| game.pos_of(c))
        .filter(|&p| state.has_class(p, exit))
        .collect()
}
