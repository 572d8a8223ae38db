use std::collections::VecDeque;

use crate::engine::{Action, GameState, Pos};

/// Breadth-first distances to a goal set over cells the avatar may enter
/// in a given state. Movement legality depends only on the target cell, so
/// distances from the goals equal distances to them.
#[derive(Debug, Clone)]
pub struct Navigator {
    width: usize,
    height: usize,
    dist: Vec<u32>,
}

impl Navigator {
    /// `avoid` marks extra cells to route around. Goal cells are always
    /// allowed.
    pub fn new(state: &GameState, goals: &[Pos], avoid: impl Fn(Pos) -> bool) -> Navigator {
        let game = state.game();
        let (width, height) = (game.width, game.height);
        let mut dist = vec![u32::MAX; width * height];
        let mut queue = VecDeque::new();
        for &g in goals {
            let c = game.cell(g);
            if dist[c] == u32::MAX {
                dist[c] = 0;
                queue.push_back(g);
            }
        }
        while let Some(p) = queue.pop_front() {
            let d = dist[game.cell(p)];
            for a in [Action::Up, Action::Down, Action::Left, Action::Right] {
                let Some(q) = game.offset(p, a.delta()) else {
                    continue;
                };
                let c = game.cell(q);
                if dist[c] != u32::MAX {
                    continue;
                }
                // entering `p` from `q` requires `p` enterable; `q` itself
                // must be enterable to stand there
                if q != state.avatar_pos() && (!state.avatar_can_enter(q) || avoid(q)) {
                    continue;
                }
                dist[c] = d + 1;
                queue.push_back(q);
            }
        }
        Navigator {
            width,
            height,
            dist,
        }
    }

    pub fn distance(&self, p: Pos) -> Option<u32> {
        let (x, y) = (p.x as usize, p.y as usize);
        if x >= self.width || y >= self.height {
            return None;
        }
        let d = self.dist[y * self.width + x];
        (d != u32::MAX).then_some(d)
    }

    /// The move from `from` that shortens the distance, in action order.
    pub fn step_from(&self, state: &GameState, from: Pos) -> Option<Action> {
        let here = self.distance(from)?;
        if here == 0 {
            return None;
        }
        let game = state.game();
        [Action::Up, Action::Down, Action::Left, Action::Right]
            .into_iter()
            .find(|a| {
                game.offset(from, a.delta())
                    .and_then(|q| self.distance(q))
                    .is_some_and(|d| d + 1 == here)
            })
    }
}

/// First move on a shortest path from the avatar to any of `goals`.
pub fn first_step_toward(
    state: &GameState,
    goals: &[Pos],
    avoid: impl Fn(Pos) -> bool,
) -> Option<Action> {
    Navigator::new(state, goals, avoid).step_from(state, state.avatar_pos())
}
