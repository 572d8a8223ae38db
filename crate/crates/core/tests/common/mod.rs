#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use deceptive_games::engine::{Action, CompiledGame, ForwardModel, GameState, Pos, Status};
use deceptive_games::gdl::{parse_game, parse_level};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn compile(spec: &str, level: &str) -> Arc<CompiledGame> {
    let spec = parse_game(spec).unwrap();
    let level = parse_level(level, &spec).unwrap();
    CompiledGame::new(spec, level)
}

/// Forward model that counts the advances and forks made through it and
/// every copy derived from it.
#[derive(Clone)]
pub struct Counting {
    pub inner: GameState,
    pub steps: Arc<AtomicU64>,
    pub forks: Arc<AtomicU64>,
}

impl Counting {
    pub fn new(inner: GameState) -> Counting {
        Counting {
            inner,
            steps: Arc::default(),
            forks: Arc::default(),
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps.load(Ordering::SeqCst)
    }

    pub fn forks(&self) -> u64 {
        self.forks.load(Ordering::SeqCst)
    }
}

impl ForwardModel for Counting {
    fn step(&mut self, action: Action) -> i64 {
        self.steps.fetch_add(1, Ordering::SeqCst);
        self.inner.step(action)
    }

    fn score(&self) -> i64 {
        self.inner.score()
    }

    fn status(&self) -> Status {
        self.inner.status()
    }

    fn fork(&self, planning_seed: u64) -> Self {
        self.forks.fetch_add(1, Ordering::SeqCst);
        Counting {
            inner: self.inner.fork(planning_seed),
            steps: Arc::clone(&self.steps),
            forks: Arc::clone(&self.forks),
        }
    }
}

impl AsRef<GameState> for Counting {
    fn as_ref(&self) -> &GameState {
        &self.inner
    }
}

/// Deterministic game tree: every node has five children, one per action,
/// and each edge carries a fixed reward. Nodes are numbered level by level
/// so the children of `i` are `5i+1 ..= 5i+5`.
#[derive(Debug, Clone)]
pub struct ToyTree {
    rewards: Arc<Vec<i64>>,
    depth: u32,
    node: usize,
    level: u32,
    score: i64,
}

impl ToyTree {
    pub fn new(depth: u32, rewards: Vec<i64>) -> ToyTree {
        let nodes: usize = (0..=depth).map(|d| 5usize.pow(d)).sum();
        assert_eq!(rewards.len(), nodes);
        ToyTree {
            rewards: Arc::new(rewards),
            depth,
            node: 0,
            level: 0,
            score: 0,
        }
    }

    pub fn random(rng: &mut ChaCha8Rng) -> ToyTree {
        let depth = rng.gen_range(1..=3);
        let nodes: usize = (0..=depth).map(|d| 5usize.pow(d)).sum();
        let rewards = (0..nodes)
            .map(|i| if i == 0 { 0 } else { rng.gen_range(-3..=5) })
            .collect();
        ToyTree::new(depth, rewards)
    }

    pub fn random_suite(count: usize, seed: u64) -> Vec<ToyTree> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| ToyTree::random(&mut rng)).collect()
    }

    /// Best total return reachable from here, by full enumeration.
    pub fn best_return(&self) -> i64 {
        if self.level == self.depth {
            return 0;
        }
        Action::ALL
            .iter()
            .map(|&a| {
                let mut c = self.clone();
                let r = c.step(a);
                r + c.best_return()
            })
            .max()
            .unwrap()
    }

    /// Root actions whose subtree attains the best return.
    pub fn best_actions(&self) -> Vec<Action> {
        let best = self.best_return();
        Action::ALL
            .into_iter()
            .filter(|&a| {
                let mut c = self.clone();
                c.step(a) + c.best_return() == best
            })
            .collect()
    }
}

impl ForwardModel for ToyTree {
    fn step(&mut self, action: Action) -> i64 {
        if self.level == self.depth {
            return 0;
        }
        self.node = 5 * self.node + 1 + action.index();
        self.level += 1;
        let r = self.rewards[self.node];
        self.score += r;
        r
    }

    fn score(&self) -> i64 {
        self.score
    }

    fn status(&self) -> Status {
        if self.level == self.depth {
            Status::Win
        } else {
            Status::Ongoing
        }
    }

    fn fork(&self, _planning_seed: u64) -> Self {
        self.clone()
    }
}

/// Which DeceptiCoins path a cell lies strictly inside: `Some(false)` for
/// the near (left) path, `Some(true)` for the far one. The paths are split
/// by the start column above the exit row and by the exit column on it.
pub fn dc_side(start: Pos, exit: Pos, p: Pos) -> Option<bool> {
    let pivot = if p.y == exit.y { exit.x } else { start.x };
    if p.y > exit.y || p.x == pivot {
        None
    } else {
        Some(p.x > pivot)
    }
}

/// Every avatar position reachable from `root`, by breadth-first search
/// over forward-model states.
pub fn reachable_positions(root: &GameState) -> HashSet<Pos> {
    let mut seen = HashSet::from([root.observe().packed_key_bytes()]);
    let mut positions = HashSet::from([root.avatar_pos()]);
    let mut queue = VecDeque::from([root.clone()]);
    while let Some(s) = queue.pop_front() {
        for a in Action::ALL {
            let (child, _) = s.advanced(a);
            positions.insert(child.avatar_pos());
            if !child.status().is_terminal() && seen.insert(child.observe().packed_key_bytes()) {
                queue.push_back(child);
            }
        }
    }
    positions
}

/// Checks that committing to either DeceptiCoins path from the start
/// never lets the avatar reach the other one. Returns a description of
/// the first violation.
pub fn dc_trap_violation(game: &Arc<CompiledGame>) -> Option<String> {
    let exit_class = game.class_index("exit")?;
    let root = GameState::init(game, 0);
    let exit = (0..game.width * game.height)
        .map(|c| game.pos_of(c))
        .find(|&p| root.has_class(p, exit_class))?;
    let start = root.avatar_pos();
    for (action, far) in [(Action::Left, false), (Action::Right, true)] {
        let (committed, _) = root.advanced(action);
        if dc_side(start, exit, committed.avatar_pos()) != Some(far) {
            return Some(format!("{action:?} does not enter a path"));
        }
        let reached = reachable_positions(&committed);
        if reached.len() <= 5 {
            return Some("search explored too little".to_string());
        }
        if let Some(p) = reached
            .iter()
            .find(|&&p| dc_side(start, exit, p) == Some(!far))
        {
            return Some(format!("committed {action:?} but reached {p:?}"));
        }
    }
    None
}

/// Central differences of `f` with respect to each coordinate of `w`.
pub fn numeric_grad(w: &[f64], f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let h = 1e-6;
    let mut w = w.to_vec();
    (0..w.len())
        .map(|k| {
            let orig = w[k];
            w[k] = orig + h;
            let up = f(&w);
            w[k] = orig - h;
            let down = f(&w);
            w[k] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Largest relative error between two gradients. Entries whose magnitude
/// is below 1e-6 are compared absolutely, since central differences cannot
/// resolve them relatively.
pub fn max_rel_err(analytic: &[f64], numeric: &[f64]) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).abs() / a.abs().max(n.abs()).max(1e-6))
        .fold(0.0, f64::max)
}
