//! Deterministic tick-based simulation of a parsed game and level.
//!
//! [`GameState`] is a plain value: cloning it yields an independent forward
//! model that agents may advance freely. All randomness is drawn from a
//! [`StreamRng`] stored inside the state, so `(state, action)` fully
//! determines the successor.

mod codec;
mod game;
mod observe;
mod rng;
mod state;

use std::fmt;

pub use codec::{DecodeError, STATE_FORMAT_VERSION};
pub use game::{ClassInfo, CompiledGame};
pub use observe::Observation;
pub use rng::StreamRng;
pub use state::{EventKind, GameState, ScheduledEvent, Sprite, SpriteData};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Up,
    Down,
    Left,
    Right,
    Nil,
}

impl Action {
    /// Fixed order used for tie-breaking everywhere.
    pub const ALL: [Action; 5] = [
        Action::Up,
        Action::Down,
        Action::Left,
        Action::Right,
        Action::Nil,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Action> {
        Action::ALL.get(i).copied()
    }

    pub fn delta(self) -> (i32, i32) {
        match self {
            Action::Up => (0, -1),
            Action::Down => (0, 1),
            Action::Left => (-1, 0),
            Action::Right => (1, 0),
            Action::Nil => (0, 0),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Action::Up => 'U',
            Action::Down => 'D',
            Action::Left => 'L',
            Action::Right => 'R',
            Action::Nil => 'N',
        }
    }

    pub fn from_char(c: char) -> Option<Action> {
        Action::ALL.into_iter().find(|a| a.as_char() == c)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Ongoing,
    Win,
    Loss,
}

impl Status {
    pub fn is_terminal(self) -> bool {
        self != Status::Ongoing
    }

    /// Ordering used by planners: loss < ongoing < win.
    pub fn rank(self) -> u8 {
        match self {
            Status::Loss => 0,
            Status::Ongoing => 1,
            Status::Win => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ongoing => "ongoing",
            Status::Win => "win",
            Status::Loss => "loss",
        }
    }

    pub fn from_name(s: &str) -> Option<Status> {
        match s {
            "ongoing" => Some(Status::Ongoing),
            "win" => Some(Status::Win),
            "loss" => Some(Status::Loss),
            _ => None,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pos {
    pub x: u16,
    pub y: u16,
}

impl Pos {
    pub fn new(x: usize, y: usize) -> Pos {
        Pos {
            x: x as u16,
            y: y as u16,
        }
    }

    pub fn manhattan(self, other: Pos) -> u32 {
        u32::from(self.x.abs_diff(other.x)) + u32::from(self.y.abs_diff(other.y))
    }
}

/// Something that happened during one tick, in firing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventRecord {
    Moved { to: Pos },
    Blocked,
    Collected { class: u8, delta: i64 },
    Filled { class: u8, gauge: i64 },
    Killed { class: u8 },
    AvatarKilled { by: u8 },
    LostGame { by: u8 },
    Invested { class: u8, cost: i64, due_tick: u32 },
    TraderReturned { class: u8, payout: i64 },
    Dropped { class: u8, at: Pos },
    ForcedConsume { class: u8 },
    Regrew { class: u8, at: Pos },
    Terminated { status: Status },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutcome {
    /// Score delta of this tick.
    pub reward: i64,
    pub status: Status,
    pub events_fired: Vec<EventRecord>,
}

/// Minimal forward-model contract the planners search over.
pub trait ForwardModel: Clone {
    /// Applies one action and returns the score delta.
    fn step(&mut self, action: Action) -> i64;
    fn score(&self) -> i64;
    fn status(&self) -> Status;
    /// Copy for look-ahead with the stochastic stream reseeded.
    fn fork(&self, planning_seed: u64) -> Self;
}

impl ForwardModel for GameState {
    fn step(&mut self, action: Action) -> i64 {
        self.advance(action).reward
    }

    fn score(&self) -> i64 {
        self.score
    }

    fn status(&self) -> Status {
        self.status
    }

    fn fork(&self, planning_seed: u64) -> Self {
        self.clone_for_planning(planning_seed)
    }
}

impl AsRef<GameState> for GameState {
    fn as_ref(&self) -> &GameState {
        self
    }
}
