//! Game description language.
//!
//! A `.dgdl` document declares sprite classes, collision rules, termination
//! rules and the character mapping used by `.lvl` level maps. The grammar is
//! documented in `docs/dgdl.md`.

mod error;
mod level;
mod parser;
mod pretty;

use std::collections::BTreeMap;
use std::fmt;

pub use error::ParseError;
pub use level::{parse_level, LevelMap};
pub use parser::parse_game;

/// Sprite roles understood by the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Avatar,
    Wall,
    Immovable,
    Resource,
    Growable,
    Spawner,
    TimedTrader,
    Exit,
}

impl Role {
    pub const ALL: [Role; 8] = [
        Role::Avatar,
        Role::Wall,
        Role::Immovable,
        Role::Resource,
        Role::Growable,
        Role::Spawner,
        Role::TimedTrader,
        Role::Exit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Avatar => "Avatar",
            Role::Wall => "Wall",
            Role::Immovable => "Immovable",
            Role::Resource => "Resource",
            Role::Growable => "Growable",
            Role::Spawner => "Spawner",
            Role::TimedTrader => "TimedTrader",
            Role::Exit => "Exit",
        }
    }

    pub fn from_name(name: &str) -> Option<Role> {
        Role::ALL.into_iter().find(|r| r.as_str() == name)
    }

    /// Parameter keys a class of this role must declare, no more and no less.
    pub fn required_params(self) -> &'static [&'static str] {
        match self {
            Role::Resource => &["value", "limit"],
            Role::Growable => &["period", "step", "cap"],
            Role::Spawner => &["drop_period"],
            Role::TimedTrader => &["cost", "payout", "delay_ticks"],
            Role::Avatar | Role::Wall | Role::Immovable | Role::Exit => &[],
        }
    }

    /// Keys that must be strictly positive.
    fn positive_params(self) -> &'static [&'static str] {
        match self {
            Role::Resource => &["value", "limit"],
            Role::Growable => &["period", "step", "cap"],
            Role::Spawner => &["drop_period"],
            Role::TimedTrader => &["cost", "payout", "delay_ticks"],
            _ => &[],
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpriteClass {
    pub name: String,
    pub role: Role,
    pub params: BTreeMap<String, i64>,
    /// Class dropped by a `Spawner`; `None` for every other role.
    pub produces: Option<String>,
}

impl SpriteClass {
    /// Numeric parameter lookup. Validation guarantees required keys exist.
    pub fn param(&self, key: &str) -> i64 {
        self.params.get(key).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Effect {
    CollectScore,
    KillActor,
    KillReactor,
    BlockMove,
    FillResource,
    LoseGame,
    InvestTrigger,
    ForcedConsume,
}

impl Effect {
    pub const ALL: [Effect; 8] = [
        Effect::CollectScore,
        Effect::KillActor,
        Effect::KillReactor,
        Effect::BlockMove,
        Effect::FillResource,
        Effect::LoseGame,
        Effect::InvestTrigger,
        Effect::ForcedConsume,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Effect::CollectScore => "CollectScore",
            Effect::KillActor => "KillActor",
            Effect::KillReactor => "KillReactor",
            Effect::BlockMove => "BlockMove",
            Effect::FillResource => "FillResource",
            Effect::LoseGame => "LoseGame",
            Effect::InvestTrigger => "InvestTrigger",
            Effect::ForcedConsume => "ForcedConsume",
        }
    }

    pub fn from_name(name: &str) -> Option<Effect> {
        Effect::ALL.into_iter().find(|e| e.as_str() == name)
    }
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn as_str(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
        }
    }

    pub fn eval(self, lhs: i64, rhs: i64) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
        }
    }
}

/// Predicate over one avatar gauge, e.g. `mint < 9`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Guard {
    pub resource: String,
    pub op: CmpOp,
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionRule {
    pub actor: String,
    pub reactor: String,
    pub effect: Effect,
    pub score_delta: i64,
    pub guard: Option<Guard>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Win,
    Loss,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Win => "win",
            Outcome::Loss => "lose",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TerminationRule {
    /// Fires when the tick counter reaches `time_limit`.
    Timeout { outcome: Outcome },
    /// Fires when the avatar shares a cell with a live sprite of `class`.
    Touch { class: String, outcome: Outcome },
    /// Fires when the number of live sprites of `class` equals `count`.
    Count {
        class: String,
        count: u32,
        outcome: Outcome,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSpec {
    pub name: String,
    pub sprite_classes: Vec<SpriteClass>,
    pub interactions: Vec<InteractionRule>,
    pub terminations: Vec<TerminationRule>,
    pub level_mapping: BTreeMap<char, Vec<String>>,
    pub time_limit: u32,
}

impl GameSpec {
    pub fn class(&self, name: &str) -> Option<&SpriteClass> {
        self.sprite_classes.iter().find(|c| c.name == name)
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.sprite_classes.iter().position(|c| c.name == name)
    }

    pub fn avatar_class(&self) -> &SpriteClass {
        self.sprite_classes
            .iter()
            .find(|c| c.role == Role::Avatar)
            .expect("validated spec has an avatar")
    }

    /// Characters whose mapping places the avatar.
    pub fn avatar_chars(&self) -> impl Iterator<Item = char> + '_ {
        let avatar = self.avatar_class().name.as_str();
        self.level_mapping
            .iter()
            .filter(move |(_, names)| names.iter().any(|n| n == avatar))
            .map(|(c, _)| *c)
    }
}

/// Maximum number of sprite classes per game; occupancy is stored as a bitmask.
pub const MAX_CLASSES: usize = 32;
