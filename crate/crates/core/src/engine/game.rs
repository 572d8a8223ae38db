use std::sync::Arc;

use sha2::{Digest, Sha256};

use super::Pos;
use crate::gdl::{CmpOp, Effect, GameSpec, LevelMap, Outcome, Role, TerminationRule};

/// Per-class data resolved to indices.
#[derive(Debug, Clone)]
pub struct ClassInfo {
    pub name: String,
    pub role: Role,
    /// Gauge slot for Resource classes.
    pub gauge: Option<usize>,
    pub produces: Option<u8>,
    // Role parameters, zero when the role does not use them.
    pub value: i64,
    pub limit: i64,
    pub period: u32,
    pub step: i64,
    pub cap: i64,
    pub drop_period: u32,
    pub cost: i64,
    pub payout: i64,
    pub delay: u32,
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledGuard {
    pub gauge: usize,
    pub op: CmpOp,
    pub value: i64,
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledRule {
    pub effect: Effect,
    pub score_delta: i64,
    pub guard: Option<CompiledGuard>,
}

#[derive(Debug, Clone)]
pub(crate) enum CompiledTermination {
    Timeout(Outcome),
    Touch(u8, Outcome),
    Count(u8, u32, Outcome),
}

/// Immutable game definition shared by every state of one game/level pair.
#[derive(Debug)]
pub struct CompiledGame {
    pub spec: GameSpec,
    pub level: LevelMap,
    pub width: usize,
    pub height: usize,
    pub classes: Vec<ClassInfo>,
    pub avatar_class: u8,
    /// Resource classes in gauge-slot order.
    pub gauge_classes: Vec<u8>,
    pub time_limit: u32,
    pub(crate) avatar_rules: Vec<Vec<CompiledRule>>,
    pub(crate) forced_consume: Vec<bool>,
    pub(crate) terminations: Vec<CompiledTermination>,
    pub(crate) static_mask: u32,
    pub(crate) initial_grid: Vec<u32>,
    pub(crate) initial_sprites: Vec<(u8, Pos)>,
    pub(crate) avatar_start: Pos,
    fingerprint: [u8; 32],
}

impl CompiledGame {
    /// Resolves names to indices. `spec` and `level` must already be
    /// validated against each other by the `gdl` parsers.
    pub fn new(spec: GameSpec, level: LevelMap) -> Arc<CompiledGame> {
        let index = |name: &str| spec.class_index(name).expect("validated name") as u8;
        let mut gauge_classes = Vec::new();
        let classes: Vec<ClassInfo> = spec
            .sprite_classes
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let gauge = (c.role == Role::Resource).then(|| {
                    gauge_classes.push(i as u8);
                    gauge_classes.len() - 1
                });
                ClassInfo {
                    name: c.name.clone(),
                    role: c.role,
                    gauge,
                    produces: c.produces.as_deref().map(index),
                    value: c.param("value"),
                    limit: c.param("limit"),
                    period: c.param("period") as u32,
                    step: c.param("step"),
                    cap: c.param("cap"),
                    drop_period: c.param("drop_period") as u32,
                    cost: c.param("cost"),
                    payout: c.param("payout"),
                    delay: c.param("delay_ticks") as u32,
                }
            })
            .collect();
        let avatar_class = classes
            .iter()
            .position(|c| c.role == Role::Avatar)
            .expect("validated avatar") as u8;

        let mut avatar_rules = vec![Vec::new(); classes.len()];
        let mut forced_consume = vec![false; classes.len()];
        for rule in &spec.interactions {
            let actor = index(&rule.actor);
            let reactor = index(&rule.reactor);
            if rule.effect == Effect::ForcedConsume {
                forced_consume[actor as usize] = true;
                continue;
            }
            let guard = rule.guard.as_ref().map(|g| CompiledGuard {
                gauge: classes[index(&g.resource) as usize]
                    .gauge
                    .expect("guard on resource"),
                op: g.op,
                value: g.value,
            });
            avatar_rules[reactor as usize].push(CompiledRule {
                effect: rule.effect,
                score_delta: rule.score_delta,
                guard,
            });
        }

        let terminations = spec
            .terminations
            .iter()
            .map(|t| match t {
                TerminationRule::Timeout { outcome } => CompiledTermination::Timeout(*outcome),
                TerminationRule::Touch { class, outcome } => {
                    CompiledTermination::Touch(index(class), *outcome)
                }
                TerminationRule::Count {
                    class,
                    count,
                    outcome,
                } => CompiledTermination::Count(index(class), *count, *outcome),
            })
            .collect();

        let static_mask = classes
            .iter()
            .enumerate()
            .filter(|(_, c)| c.role == Role::Wall)
            .fold(0u32, |m, (i, _)| m | (1 << i));

        let mut initial_grid = vec![0u32; level.width * level.height];
        let mut initial_sprites = Vec::new();
        let mut avatar_start = Pos::new(0, 0);
        for (x, y, ch) in level.cells() {
            let Some(names) = spec.level_mapping.get(&ch) else {
                continue;
            };
            let pos = Pos::new(x, y);
            for name in names {
                let class = index(name);
                initial_grid[y * level.width + x] |= 1 << class;
                if class == avatar_class {
                    avatar_start = pos;
                } else if static_mask & (1 << class) == 0 {
                    initial_sprites.push((class, pos));
                }
            }
        }

        let mut hasher = Sha256::new();
        hasher.update(spec.to_string().as_bytes());
        hasher.update(b"\n--\n");
        for row in &level.rows {
            hasher.update(row.as_bytes());
            hasher.update(b"\n");
        }
        let fingerprint = hasher.finalize().into();

        Arc::new(CompiledGame {
            width: level.width,
            height: level.height,
            time_limit: spec.time_limit,
            spec,
            level,
            classes,
            avatar_class,
            gauge_classes,
            avatar_rules,
            forced_consume,
            terminations,
            static_mask,
            initial_grid,
            initial_sprites,
            avatar_start,
            fingerprint,
        })
    }

    /// Hash of the canonical spec text and level rows.
    pub fn fingerprint(&self) -> [u8; 32] {
        self.fingerprint
    }

    pub fn fingerprint_hex(&self) -> String {
        hex::encode(self.fingerprint)
    }

    pub fn class_index(&self, name: &str) -> Option<u8> {
        self.classes
            .iter()
            .position(|c| c.name == name)
            .map(|i| i as u8)
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn cell(&self, pos: Pos) -> usize {
        pos.y as usize * self.width + pos.x as usize
    }

    pub fn pos_of(&self, cell: usize) -> Pos {
        Pos::new(cell % self.width, cell / self.width)
    }

    /// Neighbour in direction `(dx, dy)`, or `None` at the level edge.
    pub fn offset(&self, pos: Pos, (dx, dy): (i32, i32)) -> Option<Pos> {
        let x = i32::from(pos.x) + dx;
        let y = i32::from(pos.y) + dy;
        (x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height)
            .then(|| Pos::new(x as usize, y as usize))
    }

    pub fn is_static_wall(&self, cell_mask: u32) -> bool {
        cell_mask & self.static_mask != 0
    }

    pub fn avatar_start(&self) -> Pos {
        self.avatar_start
    }

    /// Limit of each gauge, in gauge-slot order.
    pub fn gauge_limits(&self) -> Vec<i64> {
        self.gauge_classes
            .iter()
            .map(|&c| self.classes[c as usize].limit)
            .collect()
    }
}
