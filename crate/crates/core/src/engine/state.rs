use std::sync::Arc;

use super::game::{CompiledRule, CompiledTermination};
use super::{Action, CompiledGame, EventRecord, Pos, Status, StepOutcome, StreamRng};
use crate::gdl::{Effect, Outcome, Role};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpriteData {
    Plain,
    /// `born` is the tick growth started from value 0.
    Growable {
        born: u32,
        value: i64,
    },
    Spawner {
        timer: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sprite {
    pub class: u8,
    pub pos: Pos,
    pub alive: bool,
    pub data: SpriteData,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// Revives trader sprite `sprite` and pays `payout`.
    TraderReturn {
        sprite: u32,
        payout: i64,
    },
    SpawnDrop {
        class: u8,
        at: Pos,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduledEvent {
    pub due_tick: u32,
    pub seq: u64,
    pub kind: EventKind,
}

/// Complete simulation state. Static walls live in the shared
/// [`CompiledGame`]; everything that changes lives here.
#[derive(Debug, Clone)]
pub struct GameState {
    pub(crate) game: Arc<CompiledGame>,
    pub(crate) tick: u32,
    /// Class bitmask per cell, row-major.
    pub(crate) grid: Vec<u32>,
    pub(crate) sprites: Vec<Sprite>,
    pub(crate) avatar_pos: Pos,
    pub(crate) avatar_alive: bool,
    pub(crate) gauges: Vec<i64>,
    pub(crate) score: i64,
    pub(crate) status: Status,
    /// Sorted by `(due_tick, seq)`.
    pub(crate) pending: Vec<ScheduledEvent>,
    pub(crate) next_seq: u64,
    /// Harvested growables waiting for the avatar to leave their cell.
    pub(crate) regrow: Vec<u32>,
    pub(crate) rng: StreamRng,
}

impl PartialEq for GameState {
    fn eq(&self, other: &Self) -> bool {
        self.game.fingerprint() == other.game.fingerprint() && self.to_bytes() == other.to_bytes()
    }
}

impl GameState {
    /// Fresh episode: tick 0, score 0, gauges empty.
    pub fn init(game: &Arc<CompiledGame>, seed: u64) -> GameState {
        let sprites = game
            .initial_sprites
            .iter()
            .map(|&(class, pos)| Sprite {
                class,
                pos,
                alive: true,
                data: match game.classes[class as usize].role {
                    Role::Growable => SpriteData::Growable { born: 0, value: 0 },
                    Role::Spawner => SpriteData::Spawner { timer: 0 },
                    _ => SpriteData::Plain,
                },
            })
            .collect();
        GameState {
            game: Arc::clone(game),
            tick: 0,
            grid: game.initial_grid.clone(),
            sprites,
            avatar_pos: game.avatar_start,
            avatar_alive: true,
            gauges: vec![0; game.gauge_classes.len()],
            score: 0,
            status: Status::Ongoing,
            pending: Vec::new(),
            next_seq: 0,
            regrow: Vec::new(),
            rng: StreamRng::new(seed),
        }
    }

    /// Identical copy whose random stream is reseeded from `planning_seed`.
    pub fn clone_for_planning(&self, planning_seed: u64) -> GameState {
        let mut copy = self.clone();
        copy.rng = StreamRng::new(planning_seed);
        copy
    }

    pub fn game(&self) -> &Arc<CompiledGame> {
        &self.game
    }

    pub fn tick(&self) -> u32 {
        self.tick
    }

    pub fn score(&self) -> i64 {
        self.score
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn avatar_pos(&self) -> Pos {
        self.avatar_pos
    }

    pub fn avatar_alive(&self) -> bool {
        self.avatar_alive
    }

    pub fn gauges(&self) -> &[i64] {
        &self.gauges
    }

    pub fn gauge(&self, class: u8) -> Option<i64> {
        self.game.classes[class as usize]
            .gauge
            .map(|slot| self.gauges[slot])
    }

    pub fn sprites(&self) -> &[Sprite] {
        &self.sprites
    }

    pub fn pending_events(&self) -> &[ScheduledEvent] {
        &self.pending
    }

    pub fn rng(&self) -> &StreamRng {
        &self.rng
    }

    pub fn cell_mask(&self, pos: Pos) -> u32 {
        self.grid[self.game.cell(pos)]
    }

    pub fn has_class(&self, pos: Pos, class: u8) -> bool {
        self.cell_mask(pos) & (1 << class) != 0
    }

    pub fn sprite_at(&self, pos: Pos, class: u8) -> Option<usize> {
        self.sprites
            .iter()
            .position(|s| s.alive && s.class == class && s.pos == pos)
    }

    pub fn alive_of_class(&self, class: u8) -> impl Iterator<Item = (usize, &Sprite)> + '_ {
        self.sprites
            .iter()
            .enumerate()
            .filter(move |(_, s)| s.alive && s.class == class)
    }

    /// First rule for the avatar colliding with `class` whose guards pass.
    pub(crate) fn matching_rule(&self, class: u8) -> Option<&CompiledRule> {
        let info = &self.game.classes[class as usize];
        self.game.avatar_rules[class as usize].iter().find(|rule| {
            if let Some(g) = &rule.guard {
                if !g.op.eval(self.gauges[g.gauge], g.value) {
                    return false;
                }
            }
            match rule.effect {
                Effect::FillResource => {
                    let slot = info.gauge.expect("resource");
                    self.gauges[slot] + info.value <= info.limit
                }
                Effect::InvestTrigger => self.score >= info.cost,
                _ => true,
            }
        })
    }

    /// Effect the avatar would trigger on touching `class` right now.
    pub fn effect_on_touch(&self, class: u8) -> Option<(Effect, i64)> {
        self.matching_rule(class).map(|r| (r.effect, r.score_delta))
    }

    /// Whether the avatar may enter `pos` in the current state.
    pub fn avatar_can_enter(&self, pos: Pos) -> bool {
        let mut mask = self.cell_mask(pos) & !(1 << self.game.avatar_class);
        while mask != 0 {
            let class = mask.trailing_zeros() as u8;
            mask &= mask - 1;
            if matches!(self.matching_rule(class), Some(r) if r.effect == Effect::BlockMove) {
                return false;
            }
        }
        true
    }

    /// Current value of a Growable sprite, if `sprite` is one.
    pub fn growable_value(&self, sprite: usize) -> Option<i64> {
        match self.sprites[sprite].data {
            SpriteData::Growable { value, .. } => Some(value),
            _ => None,
        }
    }

    /// Functional form of [`GameState::advance`].
    pub fn advanced(&self, action: Action) -> (GameState, StepOutcome) {
        let mut next = self.clone();
        let outcome = next.advance(action);
        (next, outcome)
    }

    /// Runs one tick: avatar move, avatar collisions, NPC updates, due
    /// events, growth, termination checks, tick increment. Once the status
    /// leaves `Ongoing` the remaining phases are skipped; calling `advance`
    /// on a finished state changes nothing and returns reward 0.
    pub fn advance(&mut self, action: Action) -> StepOutcome {
        let mut events = Vec::new();
        if self.status.is_terminal() {
            return StepOutcome {
                reward: 0,
                status: self.status,
                events_fired: events,
            };
        }
        let before = self.score;

        self.move_avatar(action, &mut events);
        if !self.status.is_terminal() {
            self.update_spawners();
            self.fire_due_events(&mut events);
        }
        if !self.status.is_terminal() {
            self.update_growables(&mut events);
            self.check_terminations(&mut events);
        }
        self.tick += 1;

        StepOutcome {
            reward: self.score - before,
            status: self.status,
            events_fired: events,
        }
    }

    fn move_avatar(&mut self, action: Action, events: &mut Vec<EventRecord>) {
        if action == Action::Nil || !self.avatar_alive {
            return;
        }
        let target = match self.game.offset(self.avatar_pos, action.delta()) {
            Some(t) if self.avatar_can_enter(t) => t,
            _ => {
                events.push(EventRecord::Blocked);
                return;
            }
        };
        let avatar_bit = 1 << self.game.avatar_class;
        let from = self.game.cell(self.avatar_pos);
        let to = self.game.cell(target);
        self.grid[from] &= !avatar_bit;
        self.grid[to] |= avatar_bit;
        self.avatar_pos = target;
        events.push(EventRecord::Moved { to: target });

        let mut mask = self.grid[to] & !avatar_bit;
        while mask != 0 && !self.status.is_terminal() {
            let class = mask.trailing_zeros() as u8;
            mask &= mask - 1;
            if let Some(idx) = self.sprite_at(target, class) {
                self.collide(idx, events);
            } else {
                // static class: only score/lose effects make sense
                self.collide_static(class, events);
            }
        }
    }

    fn kill_sprite(&mut self, idx: usize) {
        let s = &mut self.sprites[idx];
        s.alive = false;
        let cell = self.game.cell(s.pos);
        self.grid[cell] &= !(1 << s.class);
    }

    fn schedule(&mut self, due_tick: u32, kind: EventKind) {
        let ev = ScheduledEvent {
            due_tick,
            seq: self.next_seq,
            kind,
        };
        self.next_seq += 1;
        let at = self
            .pending
            .partition_point(|e| (e.due_tick, e.seq) <= (ev.due_tick, ev.seq));
        self.pending.insert(at, ev);
    }

    fn lose(&mut self, events: &mut Vec<EventRecord>) {
        self.status = Status::Loss;
        events.push(EventRecord::Terminated {
            status: Status::Loss,
        });
    }

    /// Applies the first matching avatar rule for sprite `idx`.
    fn collide(&mut self, idx: usize, events: &mut Vec<EventRecord>) {
        let class = self.sprites[idx].class;
        let Some(rule) = self.matching_rule(class).cloned() else {
            return;
        };
        let info = &self.game.classes[class as usize];
        match rule.effect {
            Effect::CollectScore => {
                let grown = match self.sprites[idx].data {
                    SpriteData::Growable { value, .. } => {
                        self.regrow.push(idx as u32);
                        value
                    }
                    _ => 0,
                };
                let delta = grown + rule.score_delta;
                self.score += delta;
                self.kill_sprite(idx);
                events.push(EventRecord::Collected { class, delta });
            }
            Effect::FillResource => {
                let slot = info.gauge.expect("resource");
                self.gauges[slot] += info.value;
                self.score += rule.score_delta;
                let gauge = self.gauges[slot];
                self.kill_sprite(idx);
                events.push(EventRecord::Filled { class, gauge });
            }
            Effect::KillReactor => {
                self.score += rule.score_delta;
                self.kill_sprite(idx);
                events.push(EventRecord::Killed { class });
            }
            Effect::InvestTrigger => {
                let (cost, payout, delay) = (info.cost, info.payout, info.delay);
                self.score += rule.score_delta - cost;
                self.kill_sprite(idx);
                let due_tick = self.tick + delay;
                self.schedule(
                    due_tick,
                    EventKind::TraderReturn {
                        sprite: idx as u32,
                        payout,
                    },
                );
                events.push(EventRecord::Invested {
                    class,
                    cost,
                    due_tick,
                });
            }
            Effect::KillActor | Effect::LoseGame => {
                self.score += rule.score_delta;
                if rule.effect == Effect::KillActor {
                    self.avatar_alive = false;
                    let cell = self.game.cell(self.avatar_pos);
                    self.grid[cell] &= !(1 << self.game.avatar_class);
                    events.push(EventRecord::AvatarKilled { by: class });
                } else {
                    events.push(EventRecord::LostGame { by: class });
                }
                self.lose(events);
            }
            Effect::BlockMove | Effect::ForcedConsume => {}
        }
    }

    fn collide_static(&mut self, class: u8, events: &mut Vec<EventRecord>) {
        let Some(rule) = self.matching_rule(class).cloned() else {
            return;
        };
        match rule.effect {
            Effect::KillActor | Effect::LoseGame => {
                self.score += rule.score_delta;
                events.push(EventRecord::LostGame { by: class });
                self.lose(events);
            }
            _ => {}
        }
    }

    fn update_spawners(&mut self) {
        for idx in 0..self.sprites.len() {
            let sprite = self.sprites[idx];
            let SpriteData::Spawner { timer } = sprite.data else {
                continue;
            };
            if !sprite.alive {
                continue;
            }
            let info = &self.game.classes[sprite.class as usize];
            let (produces, period) = (info.produces, info.drop_period);
            let action = Action::ALL[self.rng.below(5) as usize];
            let mut pos = sprite.pos;
            if let Some(t) = self.game.offset(pos, action.delta()) {
                if !self.game.is_static_wall(self.grid[self.game.cell(t)]) {
                    let bit = 1 << sprite.class;
                    let from = self.game.cell(pos);
                    self.grid[from] &= !bit;
                    // another spawner of the same class may still occupy `from`
                    if self.sprites.iter().enumerate().any(|(j, s)| {
                        j != idx && s.alive && s.class == sprite.class && s.pos == pos
                    }) {
                        self.grid[from] |= bit;
                    }
                    pos = t;
                    self.grid[self.game.cell(t)] |= bit;
                }
            }
            let timer = timer + 1;
            self.sprites[idx].pos = pos;
            self.sprites[idx].data = SpriteData::Spawner { timer };
            if let Some(class) = produces {
                if timer % period == 0 {
                    self.schedule(self.tick + 1, EventKind::SpawnDrop { class, at: pos });
                }
            }
        }
    }

    fn fire_due_events(&mut self, events: &mut Vec<EventRecord>) {
        let due = self.pending.partition_point(|e| e.due_tick <= self.tick);
        let fired: Vec<ScheduledEvent> = self.pending.drain(..due).collect();
        for ev in fired {
            if self.status.is_terminal() {
                break;
            }
            match ev.kind {
                EventKind::TraderReturn { sprite, payout } => {
                    let idx = sprite as usize;
                    let s = self.sprites[idx];
                    self.score += payout;
                    events.push(EventRecord::TraderReturned {
                        class: s.class,
                        payout,
                    });
                    let cell = self.game.cell(s.pos);
                    if self.grid[cell] & (1 << s.class) == 0 {
                        self.sprites[idx].alive = true;
                        self.grid[cell] |= 1 << s.class;
                    }
                }
                EventKind::SpawnDrop { class, at } => {
                    let cell = self.game.cell(at);
                    if self.grid[cell] & (1 << class) != 0 {
                        continue;
                    }
                    let data = match self.game.classes[class as usize].role {
                        Role::Growable => SpriteData::Growable {
                            born: self.tick + 1,
                            value: 0,
                        },
                        Role::Spawner => SpriteData::Spawner { timer: 0 },
                        _ => SpriteData::Plain,
                    };
                    self.sprites.push(Sprite {
                        class,
                        pos: at,
                        alive: true,
                        data,
                    });
                    self.grid[cell] |= 1 << class;
                    events.push(EventRecord::Dropped { class, at });
                    if self.avatar_alive
                        && self.avatar_pos == at
                        && self.game.forced_consume[class as usize]
                    {
                        events.push(EventRecord::ForcedConsume { class });
                        let idx = self.sprites.len() - 1;
                        self.collide(idx, events);
                    }
                }
            }
        }
    }

    fn update_growables(&mut self, events: &mut Vec<EventRecord>) {
        let now = self.tick + 1;
        let avatar = self.avatar_pos;
        let mut waiting = std::mem::take(&mut self.regrow);
        waiting.retain(|&idx| {
            let s = &mut self.sprites[idx as usize];
            if s.pos == avatar && self.avatar_alive {
                return true;
            }
            let cell = s.pos.y as usize * self.game.width + s.pos.x as usize;
            if self.grid[cell] & (1 << s.class) != 0 {
                return false;
            }
            s.alive = true;
            s.data = SpriteData::Growable {
                born: now,
                value: 0,
            };
            self.grid[cell] |= 1 << s.class;
            events.push(EventRecord::Regrew {
                class: s.class,
                at: s.pos,
            });
            false
        });
        self.regrow = waiting;

        for s in self.sprites.iter_mut().filter(|s| s.alive) {
            if let SpriteData::Growable { born, value } = &mut s.data {
                let info = &self.game.classes[s.class as usize];
                let stages = i64::from((now - *born) / info.period);
                *value = (stages * info.step).min(info.cap);
            }
        }
    }

    fn check_terminations(&mut self, events: &mut Vec<EventRecord>) {
        let now = self.tick + 1;
        let mut outcome = None;
        for term in &self.game.terminations {
            let fired = match *term {
                CompiledTermination::Timeout(o) => (now >= self.game.time_limit).then_some(o),
                CompiledTermination::Touch(class, o) => {
                    (self.avatar_alive && self.has_class(self.avatar_pos, class)).then_some(o)
                }
                CompiledTermination::Count(class, n, o) => {
                    let count = if class == self.game.avatar_class {
                        u32::from(self.avatar_alive)
                    } else if self.game.static_mask & (1 << class) != 0 {
                        self.grid.iter().filter(|m| *m & (1 << class) != 0).count() as u32
                    } else {
                        self.alive_of_class(class).count() as u32
                    };
                    (count == n).then_some(o)
                }
            };
            if fired.is_some() {
                outcome = fired;
                break;
            }
        }
        // hard stop even when the game declares no timeout rule
        if outcome.is_none() && now >= self.game.time_limit {
            outcome = Some(Outcome::Loss);
        }
        if let Some(o) = outcome {
            self.status = match o {
                Outcome::Win => Status::Win,
                Outcome::Loss => Status::Loss,
            };
            events.push(EventRecord::Terminated {
                status: self.status,
            });
        }
    }
}
