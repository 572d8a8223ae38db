//! Canonical, versioned byte encoding of [`GameState`].
//!
//! Layout (little-endian): magic `DGST`, version `u16`, game fingerprint
//! (32 bytes), then the dynamic state fields in declaration order. The
//! encoding is a pure function of the state, so equal states produce equal
//! bytes.

use std::sync::Arc;

use thiserror::Error;

use super::state::{EventKind, GameState, ScheduledEvent, Sprite, SpriteData};
use super::{CompiledGame, Pos, Status, StreamRng};

pub const STATE_FORMAT_VERSION: u16 = 1;
const MAGIC: &[u8; 4] = b"DGST";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("not a state encoding (bad magic)")]
    BadMagic,
    #[error("unsupported state format version {0}")]
    Version(u16),
    #[error("state was encoded for a different game")]
    GameMismatch,
    #[error("truncated state encoding")]
    Truncated,
    #[error("invalid value in state encoding: {0}")]
    Invalid(&'static str),
    #[error("{0} trailing bytes after state encoding")]
    Trailing(usize),
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u16(&mut self, v: u16) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn i64(&mut self, v: i64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn pos(&mut self, p: Pos) {
        self.u16(p.x);
        self.u16(p.y);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        let end = self.at.checked_add(n).ok_or(DecodeError::Truncated)?;
        let s = self.buf.get(self.at..end).ok_or(DecodeError::Truncated)?;
        self.at = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8, DecodeError> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16, DecodeError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u32(&mut self) -> Result<u32, DecodeError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64, DecodeError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn i64(&mut self) -> Result<i64, DecodeError> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn pos(&mut self, game: &CompiledGame) -> Result<Pos, DecodeError> {
        let p = Pos {
            x: self.u16()?,
            y: self.u16()?,
        };
        if (p.x as usize) < game.width && (p.y as usize) < game.height {
            Ok(p)
        } else {
            Err(DecodeError::Invalid("position outside level"))
        }
    }
    fn len(&mut self, max: usize) -> Result<usize, DecodeError> {
        let n = self.u32()? as usize;
        if n > max {
            return Err(DecodeError::Invalid("length out of range"));
        }
        Ok(n)
    }
}

fn status_code(s: Status) -> u8 {
    match s {
        Status::Ongoing => 0,
        Status::Win => 1,
        Status::Loss => 2,
    }
}

impl GameState {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer(Vec::with_capacity(
            64 + self.grid.len() * 4 + self.sprites.len() * 16,
        ));
        w.0.extend_from_slice(MAGIC);
        w.u16(STATE_FORMAT_VERSION);
        w.0.extend_from_slice(&self.game.fingerprint());
        w.u32(self.tick);
        w.i64(self.score);
        w.u8(status_code(self.status));
        w.pos(self.avatar_pos);
        w.u8(u8::from(self.avatar_alive));
        w.u32(self.gauges.len() as u32);
        for g in &self.gauges {
            w.i64(*g);
        }
        w.u32(self.grid.len() as u32);
        for m in &self.grid {
            w.u32(*m);
        }
        w.u32(self.sprites.len() as u32);
        for s in &self.sprites {
            w.u8(s.class);
            w.pos(s.pos);
            w.u8(u8::from(s.alive));
            match s.data {
                SpriteData::Plain => w.u8(0),
                SpriteData::Growable { born, value } => {
                    w.u8(1);
                    w.u32(born);
                    w.i64(value);
                }
                SpriteData::Spawner { timer } => {
                    w.u8(2);
                    w.u32(timer);
                }
            }
        }
        w.u32(self.regrow.len() as u32);
        for r in &self.regrow {
            w.u32(*r);
        }
        w.u32(self.pending.len() as u32);
        for e in &self.pending {
            w.u32(e.due_tick);
            w.u64(e.seq);
            match e.kind {
                EventKind::TraderReturn { sprite, payout } => {
                    w.u8(0);
                    w.u32(sprite);
                    w.i64(payout);
                }
                EventKind::SpawnDrop { class, at } => {
                    w.u8(1);
                    w.u8(class);
                    w.pos(at);
                }
            }
        }
        w.u64(self.next_seq);
        let (key, counter) = self.rng.parts();
        w.u64(key);
        w.u64(counter);
        w.0
    }

    /// Decodes bytes produced by [`GameState::to_bytes`] for the same game.
    pub fn from_bytes(bytes: &[u8], game: &Arc<CompiledGame>) -> Result<GameState, DecodeError> {
        let mut r = Reader { buf: bytes, at: 0 };
        if r.take(4)? != MAGIC {
            return Err(DecodeError::BadMagic);
        }
        let version = r.u16()?;
        if version != STATE_FORMAT_VERSION {
            return Err(DecodeError::Version(version));
        }
        if r.take(32)? != game.fingerprint() {
            return Err(DecodeError::GameMismatch);
        }
        let n_classes = game.num_classes();
        let class = |c: u8| {
            if (c as usize) < n_classes {
                Ok(c)
            } else {
                Err(DecodeError::Invalid("class index"))
            }
        };
        let tick = r.u32()?;
        let score = r.i64()?;
        let status = match r.u8()? {
            0 => Status::Ongoing,
            1 => Status::Win,
            2 => Status::Loss,
            _ => return Err(DecodeError::Invalid("status")),
        };
        let avatar_pos = r.pos(game)?;
        let avatar_alive = r.u8()? != 0;
        let n = r.len(game.gauge_classes.len())?;
        if n != game.gauge_classes.len() {
            return Err(DecodeError::Invalid("gauge count"));
        }
        let gauges = (0..n).map(|_| r.i64()).collect::<Result<Vec<_>, _>>()?;
        let n = r.len(game.width * game.height)?;
        if n != game.width * game.height {
            return Err(DecodeError::Invalid("grid size"));
        }
        let grid = (0..n).map(|_| r.u32()).collect::<Result<Vec<_>, _>>()?;
        let n = r.len(bytes.len())?;
        let mut sprites = Vec::with_capacity(n);
        for _ in 0..n {
            let c = class(r.u8()?)?;
            let pos = r.pos(game)?;
            let alive = r.u8()? != 0;
            let data = match r.u8()? {
                0 => SpriteData::Plain,
                1 => SpriteData::Growable {
                    born: r.u32()?,
                    value: r.i64()?,
                },
                2 => SpriteData::Spawner { timer: r.u32()? },
                _ => return Err(DecodeError::Invalid("sprite data tag")),
            };
            sprites.push(Sprite {
                class: c,
                pos,
                alive,
                data,
            });
        }
        let n = r.len(sprites.len())?;
        let mut regrow = Vec::with_capacity(n);
        for _ in 0..n {
            let idx = r.u32()?;
            if idx as usize >= sprites.len() {
                return Err(DecodeError::Invalid("regrow sprite index"));
            }
            regrow.push(idx);
        }
        let n = r.len(bytes.len())?;
        let mut pending = Vec::with_capacity(n);
        for _ in 0..n {
            let due_tick = r.u32()?;
            let seq = r.u64()?;
            let kind = match r.u8()? {
                0 => {
                    let sprite = r.u32()?;
                    if sprite as usize >= sprites.len() {
                        return Err(DecodeError::Invalid("trader sprite index"));
                    }
                    EventKind::TraderReturn {
                        sprite,
                        payout: r.i64()?,
                    }
                }
                1 => EventKind::SpawnDrop {
                    class: class(r.u8()?)?,
                    at: r.pos(game)?,
                },
                _ => return Err(DecodeError::Invalid("event tag")),
            };
            pending.push(ScheduledEvent {
                due_tick,
                seq,
                kind,
            });
        }
        if pending
            .windows(2)
            .any(|w| (w[0].due_tick, w[0].seq) > (w[1].due_tick, w[1].seq))
        {
            return Err(DecodeError::Invalid("event queue order"));
        }
        let next_seq = r.u64()?;
        let key = r.u64()?;
        let counter = r.u64()?;
        if r.at != bytes.len() {
            return Err(DecodeError::Trailing(bytes.len() - r.at));
        }
        Ok(GameState {
            game: Arc::clone(game),
            tick,
            grid,
            sprites,
            avatar_pos,
            avatar_alive,
            gauges,
            score,
            status,
            pending,
            next_seq,
            regrow,
            rng: StreamRng::from_parts(key, counter),
        })
    }
}
