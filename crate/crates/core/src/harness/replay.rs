use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::engine::{Action, CompiledGame, GameState, Status};
use crate::games::{load_game, CatalogError, GameId};

pub const REPLAY_MAGIC: &str = "deceptive-games-replay";
pub const REPLAY_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("replay line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("replay version {0} is not supported")]
    UnsupportedVersion(u32),
    #[error("replay was recorded against asset {expected}, current asset is {found}")]
    VersionMismatch { expected: String, found: String },
    #[error("replay diverges at tick {tick}: {detail}")]
    Divergence { tick: u32, detail: String },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

/// One recorded tick: the action taken and what the engine reported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayStep {
    pub tick: u32,
    pub action: Action,
    pub reward: i64,
    pub status: Status,
    /// First eight bytes of the SHA-256 of the state after the tick.
    pub checksum: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    pub game: GameId,
    pub asset_hash: String,
    pub seed: u64,
    pub agent: String,
    pub steps: Vec<ReplayStep>,
    pub final_score: i64,
    pub final_status: Status,
}

pub fn state_checksum(state: &GameState) -> u64 {
    let digest = Sha256::digest(state.to_bytes());
    u64::from_be_bytes(digest[..8].try_into().expect("8 bytes"))
}

impl Replay {
    /// Line-oriented text: header lines, one line per tick, a final line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{REPLAY_MAGIC} {REPLAY_VERSION}");
        let _ = writeln!(out, "game {}", self.game);
        let _ = writeln!(out, "asset {}", self.asset_hash);
        let _ = writeln!(out, "seed {}", self.seed);
        let _ = writeln!(out, "agent {}", self.agent);
        let _ = writeln!(out, "steps {}", self.steps.len());
        for s in &self.steps {
            let _ = writeln!(
                out,
                "{} {} {} {} {:016x}",
                s.tick,
                s.action.as_char(),
                s.reward,
                s.status.as_str(),
                s.checksum
            );
        }
        let _ = writeln!(
            out,
            "final {} {}",
            self.final_score,
            self.final_status.as_str()
        );
        out
    }

    pub fn parse(text: &str) -> Result<Replay, ReplayError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| ReplayError::Malformed {
                line: 0,
                message: format!("unexpected end of file, expected {what}"),
            })
        };
        let bad = |line: usize, message: String| ReplayError::Malformed { line, message };

        let (ln, magic) = next("header")?;
        let version = magic
            .strip_prefix(REPLAY_MAGIC)
            .map(str::trim)
            .ok_or_else(|| bad(ln, "not a replay file".to_string()))?;
        let version: u32 = version
            .parse()
            .map_err(|_| bad(ln, format!("bad version `{version}`")))?;
        if version != REPLAY_VERSION {
            return Err(ReplayError::UnsupportedVersion(version));
        }

        let mut field = |key: &str| -> Result<(usize, String), ReplayError> {
            let (ln, line) = next(key)?;
            line.strip_prefix(key)
                .and_then(|rest| rest.strip_prefix(' '))
                .map(|v| (ln, v.to_string()))
                .ok_or_else(|| bad(ln, format!("expected `{key} <value>`")))
        };
        let (ln, game) = field("game")?;
        let game: GameId = game.parse().map_err(|e| bad(ln, format!("{e}")))?;
        let (_, asset_hash) = field("asset")?;
        let (ln, seed) = field("seed")?;
        let seed: u64 = seed
            .parse()
            .map_err(|_| bad(ln, format!("bad seed `{seed}`")))?;
        let (_, agent) = field("agent")?;
        let (ln, count) = field("steps")?;
        let count: usize = count
            .parse()
            .map_err(|_| bad(ln, format!("bad step count `{count}`")))?;

        let mut steps = Vec::with_capacity(count);
        for _ in 0..count {
            let (ln, line) = next("step")?;
            let parts: Vec<&str> = line.split(' ').collect();
            let [tick, action, reward, status, checksum] = parts[..] else {
                return Err(bad(
                    ln,
                    "expected `tick action reward status checksum`".into(),
                ));
            };
            let mut chars = action.chars();
            let action = match (chars.next().and_then(Action::from_char), chars.next()) {
                (Some(a), None) => a,
                _ => return Err(bad(ln, format!("bad action `{action}`"))),
            };
            steps.push(ReplayStep {
                tick: tick
                    .parse()
                    .map_err(|_| bad(ln, format!("bad tick `{tick}`")))?,
                action,
                reward: reward
                    .parse()
                    .map_err(|_| bad(ln, format!("bad reward `{reward}`")))?,
                status: Status::from_name(status)
                    .ok_or_else(|| bad(ln, format!("bad status `{status}`")))?,
                checksum: u64::from_str_radix(checksum, 16)
                    .map_err(|_| bad(ln, format!("bad checksum `{checksum}`")))?,
            });
        }
        let (ln, last) = next("final line")?;
        let parts: Vec<&str> = last.split(' ').collect();
        let ["final", score, status] = parts[..] else {
            return Err(bad(ln, "expected `final <score> <status>`".into()));
        };
        let final_score = score
            .parse()
            .map_err(|_| bad(ln, format!("bad score `{score}`")))?;
        let final_status =
            Status::from_name(status).ok_or_else(|| bad(ln, format!("bad status `{status}`")))?;
        if let Some((ln, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(bad(ln, format!("trailing content `{extra}`")));
        }
        Ok(Replay {
            game,
            asset_hash,
            seed,
            agent,
            steps,
            final_score,
            final_status,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), ReplayError> {
        std::fs::write(path, self.to_text()).map_err(|source| ReplayError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    /// Re-simulates against `game` and checks every recorded outcome.
    pub fn verify_against(&self, game: &Arc<CompiledGame>) -> Result<(), ReplayError> {
        let found = game.fingerprint_hex();
        if found != self.asset_hash {
            return Err(ReplayError::VersionMismatch {
                expected: self.asset_hash.clone(),
                found,
            });
        }
        let mut state = GameState::init(game, self.seed);
        for step in &self.steps {
            let tick = state.tick();
            let diverge = |detail: String| ReplayError::Divergence { tick, detail };
            if state.status().is_terminal() {
                return Err(diverge("episode already over".to_string()));
            }
            if step.tick != tick {
                return Err(diverge(format!("recorded tick {}", step.tick)));
            }
            let out = state.advance(step.action);
            if out.reward != step.reward {
                return Err(diverge(format!(
                    "reward {} != recorded {}",
                    out.reward, step.reward
                )));
            }
            if out.status != step.status {
                return Err(diverge(format!(
                    "status {} != recorded {}",
                    out.status.as_str(),
                    step.status.as_str()
                )));
            }
            let sum = state_checksum(&state);
            if sum != step.checksum {
                return Err(diverge(format!(
                    "state checksum {sum:016x} != recorded {:016x}",
                    step.checksum
                )));
            }
        }
        if state.score() != self.final_score || state.status() != self.final_status {
            return Err(ReplayError::Divergence {
                tick: state.tick(),
                detail: format!(
                    "final {} {} != recorded {} {}",
                    state.score(),
                    state.status().as_str(),
                    self.final_score,
                    self.final_status.as_str()
                ),
            });
        }
        Ok(())
    }
}

/// Verifies against the bundled asset for the replay's game.
pub fn verify_replay(replay: &Replay) -> Result<(), ReplayError> {
    replay.verify_against(&load_game(replay.game)?.game)
}

pub fn verify_replay_file(path: &Path) -> Result<Replay, ReplayError> {
    let text = std::fs::read_to_string(path).map_err(|source| ReplayError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let replay = Replay::parse(&text)?;
    verify_replay(&replay)?;
    Ok(replay)
}
