//! Deceptive grid games and the agents that fall for them.
//!
//! * [`gdl`] parses game descriptions (`.dgdl`) and level maps (`.lvl`).
//! * [`engine`] simulates a game tick by tick and serves as forward model.
//! * [`games`] bundles the four games with reference policies.
//! * [`planners`] holds the search agents, [`learners`] the trained ones.
//! * [`harness`] evaluates agents, aggregates scores and checks replays.

pub mod engine;
pub mod games;
pub mod gdl;
pub mod harness;
pub mod learners;
pub mod planners;
