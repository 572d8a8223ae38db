use serde::{Deserialize, Serialize};

use crate::engine::{CompiledGame, Observation};

/// Flattens an observation into a dense feature vector: every occupancy
/// plane, then each gauge divided by its limit, then tick over time limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureEncoder {
    grid_len: usize,
    gauge_scale: Vec<f64>,
    time_limit: u32,
}

impl FeatureEncoder {
    pub fn new(grid_len: usize, gauge_limits: &[i64], time_limit: u32) -> FeatureEncoder {
        FeatureEncoder {
            grid_len,
            gauge_scale: gauge_limits
                .iter()
                .map(|&l| if l > 0 { 1.0 / l as f64 } else { 1.0 })
                .collect(),
            time_limit: time_limit.max(1),
        }
    }

    pub fn for_game(game: &CompiledGame) -> FeatureEncoder {
        FeatureEncoder::new(
            game.num_classes() * game.width * game.height,
            &game.gauge_limits(),
            game.time_limit,
        )
    }

    pub fn dim(&self) -> usize {
        self.grid_len + self.gauge_scale.len() + 1
    }

    pub fn encode(&self, obs: &Observation) -> Vec<f64> {
        assert_eq!(
            obs.grid_channels.len(),
            self.grid_len,
            "observation shape mismatch"
        );
        let mut out = Vec::with_capacity(self.dim());
        out.extend(obs.grid_channels.iter().map(|&v| f64::from(v)));
        out.extend(
            obs.gauges
                .iter()
                .zip(&self.gauge_scale)
                .map(|(&g, &s)| g as f64 * s),
        );
        out.push(f64::from(obs.tick) / f64::from(self.time_limit));
        out
    }
}

/// [`FeatureEncoder::encode`] with unit gauge scaling.
pub fn encode_features(obs: &Observation, time_limit: u32) -> Vec<f64> {
    FeatureEncoder::new(
        obs.grid_channels.len(),
        &vec![1; obs.gauges.len()],
        time_limit,
    )
    .encode(obs)
}
