use super::GameState;

/// Agent-facing view of a state: one binary occupancy plane per sprite
/// class, plus gauges, score and tick.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Observation {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    /// `channels * height * width` cells, channel-major then row-major.
    pub grid_channels: Vec<u8>,
    pub gauges: Vec<i64>,
    pub score: i64,
    pub tick: u32,
}

impl Observation {
    pub fn plane(&self, channel: usize) -> &[u8] {
        let n = self.width * self.height;
        &self.grid_channels[channel * n..(channel + 1) * n]
    }

    /// Grid planes packed eight cells per byte followed by the gauges;
    /// used as a compact learner state key.
    pub fn packed_key_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.grid_channels.len() / 8 + 1 + self.gauges.len() * 8);
        for chunk in self.grid_channels.chunks(8) {
            let byte = chunk
                .iter()
                .enumerate()
                .fold(0u8, |b, (i, &v)| b | ((v & 1) << i));
            out.push(byte);
        }
        for g in &self.gauges {
            out.extend_from_slice(&g.to_le_bytes());
        }
        out
    }
}

impl GameState {
    pub fn observe(&self) -> Observation {
        let game = &self.game;
        let n = game.width * game.height;
        let channels = game.num_classes();
        let mut grid_channels = vec![0u8; channels * n];
        for (cell, &mask) in self.grid.iter().enumerate() {
            let mut m = mask;
            while m != 0 {
                let class = m.trailing_zeros() as usize;
                m &= m - 1;
                grid_channels[class * n + cell] = 1;
            }
        }
        Observation {
            width: game.width,
            height: game.height,
            channels,
            grid_channels,
            gauges: self.gauges.clone(),
            score: self.score,
            tick: self.tick,
        }
    }
}
