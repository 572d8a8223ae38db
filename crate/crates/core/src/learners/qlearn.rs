use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::Observation;

pub type StateKey = [u8; 32];

/// State key: SHA-256 of the packed occupancy planes and gauges. Tick and
/// score are left out so that equal positions share values.
pub fn state_key(obs: &Observation) -> StateKey {
    Sha256::digest(obs.packed_key_bytes()).into()
}

/// Linear ε decay from `start` to `end` over the first `fraction` of
/// training, flat afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub end: f64,
    pub fraction: f64,
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        EpsilonSchedule {
            start: 1.0,
            end: 0.05,
            fraction: 0.5,
        }
    }
}

impl EpsilonSchedule {
    pub fn at(&self, episode: usize, total: usize) -> f64 {
        let span = (total as f64 * self.fraction).max(1.0);
        let t = (episode as f64 / span).min(1.0);
        self.start + (self.end - self.start) * t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: EpsilonSchedule,
    #[serde(with = "table_serde")]
    values: HashMap<StateKey, [f64; 5]>,
}

impl QTable {
    pub fn new(alpha: f64, gamma: f64, epsilon: EpsilonSchedule) -> QTable {
        assert!(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
        assert!((0.0..=1.0).contains(&gamma), "gamma must lie in [0, 1]");
        QTable {
            alpha,
            gamma,
            epsilon,
            values: HashMap::new(),
        }
    }

    /// Missing keys read as zeros.
    pub fn get(&self, key: &StateKey) -> [f64; 5] {
        self.values.get(key).copied().unwrap_or([0.0; 5])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Q(s,a) += α (r + γ max Q(s',·) (1 - terminal) - Q(s,a)).
    pub fn update(&mut self, s: &StateKey, a: usize, r: f64, next: &StateKey, terminal: bool) {
        let bootstrap = if terminal {
            0.0
        } else {
            self.get(next).into_iter().fold(f64::NEG_INFINITY, f64::max)
        };
        let (alpha, gamma) = (self.alpha, self.gamma);
        let row = self.values.entry(*s).or_insert([0.0; 5]);
        row[a] += alpha * (r + gamma * bootstrap - row[a]);
    }

    /// Lowest-index action with the highest value.
    pub fn greedy(&self, key: &StateKey) -> usize {
        argmax(&self.get(key))
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

mod table_serde {
    use std::collections::{BTreeMap, HashMap};

    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::StateKey;

    pub fn serialize<S: Serializer>(
        map: &HashMap<StateKey, [f64; 5]>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let sorted: BTreeMap<String, [f64; 5]> =
            map.iter().map(|(k, v)| (hex::encode(k), *v)).collect();
        sorted.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<HashMap<StateKey, [f64; 5]>, D::Error> {
        let raw: BTreeMap<String, [f64; 5]> = BTreeMap::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                let bytes = hex::decode(&k).map_err(D::Error::custom)?;
                let key: StateKey = bytes
                    .try_into()
                    .map_err(|_| D::Error::custom("state key must be 32 bytes"))?;
                Ok((key, v))
            })
            .collect()
    }
}
