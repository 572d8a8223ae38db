use serde::{Deserialize, Serialize};

pub const N_ACTIONS: usize = 5;

/// Linear softmax policy plus linear state-value baseline, trained with
/// n-step advantage actor-critic updates.
///
/// `policy` is feature-major: the weight of feature `i` for action `a` sits
/// at `i * 5 + a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ACModel {
    pub dim: usize,
    pub policy: Vec<f64>,
    pub value: Vec<f64>,
    pub n_steps: usize,
    pub learning_rate: f64,
    pub gamma: f64,
    pub entropy_coef: f64,
    pub workers: usize,
}

/// One transition of a rollout segment.
#[derive(Debug, Clone)]
pub struct Transition {
    pub features: Vec<f64>,
    pub action: usize,
    pub reward: f64,
}

fn nonzero(x: &[f64]) -> impl Iterator<Item = (usize, f64)> + '_ {
    x.iter().copied().enumerate().filter(|&(_, v)| v != 0.0)
}

pub fn softmax(z: &[f64; N_ACTIONS]) -> [f64; N_ACTIONS] {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut p = z.map(|v| (v - m).exp());
    let s: f64 = p.iter().sum();
    for v in &mut p {
        *v /= s;
    }
    p
}

/// Discounted returns of every step in a segment, bootstrapped with
/// `bootstrap` (the value of the state after the last step, 0 if terminal).
pub fn n_step_returns(rewards: &[f64], gamma: f64, bootstrap: f64) -> Vec<f64> {
    let mut out = vec![0.0; rewards.len()];
    let mut acc = bootstrap;
    for (t, r) in rewards.iter().enumerate().rev() {
        acc = r + gamma * acc;
        out[t] = acc;
    }
    out
}

impl ACModel {
    pub fn new(dim: usize) -> ACModel {
        ACModel {
            dim,
            policy: vec![0.0; dim * N_ACTIONS],
            value: vec![0.0; dim],
            n_steps: 5,
            learning_rate: 0.007,
            gamma: 0.99,
            entropy_coef: 0.0,
            workers: 1,
        }
    }

    pub fn logits(&self, x: &[f64]) -> [f64; N_ACTIONS] {
        let mut z = [0.0; N_ACTIONS];
        for (i, v) in nonzero(x) {
            let row = &self.policy[i * N_ACTIONS..(i + 1) * N_ACTIONS];
            for a in 0..N_ACTIONS {
                z[a] += row[a] * v;
            }
        }
        z
    }

    pub fn probs(&self, x: &[f64]) -> [f64; N_ACTIONS] {
        softmax(&self.logits(x))
    }

    pub fn state_value(&self, x: &[f64]) -> f64 {
        nonzero(x).map(|(i, v)| self.value[i] * v).sum()
    }

    pub fn log_prob(&self, x: &[f64], action: usize) -> f64 {
        self.probs(x)[action].ln()
    }

    pub fn entropy(&self, x: &[f64]) -> f64 {
        -self
            .probs(x)
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum::<f64>()
    }

    /// ½ (target − V(x))².
    pub fn value_loss(&self, x: &[f64], target: f64) -> f64 {
        0.5 * (target - self.state_value(x)).powi(2)
    }

    /// ∂ log π(a|x) / ∂ policy.
    pub fn log_prob_grad(&self, x: &[f64], action: usize) -> Vec<f64> {
        let p = self.probs(x);
        let mut g = vec![0.0; self.policy.len()];
        for (i, v) in nonzero(x) {
            for b in 0..N_ACTIONS {
                let ind = if b == action { 1.0 } else { 0.0 };
                g[i * N_ACTIONS + b] = v * (ind - p[b]);
            }
        }
        g
    }

    /// ∂ entropy / ∂ policy.
    pub fn entropy_grad(&self, x: &[f64]) -> Vec<f64> {
        let p = self.probs(x);
        let h = self.entropy(x);
        let mut g = vec![0.0; self.policy.len()];
        for (i, v) in nonzero(x) {
            for b in 0..N_ACTIONS {
                let dz = if p[b] > 0.0 {
                    -p[b] * (p[b].ln() + h)
                } else {
                    0.0
                };
                g[i * N_ACTIONS + b] = v * dz;
            }
        }
        g
    }

    /// ∂ value_loss / ∂ value.
    pub fn value_loss_grad(&self, x: &[f64], target: f64) -> Vec<f64> {
        let err = target - self.state_value(x);
        let mut g = vec![0.0; self.dim];
        for (i, v) in nonzero(x) {
            g[i] = -err * v;
        }
        g
    }

    /// One update from a segment of at most `n_steps` transitions.
    /// `next` holds the features of the state after the segment, or `None`
    /// if the episode ended. Gradients are taken at the current weights for
    /// every step, then applied together.
    pub fn update(&mut self, segment: &[Transition], next: Option<&[f64]>) {
        if segment.is_empty() {
            return;
        }
        let bootstrap = next.map_or(0.0, |x| self.state_value(x));
        let rewards: Vec<f64> = segment.iter().map(|t| t.reward).collect();
        let returns = n_step_returns(&rewards, self.gamma, bootstrap);
        let lr = self.learning_rate;
        let mut d_policy: Vec<(usize, f64)> = Vec::new();
        let mut d_value: Vec<(usize, f64)> = Vec::new();
        for (t, ret) in segment.iter().zip(&returns) {
            let x = &t.features;
            let p = self.probs(x);
            let adv = ret - self.state_value(x);
            let h = if self.entropy_coef != 0.0 {
                self.entropy(x)
            } else {
                0.0
            };
            for (i, v) in nonzero(x) {
                for (b, &pb) in p.iter().enumerate() {
                    let ind = if b == t.action { 1.0 } else { 0.0 };
                    let mut g = adv * v * (ind - pb);
                    if self.entropy_coef != 0.0 && pb > 0.0 {
                        g += self.entropy_coef * v * (-pb * (pb.ln() + h));
                    }
                    if g != 0.0 {
                        d_policy.push((i * N_ACTIONS + b, g));
                    }
                }
                d_value.push((i, adv * v));
            }
        }
        for (k, g) in d_policy {
            self.policy[k] += lr * g;
        }
        for (k, g) in d_value {
            self.value[k] += lr * g;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.policy.iter().chain(&self.value).all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn three_step_return() {
        let r = n_step_returns(&[0.0, 0.0, 1.0], 0.99, 0.0);
        assert!((r[0] - 0.9801).abs() < 1e-12);
        assert!((r[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_advantage_leaves_policy() {
        let mut m = ACModel::new(3);
        m.value = vec![1.0, 0.0, 0.0];
        let before = m.policy.clone();
        // V(x) = 1 and the return is exactly 1
        m.update(
            &[Transition {
                features: vec![1.0, 0.0, 0.0],
                action: 2,
                reward: 1.0,
            }],
            None,
        );
        assert_eq!(m.policy, before);
    }

    #[test]
    fn bandit_prefers_rewarded_arm() {
        let mut m = ACModel::new(1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = vec![1.0];
        for _ in 0..2000 {
            let p = m.probs(&x);
            // two-armed: only Left (2) and Right (3) are offered
            let left = rng.gen::<f64>() < p[2] / (p[2] + p[3]);
            let (action, reward) = if left { (2, 1.0) } else { (3, 0.0) };
            m.update(
                &[Transition {
                    features: x.clone(),
                    action,
                    reward,
                }],
                None,
            );
        }
        let p = m.probs(&x);
        assert!(
            p[2] / (p[2] + p[3]) > 0.95,
            "p(left) = {}",
            p[2] / (p[2] + p[3])
        );
    }
}
