use serde::{Deserialize, Serialize};

use super::network::{Gradient, Network};

/// Stepped exponential decay: `base · decay^⌊step / every⌋`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LrSchedule {
    pub base: f64,
    pub decay: f64,
    pub every: u64,
}

impl LrSchedule {
    pub fn lr(&self, step: u64) -> f64 {
        learning_rate(self.base, self.decay, self.every, step)
    }
}

pub fn learning_rate(base: f64, decay: f64, every: u64, step: u64) -> f64 {
    let k = (step / every.max(1)).min(i32::MAX as u64) as i32;
    base * decay.powi(k)
}

/// One SGD step with classical momentum at the scheduled rate for `step`:
/// `v ← μ·v + g`, `w ← w − lr·v`. Weights and velocity are kept at `f32`
/// precision. Increments `step` and returns the rate used.
pub fn sgd_step(
    net: &mut Network,
    velocity: &mut [f64],
    grad: &Gradient,
    step: &mut u64,
    schedule: &LrSchedule,
    momentum: f64,
) -> f64 {
    assert_eq!(velocity.len(), grad.values.len());
    let lr = schedule.lr(*step);
    for ((w, v), g) in net.params_mut().iter_mut().zip(velocity.iter_mut()).zip(&grad.values) {
        *v = (momentum * *v + g) as f32 as f64;
        *w = (*w - lr * *v) as f32 as f64;
    }
    *step += 1;
    lr
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ImageBuffer;
    use crate::model::CnnArchitecture;
    use crate::rng;
    use rand::Rng;

    const STEPPED: LrSchedule = LrSchedule { base: 0.001, decay: 0.95, every: 1000 };

    #[test]
    fn stepped_decay() {
        assert_eq!(STEPPED.lr(0), 0.001);
        assert_eq!(STEPPED.lr(999), 0.001);
        assert_eq!(STEPPED.lr(1000), 0.00095);
        assert_eq!(STEPPED.lr(2500), 0.001 * 0.95 * 0.95);
        assert_eq!(STEPPED.lr(2500), 0.0009025);
    }

    fn net_and_batch() -> (Network, Vec<ImageBuffer>, Vec<f64>) {
        let net = Network::kaiming(CnnArchitecture::new(8, vec![4]).unwrap(), &mut rng::stream(2, &[])).unwrap();
        let mut r = rng::stream(3, &[]);
        let batch = (0..4).map(|_| ImageBuffer::from_fn(8, 8, |_, _, _| r.random::<f32>())).collect();
        (net, batch, vec![0.0, 1.0, 1.0, 0.0])
    }

    #[test]
    fn zero_gradient_leaves_weights() {
        let (mut net, _, _) = net_and_batch();
        let before = net.clone();
        let zero = Gradient { loss: 0.0, values: vec![0.0; net.params().len()] };
        let mut v = vec![0.0; net.params().len()];
        let mut step = 5;
        sgd_step(&mut net, &mut v, &zero, &mut step, &STEPPED, 0.9);
        assert_eq!(net, before);
        assert_eq!(step, 6);
    }

    #[test]
    fn small_step_reduces_loss() {
        let (mut net, batch, labels) = net_and_batch();
        let g = net.backward(&batch, &labels).unwrap();
        let mut v = vec![0.0; g.values.len()];
        let mut step = 0;
        sgd_step(&mut net, &mut v, &g, &mut step, &LrSchedule { base: 0.05, decay: 1.0, every: 1 }, 0.0);
        assert!(net.loss(&batch, &labels).unwrap() < g.loss);
    }
}
