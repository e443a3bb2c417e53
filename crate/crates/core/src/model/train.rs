use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::arch::CnnArchitecture;
use super::network::Network;
use super::optim::{sgd_step, LrSchedule};
use crate::error::{Error, Result};
use crate::rng;
use crate::synth::{build_batch, FaceImage, Label, Sample, SynthConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub batch_size: usize,
    /// Stage-1 base learning rate.
    pub lr0: f64,
    pub lr_decay: f64,
    /// Steps between learning-rate decays.
    pub decay_every: u64,
    /// Stage-1 epochs.
    pub max_epochs: usize,
    /// Hard-mining (stage-2) epochs.
    pub hard_mine_epochs: usize,
    pub hard_mine_lr: f64,
    pub hard_threshold: f64,
    pub momentum: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 64,
            lr0: 0.001,
            lr_decay: 0.95,
            decay_every: 1000,
            max_epochs: 100,
            hard_mine_epochs: 20,
            hard_mine_lr: 0.0001,
            hard_threshold: 0.5,
            momentum: 0.9,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.batch_size < 2 || self.batch_size % 2 != 0 {
            return bad(format!("batch_size must be even and at least 2, got {}", self.batch_size));
        }
        if !(self.lr0 > 0.0) || !(self.hard_mine_lr > 0.0) {
            return bad("learning rates must be positive".into());
        }
        if !(self.lr_decay > 0.0 && self.lr_decay <= 1.0) || self.decay_every == 0 {
            return bad("lr_decay must lie in (0, 1] and decay_every be positive".into());
        }
        if !(self.hard_threshold > 0.0 && self.hard_threshold < 1.0) {
            return bad(format!("hard_threshold {} outside (0, 1)", self.hard_threshold));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad(format!("momentum {} outside [0, 1)", self.momentum));
        }
        Ok(())
    }

    pub fn stage1_schedule(&self) -> LrSchedule {
        LrSchedule { base: self.lr0, decay: self.lr_decay, every: self.decay_every }
    }

    pub fn stage2_schedule(&self) -> LrSchedule {
        LrSchedule { base: self.hard_mine_lr, decay: self.lr_decay, every: self.decay_every }
    }
}

/// Everything needed to continue training exactly where it stopped.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainState {
    pub network: Network,
    pub velocity: Vec<f64>,
    /// Total SGD steps over both stages.
    pub step: u64,
    pub stage1_steps: u64,
    pub stage2_steps: u64,
    pub stage1_epochs: usize,
    pub stage2_epochs: usize,
}

impl TrainState {
    /// Fresh Kaiming-initialized network for `seed`.
    pub fn new(arch: CnnArchitecture, seed: u64) -> Result<Self> {
        let network = Network::kaiming(arch, &mut rng::stream(seed, &[0]))?;
        Ok(Self::from_network(network))
    }

    pub fn from_network(network: Network) -> Self {
        let velocity = vec![0.0; network.params().len()];
        Self { network, velocity, step: 0, stage1_steps: 0, stage2_steps: 0, stage1_epochs: 0, stage2_epochs: 0 }
    }
}

/// One row of the training curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRow {
    pub step: u64,
    pub lr: f64,
    pub loss: f64,
    pub stage: u8,
    pub epoch: usize,
}

/// Indices of misclassified scores at `threshold`: real with score above it,
/// fake with score below it. A score equal to the threshold is never hard.
pub fn select_hard(scores: &[f64], labels: &[Label], threshold: f64) -> Vec<usize> {
    scores
        .iter()
        .zip(labels)
        .enumerate()
        .filter(|(_, (&p, &l))| match l {
            Label::Real => p > threshold,
            Label::Fake => p < threshold,
        })
        .map(|(i, _)| i)
        .collect()
}

pub fn mine_hard(net: &Network, samples: &[Sample], threshold: f64) -> Result<Vec<Sample>> {
    let scores = net.forward(samples)?;
    let labels: Vec<Label> = samples.iter().map(|s| s.label).collect();
    Ok(select_hard(&scores, &labels, threshold).into_iter().map(|i| samples[i].clone()).collect())
}

fn effective_batch(cfg: &TrainConfig, n: usize) -> Result<usize> {
    let bs = cfg.batch_size.min(n) & !1;
    if bs < 2 {
        return Err(Error::InsufficientInput { needed: 2, available: n });
    }
    Ok(bs)
}

/// Synthesizes one epoch's worth of batches from a seeded permutation of the
/// dataset. A trailing partial batch is kept (trimmed to even length).
fn epoch_batches(
    dataset: &[FaceImage],
    synth: &SynthConfig,
    bs: usize,
    seed: u64,
    stage: u64,
    epoch: usize,
) -> Result<Vec<Vec<Sample>>> {
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    order.shuffle(&mut rng::stream(seed, &[stage, epoch as u64]));
    order
        .chunks(bs)
        .enumerate()
        .filter(|(_, chunk)| chunk.len() >= 2)
        .map(|(b, chunk)| {
            let faces: Vec<&FaceImage> = chunk[..chunk.len() & !1].iter().map(|&i| &dataset[i]).collect();
            build_batch(&faces, faces.len(), synth, &mut rng::stream(seed, &[stage, epoch as u64, b as u64 + 1]))
        })
        .collect()
}

/// Two-stage training with per-batch negative synthesis.
///
/// Stage 1 runs `max_epochs` epochs; every batch converts a random half of
/// its pristine faces into negatives. Stage 2 runs `hard_mine_epochs`
/// epochs: each epoch synthesizes fresh batches, keeps only samples the
/// current network misclassifies at `hard_threshold`, and trains on those at
/// `hard_mine_lr`. Training resumes from whatever epochs `state` has already
/// completed; `on_step` receives every SGD step.
pub fn train(
    dataset: &[FaceImage],
    synth: &SynthConfig,
    cfg: &TrainConfig,
    mut state: TrainState,
    on_step: &mut dyn FnMut(&LogRow),
) -> Result<TrainState> {
    cfg.validate()?;
    synth.validate()?;
    if dataset.is_empty() {
        return Err(Error::InsufficientInput { needed: 2, available: 0 });
    }
    let input = state.network.arch().input_size;
    if synth.roi_size != input {
        return Err(Error::InvalidConfig(format!(
            "roi_size {} does not match the network input size {input}",
            synth.roi_size
        )));
    }
    let bs = effective_batch(cfg, dataset.len())?;

    let schedule = cfg.stage1_schedule();
    while state.stage1_epochs < cfg.max_epochs {
        let epoch = state.stage1_epochs;
        for batch in epoch_batches(dataset, synth, bs, cfg.seed, 1, epoch)? {
            let step = state.step;
            let (lr, loss) = stage_step(&mut state, 1, &batch, &schedule, cfg.momentum)?;
            on_step(&LogRow { step, lr, loss, stage: 1, epoch });
        }
        state.stage1_epochs += 1;
    }

    let schedule = cfg.stage2_schedule();
    while state.stage2_epochs < cfg.hard_mine_epochs {
        let epoch = state.stage2_epochs;
        let candidates: Vec<Sample> =
            epoch_batches(dataset, synth, bs, cfg.seed, 2, epoch)?.into_iter().flatten().collect();
        let mut hard = mine_hard(&state.network, &candidates, cfg.hard_threshold)?;
        log::debug!("hard-mining epoch {epoch}: {} of {} samples", hard.len(), candidates.len());
        hard.shuffle(&mut rng::stream(cfg.seed, &[2, epoch as u64, 0]));
        for batch in hard.chunks(bs) {
            let step = state.step;
            let (lr, loss) = stage_step(&mut state, 2, batch, &schedule, cfg.momentum)?;
            on_step(&LogRow { step, lr, loss, stage: 2, epoch });
        }
        state.stage2_epochs += 1;
    }
    Ok(state)
}

/// One SGD step with the learning rate taken from the stage's own counter.
fn stage_step(
    state: &mut TrainState,
    stage: u8,
    batch: &[Sample],
    schedule: &LrSchedule,
    momentum: f64,
) -> Result<(f64, f64)> {
    let labels: Vec<f64> = batch.iter().map(|s| s.label.target()).collect();
    let grad = state.network.backward(batch, &labels)?;
    let counter = if stage == 1 { &mut state.stage1_steps } else { &mut state.stage2_steps };
    let lr = sgd_step(&mut state.network, &mut state.velocity, &grad, counter, schedule, momentum);
    state.step += 1;
    Ok((lr, grad.loss))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hard_selection_rule() {
        let scores = [0.7, 0.2, 0.4, 0.9];
        let labels = [Label::Real, Label::Real, Label::Fake, Label::Fake];
        assert_eq!(select_hard(&scores, &labels, 0.5), vec![0, 2]);
    }

    #[test]
    fn perfect_and_undecided_classifiers_have_no_hard_examples() {
        let labels = [Label::Real, Label::Fake, Label::Real, Label::Fake];
        assert!(select_hard(&[0.1, 0.9, 0.0, 1.0], &labels, 0.5).is_empty());
        assert!(select_hard(&[0.5; 4], &labels, 0.5).is_empty());
    }

    #[test]
    fn config_validation() {
        TrainConfig::default().validate().unwrap();
        for f in [
            |c: &mut TrainConfig| c.batch_size = 3,
            |c: &mut TrainConfig| c.lr0 = 0.0,
            |c: &mut TrainConfig| c.hard_threshold = 1.0,
            |c: &mut TrainConfig| c.momentum = 1.0,
            |c: &mut TrainConfig| c.decay_every = 0,
        ] {
            let mut c = TrainConfig::default();
            f(&mut c);
            assert!(c.validate().is_err());
        }
    }
}
