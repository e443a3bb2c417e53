use rand::Rng;
use warpfake::geometry::ImageBuffer;
use warpfake::imaging::{gaussian_blur, GaussianKernel};
use warpfake::model::{
    sgd_step, train, CnnArchitecture, LogRow, LrSchedule, ModelCheckpoint, Network, TrainConfig, TrainState,
};
use warpfake::rng;
use warpfake::synth::{procedural_face, FaceImage, SynthConfig};

fn tiny_setup() -> (Vec<FaceImage>, SynthConfig, TrainConfig, CnnArchitecture) {
    let faces: Vec<FaceImage> = (0..6).map(|i| procedural_face(48, 40 + i)).collect();
    let synth = SynthConfig { roi_size: 16, ..SynthConfig::default() };
    let cfg = TrainConfig {
        batch_size: 4,
        lr0: 0.01,
        max_epochs: 2,
        hard_mine_epochs: 1,
        hard_mine_lr: 0.001,
        seed: 3,
        ..TrainConfig::default()
    };
    (faces, synth, cfg, CnnArchitecture::new(16, vec![4]).unwrap())
}

fn run(faces: &[FaceImage], synth: &SynthConfig, cfg: &TrainConfig, state: TrainState) -> (TrainState, Vec<LogRow>) {
    let mut rows = Vec::new();
    let state = train(faces, synth, cfg, state, &mut |r| rows.push(*r)).unwrap();
    (state, rows)
}

#[test]
fn training_is_deterministic_across_thread_counts() {
    let (faces, synth, cfg, arch) = tiny_setup();
    let go = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| run(&faces, &synth, &cfg, TrainState::new(arch.clone(), cfg.seed).unwrap()))
    };
    let (a, rows_a) = go(1);
    let (b, rows_b) = go(4);
    assert_eq!(a, b);
    assert_eq!(rows_a, rows_b);
    // 6 faces with batch 4: one full batch and one batch of two per epoch
    assert_eq!(a.stage1_steps, 4);
    assert!(rows_a.iter().all(|r| r.loss.is_finite()));
}

#[test]
fn epoch_by_epoch_equals_single_call() {
    let (faces, synth, cfg, arch) = tiny_setup();
    let init = TrainState::new(arch, cfg.seed).unwrap();
    let (whole, whole_rows) = run(&faces, &synth, &cfg, init.clone());

    let mut state = init;
    let mut rows = Vec::new();
    for (e1, e2) in [(1, 0), (2, 0), (2, 1)] {
        let partial = TrainConfig { max_epochs: e1, hard_mine_epochs: e2, ..cfg.clone() };
        // round-trip through the checkpoint format between calls
        let bytes = ModelCheckpoint::new(state, cfg.seed, 0).to_bytes();
        state = ModelCheckpoint::from_bytes(&bytes).unwrap().state;
        let (s, r) = run(&faces, &synth, &partial, state);
        state = s;
        rows.extend(r);
    }
    assert_eq!(state, whole);
    assert_eq!(rows, whole_rows);
}

#[test]
fn zero_hard_mining_epochs_is_stage_one_only() {
    let (faces, synth, cfg, arch) = tiny_setup();
    let no_mining = TrainConfig { hard_mine_epochs: 0, ..cfg.clone() };
    let (a, rows) = run(&faces, &synth, &no_mining, TrainState::new(arch.clone(), cfg.seed).unwrap());
    assert!(rows.iter().all(|r| r.stage == 1));
    assert_eq!(a.stage2_steps, 0);
    let (b, _) = run(&faces, &synth, &cfg, TrainState::new(arch, cfg.seed).unwrap());
    assert_eq!(a.network.params().len(), b.network.params().len());
    assert_eq!((b.stage1_epochs, b.stage2_epochs), (2, 1));
}

#[test]
fn undecided_network_finds_nothing_to_mine() {
    let (faces, synth, cfg, arch) = tiny_setup();
    let stage2_only = TrainConfig { max_epochs: 0, ..cfg };
    let start = TrainState::from_network(Network::zeros(arch).unwrap());
    let (end, rows) = run(&faces, &synth, &stage2_only, start.clone());
    assert!(rows.is_empty());
    assert_eq!(end.network, start.network);
    assert_eq!(end.stage2_epochs, 1);
}

#[test]
fn learns_sharp_versus_blurred_texture() {
    let arch = CnnArchitecture::new(16, vec![4]).unwrap();
    let kernel = GaussianKernel::new(5, 1.1).unwrap();
    let make = |r: &mut rng::StreamRng, blurred: bool| {
        let base = r.random_range(0.3..0.7);
        let img = ImageBuffer::from_fn(16, 16, |_, _, _| base + r.random_range(-0.25..0.25));
        if blurred {
            gaussian_blur(&img, &kernel)
        } else {
            img
        }
    };
    let mut data_rng = rng::stream(1, &[]);
    let train_set: Vec<(ImageBuffer, f64)> =
        (0..64).map(|i| (make(&mut data_rng, i % 2 == 1), (i % 2) as f64)).collect();
    let mut net = Network::kaiming(arch, &mut rng::stream(2, &[])).unwrap();
    let mut velocity = vec![0.0; net.params().len()];
    let mut step = 0;
    let schedule = LrSchedule { base: 0.02, decay: 0.95, every: 1000 };
    let mut epoch_losses = Vec::new();
    for _ in 0..12 {
        let mut total = 0.0;
        for chunk in train_set.chunks(8) {
            let batch: Vec<&ImageBuffer> = chunk.iter().map(|(img, _)| img).collect();
            let labels: Vec<f64> = chunk.iter().map(|(_, y)| *y).collect();
            let grad = net.backward(&batch, &labels).unwrap();
            total += grad.loss;
            sgd_step(&mut net, &mut velocity, &grad, &mut step, &schedule, 0.9);
        }
        epoch_losses.push(total / 8.0);
    }
    assert!(epoch_losses.windows(2).all(|w| w[1] < w[0]), "epoch losses {epoch_losses:?}");
    let train_correct =
        train_set.iter().filter(|(img, y)| (net.forward(&[img]).unwrap()[0] > 0.5) == (*y == 1.0)).count();
    assert_eq!(train_correct, 64);
    let mut test_rng = rng::stream(9, &[]);
    let mut correct = 0;
    for i in 0..100 {
        let fake = i % 2 == 1;
        let p = net.forward(&[make(&mut test_rng, fake)]).unwrap()[0];
        correct += usize::from((p > 0.5) == fake);
    }
    assert_eq!(correct, 100);
}
