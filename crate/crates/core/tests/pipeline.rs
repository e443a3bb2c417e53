use warpfake::geometry::psnr;
use warpfake::model::{predict_image, CnnArchitecture, Network};
use warpfake::rng;
use warpfake::synth::{
    build_batch, make_negative_detailed, procedural_face, procedural_video, FaceImage, Label, SynthConfig,
};

#[test]
fn negatives_of_procedural_faces_only_change_the_face() {
    let cfg = SynthConfig { feather_px: 0, hard_edge_prob: 0.0, ..SynthConfig::default() };
    for seed in 0..10 {
        let face = procedural_face(96, seed);
        let neg = make_negative_detailed(&face.image, &face.landmarks, &cfg, &mut rng::stream(seed, &[7])).unwrap();
        let (w, h) = face.image.dims();
        assert!(neg.mask.support() > 0);
        for y in 0..h {
            for x in 0..w {
                if neg.mask.get(x, y) == 0.0 {
                    assert_eq!(neg.image.pixel(x, y), face.image.pixel(x, y));
                }
            }
        }
        // the blurred face differs measurably from the sharp original
        let inside = psnr(&face.image, &neg.image, |x, y| neg.mask.get(x, y) > 0.0);
        assert!(inside.is_finite() && inside < 40.0, "in-mask PSNR {inside}");
    }
}

#[test]
fn batches_are_balanced_and_thread_independent() {
    let faces: Vec<FaceImage> = procedural_video(64, 12, 3, "v");
    let cfg = SynthConfig { roi_size: 32, ..SynthConfig::default() };
    let go = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| build_batch(&faces, 12, &cfg, &mut rng::stream(11, &[])).unwrap())
    };
    let a = go(1);
    assert_eq!(a, go(3));
    assert_eq!(a.iter().filter(|s| s.label == Label::Fake).count(), 6);
    assert!(a.iter().all(|s| s.pixels.dims() == (32, 32) && s.video_id.as_deref() == Some("v")));
}

#[test]
fn inference_on_a_procedural_face() {
    let face = procedural_face(80, 2);
    let arch = CnnArchitecture::new(32, vec![4, 8]).unwrap();
    let net = Network::kaiming(arch, &mut rng::stream(0, &[])).unwrap();
    let p = predict_image(&net, &face.image, &face.landmarks, &mut rng::stream(1, &[])).unwrap();
    assert!((0.0..=1.0).contains(&p));
    assert_eq!(p, predict_image(&net, &face.image, &face.landmarks, &mut rng::stream(1, &[])).unwrap());
}
