#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use warpfake::synth::{procedural_face, procedural_video, FaceImage};
use warpfake_cli::io::write_png;
use warpfake_cli::ManifestEntry;

pub const SMALL_CONFIG: &str = r#"
seed = 5

[synth]
roi_size = 16

[model]
input_size = 16
channels = [4]

[train]
batch_size = 4
lr0 = 0.01
max_epochs = 2
hard_mine_epochs = 1
hard_mine_lr = 0.001

[score]
crops = 3
"#;

pub fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn write_faces(dir: &Path, faces: &[FaceImage], frame_index: bool) -> PathBuf {
    std::fs::create_dir_all(dir.join("faces")).unwrap();
    let mut manifest = String::new();
    for (i, f) in faces.iter().enumerate() {
        let image_path = format!("faces/{i:04}.png");
        let landmarks_path = format!("faces/{i:04}.txt");
        write_png(&dir.join(&image_path), &f.image).unwrap();
        std::fs::write(dir.join(&landmarks_path), f.landmarks.to_sidecar()).unwrap();
        let entry = ManifestEntry {
            image_path,
            landmarks_path,
            label: None,
            video_id: f.video_id.clone(),
            frame_index: if frame_index { f.source_id.rsplit('/').next().and_then(|s| s.parse().ok()) } else { None },
        };
        manifest.push_str(&serde_json::to_string(&entry).unwrap());
        manifest.push('\n');
    }
    let path = dir.join("manifest.jsonl");
    std::fs::write(&path, manifest).unwrap();
    path
}

/// `n` independent procedural faces of side `size`, written as PNG plus
/// landmark sidecars with a manifest.
pub fn face_dataset(dir: &Path, n: usize, size: usize) -> PathBuf {
    let faces: Vec<FaceImage> = (0..n).map(|i| procedural_face(size, 100 + i as u64)).collect();
    write_faces(dir, &faces, false)
}

pub fn video_dataset(dir: &Path, n_videos: usize, n_frames: usize, size: usize) -> PathBuf {
    let faces: Vec<FaceImage> =
        (0..n_videos).flat_map(|v| procedural_video(size, n_frames, 500 + v as u64, &format!("vid{v:02}"))).collect();
    write_faces(dir, &faces, true)
}

pub fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_warpfake"));
    cmd.args(args).env("RUST_LOG", "warn");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

/// Every file under `root`, keyed by relative path.
pub fn tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}
