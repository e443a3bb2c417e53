//! A compact CNN fake-probability classifier trained from scratch.

mod arch;
mod checkpoint;
mod network;
mod optim;
mod predict;
mod train;

pub use arch::{CnnArchitecture, ParamLayout};
pub use checkpoint::{ModelCheckpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use network::{sigmoid, Gradient, Network};
pub use optim::{learning_rate, sgd_step, LrSchedule};
pub use predict::{predict_image, predict_image_n, predict_with_rois, Scorer, INFERENCE_CROPS};
pub use train::{mine_hard, select_hard, train, LogRow, TrainConfig, TrainState};
