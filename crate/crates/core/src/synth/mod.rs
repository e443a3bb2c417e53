//! Negative-example synthesis and RoI sampling.
//!
//! A negative is made from a pristine face by aligning it to the template at
//! a random scale, blurring the aligned face, warping it back with the
//! inverse transform and compositing it into the original through a
//! whole-face or convex-polygon mask.

mod batch;
mod config;
mod negative;
mod procedural;
mod roi;

pub use batch::{build_batch, synthesize_sample, FaceImage, Label, Sample};
pub use config::{ShapeModeProbs, SynthConfig};
pub use negative::{make_negative, make_negative_detailed, Negative};
pub use procedural::{procedural_face, procedural_video};
pub use roi::{crop_resize, face_box, roi_with_margins, sample_roi, FaceBox, RoiSpec, DEFAULT_ROI_SIZE};
