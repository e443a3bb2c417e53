use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::CHANNELS;

/// Plain CNN: `channels.len()` blocks of 3×3 conv (stride 1, pad 1), ReLU
/// and 2×2 max-pool, then global average pooling and a single logit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CnnArchitecture {
    pub input_size: usize,
    pub channels: Vec<usize>,
}

impl Default for CnnArchitecture {
    fn default() -> Self {
        Self { input_size: 224, channels: vec![8, 16, 32, 64] }
    }
}

/// Offsets of each parameter tensor in the flat weight vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamLayout {
    /// Per block: (weights `[out][in][3][3]`, bias `[out]`).
    pub blocks: Vec<(Range<usize>, Range<usize>)>,
    pub head_weights: Range<usize>,
    pub head_bias: usize,
    pub total: usize,
}

impl CnnArchitecture {
    pub fn new(input_size: usize, channels: Vec<usize>) -> Result<Self> {
        let arch = Self { input_size, channels };
        arch.validate()?;
        Ok(arch)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_size == 0 {
            return Err(Error::InvalidConfig("input_size must be positive".into()));
        }
        if self.channels.iter().any(|&c| c == 0) {
            return Err(Error::InvalidConfig("block channel counts must be positive".into()));
        }
        if self.final_spatial() == 0 {
            return Err(Error::InvalidConfig(format!(
                "input {} is too small for {} pooling stages",
                self.input_size,
                self.channels.len()
            )));
        }
        Ok(())
    }

    /// Spatial side after every pooling stage.
    pub fn final_spatial(&self) -> usize {
        self.channels.iter().fold(self.input_size, |s, _| s / 2)
    }

    pub fn feature_channels(&self) -> usize {
        self.channels.last().copied().unwrap_or(CHANNELS)
    }

    pub fn layout(&self) -> ParamLayout {
        let mut offset = 0;
        let mut blocks = Vec::with_capacity(self.channels.len());
        let mut cin = CHANNELS;
        for &cout in &self.channels {
            let w = offset..offset + cout * cin * 9;
            let b = w.end..w.end + cout;
            offset = b.end;
            blocks.push((w, b));
            cin = cout;
        }
        let head_weights = offset..offset + cin;
        let head_bias = head_weights.end;
        ParamLayout { blocks, head_weights, head_bias, total: head_bias + 1 }
    }

    pub fn param_count(&self) -> usize {
        self.layout().total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_parameter_count() {
        let arch = CnnArchitecture::default();
        let expected = (8 * 3 * 9 + 8) + (16 * 8 * 9 + 16) + (32 * 16 * 9 + 32) + (64 * 32 * 9 + 64) + 64 + 1;
        assert_eq!(arch.param_count(), expected);
        assert_eq!(arch.final_spatial(), 14);
    }

    #[test]
    fn too_small_input_is_rejected() {
        assert!(CnnArchitecture::new(8, vec![4, 4, 4, 4]).is_err());
        assert!(CnnArchitecture::new(16, vec![4, 4, 4, 4]).is_ok());
        assert!(CnnArchitecture::new(32, vec![4, 0]).is_err());
    }

    #[test]
    fn headless_layout() {
        let arch = CnnArchitecture::new(1, vec![]).unwrap();
        let l = arch.layout();
        assert_eq!(l.head_weights, 0..3);
        assert_eq!(l.total, 4);
    }
}
