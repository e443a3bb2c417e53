//! Binary checkpoint format, all integers and floats little-endian:
//!
//! ```text
//! magic "WFCK" | u32 version
//! u32 input_size | u32 n_blocks | u32 channels[n_blocks]
//! u64 seed | u64 config_hash
//! u64 step | u64 stage1_steps | u64 stage2_steps
//! u32 stage1_epochs | u32 stage2_epochs
//! u64 rng_digest
//! u64 n_params | f32 weights[n_params] | f32 velocity[n_params]
//! ```
//!
//! Weights are held at f32 precision during training, so a save/load round
//! trip reproduces the network exactly.

use rand::RngCore;

use super::arch::CnnArchitecture;
use super::network::Network;
use super::train::TrainState;
use crate::error::{Error, Result};
use crate::rng;

pub const CHECKPOINT_MAGIC: [u8; 4] = *b"WFCK";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct ModelCheckpoint {
    pub state: TrainState,
    pub seed: u64,
    /// Hash of the configuration that produced the weights; zero if unknown.
    pub config_hash: u64,
}

/// Fingerprint of the random streams a resumed run will draw from next.
fn rng_digest(seed: u64, stage1_epochs: usize, stage2_epochs: usize) -> u64 {
    rng::stream(seed, &[9, stage1_epochs as u64, stage2_epochs as u64]).next_u64()
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.bytes.len() < n {
            return Err(Error::CorruptCheckpoint("unexpected end of data".into()));
        }
        let (head, tail) = self.bytes.split_at(n);
        self.bytes = tail;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f32s(&mut self, n: usize) -> Result<Vec<f64>> {
        let len = n.checked_mul(4).ok_or_else(|| Error::CorruptCheckpoint("parameter count overflow".into()))?;
        Ok(self.take(len)?.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64).collect())
    }
}

impl ModelCheckpoint {
    pub fn new(state: TrainState, seed: u64, config_hash: u64) -> Self {
        Self { state, seed, config_hash }
    }

    pub fn network(&self) -> &Network {
        &self.state.network
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let s = &self.state;
        let arch = s.network.arch();
        let n = s.network.params().len();
        let mut out = Vec::with_capacity(96 + 8 * n);
        out.extend_from_slice(&CHECKPOINT_MAGIC);
        out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
        out.extend_from_slice(&(arch.input_size as u32).to_le_bytes());
        out.extend_from_slice(&(arch.channels.len() as u32).to_le_bytes());
        for &c in &arch.channels {
            out.extend_from_slice(&(c as u32).to_le_bytes());
        }
        for v in [self.seed, self.config_hash, s.step, s.stage1_steps, s.stage2_steps] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&(s.stage1_epochs as u32).to_le_bytes());
        out.extend_from_slice(&(s.stage2_epochs as u32).to_le_bytes());
        out.extend_from_slice(&rng_digest(self.seed, s.stage1_epochs, s.stage2_epochs).to_le_bytes());
        out.extend_from_slice(&(n as u64).to_le_bytes());
        for &w in s.network.params().iter().chain(&s.velocity) {
            out.extend_from_slice(&(w as f32).to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let corrupt = |msg: String| Error::CorruptCheckpoint(msg);
        let mut r = Reader { bytes };
        if r.take(4)? != CHECKPOINT_MAGIC {
            return Err(corrupt("bad magic".into()));
        }
        let version = r.u32()?;
        if version != CHECKPOINT_VERSION {
            return Err(corrupt(format!("unsupported version {version}")));
        }
        let input_size = r.u32()? as usize;
        let n_blocks = r.u32()? as usize;
        if n_blocks > 64 {
            return Err(corrupt(format!("implausible block count {n_blocks}")));
        }
        let channels = (0..n_blocks).map(|_| r.u32().map(|c| c as usize)).collect::<Result<Vec<_>>>()?;
        let arch = CnnArchitecture::new(input_size, channels).map_err(|e| corrupt(format!("architecture: {e}")))?;
        let seed = r.u64()?;
        let config_hash = r.u64()?;
        let step = r.u64()?;
        let stage1_steps = r.u64()?;
        let stage2_steps = r.u64()?;
        let stage1_epochs = r.u32()? as usize;
        let stage2_epochs = r.u32()? as usize;
        if r.u64()? != rng_digest(seed, stage1_epochs, stage2_epochs) {
            return Err(corrupt("rng digest mismatch".into()));
        }
        let n = r.u64()? as usize;
        if n != arch.param_count() {
            return Err(corrupt(format!("expected {} parameters, found {n}", arch.param_count())));
        }
        let params = r.f32s(n)?;
        let velocity = r.f32s(n)?;
        if !r.bytes.is_empty() {
            return Err(corrupt(format!("{} trailing bytes", r.bytes.len())));
        }
        if params.iter().chain(&velocity).any(|v| !v.is_finite()) {
            return Err(corrupt("non-finite parameter".into()));
        }
        let network = Network::from_params(arch, params)?;
        let state = TrainState { network, velocity, step, stage1_steps, stage2_steps, stage1_epochs, stage2_epochs };
        Ok(Self { state, seed, config_hash })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ImageBuffer;

    fn checkpoint() -> ModelCheckpoint {
        let arch = CnnArchitecture::new(16, vec![4, 8]).unwrap();
        let mut state = TrainState::new(arch, 11).unwrap();
        state.step = 7;
        state.stage1_steps = 5;
        state.stage2_steps = 2;
        state.stage1_epochs = 3;
        state.stage2_epochs = 1;
        state.velocity.iter_mut().enumerate().for_each(|(i, v)| *v = (i as f32 * 0.25) as f64);
        ModelCheckpoint::new(state, 11, 0xdead_beef)
    }

    #[test]
    fn round_trip_is_exact() {
        let ck = checkpoint();
        let back = ModelCheckpoint::from_bytes(&ck.to_bytes()).unwrap();
        assert_eq!(back, ck);
        let img = ImageBuffer::from_fn(16, 16, |x, y, c| ((x * 3 + y * 5 + c) % 11) as f32 / 10.0);
        assert_eq!(ck.network().forward(&[&img]).unwrap(), back.network().forward(&[&img]).unwrap());
    }

    #[test]
    fn corruption_is_detected() {
        let bytes = checkpoint().to_bytes();
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(ModelCheckpoint::from_bytes(&bad), Err(Error::CorruptCheckpoint(_))));
        assert!(ModelCheckpoint::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut long = bytes.clone();
        long.push(0);
        assert!(ModelCheckpoint::from_bytes(&long).is_err());
        let mut epochs = bytes.clone();
        // stage1_epochs lives right after the fixed header and five u64 fields
        let off = 4 + 4 + 4 + 4 + 2 * 4 + 5 * 8;
        epochs[off] ^= 1;
        assert!(ModelCheckpoint::from_bytes(&epochs).is_err());
    }
}
