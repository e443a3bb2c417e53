use rand::Rng;
use rayon::prelude::*;

use super::arch::{CnnArchitecture, ParamLayout};
use crate::error::{Error, Result};
use crate::geometry::{ImageBuffer, CHANNELS};

/// The classifier: an architecture plus its flat parameter vector.
///
/// Parameters are held as `f64` for the arithmetic; initialization and SGD
/// updates round them to `f32` precision so checkpoints store them exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    arch: CnnArchitecture,
    layout: ParamLayout,
    params: Vec<f64>,
}

/// Mean binary cross-entropy over a batch and its gradient.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradient {
    pub loss: f64,
    pub values: Vec<f64>,
}

impl Gradient {
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|g| g * g).sum::<f64>().sqrt()
    }
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable `BCE(sigmoid(z), y)`.
#[inline]
fn bce_with_logit(z: f64, y: f64) -> f64 {
    z.max(0.0) - z * y + (-z.abs()).exp().ln_1p()
}

struct BlockTrace {
    input: Vec<f64>,
    pre_activation: Vec<f64>,
    argmax: Vec<u32>,
    size: usize,
}

struct Trace {
    blocks: Vec<BlockTrace>,
    features: Vec<f64>,
    logit: f64,
}

impl Network {
    pub fn zeros(arch: CnnArchitecture) -> Result<Self> {
        arch.validate()?;
        let layout = arch.layout();
        let params = vec![0.0; layout.total];
        Ok(Self { arch, layout, params })
    }

    /// Kaiming-uniform (fan-in) weights, zero biases.
    pub fn kaiming<R: Rng + ?Sized>(arch: CnnArchitecture, rng: &mut R) -> Result<Self> {
        let mut net = Self::zeros(arch)?;
        let mut cin = CHANNELS;
        for (i, (w, _)) in net.layout.blocks.clone().into_iter().enumerate() {
            let bound = (6.0 / (cin * 9) as f64).sqrt();
            for p in &mut net.params[w] {
                *p = round_f32(rng.random_range(-bound..bound));
            }
            cin = net.arch.channels[i];
        }
        let bound = (6.0 / cin as f64).sqrt();
        for p in &mut net.params[net.layout.head_weights.clone()] {
            *p = round_f32(rng.random_range(-bound..bound));
        }
        Ok(net)
    }

    pub fn from_params(arch: CnnArchitecture, params: Vec<f64>) -> Result<Self> {
        arch.validate()?;
        let layout = arch.layout();
        if params.len() != layout.total {
            return Err(Error::ShapeMismatch(format!(
                "architecture needs {} parameters, got {}",
                layout.total,
                params.len()
            )));
        }
        Ok(Self { arch, layout, params })
    }

    pub fn arch(&self) -> &CnnArchitecture {
        &self.arch
    }

    pub fn layout(&self) -> &ParamLayout {
        &self.layout
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Fake probabilities, one per input.
    pub fn forward<I: AsRef<ImageBuffer> + Sync>(&self, batch: &[I]) -> Result<Vec<f64>> {
        Ok(self.logits(batch)?.into_iter().map(sigmoid).collect())
    }

    pub fn logits<I: AsRef<ImageBuffer> + Sync>(&self, batch: &[I]) -> Result<Vec<f64>> {
        self.check_inputs(batch)?;
        Ok(batch.par_iter().map(|img| self.trace(img.as_ref()).logit).collect())
    }

    pub fn loss<I: AsRef<ImageBuffer> + Sync>(&self, batch: &[I], labels: &[f64]) -> Result<f64> {
        self.check_labels(batch.len(), labels)?;
        let logits = self.logits(batch)?;
        Ok(logits.iter().zip(labels).map(|(&z, &y)| bce_with_logit(z, y)).sum::<f64>() / batch.len() as f64)
    }

    /// Exact gradient of the mean binary cross-entropy w.r.t. every parameter.
    ///
    /// Per-sample gradients are computed in parallel and summed in batch
    /// order, so the result is independent of the thread count.
    pub fn backward<I: AsRef<ImageBuffer> + Sync>(&self, batch: &[I], labels: &[f64]) -> Result<Gradient> {
        self.check_inputs(batch)?;
        self.check_labels(batch.len(), labels)?;
        let scale = 1.0 / batch.len() as f64;
        let per_sample: Vec<(f64, Vec<f64>)> = batch
            .par_iter()
            .zip(labels.par_iter())
            .map(|(img, &y)| self.sample_gradient(img.as_ref(), y, scale))
            .collect();
        let mut values = vec![0.0; self.layout.total];
        let mut loss = 0.0;
        for (l, g) in per_sample {
            loss += l;
            for (acc, v) in values.iter_mut().zip(g) {
                *acc += v;
            }
        }
        Ok(Gradient { loss: loss * scale, values })
    }

    fn check_inputs<I: AsRef<ImageBuffer>>(&self, batch: &[I]) -> Result<()> {
        let n = self.arch.input_size;
        if let Some(bad) = batch.iter().find(|b| b.as_ref().dims() != (n, n)) {
            return Err(Error::ShapeMismatch(format!(
                "network expects {n}x{n} inputs, got {}x{}",
                bad.as_ref().width(),
                bad.as_ref().height()
            )));
        }
        Ok(())
    }

    fn check_labels(&self, n: usize, labels: &[f64]) -> Result<()> {
        if labels.len() != n {
            return Err(Error::ShapeMismatch(format!("{n} inputs but {} labels", labels.len())));
        }
        if labels.iter().any(|&y| y != 0.0 && y != 1.0) {
            return Err(Error::ShapeMismatch("labels must be 0 or 1".into()));
        }
        Ok(())
    }

    fn trace(&self, img: &ImageBuffer) -> Trace {
        let size = self.arch.input_size;
        let mut act = to_planar(img);
        let mut s = size;
        let mut cin = CHANNELS;
        let mut blocks = Vec::with_capacity(self.arch.channels.len());
        for (k, &cout) in self.arch.channels.iter().enumerate() {
            let (w, b) = &self.layout.blocks[k];
            let z = conv3x3(&act, cin, s, &self.params[w.clone()], &self.params[b.clone()], cout);
            let (pooled, argmax) = relu_maxpool(&z, cout, s);
            blocks.push(BlockTrace { input: act, pre_activation: z, argmax, size: s });
            act = pooled;
            s /= 2;
            cin = cout;
        }
        let area = (s * s) as f64;
        let features: Vec<f64> = act.chunks_exact(s * s).map(|p| p.iter().sum::<f64>() / area).collect();
        let head = &self.params[self.layout.head_weights.clone()];
        let logit = features.iter().zip(head).map(|(f, w)| f * w).sum::<f64>() + self.params[self.layout.head_bias];
        Trace { blocks, features, logit }
    }

    fn sample_gradient(&self, img: &ImageBuffer, y: f64, scale: f64) -> (f64, Vec<f64>) {
        let trace = self.trace(img);
        let mut grad = vec![0.0; self.layout.total];
        let dlogit = (sigmoid(trace.logit) - y) * scale;

        let head = self.layout.head_weights.clone();
        for (g, f) in grad[head.clone()].iter_mut().zip(&trace.features) {
            *g = dlogit * f;
        }
        grad[self.layout.head_bias] = dlogit;

        let s_final = self.arch.final_spatial();
        let area = (s_final * s_final) as f64;
        let mut d_out: Vec<f64> =
            self.params[head].iter().flat_map(|w| std::iter::repeat_n(dlogit * w / area, s_final * s_final)).collect();

        for (k, block) in trace.blocks.iter().enumerate().rev() {
            let cout = self.arch.channels[k];
            let cin = if k == 0 { CHANNELS } else { self.arch.channels[k - 1] };
            let s = block.size;
            // unpool into the argmax positions, then gate by ReLU
            let mut dz = vec![0.0; cout * s * s];
            let p2 = (s / 2) * (s / 2);
            for c in 0..cout {
                for j in 0..p2 {
                    let idx = c * s * s + block.argmax[c * p2 + j] as usize;
                    if block.pre_activation[idx] > 0.0 {
                        dz[idx] += d_out[c * p2 + j];
                    }
                }
            }
            let (wr, br) = &self.layout.blocks[k];
            let (gw, rest) = grad[wr.start..].split_at_mut(wr.len());
            let gb = &mut rest[br.start - wr.end..br.end - wr.end];
            d_out = conv3x3_backward(&block.input, cin, s, &self.params[wr.clone()], cout, &dz, gw, gb, k > 0);
        }
        (bce_with_logit(trace.logit, y), grad)
    }
}

#[inline]
fn round_f32(v: f64) -> f64 {
    v as f32 as f64
}

fn to_planar(img: &ImageBuffer) -> Vec<f64> {
    let n = img.width() * img.height();
    let mut out = vec![0.0; n * CHANNELS];
    for (i, px) in img.data().chunks_exact(CHANNELS).enumerate() {
        for c in 0..CHANNELS {
            out[c * n + i] = px[c] as f64;
        }
    }
    out
}

/// Valid output range for a tap offset `d` on a side of length `s`.
#[inline]
fn tap_range(d: isize, s: usize) -> (usize, usize) {
    let lo = (-d).max(0) as usize;
    let hi = (s as isize - d.max(0)) as usize;
    (lo, hi)
}

fn conv3x3(input: &[f64], cin: usize, s: usize, w: &[f64], b: &[f64], cout: usize) -> Vec<f64> {
    let s2 = s * s;
    let mut out = vec![0.0; cout * s2];
    for o in 0..cout {
        let plane = &mut out[o * s2..(o + 1) * s2];
        plane.fill(b[o]);
        for i in 0..cin {
            let inp = &input[i * s2..(i + 1) * s2];
            for ky in 0..3 {
                let dy = ky as isize - 1;
                let (ylo, yhi) = tap_range(dy, s);
                for kx in 0..3 {
                    let dx = kx as isize - 1;
                    let (xlo, xhi) = tap_range(dx, s);
                    let wt = w[((o * cin + i) * 3 + ky) * 3 + kx];
                    if wt == 0.0 {
                        continue;
                    }
                    for y in ylo..yhi {
                        let src_row = (y as isize + dy) as usize * s;
                        let dst = &mut plane[y * s + xlo..y * s + xhi];
                        let src = &inp[(src_row as isize + xlo as isize + dx) as usize..][..xhi - xlo];
                        for (d, v) in dst.iter_mut().zip(src) {
                            *d += wt * v;
                        }
                    }
                }
            }
        }
    }
    out
}

/// Accumulates weight and bias gradients; returns the input gradient when
/// `want_input` is set (empty otherwise).
#[allow(clippy::too_many_arguments)]
fn conv3x3_backward(
    input: &[f64],
    cin: usize,
    s: usize,
    w: &[f64],
    cout: usize,
    dz: &[f64],
    gw: &mut [f64],
    gb: &mut [f64],
    want_input: bool,
) -> Vec<f64> {
    let s2 = s * s;
    let mut din = if want_input { vec![0.0; cin * s2] } else { Vec::new() };
    for o in 0..cout {
        let dplane = &dz[o * s2..(o + 1) * s2];
        gb[o] += dplane.iter().sum::<f64>();
        for i in 0..cin {
            let inp = &input[i * s2..(i + 1) * s2];
            for ky in 0..3 {
                let dy = ky as isize - 1;
                let (ylo, yhi) = tap_range(dy, s);
                for kx in 0..3 {
                    let dx = kx as isize - 1;
                    let (xlo, xhi) = tap_range(dx, s);
                    let widx = ((o * cin + i) * 3 + ky) * 3 + kx;
                    let mut acc = 0.0;
                    for y in ylo..yhi {
                        let src = ((y as isize + dy) as usize * s) as isize + xlo as isize + dx;
                        let d = &dplane[y * s + xlo..y * s + xhi];
                        let v = &inp[src as usize..][..xhi - xlo];
                        acc += d.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
                    }
                    gw[widx] += acc;
                    if want_input {
                        let wt = w[widx];
                        if wt == 0.0 {
                            continue;
                        }
                        let dplane_in = &mut din[i * s2..(i + 1) * s2];
                        for y in ylo..yhi {
                            let src = ((y as isize + dy) as usize * s) as isize + xlo as isize + dx;
                            let d = &dplane[y * s + xlo..y * s + xhi];
                            for (t, g) in dplane_in[src as usize..][..xhi - xlo].iter_mut().zip(d) {
                                *t += wt * g;
                            }
                        }
                    }
                }
            }
        }
    }
    din
}

/// ReLU then 2×2 max-pool (floor). Returns pooled planes and, per output,
/// the in-plane index of the winning input (first maximum).
fn relu_maxpool(z: &[f64], channels: usize, s: usize) -> (Vec<f64>, Vec<u32>) {
    let p = s / 2;
    let mut out = Vec::with_capacity(channels * p * p);
    let mut arg = Vec::with_capacity(channels * p * p);
    for c in 0..channels {
        let plane = &z[c * s * s..(c + 1) * s * s];
        for py in 0..p {
            for px in 0..p {
                let mut best_i = (2 * py) * s + 2 * px;
                let mut best = plane[best_i].max(0.0);
                for (dy, dx) in [(0, 1), (1, 0), (1, 1)] {
                    let i = (2 * py + dy) * s + 2 * px + dx;
                    let v = plane[i].max(0.0);
                    if v > best {
                        best = v;
                        best_i = i;
                    }
                }
                out.push(best);
                arg.push(best_i as u32);
            }
        }
    }
    (out, arg)
}
