//! Forward primitives. The model's forward pass is built from the `*_into`
//! variants, which write into caller-owned buffers.

use super::NnError;

/// A sequence of `len` timesteps with `channels` values each, stored
/// timestep-major (`data[t * channels + c]`).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    pub len: usize,
    pub channels: usize,
    pub data: Vec<f64>,
}

impl FeatureMap {
    pub fn new(len: usize, channels: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), len * channels, "feature map shape");
        Self { len, channels, data }
    }

    #[inline]
    pub fn at(&self, t: usize, c: usize) -> f64 {
        self.data[t * self.channels + c]
    }

    pub fn step(&self, t: usize) -> &[f64] {
        &self.data[t * self.channels..(t + 1) * self.channels]
    }
}

/// Views an encoded feature row as a single-channel sequence of length `d`.
pub fn reshape_input(row: &[f64], d: usize) -> Result<FeatureMap, NnError> {
    if row.len() != d {
        return Err(NnError::LengthMismatch {
            expected: d,
            found: row.len(),
        });
    }
    Ok(FeatureMap::new(d, 1, row.to_vec()))
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Valid single-input-channel convolution with ReLU. `kernels` is
/// `filters x kernel` row-major; `out` is `(len - kernel + 1) x filters`.
pub fn conv1d_relu_into(x: &[f64], kernels: &[f64], bias: &[f64], kernel: usize, out: &mut [f64]) {
    let filters = bias.len();
    let out_len = x.len() + 1 - kernel;
    debug_assert_eq!(out.len(), out_len * filters);
    for t in 0..out_len {
        let window = &x[t..t + kernel];
        let row = &mut out[t * filters..(t + 1) * filters];
        for (f, y) in row.iter_mut().enumerate() {
            let w = &kernels[f * kernel..(f + 1) * kernel];
            let s: f64 = w.iter().zip(window).map(|(a, b)| a * b).sum::<f64>() + bias[f];
            *y = s.max(0.0);
        }
    }
}

pub fn conv1d_forward(x: &FeatureMap, kernels: &[f64], bias: &[f64], kernel: usize) -> Result<FeatureMap, NnError> {
    assert_eq!(x.channels, 1, "single input channel");
    assert_eq!(kernels.len(), bias.len() * kernel, "kernel shape");
    if kernel == 0 || kernel > x.len {
        return Err(NnError::KernelTooLong { kernel, input: x.len });
    }
    let out_len = x.len + 1 - kernel;
    let mut out = vec![0.0; out_len * bias.len()];
    conv1d_relu_into(&x.data, kernels, bias, kernel, &mut out);
    Ok(FeatureMap::new(out_len, bias.len(), out))
}

pub fn pooled_len(len: usize, width: usize) -> usize {
    len.div_ceil(width)
}

/// Non-overlapping max pooling per channel; a trailing partial window is
/// pooled on its own. `argmax` receives the flat index into `y` of each
/// winner (first index on ties).
pub fn maxpool_into(y: &[f64], len: usize, channels: usize, width: usize, out: &mut [f64], argmax: &mut [usize]) {
    let out_len = pooled_len(len, width);
    debug_assert_eq!(out.len(), out_len * channels);
    for p in 0..out_len {
        let start = p * width;
        let end = (start + width).min(len);
        for c in 0..channels {
            let mut best = start * channels + c;
            for t in start + 1..end {
                let k = t * channels + c;
                if y[k] > y[best] {
                    best = k;
                }
            }
            out[p * channels + c] = y[best];
            argmax[p * channels + c] = best;
        }
    }
}

pub fn maxpool1d(y: &FeatureMap, width: usize) -> FeatureMap {
    assert!(width >= 1, "pool width must be >= 1");
    let out_len = pooled_len(y.len, width);
    let mut out = vec![0.0; out_len * y.channels];
    let mut argmax = vec![0; out.len()];
    maxpool_into(&y.data, y.len, y.channels, width, &mut out, &mut argmax);
    FeatureMap::new(out_len, y.channels, out)
}

/// LSTM weights for one layer. Gate blocks are stacked in the order
/// input, forget, cell candidate, output; `wx` is `4H x input`, `wh` is
/// `4H x H`, `b` is `4H`.
#[derive(Debug, Clone, Copy)]
pub struct LstmWeights<'a> {
    pub wx: &'a [f64],
    pub wh: &'a [f64],
    pub b: &'a [f64],
    pub units: usize,
}

/// One recurrence step. Writes activated gates `[i, f, g, o]` into `gates`
/// and the new state into `c` / `h`.
#[inline]
pub fn lstm_step(
    w: &LstmWeights<'_>,
    x: &[f64],
    h_prev: &[f64],
    c_prev: &[f64],
    gates: &mut [f64],
    c: &mut [f64],
    h: &mut [f64],
) {
    let units = w.units;
    let n_in = x.len();
    for (r, a) in gates.iter_mut().enumerate() {
        let wx = &w.wx[r * n_in..(r + 1) * n_in];
        let wh = &w.wh[r * units..(r + 1) * units];
        *a = w.b[r]
            + wx.iter().zip(x).map(|(p, q)| p * q).sum::<f64>()
            + wh.iter().zip(h_prev).map(|(p, q)| p * q).sum::<f64>();
    }
    let (ig, rest) = gates.split_at_mut(units);
    let (fg, rest) = rest.split_at_mut(units);
    let (gg, og) = rest.split_at_mut(units);
    for j in 0..units {
        ig[j] = sigmoid(ig[j]);
        fg[j] = sigmoid(fg[j]);
        gg[j] = gg[j].tanh();
        og[j] = sigmoid(og[j]);
        c[j] = fg[j] * c_prev[j] + ig[j] * gg[j];
        h[j] = og[j] * c[j].tanh();
    }
}

/// Runs the recurrence from `h_0 = c_0 = 0` and returns `h_T`.
pub fn lstm_forward(seq: &FeatureMap, w: &LstmWeights<'_>) -> Vec<f64> {
    let units = w.units;
    assert_eq!(w.wx.len(), 4 * units * seq.channels, "wx shape");
    assert_eq!(w.wh.len(), 4 * units * units, "wh shape");
    assert_eq!(w.b.len(), 4 * units, "bias shape");
    let mut h = vec![0.0; units];
    let mut c = vec![0.0; units];
    let mut h_next = vec![0.0; units];
    let mut c_next = vec![0.0; units];
    let mut gates = vec![0.0; 4 * units];
    for t in 0..seq.len {
        lstm_step(w, seq.step(t), &h, &c, &mut gates, &mut c_next, &mut h_next);
        std::mem::swap(&mut h, &mut h_next);
        std::mem::swap(&mut c, &mut c_next);
    }
    h
}

/// In-place softmax with max subtraction.
pub fn softmax_in_place(z: &mut [f64]) {
    let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - m).exp();
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
}

/// `softmax(W h + b)` with `W` stored `n_classes x H` row-major.
pub fn dense_softmax(h: &[f64], w: &[f64], b: &[f64]) -> Vec<f64> {
    let units = h.len();
    assert_eq!(w.len(), b.len() * units, "dense shape");
    let mut z: Vec<f64> = b
        .iter()
        .enumerate()
        .map(|(k, bk)| bk + w[k * units..(k + 1) * units].iter().zip(h).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    softmax_in_place(&mut z);
    z
}

/// Index of the largest entry; the lowest index wins ties.
pub fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in p.iter().enumerate().skip(1) {
        if v > p[best] {
            best = k;
        }
    }
    best
}
