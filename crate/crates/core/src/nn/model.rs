//! Conv1D -> ReLU -> max-pool -> LSTM -> dense softmax classifier.
//!
//! All trainable parameters live in one flat vector; [`Layout`] maps each
//! tensor to its range. Gradients use the same layout, which keeps the
//! optimizer, checkpointing and finite-difference checks tensor-agnostic.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::layers::{conv1d_relu_into, lstm_step, maxpool_into, pooled_len, softmax_in_place, LstmWeights};
use super::loss::weighted_ce_class;
use super::{HyperParams, NnError};
use crate::dataset::{ClassWeights, FeatureMatrix};

pub const POOL_WIDTH: usize = 2;

/// Rows per gradient work unit. Partial gradients are summed in chunk
/// order, so results do not depend on the thread count.
const GRAD_CHUNK: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    pub input_len: usize,
    pub conv_kernel: usize,
    pub conv_filters: usize,
    pub pool_width: usize,
    pub lstm_units: usize,
    pub class_names: Vec<String>,
    /// Hash of the encoder column order the model was trained against.
    pub column_hash: u64,
}

impl Architecture {
    pub fn from_hyper(hp: &HyperParams, input_len: usize, class_names: Vec<String>, column_hash: u64) -> Self {
        Self {
            input_len,
            conv_kernel: hp.conv_kernel,
            conv_filters: hp.conv_filters,
            pool_width: POOL_WIDTH,
            lstm_units: hp.lstm_units,
            class_names,
            column_hash,
        }
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn conv_len(&self) -> usize {
        self.input_len + 1 - self.conv_kernel
    }

    pub fn seq_len(&self) -> usize {
        pooled_len(self.conv_len(), self.pool_width)
    }

    pub fn validate(&self) -> Result<(), NnError> {
        if self.conv_kernel == 0 || self.conv_kernel > self.input_len {
            return Err(NnError::KernelTooLong {
                kernel: self.conv_kernel,
                input: self.input_len,
            });
        }
        if self.conv_filters == 0 || self.lstm_units == 0 || self.pool_width == 0 || self.n_classes() < 2 {
            return Err(NnError::InvalidHyperParams(format!("degenerate architecture {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub conv_w: Range<usize>,
    pub conv_b: Range<usize>,
    pub lstm_wx: Range<usize>,
    pub lstm_wh: Range<usize>,
    pub lstm_b: Range<usize>,
    pub dense_w: Range<usize>,
    pub dense_b: Range<usize>,
}

impl Layout {
    pub fn new(a: &Architecture) -> Self {
        let (f, k, h, c) = (a.conv_filters, a.conv_kernel, a.lstm_units, a.n_classes());
        let mut at = 0;
        let mut take = |n: usize| {
            let r = at..at + n;
            at += n;
            r
        };
        Self {
            conv_w: take(f * k),
            conv_b: take(f),
            lstm_wx: take(4 * h * f),
            lstm_wh: take(4 * h * h),
            lstm_b: take(4 * h),
            dense_w: take(c * h),
            dense_b: take(c),
        }
    }

    pub fn total(&self) -> usize {
        self.dense_b.end
    }

    /// Tensor name and range, in storage order.
    pub fn tensors(&self) -> [(&'static str, Range<usize>); 7] {
        [
            ("conv_w", self.conv_w.clone()),
            ("conv_b", self.conv_b.clone()),
            ("lstm_wx", self.lstm_wx.clone()),
            ("lstm_wh", self.lstm_wh.clone()),
            ("lstm_b", self.lstm_b.clone()),
            ("dense_w", self.dense_w.clone()),
            ("dense_b", self.dense_b.clone()),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvLstmModel {
    pub arch: Architecture,
    pub params: Vec<f64>,
    layout: Layout,
}

/// Activations of one forward pass, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    conv: Vec<f64>,
    pooled: Vec<f64>,
    argmax: Vec<usize>,
    gates: Vec<f64>,
    c: Vec<f64>,
    h: Vec<f64>,
    pub probs: Vec<f64>,
}

/// Per-row backward buffers.
struct Scratch {
    dlogits: Vec<f64>,
    dh: Vec<f64>,
    dh_next: Vec<f64>,
    dc: Vec<f64>,
    da: Vec<f64>,
    dpooled: Vec<f64>,
    dconv: Vec<f64>,
}

impl ConvLstmModel {
    /// All-zero parameters (uniform predictions).
    pub fn zeros(arch: Architecture) -> Result<Self, NnError> {
        arch.validate()?;
        let layout = Layout::new(&arch);
        Ok(Self {
            params: vec![0.0; layout.total()],
            arch,
            layout,
        })
    }

    /// Glorot-uniform weights per tensor, zero biases, forget-gate bias 1.
    pub fn init(arch: Architecture, seed: u64) -> Result<Self, NnError> {
        let mut m = Self::zeros(arch)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, k, h, c) = (m.arch.conv_filters, m.arch.conv_kernel, m.arch.lstm_units, m.arch.n_classes());
        let l = m.layout.clone();
        let fill = |p: &mut [f64], fan_in: usize, fan_out: usize, rng: &mut ChaCha8Rng| {
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for v in p {
                *v = rng.random_range(-limit..limit);
            }
        };
        fill(&mut m.params[l.conv_w.clone()], k, k * f, &mut rng);
        fill(&mut m.params[l.lstm_wx.clone()], f, 4 * h, &mut rng);
        fill(&mut m.params[l.lstm_wh.clone()], h, 4 * h, &mut rng);
        fill(&mut m.params[l.dense_w.clone()], h, c, &mut rng);
        m.params[l.lstm_b.start + h..l.lstm_b.start + 2 * h].fill(1.0);
        Ok(m)
    }

    pub fn from_params(arch: Architecture, params: Vec<f64>) -> Result<Self, NnError> {
        arch.validate()?;
        let layout = Layout::new(&arch);
        if params.len() != layout.total() {
            return Err(NnError::CheckpointFormat(format!(
                "{} parameters for an architecture needing {}",
                params.len(),
                layout.total()
            )));
        }
        Ok(Self { arch, params, layout })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub fn new_cache(&self) -> ForwardCache {
        let a = &self.arch;
        let (f, h, t) = (a.conv_filters, a.lstm_units, a.seq_len());
        ForwardCache {
            conv: vec![0.0; a.conv_len() * f],
            pooled: vec![0.0; t * f],
            argmax: vec![0; t * f],
            gates: vec![0.0; t * 4 * h],
            c: vec![0.0; (t + 1) * h],
            h: vec![0.0; (t + 1) * h],
            probs: vec![0.0; a.n_classes()],
        }
    }

    fn new_scratch(&self) -> Scratch {
        let a = &self.arch;
        let (f, h) = (a.conv_filters, a.lstm_units);
        Scratch {
            dlogits: vec![0.0; a.n_classes()],
            dh: vec![0.0; h],
            dh_next: vec![0.0; h],
            dc: vec![0.0; h],
            da: vec![0.0; 4 * h],
            dpooled: vec![0.0; a.seq_len() * f],
            dconv: vec![0.0; a.conv_len() * f],
        }
    }

    fn lstm_weights(&self) -> LstmWeights<'_> {
        LstmWeights {
            wx: &self.params[self.layout.lstm_wx.clone()],
            wh: &self.params[self.layout.lstm_wh.clone()],
            b: &self.params[self.layout.lstm_b.clone()],
            units: self.arch.lstm_units,
        }
    }

    /// Forward pass for one encoded row; probabilities land in `cache.probs`.
    pub fn forward(&self, x: &[f64], cache: &mut ForwardCache) {
        debug_assert_eq!(x.len(), self.arch.input_len);
        let a = &self.arch;
        let l = &self.layout;
        let (f, h) = (a.conv_filters, a.lstm_units);
        conv1d_relu_into(x, &self.params[l.conv_w.clone()], &self.params[l.conv_b.clone()], a.conv_kernel, &mut cache.conv);
        maxpool_into(&cache.conv, a.conv_len(), f, a.pool_width, &mut cache.pooled, &mut cache.argmax);
        let w = self.lstm_weights();
        for t in 0..a.seq_len() {
            let (h_prev, h_rest) = cache.h.split_at_mut((t + 1) * h);
            let (c_prev, c_rest) = cache.c.split_at_mut((t + 1) * h);
            lstm_step(
                &w,
                &cache.pooled[t * f..(t + 1) * f],
                &h_prev[t * h..],
                &c_prev[t * h..],
                &mut cache.gates[t * 4 * h..(t + 1) * 4 * h],
                &mut c_rest[..h],
                &mut h_rest[..h],
            );
        }
        let h_last = &cache.h[a.seq_len() * h..];
        let dw = &self.params[l.dense_w.clone()];
        let db = &self.params[l.dense_b.clone()];
        for (k, z) in cache.probs.iter_mut().enumerate() {
            *z = db[k] + dw[k * h..(k + 1) * h].iter().zip(h_last).map(|(p, q)| p * q).sum::<f64>();
        }
        softmax_in_place(&mut cache.probs);
    }

    /// Backpropagates a weighted cross-entropy loss for one row and adds
    /// `scale * gradient` into `grad`. Returns the row loss.
    #[allow(clippy::too_many_arguments)]
    fn accumulate_row(
        &self,
        x: &[f64],
        class: usize,
        weight: f64,
        scale: f64,
        cache: &mut ForwardCache,
        s: &mut Scratch,
        grad: &mut [f64],
    ) -> f64 {
        self.forward(x, cache);
        let loss = weighted_ce_class(&cache.probs, class, weight, &mut s.dlogits);
        if weight == 0.0 {
            return loss;
        }
        for g in s.dlogits.iter_mut() {
            *g *= scale;
        }
        let a = &self.arch;
        let l = &self.layout;
        let (f, h, steps, kernel) = (a.conv_filters, a.lstm_units, a.seq_len(), a.conv_kernel);
        let p = &self.params;

        // Dense layer.
        let h_last = &cache.h[steps * h..];
        let dense_w = &p[l.dense_w.clone()];
        s.dh.fill(0.0);
        for (k, &dz) in s.dlogits.iter().enumerate() {
            let row = l.dense_w.start + k * h;
            for j in 0..h {
                grad[row + j] += dz * h_last[j];
                s.dh[j] += dz * dense_w[k * h + j];
            }
            grad[l.dense_b.start + k] += dz;
        }

        // LSTM, backpropagation through time.
        let wx = &p[l.lstm_wx.clone()];
        let wh = &p[l.lstm_wh.clone()];
        s.dc.fill(0.0);
        s.dpooled.fill(0.0);
        for t in (0..steps).rev() {
            let gates = &cache.gates[t * 4 * h..(t + 1) * 4 * h];
            let c_prev = &cache.c[t * h..(t + 1) * h];
            let c_t = &cache.c[(t + 1) * h..(t + 2) * h];
            let h_prev = &cache.h[t * h..(t + 1) * h];
            let x_t = &cache.pooled[t * f..(t + 1) * f];
            for j in 0..h {
                let (i, fg, g, o) = (gates[j], gates[h + j], gates[2 * h + j], gates[3 * h + j]);
                let tc = c_t[j].tanh();
                let dh = s.dh[j];
                let d_o = dh * tc;
                let dc = s.dc[j] + dh * o * (1.0 - tc * tc);
                s.da[j] = dc * g * i * (1.0 - i);
                s.da[h + j] = dc * c_prev[j] * fg * (1.0 - fg);
                s.da[2 * h + j] = dc * i * (1.0 - g * g);
                s.da[3 * h + j] = d_o * o * (1.0 - o);
                s.dc[j] = dc * fg;
            }
            s.dh_next.fill(0.0);
            let dx = &mut s.dpooled[t * f..(t + 1) * f];
            for (r, &da) in s.da.iter().enumerate() {
                if da == 0.0 {
                    continue;
                }
                let gx = &mut grad[l.lstm_wx.start + r * f..l.lstm_wx.start + (r + 1) * f];
                for (gv, &xv) in gx.iter_mut().zip(x_t) {
                    *gv += da * xv;
                }
                for (dv, &wv) in dx.iter_mut().zip(&wx[r * f..(r + 1) * f]) {
                    *dv += da * wv;
                }
                let gh = &mut grad[l.lstm_wh.start + r * h..l.lstm_wh.start + (r + 1) * h];
                for (gv, &hv) in gh.iter_mut().zip(h_prev) {
                    *gv += da * hv;
                }
                for (dv, &wv) in s.dh_next.iter_mut().zip(&wh[r * h..(r + 1) * h]) {
                    *dv += da * wv;
                }
                grad[l.lstm_b.start + r] += da;
            }
            std::mem::swap(&mut s.dh, &mut s.dh_next);
        }

        // Max-pool routes each gradient to its window winner; ReLU masks.
        s.dconv.fill(0.0);
        for (&src, &d) in cache.argmax.iter().zip(&s.dpooled) {
            if cache.conv[src] > 0.0 {
                s.dconv[src] += d;
            }
        }

        // Convolution.
        for t in 0..a.conv_len() {
            let window = &x[t..t + kernel];
            for fi in 0..f {
                let d = s.dconv[t * f + fi];
                if d == 0.0 {
                    continue;
                }
                let gw = &mut grad[l.conv_w.start + fi * kernel..l.conv_w.start + (fi + 1) * kernel];
                for (gv, &xv) in gw.iter_mut().zip(window) {
                    *gv += d * xv;
                }
                grad[l.conv_b.start + fi] += d;
            }
        }
        loss
    }

    fn check_input(&self, x: &FeatureMatrix) -> Result<(), NnError> {
        if x.n_cols != self.arch.input_len {
            return Err(NnError::LengthMismatch {
                expected: self.arch.input_len,
                found: x.n_cols,
            });
        }
        if x.column_hash != self.arch.column_hash {
            return Err(NnError::ColumnHashMismatch {
                model: self.arch.column_hash,
                data: x.column_hash,
            });
        }
        Ok(())
    }

    fn check_labels(&self, labels: &[usize]) -> Result<(), NnError> {
        let n_classes = self.arch.n_classes();
        match labels.iter().find(|&&y| y >= n_classes) {
            Some(&label) => Err(NnError::LabelOutOfRange { label, n_classes }),
            None => Ok(()),
        }
    }

    /// Mean weighted cross-entropy over `rows` and its gradient.
    pub fn loss_and_gradient(
        &self,
        x: &FeatureMatrix,
        labels: &[usize],
        rows: &[usize],
        weights: &ClassWeights,
    ) -> Result<(f64, Vec<f64>), NnError> {
        self.check_input(x)?;
        self.check_labels(labels)?;
        if rows.is_empty() {
            return Err(NnError::EmptySet("batch"));
        }
        let scale = 1.0 / rows.len() as f64;
        let partials: Vec<(f64, Vec<f64>)> = rows
            .par_chunks(GRAD_CHUNK)
            .map(|chunk| {
                let mut cache = self.new_cache();
                let mut scratch = self.new_scratch();
                let mut grad = vec![0.0; self.n_params()];
                let mut loss = 0.0;
                for &i in chunk {
                    let y = labels[i];
                    loss += self.accumulate_row(x.row(i), y, weights.get(y), scale, &mut cache, &mut scratch, &mut grad);
                }
                (loss, grad)
            })
            .collect();
        let mut grad = vec![0.0; self.n_params()];
        let mut loss = 0.0;
        for (l, g) in partials {
            loss += l;
            for (a, b) in grad.iter_mut().zip(&g) {
                *a += b;
            }
        }
        Ok((loss * scale, grad))
    }

    /// Mean weighted cross-entropy over `rows` (no gradient).
    pub fn loss(&self, x: &FeatureMatrix, labels: &[usize], rows: &[usize], weights: &ClassWeights) -> Result<f64, NnError> {
        self.check_input(x)?;
        self.check_labels(labels)?;
        if rows.is_empty() {
            return Err(NnError::EmptySet("batch"));
        }
        let sums: Vec<f64> = rows
            .par_chunks(GRAD_CHUNK)
            .map(|chunk| {
                let mut cache = self.new_cache();
                let mut dl = vec![0.0; self.arch.n_classes()];
                chunk
                    .iter()
                    .map(|&i| {
                        self.forward(x.row(i), &mut cache);
                        let y = labels[i];
                        weighted_ce_class(&cache.probs, y, weights.get(y), &mut dl)
                    })
                    .sum::<f64>()
            })
            .collect();
        Ok(sums.iter().sum::<f64>() / rows.len() as f64)
    }

    /// Class probabilities, one row per input row.
    pub fn predict_proba(&self, x: &FeatureMatrix) -> Result<Vec<Vec<f64>>, NnError> {
        self.check_input(x)?;
        let rows: Vec<usize> = (0..x.n_rows).collect();
        Ok(rows
            .par_chunks(64)
            .flat_map_iter(|chunk| {
                let mut cache = self.new_cache();
                chunk
                    .iter()
                    .map(|&i| {
                        self.forward(x.row(i), &mut cache);
                        cache.probs.clone()
                    })
                    .collect::<Vec<_>>()
            })
            .collect())
    }

    /// Arg-max class per row (ties go to the lowest index).
    pub fn predict(&self, x: &FeatureMatrix) -> Result<Vec<usize>, NnError> {
        Ok(self
            .predict_proba(x)?
            .iter()
            .map(|p| super::layers::argmax(p))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arch(d: usize, f: usize, h: usize, k: usize) -> Architecture {
        Architecture {
            input_len: d,
            conv_kernel: 3,
            conv_filters: f,
            pool_width: 2,
            lstm_units: h,
            class_names: (0..k).map(|i| format!("c{i}")).collect(),
            column_hash: 0xfeed,
        }
    }

    fn random_batch(d: usize, n: usize, k: usize, seed: u64) -> (FeatureMatrix, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..n * d).map(|_| rng.random_range(0.0..1.0)).collect();
        let labels = (0..n).map(|_| rng.random_range(0..k)).collect();
        (FeatureMatrix::new(d, data, 0xfeed), labels)
    }

    #[test]
    fn layout_matches_shapes() {
        let a = arch(10, 4, 8, 5);
        let l = Layout::new(&a);
        assert_eq!(l.conv_w.len(), 12);
        assert_eq!(l.lstm_wx.len(), 4 * 8 * 4);
        assert_eq!(l.lstm_wh.len(), 4 * 8 * 8);
        assert_eq!(l.dense_w.len(), 5 * 8);
        assert_eq!(l.total(), 12 + 4 + 128 + 256 + 32 + 40 + 5);
        assert_eq!((a.conv_len(), a.seq_len()), (8, 4));
    }

    #[test]
    fn init_sets_forget_bias_and_bounds() {
        let a = arch(12, 4, 8, 2);
        let m = ConvLstmModel::init(a, 3).unwrap();
        let l = m.layout();
        let b = &m.params[l.lstm_b.clone()];
        assert_eq!(&b[..8], &[0.0; 8]);
        assert_eq!(&b[8..16], &[1.0; 8]);
        let limit = (6.0f64 / (8 + 32) as f64).sqrt();
        assert!(m.params[l.lstm_wh.clone()].iter().all(|v| v.abs() < limit));
        assert!(m.params[l.conv_b.clone()].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_model_predicts_uniform() {
        let m = ConvLstmModel::zeros(arch(9, 4, 8, 5)).unwrap();
        let (x, _) = random_batch(9, 6, 5, 1);
        for p in m.predict_proba(&x).unwrap() {
            assert!(p.iter().all(|v| (v - 0.2).abs() < 1e-12));
        }
    }

    #[test]
    fn rejects_width_and_hash_mismatch() {
        let m = ConvLstmModel::zeros(arch(9, 4, 8, 2)).unwrap();
        let (x, _) = random_batch(8, 2, 2, 1);
        assert!(matches!(m.predict(&x), Err(NnError::LengthMismatch { .. })));
        let (mut x, _) = random_batch(9, 2, 2, 1);
        x.column_hash = 1;
        assert!(matches!(m.predict(&x), Err(NnError::ColumnHashMismatch { .. })));
    }

    #[test]
    fn zero_weights_give_zero_gradient() {
        let m = ConvLstmModel::init(arch(11, 3, 5, 3), 2).unwrap();
        let (x, y) = random_batch(11, 8, 3, 4);
        let rows: Vec<usize> = (0..8).collect();
        let (_, g) = m.loss_and_gradient(&x, &y, &rows, &ClassWeights(vec![0.0; 3])).unwrap();
        assert!(g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn duplicated_row_has_single_row_gradient() {
        let m = ConvLstmModel::init(arch(11, 3, 5, 3), 2).unwrap();
        let (x, y) = random_batch(11, 4, 3, 4);
        let w = ClassWeights::uniform(3);
        let (l1, g1) = m.loss_and_gradient(&x, &y, &[2], &w).unwrap();
        let (l2, g2) = m.loss_and_gradient(&x, &y, &[2, 2, 2], &w).unwrap();
        assert!((l1 - l2).abs() < 1e-14);
        for (a, b) in g1.iter().zip(&g2) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn batch_loss_matches_gradient_pass() {
        let m = ConvLstmModel::init(arch(20, 4, 6, 2), 9).unwrap();
        let (x, y) = random_batch(20, 40, 2, 5);
        let rows: Vec<usize> = (0..40).collect();
        let w = ClassWeights(vec![0.7, 2.0]);
        let (l1, _) = m.loss_and_gradient(&x, &y, &rows, &w).unwrap();
        let l2 = m.loss(&x, &y, &rows, &w).unwrap();
        assert!((l1 - l2).abs() < 1e-12);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let m = ConvLstmModel::init(arch(15, 4, 8, 5), 11).unwrap();
        let (x, _) = random_batch(15, 30, 5, 6);
        for p in m.predict_proba(&x).unwrap() {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
}
