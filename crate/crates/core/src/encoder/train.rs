//! Objectives, optimizer and training loops for the Toeplitz encoder.
//!
//! Every batch element draws its randomness from a ChaCha stream keyed by
//! `(seed, step, index)`, and gradients are reduced in batch order, so a run
//! is reproducible from its seed alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::augment::{augment, AugmentConfig};
use super::loss::{cross_entropy_grad, equivariance_grad, gaussian_target, sce_grad, DEFAULT_HUBER_DELTA};
use super::{softmax_backward, ToeplitzEncoder};
use crate::audio::{resample_shift, Annotation, AudioBuffer};
use crate::error::{Error, Result};
use crate::kernels::KernelBank;
use crate::scorer::{Scorer, ScorerConfig};

/// How the pitch-shifted view of a training frame is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftMode {
    /// Resample the audio and recompute its scores.
    Resample,
    /// Translate the clean score vector by `k` semitones worth of bins.
    BinTranslate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Base of the linear pitch mapping; one bin step scales it by `alpha`.
    pub alpha: f64,
    pub w_equiv: f64,
    pub w_sce: f64,
    pub w_inv: f64,
    pub huber_delta: f64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub batch_size: usize,
    pub steps: usize,
    pub shift_range_semitones: usize,
    pub shift_mode: ShiftMode,
    pub augment: AugmentConfig,
    /// Width of the supervised Gaussian target, in bins.
    pub sigma_bins: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            alpha: 2f64.powf(1.0 / 36.0),
            w_equiv: 1.0,
            w_sce: 1.0,
            w_inv: 1.0,
            huber_delta: DEFAULT_HUBER_DELTA,
            lr: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            batch_size: 256,
            steps: 1000,
            shift_range_semitones: 6,
            shift_mode: ShiftMode::Resample,
            augment: AugmentConfig::default(),
            sigma_bins: 1.0,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self, bins_per_semitone: usize, out_bins: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::invalid(msg));
        if !(self.alpha > 1.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must exceed 1, got {}", self.alpha));
        }
        for (name, w) in [("w_equiv", self.w_equiv), ("w_sce", self.w_sce), ("w_inv", self.w_inv)] {
            if !(w >= 0.0 && w.is_finite()) {
                return bad(format!("{name} must be non-negative, got {w}"));
            }
        }
        if self.huber_delta.is_nan() || self.huber_delta <= 0.0 {
            return bad(format!("huber delta must be positive, got {}", self.huber_delta));
        }
        if !(self.lr >= 0.0 && self.lr.is_finite()) {
            return bad(format!("learning rate must be non-negative, got {}", self.lr));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return bad("Adam betas must lie in [0, 1)".into());
        }
        if self.batch_size == 0 {
            return bad("batch size must be positive".into());
        }
        if self.shift_range_semitones * bins_per_semitone >= out_bins {
            return bad(format!(
                "shift range of {} semitones exceeds the {out_bins}-bin output",
                self.shift_range_semitones
            ));
        }
        if self.shift_range_semitones > 24 {
            return bad("shift range is limited to 24 semitones".into());
        }
        if self.sigma_bins.is_nan() || self.sigma_bins < 0.0 {
            return bad("sigma must be non-negative".into());
        }
        self.augment.validate()
    }
}

/// Adam with bias correction.
#[derive(Debug, Clone)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(n_params: usize, lr: f64, beta1: f64, beta2: f64) -> Self {
        Self {
            lr,
            beta1,
            beta2,
            eps: 1e-8,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for ((p, g), (m, v)) in params
            .iter_mut()
            .zip(grad)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            *p -= self.lr * (*m / c1) / ((*v / c2).sqrt() + self.eps);
        }
    }
}

/// Translates a score vector by `d` bins, filling vacated bins with zero.
pub fn translate_bins(scores: &[f64], d: i64) -> Vec<f64> {
    let n = scores.len() as i64;
    (0..n)
        .map(|i| {
            let src = i - d;
            if (0..n).contains(&src) {
                scores[src as usize]
            } else {
                0.0
            }
        })
        .collect()
}

/// Clean, pitch-shifted and augmented score vectors for one training frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SslItem {
    pub scores: Vec<f64>,
    pub shifted: Vec<f64>,
    pub augmented: Vec<f64>,
    /// Shift of `shifted` relative to `scores`, in bins.
    pub k_bins: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupervisedItem {
    pub scores: Vec<f64>,
    pub target: Vec<f64>,
}

/// Batch-mean weighted self-supervised loss and its gradient with respect to the taps.
pub fn ssl_objective(enc: &ToeplitzEncoder, items: &[SslItem], cfg: &TrainConfig) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; enc.param_count()];
    let mut total = 0.0;
    for item in items {
        let y = enc.forward(&item.scores);
        let y_shift = enc.forward(&item.shifted);
        let y_aug = enc.forward(&item.augmented);

        let eq = equivariance_grad(&y, &y_shift, item.k_bins, cfg.alpha, cfg.huber_delta);
        let sce = sce_grad(&y, &y_shift, item.k_bins);
        let inv = sce_grad(&y, &y_aug, 0);
        total += cfg.w_equiv * eq.value + cfg.w_sce * sce.value + cfg.w_inv * inv.value;

        let combine = |parts: &[(&[f64], f64)]| -> Vec<f64> {
            (0..y.len())
                .map(|i| parts.iter().map(|(g, w)| w * g[i]).sum())
                .collect()
        };
        let dy = combine(&[
            (&eq.d_first, cfg.w_equiv),
            (&sce.d_first, cfg.w_sce),
            (&inv.d_first, cfg.w_inv),
        ]);
        let dy_shift = combine(&[(&eq.d_second, cfg.w_equiv), (&sce.d_second, cfg.w_sce)]);
        let dy_aug: Vec<f64> = inv.d_second.iter().map(|g| cfg.w_inv * g).collect();

        enc.accumulate_tap_grad(&item.scores, &softmax_backward(&y, &dy), &mut grad);
        enc.accumulate_tap_grad(&item.shifted, &softmax_backward(&y_shift, &dy_shift), &mut grad);
        enc.accumulate_tap_grad(&item.augmented, &softmax_backward(&y_aug, &dy_aug), &mut grad);
    }
    let n = items.len().max(1) as f64;
    grad.iter_mut().for_each(|g| *g /= n);
    (total / n, grad)
}

/// Batch-mean cross-entropy against fixed targets and its gradient.
pub fn supervised_objective(enc: &ToeplitzEncoder, items: &[SupervisedItem]) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; enc.param_count()];
    let mut total = 0.0;
    for item in items {
        let y = enc.forward(&item.scores);
        let (value, dy) = cross_entropy_grad(&item.target, &y);
        total += value;
        enc.accumulate_tap_grad(&item.scores, &softmax_backward(&y, &dy), &mut grad);
    }
    let n = items.len().max(1) as f64;
    grad.iter_mut().for_each(|g| *g /= n);
    (total / n, grad)
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub encoder: ToeplitzEncoder,
    /// Batch-mean total loss at every step.
    pub history: Vec<f64>,
}

fn sample_rng(seed: u64, step: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((step as u64) << 24) | index as u64);
    rng
}

fn common_sample_rate<'a>(mut rates: impl Iterator<Item = &'a AudioBuffer>) -> Result<u32> {
    let first = rates
        .next()
        .ok_or_else(|| Error::invalid("training corpus is empty"))?
        .sample_rate();
    if let Some(other) = rates.find(|b| b.sample_rate() != first) {
        return Err(Error::invalid(format!(
            "corpus mixes sample rates {first} Hz and {} Hz",
            other.sample_rate()
        )));
    }
    Ok(first)
}

fn check_finite(step: usize, loss: f64, grad: &[f64]) -> Result<()> {
    if !loss.is_finite() {
        return Err(Error::Diverged {
            step,
            detail: format!("loss is {loss}"),
        });
    }
    if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
        return Err(Error::Diverged {
            step,
            detail: format!("gradient of tap {i} is {}", grad[i]),
        });
    }
    Ok(())
}

/// Builds the three views of one frame centered on `center` in `clip`.
fn ssl_item(
    scorer: &mut Scorer<'_>,
    clip: &AudioBuffer,
    center: isize,
    k: i64,
    cfg: &TrainConfig,
    bins_per_semitone: usize,
    aug_seed: u64,
) -> Result<SslItem> {
    let frame_len = scorer.fft_len() + cfg.augment.fir_taps + 1;
    let scores = scorer.score_frame(clip, center)?.scores;
    let k_bins = k * bins_per_semitone as i64;

    let shifted = match cfg.shift_mode {
        ShiftMode::BinTranslate => translate_bins(&scores, k_bins),
        ShiftMode::Resample => {
            let ratio = 2f64.powf(k as f64 / 12.0);
            let src_len = (frame_len as f64 * ratio).ceil() as usize + 256;
            let src = clip.segment(center, src_len);
            let shifted = resample_shift(&src, k as f64)?;
            let new_center = ((src_len / 2) as f64 / ratio).round() as isize;
            scorer.score_frame(&shifted, new_center)?.scores
        }
    };

    let frame = clip.segment(center, frame_len);
    let augmented_audio = augment(&frame, &cfg.augment, aug_seed)?;
    let augmented = scorer
        .score_frame(&augmented_audio, (frame_len / 2) as isize)?
        .scores;
    Ok(SslItem {
        scores,
        shifted,
        augmented,
        k_bins,
    })
}

/// Self-supervised training on unlabeled audio.
///
/// Each step draws `batch_size` frames at random positions, a random integer
/// shift in `[-k_max, k_max]` semitones and a random augmentation for each,
/// then takes one Adam step on the weighted sum of the equivariance,
/// shifted cross-entropy and invariance losses.
pub fn train_self_supervised(
    corpus: &[AudioBuffer],
    bank: &KernelBank,
    scorer_cfg: &ScorerConfig,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    let bps = bank.grid.bins_per_semitone();
    cfg.validate(bps, bank.len())?;
    let sample_rate = common_sample_rate(corpus.iter())?;
    if corpus.iter().all(|c| c.is_empty()) {
        return Err(Error::invalid("training corpus has no samples"));
    }
    let mut scorer = Scorer::new(bank, *scorer_cfg, sample_rate)?;
    let mut enc = ToeplitzEncoder::initialized(bank.len(), cfg.seed);
    let mut adam = Adam::new(enc.param_count(), cfg.lr, cfg.beta1, cfg.beta2);
    let k_max = cfg.shift_range_semitones as i64;
    let mut history = Vec::with_capacity(cfg.steps);

    for step in 0..cfg.steps {
        let mut items = Vec::with_capacity(cfg.batch_size);
        for index in 0..cfg.batch_size {
            let mut rng = sample_rng(cfg.seed, step, index);
            let clip = loop {
                let c = &corpus[rng.random_range(0..corpus.len())];
                if !c.is_empty() {
                    break c;
                }
            };
            let center = rng.random_range(0..clip.len()) as isize;
            let k = rng.random_range(-k_max..=k_max);
            let aug_seed: u64 = rng.random();
            items.push(ssl_item(&mut scorer, clip, center, k, cfg, bps, aug_seed)?);
        }
        let (loss, grad) = ssl_objective(&enc, &items, cfg);
        check_finite(step, loss, &grad)?;
        history.push(loss);
        adam.step(enc.taps_mut(), &grad);
    }
    Ok(TrainOutcome {
        encoder: enc,
        history,
    })
}

/// Supervised training against Gaussian-blurred ground-truth bins.
pub fn train_supervised(
    corpus: &[(AudioBuffer, Annotation)],
    bank: &KernelBank,
    scorer_cfg: &ScorerConfig,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    cfg.validate(bank.grid.bins_per_semitone(), bank.len())?;
    let sample_rate = common_sample_rate(corpus.iter().map(|(b, _)| b))?;
    // (clip index, annotation frame) of every voiced reference frame.
    let voiced: Vec<(usize, usize)> = corpus
        .iter()
        .enumerate()
        .flat_map(|(ci, (_, ann))| {
            (0..ann.f0.len())
                .filter(|&j| ann.is_voiced(j))
                .map(move |j| (ci, j))
        })
        .collect();
    if voiced.is_empty() {
        return Err(Error::invalid("supervised training needs voiced annotated frames"));
    }
    let mut scorer = Scorer::new(bank, *scorer_cfg, sample_rate)?;
    let mut enc = ToeplitzEncoder::initialized(bank.len(), cfg.seed);
    let mut adam = Adam::new(enc.param_count(), cfg.lr, cfg.beta1, cfg.beta2);
    let mut history = Vec::with_capacity(cfg.steps);
    let fs = sample_rate as f64;

    for step in 0..cfg.steps {
        let mut items = Vec::with_capacity(cfg.batch_size);
        for index in 0..cfg.batch_size {
            let mut rng = sample_rng(cfg.seed, step, index);
            let (ci, j) = voiced[rng.random_range(0..voiced.len())];
            let (clip, ann) = &corpus[ci];
            let center = (j as f64 * ann.hop_seconds * fs).round() as isize;
            let scores = scorer.score_frame(clip, center)?.scores;
            let target = gaussian_target(bank.grid.bin_of(ann.f0[j]), bank.len(), cfg.sigma_bins);
            items.push(SupervisedItem { scores, target });
        }
        let (loss, grad) = supervised_objective(&enc, &items);
        check_finite(step, loss, &grad)?;
        history.push(loss);
        adam.step(enc.taps_mut(), &grad);
    }
    Ok(TrainOutcome {
        encoder: enc,
        history,
    })
}
