//! Toeplitz encoder over candidate scores.
//!
//! The layer is a single "same"-size 1-D convolution over the candidate axis
//! followed by a softmax. Because every output bin sees its neighbourhood
//! through the same filter, shifting the input by `d` bins shifts the logits
//! by `d` bins away from the borders.

mod augment;
mod loss;
mod train;
mod weights;

pub use augment::{apply_fir, augment, design_fir, AugmentConfig};
pub use loss::{
    cross_entropy, cross_entropy_grad, entropy, equivariance_grad, gaussian_target, huber,
    loss_equivariance, loss_invariance, loss_sce, phi, sce_grad, voicing_from_entropy, PairLoss,
    DEFAULT_HUBER_DELTA, LOG_EPS,
};
pub use train::{
    ssl_objective, supervised_objective, train_self_supervised, train_supervised, translate_bins,
    Adam, ShiftMode, SslItem, SupervisedItem, TrainConfig, TrainOutcome,
};
pub use weights::{load_weights, save_weights, weights_from_bytes, weights_to_bytes};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};
use crate::kernels::KernelBank;
use crate::scorer::{Scorer, ScorerConfig};
use crate::tracker::{pick_peak, PitchFrame, PitchTrack};

/// Filter length of the default encoder.
pub const TAP_COUNT: usize = 647;
/// Candidate bins of the default encoder.
pub const BINS: usize = 295;

#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzEncoder {
    taps: Vec<f64>,
    in_bins: usize,
    out_bins: usize,
}

impl ToeplitzEncoder {
    pub fn new(taps: Vec<f64>, bins: usize) -> Result<Self> {
        if taps.len().is_multiple_of(2) {
            return Err(Error::invalid(format!("tap count {} must be odd", taps.len())));
        }
        if bins == 0 {
            return Err(Error::invalid("encoder needs at least one bin"));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("encoder taps must be finite"));
        }
        Ok(Self {
            taps,
            in_bins: bins,
            out_bins: bins,
        })
    }

    /// Centered delta: logits equal the input scores.
    pub fn identity(bins: usize) -> Self {
        let mut taps = vec![0.0; TAP_COUNT];
        taps[TAP_COUNT / 2] = 1.0;
        Self::new(taps, bins).expect("valid identity")
    }

    pub fn zeros(bins: usize) -> Self {
        Self::new(vec![0.0; TAP_COUNT], bins).expect("valid zeros")
    }

    /// Identity plus N(0, 1e-3) jitter on every tap.
    pub fn initialized(bins: usize, seed: u64) -> Self {
        let mut enc = Self::identity(bins);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 1e-3).expect("valid normal");
        enc.taps.iter_mut().for_each(|t| *t += noise.sample(&mut rng));
        enc
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn taps_mut(&mut self) -> &mut [f64] {
        &mut self.taps
    }

    pub fn in_bins(&self) -> usize {
        self.in_bins
    }

    pub fn out_bins(&self) -> usize {
        self.out_bins
    }

    pub fn param_count(&self) -> usize {
        self.taps.len()
    }

    fn half(&self) -> usize {
        self.taps.len() / 2
    }

    /// Input index range touched by output bin `j`, with the tap index of its first element.
    fn support(&self, j: usize) -> (usize, usize, usize) {
        let half = self.half();
        let lo = j.saturating_sub(half);
        let hi = (j + self.taps.len() - half).min(self.in_bins);
        (lo, hi, lo + half - j)
    }

    /// Pre-softmax values: `z[j] = sum_m taps[m] * s[j + m - half]`, zero-padded.
    pub fn logits(&self, scores: &[f64]) -> Vec<f64> {
        assert_eq!(scores.len(), self.in_bins, "score vector length");
        (0..self.out_bins)
            .map(|j| {
                let (lo, hi, m0) = self.support(j);
                scores[lo..hi]
                    .iter()
                    .zip(&self.taps[m0..])
                    .map(|(s, t)| s * t)
                    .sum()
            })
            .collect()
    }

    pub fn forward(&self, scores: &[f64]) -> Vec<f64> {
        softmax(&self.logits(scores))
    }

    /// Adds `d loss / d taps` for one input given `d loss / d logits`.
    pub fn accumulate_tap_grad(&self, scores: &[f64], d_logits: &[f64], grad: &mut [f64]) {
        for (j, &dz) in d_logits.iter().enumerate() {
            if dz == 0.0 {
                continue;
            }
            let (lo, hi, m0) = self.support(j);
            for (g, s) in grad[m0..].iter_mut().zip(&scores[lo..hi]) {
                *g += dz * s;
            }
        }
    }
}

pub fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Gradient through softmax: `dz = y * (dy - <y, dy>)`.
pub fn softmax_backward(y: &[f64], dy: &[f64]) -> Vec<f64> {
    let dot: f64 = y.iter().zip(dy).map(|(a, b)| a * b).sum();
    y.iter().zip(dy).map(|(yi, dyi)| yi * (dyi - dot)).collect()
}

/// Tracks with the encoder applied to every score frame.
///
/// Confidence is the peak probability; voicing comes from the output entropy.
pub fn encoder_track(
    buf: &AudioBuffer,
    bank: &KernelBank,
    cfg: &ScorerConfig,
    enc: &ToeplitzEncoder,
    refine: bool,
    entropy_threshold: f64,
) -> Result<PitchTrack> {
    if enc.in_bins() != bank.len() {
        return Err(Error::invalid(format!(
            "encoder expects {} bins, kernel bank has {}",
            enc.in_bins(),
            bank.len()
        )));
    }
    let frames = Scorer::new(bank, *cfg, buf.sample_rate())?.score_track(buf)?;
    Ok(PitchTrack {
        hop_seconds: cfg.hop_seconds(),
        frames: frames
            .iter()
            .map(|fr| {
                let y = enc.forward(&fr.scores);
                let (f0_hz, confidence) = pick_peak(&y, &bank.grid, refine);
                PitchFrame {
                    f0_hz,
                    confidence,
                    voiced: voicing_from_entropy(&y, entropy_threshold),
                }
            })
            .collect(),
    })
}
