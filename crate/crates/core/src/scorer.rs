//! Per-frame candidate scores from power-of-two analysis windows.
//!
//! Each candidate's ideal window `W = 8 fs / f_c` is bracketed by the power-of-two
//! lengths around it; the two single-window scores are blended linearly in
//! `log2` of the window length. Windows longer than the configured maximum are
//! replaced by the maximum, which trades low-pitch accuracy for latency.

use crate::audio::{frame_count, AudioBuffer};
use crate::error::{Error, Result};
use crate::kernels::KernelBank;
use crate::spectral::{SampledSpectrum, SpectrumAnalyzer};

pub const DEFAULT_MAX_WINDOW: usize = 16384;
pub const DEFAULT_HOP_SECONDS: f64 = 0.01;
const MIN_WINDOW: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScorerConfig {
    max_window_samples: usize,
    interpolate_windows: bool,
    hop_seconds: f64,
}

impl ScorerConfig {
    pub fn new(max_window_samples: usize, interpolate_windows: bool, hop_seconds: f64) -> Result<Self> {
        if max_window_samples < 2 || !max_window_samples.is_power_of_two() {
            return Err(Error::invalid(format!(
                "max window {max_window_samples} must be a power of two >= 2"
            )));
        }
        if !(hop_seconds > 0.0 && hop_seconds.is_finite()) {
            return Err(Error::invalid(format!("hop must be positive, got {hop_seconds}")));
        }
        Ok(Self {
            max_window_samples,
            interpolate_windows,
            hop_seconds,
        })
    }

    pub fn max_window_samples(&self) -> usize {
        self.max_window_samples
    }

    pub fn interpolate_windows(&self) -> bool {
        self.interpolate_windows
    }

    pub fn hop_seconds(&self) -> f64 {
        self.hop_seconds
    }

    pub fn with_hop(self, hop_seconds: f64) -> Result<Self> {
        Self::new(self.max_window_samples, self.interpolate_windows, hop_seconds)
    }

    pub fn with_max_window(self, max_window_samples: usize) -> Result<Self> {
        Self::new(max_window_samples, self.interpolate_windows, self.hop_seconds)
    }
}

impl Default for ScorerConfig {
    fn default() -> Self {
        Self {
            max_window_samples: DEFAULT_MAX_WINDOW,
            interpolate_windows: true,
            hop_seconds: DEFAULT_HOP_SECONDS,
        }
    }
}

/// Scores of every candidate at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreFrame {
    pub time_s: f64,
    pub scores: Vec<f64>,
}

/// Which analysis windows a candidate's score is taken from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowChoice {
    Single { len: usize },
    Blend { lo: usize, hi: usize, weight_hi: f64 },
}

/// Window choice for a candidate with ideal window `ideal_samples`.
pub fn choose_windows(ideal_samples: f64, cfg: &ScorerConfig) -> WindowChoice {
    let cap = cfg.max_window_samples;
    let log_w = ideal_samples.max(MIN_WINDOW as f64).log2();
    let lo_exp = log_w.floor();
    let lambda = log_w - lo_exp;
    let lo = (2f64.powf(lo_exp) as usize).min(cap);
    let hi = (2f64.powf(log_w.ceil()) as usize).min(cap);
    if !cfg.interpolate_windows || lo == hi || lambda == 0.0 {
        let len = if lambda == 0.0 { lo } else { hi };
        return WindowChoice::Single { len };
    }
    WindowChoice::Blend {
        lo,
        hi,
        weight_hi: lambda,
    }
}

/// Normalized inner product between a kernel and the square-rooted spectrum.
fn score_against(kernel: &[f64], sqrt_mag: &[f64], inv_norm: f64) -> f64 {
    if inv_norm == 0.0 {
        return 0.0;
    }
    kernel.iter().zip(sqrt_mag).map(|(k, m)| k * m).sum::<f64>() * inv_norm
}

/// Score of candidate `c` against one sampled spectrum. Zero spectra score 0.
pub fn score_single_window(spec: &SampledSpectrum, bank: &KernelBank, c: usize) -> Result<f64> {
    if spec.grid_key() != bank.freq_grid.key() {
        return Err(Error::GridMismatch);
    }
    let kernel = bank
        .kernels
        .get(c)
        .ok_or_else(|| Error::invalid(format!("candidate index {c} out of range")))?;
    let total: f64 = spec.mag.iter().sum();
    let sqrt_mag: Vec<f64> = spec.mag.iter().map(|m| m.sqrt()).collect();
    let inv = if total > 0.0 { 1.0 / total.sqrt() } else { 0.0 };
    Ok(score_against(kernel, &sqrt_mag, inv))
}

/// Reusable scorer for one kernel bank, configuration and sample rate.
#[derive(Debug)]
pub struct Scorer<'a> {
    bank: &'a KernelBank,
    cfg: ScorerConfig,
    sample_rate: u32,
    plans: Vec<(usize, usize, f64)>,
    lengths: Vec<usize>,
    analyzer: SpectrumAnalyzer,
    sqrt_mags: Vec<Vec<f64>>,
    inv_norms: Vec<f64>,
}

impl<'a> Scorer<'a> {
    pub fn new(bank: &'a KernelBank, cfg: ScorerConfig, sample_rate: u32) -> Result<Self> {
        if bank.is_empty() {
            return Err(Error::invalid("kernel bank is empty"));
        }
        let fs = sample_rate as f64;
        let choices: Vec<WindowChoice> = bank
            .ideal_window_s
            .iter()
            .map(|t| choose_windows(t * fs, &cfg))
            .collect();
        let mut lengths: Vec<usize> = choices
            .iter()
            .flat_map(|c| match *c {
                WindowChoice::Single { len } => vec![len],
                WindowChoice::Blend { lo, hi, .. } => vec![lo, hi],
            })
            .collect();
        lengths.sort_unstable();
        lengths.dedup();
        let index = |len: usize| lengths.binary_search(&len).expect("length registered");
        let plans = choices
            .iter()
            .map(|c| match *c {
                WindowChoice::Single { len } => (index(len), index(len), 0.0),
                WindowChoice::Blend { lo, hi, weight_hi } => (index(lo), index(hi), weight_hi),
            })
            .collect();
        let fft_len = *lengths.last().expect("at least one window");
        let analyzer = SpectrumAnalyzer::new(&bank.freq_grid, sample_rate, fft_len)?;
        let grid_len = bank.freq_grid.len();
        Ok(Self {
            bank,
            cfg,
            sample_rate,
            plans,
            sqrt_mags: vec![vec![0.0; grid_len]; lengths.len()],
            inv_norms: vec![0.0; lengths.len()],
            lengths,
            analyzer,
        })
    }

    pub fn config(&self) -> &ScorerConfig {
        &self.cfg
    }

    pub fn bank(&self) -> &KernelBank {
        self.bank
    }

    /// Shared FFT length (the longest window in use).
    pub fn fft_len(&self) -> usize {
        self.analyzer.fft_len()
    }

    /// Distinct analysis window lengths, ascending.
    pub fn window_lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    /// Scores for every candidate at `center`, written into `out`.
    pub fn score_into(&mut self, samples: &[f64], center: isize, out: &mut [f64]) -> Result<()> {
        for (i, &len) in self.lengths.iter().enumerate() {
            let mag = &mut self.sqrt_mags[i];
            self.analyzer.analyze_into(samples, center, len, mag)?;
            let total: f64 = mag.iter().sum();
            mag.iter_mut().for_each(|m| *m = m.sqrt());
            self.inv_norms[i] = if total > 0.0 { 1.0 / total.sqrt() } else { 0.0 };
        }
        for ((slot, kernel), &(lo, hi, w)) in out.iter_mut().zip(&self.bank.kernels).zip(&self.plans) {
            let z_lo = score_against(kernel, &self.sqrt_mags[lo], self.inv_norms[lo]);
            *slot = if lo == hi {
                z_lo
            } else {
                let z_hi = score_against(kernel, &self.sqrt_mags[hi], self.inv_norms[hi]);
                (1.0 - w) * z_lo + w * z_hi
            };
        }
        Ok(())
    }

    pub fn score_frame(&mut self, buf: &AudioBuffer, center_sample: isize) -> Result<ScoreFrame> {
        if buf.sample_rate() != self.sample_rate {
            return Err(Error::invalid(format!(
                "scorer built for {} Hz, buffer is {} Hz",
                self.sample_rate,
                buf.sample_rate()
            )));
        }
        let mut scores = vec![0.0; self.bank.len()];
        self.score_into(buf.samples(), center_sample, &mut scores)?;
        Ok(ScoreFrame {
            time_s: center_sample as f64 / self.sample_rate as f64,
            scores,
        })
    }

    /// Frames centered at `0, hop, 2 hop, ...`; `ceil(duration / hop)` of them.
    pub fn score_track(&mut self, buf: &AudioBuffer) -> Result<Vec<ScoreFrame>> {
        let hop = self.cfg.hop_seconds;
        let fs = self.sample_rate as f64;
        let n = frame_count(buf.len(), buf.sample_rate(), hop);
        (0..n)
            .map(|j| {
                let t = j as f64 * hop;
                let mut frame = self.score_frame(buf, (t * fs).round() as isize)?;
                frame.time_s = t;
                Ok(frame)
            })
            .collect()
    }
}

pub fn score_frame(
    buf: &AudioBuffer,
    center_sample: isize,
    bank: &KernelBank,
    cfg: &ScorerConfig,
) -> Result<ScoreFrame> {
    Scorer::new(bank, *cfg, buf.sample_rate())?.score_frame(buf, center_sample)
}

pub fn score_track(buf: &AudioBuffer, bank: &KernelBank, cfg: &ScorerConfig) -> Result<Vec<ScoreFrame>> {
    Scorer::new(bank, *cfg, buf.sample_rate())?.score_track(buf)
}
