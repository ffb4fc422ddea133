//! Windowed FFT analysis, auditory frequency scales, and resampling of
//! magnitude spectra onto a shared frequency grid.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use realfft::{RealFftPlanner, RealToComplex};

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

/// Number of sampling frequencies on the default grid.
pub const GRID_POINTS: usize = 1024;

const MEL_F_SP: f64 = 200.0 / 3.0;
const MEL_MIN_LOG_HZ: f64 = 1000.0;
const MEL_MIN_LOG_MEL: f64 = 15.0;
// ln(6.4) / 27
const MEL_LOGSTEP: f64 = 0.068_751_777_420_949_12;

/// Slaney mel: linear below 1 kHz, logarithmic above.
pub fn mel_slaney(f: f64) -> f64 {
    if f < MEL_MIN_LOG_HZ {
        f / MEL_F_SP
    } else {
        MEL_MIN_LOG_MEL + (f / MEL_MIN_LOG_HZ).ln() / MEL_LOGSTEP
    }
}

pub fn mel_slaney_inv(m: f64) -> f64 {
    if m < MEL_MIN_LOG_MEL {
        m * MEL_F_SP
    } else {
        MEL_MIN_LOG_HZ * ((m - MEL_MIN_LOG_MEL) * MEL_LOGSTEP).exp()
    }
}

/// Glasberg-Moore ERB-rate.
pub fn erb_scale(f: f64) -> f64 {
    21.4 * (1.0 + 0.00437 * f).log10()
}

pub fn erb_scale_inv(e: f64) -> f64 {
    (10f64.powf(e / 21.4) - 1.0) / 0.00437
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrequencyScale {
    MelSlaney,
    Erb,
}

impl FrequencyScale {
    pub fn forward(self, hz: f64) -> f64 {
        match self {
            FrequencyScale::MelSlaney => mel_slaney(hz),
            FrequencyScale::Erb => erb_scale(hz),
        }
    }

    pub fn inverse(self, v: f64) -> f64 {
        match self {
            FrequencyScale::MelSlaney => mel_slaney_inv(v),
            FrequencyScale::Erb => erb_scale_inv(v),
        }
    }
}

impl fmt::Display for FrequencyScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrequencyScale::MelSlaney => "mel",
            FrequencyScale::Erb => "erb",
        })
    }
}

/// Sampling frequencies equally spaced on an auditory scale.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    freqs: Vec<f64>,
    scale: FrequencyScale,
}

/// Identity of a grid, cheap to copy into spectra for compatibility checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridKey {
    scale: FrequencyScale,
    len: usize,
    lo_bits: u64,
    hi_bits: u64,
}

impl FrequencyGrid {
    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn scale(&self) -> FrequencyScale {
        self.scale
    }

    pub fn f_lo(&self) -> f64 {
        self.freqs[0]
    }

    pub fn f_hi(&self) -> f64 {
        self.freqs[self.freqs.len() - 1]
    }

    pub fn key(&self) -> GridKey {
        GridKey {
            scale: self.scale,
            len: self.freqs.len(),
            lo_bits: self.f_lo().to_bits(),
            hi_bits: self.f_hi().to_bits(),
        }
    }
}

/// `n` points equally spaced in `scale` units between `f_lo` and `f_hi`.
/// Endpoints are exactly `f_lo` and `f_hi`.
pub fn build_grid(scale: FrequencyScale, f_lo: f64, f_hi: f64, n: usize) -> Result<FrequencyGrid> {
    if !(f_lo > 0.0 && f_lo < f_hi && f_hi.is_finite()) {
        return Err(Error::invalid(format!(
            "frequency grid needs 0 < f_lo < f_hi, got {f_lo}..{f_hi}"
        )));
    }
    if n < 2 {
        return Err(Error::invalid("frequency grid needs at least 2 points"));
    }
    let (lo, hi) = (scale.forward(f_lo), scale.forward(f_hi));
    let step = (hi - lo) / (n - 1) as f64;
    let mut freqs: Vec<f64> = (0..n).map(|i| scale.inverse(lo + step * i as f64)).collect();
    freqs[0] = f_lo;
    freqs[n - 1] = f_hi;
    Ok(FrequencyGrid { freqs, scale })
}

/// Magnitude spectrum sampled on a [`FrequencyGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSpectrum {
    pub mag: Vec<f64>,
    grid: GridKey,
}

impl SampledSpectrum {
    /// Wraps magnitudes already sampled on `grid`.
    pub fn new(mag: Vec<f64>, grid: &FrequencyGrid) -> Result<Self> {
        if mag.len() != grid.len() {
            return Err(Error::invalid(format!(
                "{} magnitudes for a {}-point grid",
                mag.len(),
                grid.len()
            )));
        }
        if mag.iter().any(|m| !(*m >= 0.0 && m.is_finite())) {
            return Err(Error::invalid("magnitudes must be finite and non-negative"));
        }
        Ok(Self { mag, grid: grid.key() })
    }

    pub fn grid_key(&self) -> GridKey {
        self.grid
    }
}

/// Periodic Hann window, peak at index `len / 2`.
pub fn hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / len as f64).cos())
        .collect()
}

#[derive(Debug, Clone, Copy)]
enum GridTap {
    Bins { k: usize, frac: f64 },
    Zero,
}

/// Reusable FFT plan, windows and scratch for one (grid, sample rate, FFT size).
///
/// Holds mutable work buffers, so each thread needs its own instance.
pub struct SpectrumAnalyzer {
    fft_len: usize,
    sample_rate: u32,
    grid_key: GridKey,
    taps: Vec<GridTap>,
    fft: Arc<dyn RealToComplex<f64>>,
    input: Vec<f64>,
    output: Vec<realfft::num_complex::Complex<f64>>,
    scratch: Vec<realfft::num_complex::Complex<f64>>,
    magnitudes: Vec<f64>,
    windows: Vec<(usize, Vec<f64>)>,
}

impl fmt::Debug for SpectrumAnalyzer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectrumAnalyzer")
            .field("fft_len", &self.fft_len)
            .field("sample_rate", &self.sample_rate)
            .finish_non_exhaustive()
    }
}

impl SpectrumAnalyzer {
    pub fn new(grid: &FrequencyGrid, sample_rate: u32, fft_len: usize) -> Result<Self> {
        if !fft_len.is_power_of_two() || fft_len < 2 {
            return Err(Error::invalid(format!("FFT length {fft_len} is not a power of two")));
        }
        if sample_rate == 0 {
            return Err(Error::invalid("sample rate must be positive"));
        }
        let fs = sample_rate as f64;
        let last_bin = fft_len / 2;
        let taps = grid
            .freqs()
            .iter()
            .map(|&f| {
                if f > fs / 2.0 {
                    return GridTap::Zero;
                }
                let pos = f * fft_len as f64 / fs;
                let k = (pos.floor() as usize).min(last_bin);
                if k == last_bin {
                    GridTap::Bins { k: last_bin - 1, frac: 1.0 }
                } else {
                    GridTap::Bins { k, frac: pos - k as f64 }
                }
            })
            .collect();
        let fft = RealFftPlanner::<f64>::new().plan_fft_forward(fft_len);
        let input = fft.make_input_vec();
        let output = fft.make_output_vec();
        let scratch = fft.make_scratch_vec();
        Ok(Self {
            fft_len,
            sample_rate,
            grid_key: grid.key(),
            taps,
            fft,
            input,
            output,
            scratch,
            magnitudes: vec![0.0; last_bin + 1],
            windows: Vec::new(),
        })
    }

    pub fn fft_len(&self) -> usize {
        self.fft_len
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    fn window(&mut self, len: usize) -> usize {
        if let Some(i) = self.windows.iter().position(|(l, _)| *l == len) {
            return i;
        }
        self.windows.push((len, hann(len)));
        self.windows.len() - 1
    }

    /// Hann-windowed magnitude spectrum of `window_len` samples centered on
    /// `center`, written into `out` (one value per grid point).
    pub fn analyze_into(
        &mut self,
        samples: &[f64],
        center: isize,
        window_len: usize,
        out: &mut [f64],
    ) -> Result<()> {
        if window_len == 0 || window_len > self.fft_len {
            return Err(Error::invalid(format!(
                "window of {window_len} samples does not fit FFT length {}",
                self.fft_len
            )));
        }
        let wi = self.window(window_len);
        let window = &self.windows[wi].1;
        let start = center - (window_len / 2) as isize;
        for (i, slot) in self.input.iter_mut().enumerate() {
            *slot = if i < window_len {
                let idx = start + i as isize;
                if idx >= 0 && (idx as usize) < samples.len() {
                    samples[idx as usize] * window[i]
                } else {
                    0.0
                }
            } else {
                0.0
            };
        }
        self.fft
            .process_with_scratch(&mut self.input, &mut self.output, &mut self.scratch)
            .map_err(|e| Error::invalid(format!("FFT failed: {e}")))?;
        for (m, c) in self.magnitudes.iter_mut().zip(&self.output) {
            *m = c.norm();
        }
        for (o, tap) in out.iter_mut().zip(&self.taps) {
            *o = match *tap {
                GridTap::Bins { k, frac } => {
                    (1.0 - frac) * self.magnitudes[k] + frac * self.magnitudes[k + 1]
                }
                GridTap::Zero => 0.0,
            };
        }
        Ok(())
    }

    pub fn analyze(
        &mut self,
        buf: &AudioBuffer,
        center: isize,
        window_len: usize,
    ) -> Result<SampledSpectrum> {
        if buf.sample_rate() != self.sample_rate {
            return Err(Error::invalid(format!(
                "analyzer built for {} Hz, buffer is {} Hz",
                self.sample_rate,
                buf.sample_rate()
            )));
        }
        let mut mag = vec![0.0; self.taps.len()];
        self.analyze_into(buf.samples(), center, window_len, &mut mag)?;
        Ok(SampledSpectrum {
            mag,
            grid: self.grid_key,
        })
    }
}

/// One-shot version of [`SpectrumAnalyzer::analyze`].
pub fn windowed_spectrum(
    buf: &AudioBuffer,
    grid: &FrequencyGrid,
    center_sample: isize,
    window_len: usize,
    fft_len: usize,
) -> Result<SampledSpectrum> {
    SpectrumAnalyzer::new(grid, buf.sample_rate(), fft_len)?.analyze(buf, center_sample, window_len)
}
