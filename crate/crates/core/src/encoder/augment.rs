//! Pitch-preserving time-domain augmentation: white noise, a random
//! linear-phase FIR equalizer and a random gain.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::audio::{add_noise, AudioBuffer};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentConfig {
    /// SNR drawn uniformly from this range; `(inf, inf)` disables noise.
    pub snr_db_range: (f64, f64),
    /// Odd FIR length.
    pub fir_taps: usize,
    pub fir_control_points: usize,
    /// Control-point gains are uniform in `[-fir_max_db, fir_max_db]`.
    pub fir_max_db: f64,
    pub gain_db_range: (f64, f64),
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            snr_db_range: (10.0, 30.0),
            fir_taps: 65,
            fir_control_points: 8,
            fir_max_db: 6.0,
            gain_db_range: (-6.0, 6.0),
        }
    }
}

impl AugmentConfig {
    /// Configuration under which [`augment`] returns its input unchanged.
    pub fn identity() -> Self {
        Self {
            snr_db_range: (f64::INFINITY, f64::INFINITY),
            fir_max_db: 0.0,
            gain_db_range: (0.0, 0.0),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.snr_db_range;
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::invalid(format!("bad SNR range {lo}..{hi}")));
        }
        let (glo, ghi) = self.gain_db_range;
        if !(glo.is_finite() && ghi.is_finite() && glo <= ghi) {
            return Err(Error::invalid(format!("bad gain range {glo}..{ghi}")));
        }
        if self.fir_taps.is_multiple_of(2) {
            return Err(Error::invalid(format!("FIR length {} must be odd", self.fir_taps)));
        }
        if self.fir_control_points == 0 {
            return Err(Error::invalid("need at least one FIR control point"));
        }
        if !(self.fir_max_db >= 0.0 && self.fir_max_db.is_finite()) {
            return Err(Error::invalid("FIR gain range must be non-negative"));
        }
        Ok(())
    }
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

/// Linear-phase FIR by frequency sampling.
///
/// `controls_db` are gains at equally spaced frequencies from DC to Nyquist,
/// linearly interpolated in dB across the band.
pub fn design_fir(controls_db: &[f64], n_taps: usize) -> Vec<f64> {
    assert!(n_taps % 2 == 1 && !controls_db.is_empty());
    let half = (n_taps - 1) / 2;
    let gain_at = |pos: f64| -> f64 {
        // pos in [0, 1] across the band
        let db = if controls_db.len() == 1 {
            controls_db[0]
        } else {
            let x = pos * (controls_db.len() - 1) as f64;
            let i = (x.floor() as usize).min(controls_db.len() - 2);
            let frac = x - i as f64;
            (1.0 - frac) * controls_db[i] + frac * controls_db[i + 1]
        };
        10f64.powf(db / 20.0)
    };
    let n = n_taps as f64;
    let mags: Vec<f64> = (0..=half)
        .map(|k| gain_at((2.0 * k as f64 / n).min(1.0)))
        .collect();
    (0..n_taps)
        .map(|t| {
            let m = t as f64 - half as f64;
            let sum: f64 = mags[1..]
                .iter()
                .enumerate()
                .map(|(k, h)| 2.0 * h * (2.0 * PI * (k + 1) as f64 * m / n).cos())
                .sum();
            (mags[0] + sum) / n
        })
        .collect()
}

/// Zero-phase application of an odd-length linear-phase FIR (output aligned with input).
pub fn apply_fir(x: &[f64], taps: &[f64]) -> Vec<f64> {
    let half = taps.len() / 2;
    (0..x.len())
        .map(|n| {
            taps.iter()
                .enumerate()
                .filter_map(|(k, h)| {
                    let idx = n as i64 + half as i64 - k as i64;
                    (idx >= 0 && (idx as usize) < x.len()).then(|| h * x[idx as usize])
                })
                .sum()
        })
        .collect()
}

/// Noise, then random FIR, then random gain; deterministic per `seed`.
pub fn augment(buf: &AudioBuffer, cfg: &AugmentConfig, seed: u64) -> Result<AudioBuffer> {
    cfg.validate()?;
    if buf.len() <= cfg.fir_taps {
        return Err(Error::invalid(format!(
            "frame of {} samples is not longer than the {}-tap FIR",
            buf.len(),
            cfg.fir_taps
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let snr = uniform(&mut rng, cfg.snr_db_range);
    let noise_seed: u64 = rng.random();
    let noisy = if snr.is_finite() && buf.power() > 0.0 {
        add_noise(buf, snr, noise_seed)?
    } else {
        buf.clone()
    };

    let controls: Vec<f64> = (0..cfg.fir_control_points)
        .map(|_| uniform(&mut rng, (-cfg.fir_max_db, cfg.fir_max_db)))
        .collect();
    let gain = 10f64.powf(uniform(&mut rng, cfg.gain_db_range) / 20.0);
    let filtered = if controls.iter().all(|&c| c == 0.0) {
        noisy.into_samples()
    } else {
        apply_fir(noisy.samples(), &design_fir(&controls, cfg.fir_taps))
    };
    AudioBuffer::new(filtered.into_iter().map(|v| v * gain).collect(), buf.sample_rate())
}
