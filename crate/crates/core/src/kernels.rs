//! Pitch-candidate grid and sawtooth-inspired spectral kernels.
//!
//! A kernel for candidate `f_c` has positive cosine lobes at its harmonics,
//! half-height negative valleys halfway between them, and a `1/sqrt(i)`
//! envelope over harmonic number `i`. The prime variant keeps only the first
//! and the prime harmonics, which removes most of the support the kernel of
//! a subharmonic shares with the true pitch.

use std::fmt;

use crate::error::{Error, Result};
use crate::spectral::{build_grid, FrequencyGrid, FrequencyScale, GRID_POINTS};

pub const DEFAULT_F_MIN: f64 = 27.5;
pub const DEFAULT_F_MAX: f64 = 8055.0;
pub const DEFAULT_BINS_PER_SEMITONE: usize = 3;

/// Geometrically spaced pitch candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct PitchGrid {
    f_min: f64,
    f_max: f64,
    bins_per_semitone: usize,
    candidates: Vec<f64>,
}

impl PitchGrid {
    pub fn f_min(&self) -> f64 {
        self.f_min
    }

    pub fn f_max(&self) -> f64 {
        self.f_max
    }

    pub fn bins_per_semitone(&self) -> usize {
        self.bins_per_semitone
    }

    pub fn bins_per_octave(&self) -> usize {
        12 * self.bins_per_semitone
    }

    pub fn candidates(&self) -> &[f64] {
        &self.candidates
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Fractional bin index of `hz` (0 at `f_min`).
    pub fn bin_of(&self, hz: f64) -> f64 {
        self.bins_per_octave() as f64 * (hz / self.f_min).log2()
    }

    /// Frequency at a fractional bin index.
    pub fn hz_of(&self, bin: f64) -> f64 {
        self.f_min * 2f64.powf(bin / self.bins_per_octave() as f64)
    }

    /// Frequency grid spanning `0.25 * f_min` to `1.25 * f_max`.
    pub fn frequency_grid(&self, scale: FrequencyScale) -> Result<FrequencyGrid> {
        build_grid(scale, 0.25 * self.f_min, 1.25 * self.f_max, GRID_POINTS)
    }
}

impl Default for PitchGrid {
    fn default() -> Self {
        build_pitch_grid(DEFAULT_F_MIN, DEFAULT_F_MAX, DEFAULT_BINS_PER_SEMITONE)
            .expect("default pitch grid is valid")
    }
}

pub fn build_pitch_grid(f_min: f64, f_max: f64, bins_per_semitone: usize) -> Result<PitchGrid> {
    if !(f_min > 0.0 && f_min < f_max && f_max.is_finite()) {
        return Err(Error::invalid(format!(
            "pitch grid needs 0 < f_min < f_max, got {f_min}..{f_max}"
        )));
    }
    if bins_per_semitone == 0 {
        return Err(Error::invalid("bins per semitone must be at least 1"));
    }
    let per_octave = (12 * bins_per_semitone) as f64;
    let n = (per_octave * (f_max / f_min).log2() + 1e-9).floor() as usize + 1;
    let candidates = (0..n)
        .map(|i| f_min * 2f64.powf(i as f64 / per_octave))
        .collect();
    Ok(PitchGrid {
        f_min,
        f_max,
        bins_per_semitone,
        candidates,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelVariant {
    /// All integer harmonics.
    Swipe,
    /// First harmonic plus the prime harmonics.
    SwipePrime,
}

impl fmt::Display for KernelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelVariant::Swipe => "swipe",
            KernelVariant::SwipePrime => "swipe-prime",
        })
    }
}

fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Harmonic numbers the kernel of `variant` keeps, up to `highest`.
pub fn active_harmonics(variant: KernelVariant, highest: usize) -> Vec<usize> {
    (1..=highest)
        .filter(|&i| match variant {
            KernelVariant::Swipe => true,
            KernelVariant::SwipePrime => i == 1 || is_prime(i),
        })
        .collect()
}

/// Unnormalized kernel value at harmonic ratio `r = f / f_c`, given the
/// sorted active harmonics.
fn raw_kernel_value(r: f64, harmonics: &[usize]) -> f64 {
    // Nearest active harmonic; ties go to the lower one.
    let idx = harmonics.partition_point(|&h| (h as f64) < r);
    let nearest = match (idx.checked_sub(1).map(|i| harmonics[i]), harmonics.get(idx)) {
        (Some(lo), Some(&hi)) => {
            if r - lo as f64 <= hi as f64 - r {
                lo
            } else {
                hi
            }
        }
        (Some(lo), None) => lo,
        (None, Some(&hi)) => hi,
        (None, None) => return 0.0,
    };
    let d = (r - nearest as f64).abs();
    let envelope = 1.0 / (nearest as f64).sqrt();
    let shape = (2.0 * std::f64::consts::PI * r).cos();
    if d < 0.25 {
        envelope * shape
    } else if d < 0.75 {
        0.5 * envelope * shape
    } else {
        0.0
    }
}

/// Highest harmonic whose positive lobe ends at or below `f_hi`.
fn highest_harmonic(f_c: f64, f_hi: f64) -> usize {
    let n = (f_hi / f_c - 0.25 + 1e-12).floor();
    if n < 1.0 {
        0
    } else {
        n as usize
    }
}

/// Kernel for candidate `f_c` sampled at arbitrary frequencies, truncated at
/// harmonics whose lobe would extend past `f_hi`. Not normalized.
pub fn kernel_values(f_c: f64, freqs: &[f64], f_hi: f64, variant: KernelVariant) -> Result<Vec<f64>> {
    if !(f_c > 0.0 && f_c.is_finite()) {
        return Err(Error::invalid(format!("candidate frequency {f_c} must be positive")));
    }
    let highest = highest_harmonic(f_c, f_hi);
    if highest == 0 {
        return Err(Error::invalid(format!(
            "candidate {f_c} Hz has no harmonic lobe below {f_hi} Hz"
        )));
    }
    let harmonics = active_harmonics(variant, highest);
    Ok(freqs
        .iter()
        .map(|&f| raw_kernel_value(f / f_c, &harmonics))
        .collect())
}

/// Unit-L2-norm kernel for `f_c` on `freq_grid`.
pub fn kernel_for(f_c: f64, freq_grid: &FrequencyGrid, variant: KernelVariant) -> Result<Vec<f64>> {
    let mut k = kernel_values(f_c, freq_grid.freqs(), freq_grid.f_hi(), variant)?;
    let norm = k.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::invalid(format!(
            "kernel for {f_c} Hz has no support on the frequency grid"
        )));
    }
    k.iter_mut().for_each(|v| *v /= norm);
    Ok(k)
}

/// Kernels for every candidate of a pitch grid.
#[derive(Debug, Clone)]
pub struct KernelBank {
    pub grid: PitchGrid,
    pub freq_grid: FrequencyGrid,
    pub variant: KernelVariant,
    pub kernels: Vec<Vec<f64>>,
    /// Ideal analysis window `8 / f_c` in seconds.
    pub ideal_window_s: Vec<f64>,
}

impl KernelBank {
    pub fn len(&self) -> usize {
        self.kernels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kernels.is_empty()
    }
}

pub fn build_kernel_bank(
    grid: &PitchGrid,
    freq_grid: &FrequencyGrid,
    variant: KernelVariant,
) -> Result<KernelBank> {
    let kernels = grid
        .candidates()
        .iter()
        .map(|&f_c| kernel_for(f_c, freq_grid, variant))
        .collect::<Result<Vec<_>>>()?;
    Ok(KernelBank {
        grid: grid.clone(),
        freq_grid: freq_grid.clone(),
        variant,
        kernels,
        ideal_window_s: grid.candidates().iter().map(|f| 8.0 / f).collect(),
    })
}

/// Default bank: 295 candidates over 27.5-8055 Hz, 1024-point grid.
pub fn default_kernel_bank(variant: KernelVariant, scale: FrequencyScale) -> Result<KernelBank> {
    let grid = PitchGrid::default();
    let freq_grid = grid.frequency_grid(scale)?;
    build_kernel_bank(&grid, &freq_grid, variant)
}
