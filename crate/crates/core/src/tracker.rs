//! Peak picking, parabolic refinement, voicing and track assembly.

use crate::audio::AudioBuffer;
use crate::error::Result;
use crate::kernels::{KernelBank, PitchGrid};
use crate::scorer::{ScoreFrame, Scorer, ScorerConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchFrame {
    pub f0_hz: f64,
    pub confidence: f64,
    pub voiced: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PitchTrack {
    pub hop_seconds: f64,
    pub frames: Vec<PitchFrame>,
}

impl PitchTrack {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Index of the maximum; ties resolve to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Vertex offset (in bins) of the parabola through three equally spaced
/// points, clamped to half a bin.
pub fn parabolic_offset(left: f64, center: f64, right: f64) -> f64 {
    let curvature = left - 2.0 * center + right;
    if curvature >= 0.0 {
        return 0.0;
    }
    ((left - right) / (2.0 * curvature)).clamp(-0.5, 0.5)
}

/// Peak of a per-candidate vector as (frequency, peak value).
///
/// With `refine`, an interior peak is moved to the vertex of a parabola fitted
/// over the three bins around it; bins are equally spaced in log frequency.
pub fn pick_peak(values: &[f64], grid: &PitchGrid, refine: bool) -> (f64, f64) {
    let i = argmax(values);
    let mut bin = i as f64;
    if refine && i > 0 && i + 1 < values.len() {
        bin += parabolic_offset(values[i - 1], values[i], values[i + 1]);
    }
    (grid.hz_of(bin), values[i])
}

/// Best candidate of a score frame as (f0, confidence = max score).
pub fn pick_pitch(frame: &ScoreFrame, grid: &PitchGrid, refine: bool) -> (f64, f64) {
    pick_peak(&frame.scores, grid, refine)
}

/// Voiced iff the confidence strictly exceeds the threshold.
pub fn voicing_from_score(confidence: f64, threshold: f64) -> bool {
    confidence > threshold
}

pub fn track_from_frames(
    frames: &[ScoreFrame],
    grid: &PitchGrid,
    hop_seconds: f64,
    refine: bool,
    threshold: f64,
) -> PitchTrack {
    PitchTrack {
        hop_seconds,
        frames: frames
            .iter()
            .map(|fr| {
                let (f0_hz, confidence) = pick_pitch(fr, grid, refine);
                PitchFrame {
                    f0_hz,
                    confidence,
                    voiced: voicing_from_score(confidence, threshold),
                }
            })
            .collect(),
    }
}

pub fn track(
    buf: &AudioBuffer,
    bank: &KernelBank,
    cfg: &ScorerConfig,
    refine: bool,
    threshold: f64,
) -> Result<PitchTrack> {
    let frames = Scorer::new(bank, *cfg, buf.sample_rate())?.score_track(buf)?;
    Ok(track_from_frames(&frames, &bank.grid, cfg.hop_seconds(), refine, threshold))
}
