//! Raw pitch accuracy, voicing F-score and overall accuracy.

use std::fmt;

use crate::audio::{add_noise, AudioBuffer, Annotation};
use crate::error::{Error, Result};
use crate::tracker::PitchTrack;

/// Pitch tolerance for a correct frame, inclusive.
pub const CENTS_TOLERANCE: f64 = 50.0;

pub fn cents_diff(f_est: f64, f_ref: f64) -> Result<f64> {
    if !(f_est > 0.0 && f_ref > 0.0) {
        return Err(Error::invalid(format!(
            "cents need positive frequencies, got {f_est} and {f_ref}"
        )));
    }
    Ok((1200.0 * (f_est / f_ref).log2()).abs())
}

/// Metrics are `None` when their denominator is empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub rpa: Option<f64>,
    pub f_score: Option<f64>,
    pub oa: Option<f64>,
    pub n_voiced_ref: usize,
    pub n_frames: usize,
}

fn fmt_metric(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{:.4}", x))
}

fn fmt_percent(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{:.1}%", 100.0 * x))
}

impl EvalReport {
    pub const CSV_HEADER: &'static str = "rpa,f_score,oa,n_voiced_ref,n_frames";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            fmt_metric(self.rpa),
            fmt_metric(self.f_score),
            fmt_metric(self.oa),
            self.n_voiced_ref,
            self.n_frames
        )
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Raw Pitch Accuracy : {}", fmt_percent(self.rpa))?;
        writeln!(f, "Voicing F-score    : {}", fmt_percent(self.f_score))?;
        writeln!(f, "Overall Accuracy   : {}", fmt_percent(self.oa))?;
        write!(
            f,
            "Frames             : {} ({} voiced in reference)",
            self.n_frames, self.n_voiced_ref
        )
    }
}

fn pitch_correct(f_est: f64, f_ref: f64) -> bool {
    f_est > 0.0 && f_ref > 0.0 && (1200.0 * (f_est / f_ref).log2()).abs() <= CENTS_TOLERANCE
}

/// Frame-aligned comparison of a track against a reference.
///
/// RPA only conditions on reference voicing: the estimate counts even when
/// the track flags the frame unvoiced.
pub fn evaluate(track: &PitchTrack, annotation: &Annotation) -> Result<EvalReport> {
    let (th, ah) = (track.hop_seconds, annotation.hop_seconds);
    if (th - ah).abs() > 0.01 * ah {
        return Err(Error::HopMismatch {
            track: th,
            annotation: ah,
        });
    }
    if track.frames.len().abs_diff(annotation.f0.len()) > 1 {
        return Err(Error::LengthMismatch {
            track: track.frames.len(),
            annotation: annotation.f0.len(),
        });
    }
    let n = track.frames.len().min(annotation.f0.len());
    let (mut ref_voiced, mut est_voiced, mut both_voiced) = (0usize, 0usize, 0usize);
    let (mut pitch_hits, mut overall_hits) = (0usize, 0usize);
    for (fr, &f_ref) in track.frames[..n].iter().zip(&annotation.f0[..n]) {
        let r = f_ref > 0.0;
        let hit = r && pitch_correct(fr.f0_hz, f_ref);
        ref_voiced += usize::from(r);
        est_voiced += usize::from(fr.voiced);
        both_voiced += usize::from(r && fr.voiced);
        pitch_hits += usize::from(hit);
        overall_hits += usize::from(if r { fr.voiced && hit } else { !fr.voiced });
    }
    let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
    let f_score = ratio(both_voiced, ref_voiced).map(|recall| {
        let precision = ratio(both_voiced, est_voiced).unwrap_or(0.0);
        if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        }
    });
    Ok(EvalReport {
        rpa: ratio(pitch_hits, ref_voiced),
        f_score,
        oa: ratio(overall_hits, n),
        n_voiced_ref: ref_voiced,
        n_frames: n,
    })
}

/// Seed used for the noise realization at a given SNR.
pub fn noise_seed(base: u64, snr_db: f64) -> u64 {
    base ^ snr_db.to_bits().rotate_left(17)
}

/// Evaluates the estimator on the clean input and at each SNR.
///
/// The first entry is the clean run, reported with SNR `+inf`.
pub fn evaluate_with_noise_sweep<F>(
    buf: &AudioBuffer,
    annotation: &Annotation,
    mut estimator: F,
    snrs: &[f64],
    seed: u64,
) -> Result<Vec<(f64, EvalReport)>>
where
    F: FnMut(&AudioBuffer) -> Result<PitchTrack>,
{
    let mut out = Vec::with_capacity(snrs.len() + 1);
    out.push((f64::INFINITY, evaluate(&estimator(buf)?, annotation)?));
    for &snr in snrs {
        let noisy = add_noise(buf, snr, noise_seed(seed, snr))?;
        out.push((snr, evaluate(&estimator(&noisy)?, annotation)?));
    }
    Ok(out)
}
