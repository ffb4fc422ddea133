//! Cross-module properties of the kernels, scorer and tracker.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use swipe::audio::{constant_curve, synth_signal, Waveform};
use swipe::kernels::{default_kernel_bank, KernelBank, KernelVariant};
use swipe::scorer::{score_single_window, ScorerConfig, Scorer};
use swipe::spectral::{windowed_spectrum, FrequencyScale, SampledSpectrum};
use swipe::tracker::{argmax, pick_pitch, track};
use swipe::AudioBuffer;

const FS: u32 = 44100;

fn bank(variant: KernelVariant) -> KernelBank {
    default_kernel_bank(variant, FrequencyScale::MelSlaney).unwrap()
}

fn sawtooth(f0: f64, seconds: f64) -> AudioBuffer {
    synth_signal(Waveform::Sawtooth, &constant_curve(f0, seconds, FS), FS, 0.5, 0.01)
        .unwrap()
        .0
}

/// Scores of every candidate against one spectrum taken with the ideal
/// window of candidate `c`.
fn ideal_window_scores(bank: &KernelBank, buf: &AudioBuffer, c: usize) -> Vec<f64> {
    let window = (bank.ideal_window_s[c] * FS as f64).round() as usize;
    let center = (buf.len() / 2) as isize;
    let spec = windowed_spectrum(buf, &bank.freq_grid, center, window, window.next_power_of_two()).unwrap();
    (0..bank.len())
        .map(|i| score_single_window(&spec, bank, i).unwrap())
        .collect()
}

fn naive_score(kernel: &[f64], mag: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..mag.len() {
        num += kernel[k] * mag[k].sqrt();
        den += mag[k];
    }
    if den == 0.0 {
        0.0
    } else {
        num / den.sqrt()
    }
}

/// Below 1.8 kHz every candidate wins against its own ideal-window sawtooth.
#[test]
fn self_match_dominates_below_1800_hz() {
    let bank = bank(KernelVariant::SwipePrime);
    for (c, &f_c) in bank.grid.candidates().iter().enumerate().filter(|(_, &f)| f < 1800.0) {
        let buf = sawtooth(f_c, 0.6);
        let scores = ideal_window_scores(&bank, &buf, c);
        assert_eq!(argmax(&scores), c, "candidate {c} ({f_c:.1} Hz)");
    }
}

/// Near the top of the grid kernels lose harmonics to the grid ceiling one
/// candidate at a time, and the neighbor that still has the extra lobe can
/// win by a few bins.
#[test]
fn self_match_near_the_grid_ceiling_is_close() {
    let bank = bank(KernelVariant::SwipePrime);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let first = bank.grid.candidates().iter().position(|&f| f >= 1800.0).unwrap();
    for _ in 0..20 {
        let c = rng.random_range(first..bank.len());
        let buf = sawtooth(bank.grid.candidates()[c], 0.6);
        let a = argmax(&ideal_window_scores(&bank, &buf, c));
        assert!(a.abs_diff(c) <= 4, "candidate {c} picked {a}");
    }
}

#[test]
fn prime_kernels_widen_the_octave_margin() {
    let prime = bank(KernelVariant::SwipePrime);
    let plain = bank(KernelVariant::Swipe);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let octave = prime.grid.bins_per_octave();
    let mut strict = 0;
    for _ in 0..20 {
        let c = rng.random_range(octave..prime.len());
        let buf = sawtooth(prime.grid.candidates()[c], 0.6);
        let margin = |b: &KernelBank| {
            let s = ideal_window_scores(b, &buf, c);
            s[c] - s[c - octave]
        };
        let (mp, ms) = (margin(&prime), margin(&plain));
        // High candidates keep too few harmonics for the families to differ.
        let identical = (c - octave..prime.len()).all(|i| prime.kernels[i] == plain.kernels[i]);
        if identical {
            assert_eq!(mp, ms);
        } else {
            assert!(mp > ms, "candidate {c}: prime margin {mp} vs plain {ms}");
            strict += 1;
        }
    }
    assert!(strict >= 15, "only {strict} candidates exercised the strict case");
}

#[test]
fn scorer_matches_naive_summation() {
    let bank = bank(KernelVariant::SwipePrime);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let mag: Vec<f64> = (0..bank.freq_grid.len())
            .map(|_| rng.random_range(0.0..1.0f64).powi(3))
            .collect();
        let spec = SampledSpectrum::new(mag.clone(), &bank.freq_grid).unwrap();
        for c in (0..bank.len()).step_by(7) {
            let fast = score_single_window(&spec, &bank, c).unwrap();
            let slow = naive_score(&bank.kernels[c], &mag);
            assert!((fast - slow).abs() < 1e-12, "{fast} vs {slow}");
        }
    }
}

#[test]
fn argmax_stays_within_one_bin_between_candidates() {
    let bank = bank(KernelVariant::SwipePrime);
    let cfg = ScorerConfig::default();
    let mut scorer = Scorer::new(&bank, cfg, FS).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..25 {
        let bin = rng.random_range(40.0..250.0f64);
        let f0 = bank.grid.hz_of(bin);
        let buf = sawtooth(f0, 0.5);
        let frame = scorer.score_frame(&buf, (buf.len() / 2) as isize).unwrap();
        let (f, _) = pick_pitch(&frame, &bank.grid, false);
        let cents = (1200.0 * (f / f0).log2()).abs();
        assert!(cents <= 100.0 / 3.0 + 1e-9, "{f0:.2} Hz estimated as {f:.2} Hz");
    }
}

#[test]
fn refinement_reduces_median_error() {
    let bank = bank(KernelVariant::SwipePrime);
    let cfg = ScorerConfig::default();
    let mut scorer = Scorer::new(&bank, cfg, FS).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let (mut raw, mut refined) = (Vec::new(), Vec::new());
    for _ in 0..40 {
        let f0 = bank.grid.hz_of(rng.random_range(40.0..250.0f64));
        let buf = sawtooth(f0, 0.5);
        let frame = scorer.score_frame(&buf, (buf.len() / 2) as isize).unwrap();
        let err = |f: f64| (1200.0 * (f / f0).log2()).abs();
        raw.push(err(pick_pitch(&frame, &bank.grid, false).0));
        refined.push(err(pick_pitch(&frame, &bank.grid, true).0));
    }
    let median = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    };
    let (r, q) = (median(&mut raw), median(&mut refined));
    assert!(q < r, "refined median {q} cents vs raw {r} cents");
}

#[test]
fn refinement_moves_at_most_half_a_bin() {
    let bank = bank(KernelVariant::SwipePrime);
    let buf = sawtooth(311.0, 0.5);
    let t_raw = track(&buf, &bank, &ScorerConfig::default(), false, 0.0).unwrap();
    let t_ref = track(&buf, &bank, &ScorerConfig::default(), true, 0.0).unwrap();
    for (a, b) in t_raw.frames.iter().zip(&t_ref.frames) {
        assert!((1200.0 * (b.f0_hz / a.f0_hz).log2()).abs() <= 50.0 / 3.0 + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn positive_gain_keeps_the_argmax(f0 in 60.0f64..1500.0, gain_db in -40.0f64..20.0) {
        let bank = bank(KernelVariant::SwipePrime);
        let cfg = ScorerConfig::new(4096, true, 0.01).unwrap();
        let buf = sawtooth(f0, 0.2);
        let loud = buf.scaled(10f64.powf(gain_db / 20.0));
        let mut scorer = Scorer::new(&bank, cfg, FS).unwrap();
        let a = scorer.score_frame(&buf, 4410).unwrap();
        let b = scorer.score_frame(&loud, 4410).unwrap();
        prop_assert_eq!(argmax(&a.scores), argmax(&b.scores));
    }

    #[test]
    fn scores_are_bounded_on_random_spectra(seed in any::<u64>()) {
        let bank = bank(KernelVariant::Swipe);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mag: Vec<f64> = (0..bank.freq_grid.len()).map(|_| rng.random_range(0.0..1.0)).collect();
        let spec = SampledSpectrum::new(mag, &bank.freq_grid).unwrap();
        for c in 0..bank.len() {
            prop_assert!(score_single_window(&spec, &bank, c).unwrap().abs() <= 1.0 + 1e-12);
        }
    }
}
