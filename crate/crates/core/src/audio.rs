//! Audio and annotation ingest, synthetic test signals, noise injection and
//! resampling-based pitch shifting.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::io::ErrorKind;
use std::path::Path;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::tracker::{PitchFrame, PitchTrack};

/// Mono audio with its sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl AudioBuffer {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::invalid("sample rate must be positive"));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::invalid(format!("sample {i} is not finite")));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Mean square amplitude.
    pub fn power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s * s).sum::<f64>() / self.samples.len() as f64
    }

    pub fn scaled(&self, gain: f64) -> AudioBuffer {
        AudioBuffer {
            samples: self.samples.iter().map(|s| s * gain).collect(),
            sample_rate: self.sample_rate,
        }
    }

    /// `len` samples centered at `center`; positions outside the buffer read as zero.
    pub fn segment(&self, center: isize, len: usize) -> AudioBuffer {
        let start = center - (len / 2) as isize;
        let samples = (0..len as isize)
            .map(|i| {
                let idx = start + i;
                if idx >= 0 && (idx as usize) < self.samples.len() {
                    self.samples[idx as usize]
                } else {
                    0.0
                }
            })
            .collect();
        AudioBuffer {
            samples,
            sample_rate: self.sample_rate,
        }
    }
}

/// Frame-level f0 reference. `0.0` marks an unvoiced frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub hop_seconds: f64,
    pub f0: Vec<f64>,
}

impl Annotation {
    pub fn new(hop_seconds: f64, f0: Vec<f64>) -> Result<Self> {
        if !(hop_seconds > 0.0 && hop_seconds.is_finite()) {
            return Err(Error::invalid(format!("hop must be positive, got {hop_seconds}")));
        }
        if let Some(f) = f0.iter().find(|f| !(f.is_finite() && **f >= 0.0)) {
            return Err(Error::invalid(format!("invalid f0 value {f}")));
        }
        Ok(Self { hop_seconds, f0 })
    }

    pub fn is_voiced(&self, frame: usize) -> bool {
        self.f0[frame] > 0.0
    }
}

// ---------------------------------------------------------------------------
// WAV
// ---------------------------------------------------------------------------

fn map_hound(err: hound::Error) -> Error {
    match err {
        hound::Error::IoError(e)
            if matches!(e.kind(), ErrorKind::UnexpectedEof | ErrorKind::Other) =>
        {
            Error::MalformedHeader(format!("truncated RIFF data ({e})"))
        }
        hound::Error::IoError(e) => Error::Io(e),
        hound::Error::FormatError(msg) => Error::MalformedHeader(msg.to_string()),
        hound::Error::Unsupported => {
            Error::UnsupportedFormat("fmt chunk describes an unsupported codec".into())
        }
        hound::Error::TooWide => Error::UnsupportedFormat("sample width too large".into()),
        hound::Error::InvalidSampleFormat => {
            Error::UnsupportedFormat("fmt chunk has an invalid sample format".into())
        }
        hound::Error::UnfinishedSample => {
            Error::MalformedHeader("data chunk ends inside a sample".into())
        }
    }
}

/// Reads a PCM16 or float32 WAV file, averaging channels to mono.
pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    let mut reader = hound::WavReader::open(path.as_ref()).map_err(map_hound)?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels == 0 {
        return Err(Error::MalformedHeader("fmt chunk declares zero channels".into()));
    }
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(map_hound)?,
        (hound::SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(|v| v as f64))
            .collect::<std::result::Result<_, _>>()
            .map_err(map_hound)?,
        (fmt, bits) => {
            return Err(Error::UnsupportedFormat(format!(
                "fmt chunk: {bits}-bit {fmt:?} samples (expected PCM 16-bit or IEEE float 32-bit)"
            )))
        }
    };
    let samples = interleaved
        .chunks_exact(channels)
        .map(|frame| frame.iter().sum::<f64>() / channels as f64)
        .collect();
    AudioBuffer::new(samples, spec.sample_rate)
}

/// Writes mono IEEE float32.
pub fn write_wav(path: impl AsRef<Path>, buf: &AudioBuffer) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: buf.sample_rate,
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let mut writer = hound::WavWriter::create(path.as_ref(), spec).map_err(map_hound)?;
    for &s in &buf.samples {
        writer.write_sample(s as f32).map_err(map_hound)?;
    }
    writer.finalize().map_err(map_hound)
}

/// Writes mono PCM16, clipping to [-1, 1).
pub fn write_wav_pcm16(path: impl AsRef<Path>, buf: &AudioBuffer) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: buf.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path.as_ref(), spec).map_err(map_hound)?;
    for &s in &buf.samples {
        let v = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        writer.write_sample(v).map_err(map_hound)?;
    }
    writer.finalize().map_err(map_hound)
}

// ---------------------------------------------------------------------------
// Synthesis
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Waveform {
    Sine,
    /// Additive band-limited sawtooth: harmonics at or above Nyquist are omitted.
    Sawtooth,
}

pub fn constant_curve(f0: f64, duration_s: f64, sample_rate: u32) -> Vec<f64> {
    vec![f0; (duration_s * sample_rate as f64).round() as usize]
}

/// Exponential glide from `f_start` to `f_end`.
pub fn glide_curve(f_start: f64, f_end: f64, duration_s: f64, sample_rate: u32) -> Vec<f64> {
    let n = (duration_s * sample_rate as f64).round() as usize;
    let ratio = (f_end / f_start).ln();
    (0..n)
        .map(|i| {
            let t = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
            f_start * (ratio * t).exp()
        })
        .collect()
}

/// Sinusoidal vibrato of `depth_cents` around `center` at `rate_hz`.
pub fn vibrato_curve(
    center: f64,
    depth_cents: f64,
    rate_hz: f64,
    duration_s: f64,
    sample_rate: u32,
) -> Vec<f64> {
    let n = (duration_s * sample_rate as f64).round() as usize;
    (0..n)
        .map(|i| {
            let t = i as f64 / sample_rate as f64;
            center * 2f64.powf(depth_cents / 1200.0 * (2.0 * PI * rate_hz * t).sin())
        })
        .collect()
}

/// Number of frames for centered framing at `hop_seconds`: ceil(duration / hop).
pub fn frame_count(num_samples: usize, sample_rate: u32, hop_seconds: f64) -> usize {
    let hop_samples = hop_seconds * sample_rate as f64;
    (num_samples as f64 / hop_samples - 1e-9).ceil().max(0.0) as usize
}

/// Synthesizes a phase-continuous signal following a per-sample f0 curve.
///
/// The returned annotation samples the curve at `hop_seconds`.
pub fn synth_signal(
    kind: Waveform,
    f0_curve: &[f64],
    sample_rate: u32,
    amplitude: f64,
    hop_seconds: f64,
) -> Result<(AudioBuffer, Annotation)> {
    if sample_rate == 0 {
        return Err(Error::invalid("sample rate must be positive"));
    }
    let nyquist = sample_rate as f64 / 2.0;
    if let Some(f) = f0_curve.iter().find(|f| !(**f > 0.0 && **f < nyquist)) {
        return Err(Error::invalid(format!(
            "f0 {f} Hz outside (0, {nyquist}) Hz"
        )));
    }
    let fs = sample_rate as f64;
    let mut phase = 0.0f64;
    let mut samples = Vec::with_capacity(f0_curve.len());
    for &f in f0_curve {
        let value = match kind {
            Waveform::Sine => phase.sin(),
            Waveform::Sawtooth => {
                // Harmonic k contributes sin(k*phase)/k; e^{ik phase} by recurrence.
                let n_harm = ((nyquist / f) - 1e-12).floor().max(1.0) as usize;
                let (s1, c1) = phase.sin_cos();
                let (mut s, mut c) = (s1, c1);
                let mut acc = 0.0;
                for k in 1..=n_harm {
                    acc += s / k as f64;
                    let next_s = s * c1 + c * s1;
                    c = c * c1 - s * s1;
                    s = next_s;
                }
                acc * 2.0 / PI
            }
        };
        samples.push(amplitude * value);
        phase += 2.0 * PI * f / fs;
        if phase >= 2.0 * PI {
            phase -= 2.0 * PI;
        }
    }

    let n_frames = frame_count(f0_curve.len(), sample_rate, hop_seconds);
    let f0 = (0..n_frames)
        .map(|j| {
            let idx = (j as f64 * hop_seconds * fs).round() as usize;
            f0_curve[idx.min(f0_curve.len() - 1)]
        })
        .collect();
    Ok((
        AudioBuffer::new(samples, sample_rate)?,
        Annotation::new(hop_seconds, f0)?,
    ))
}

/// `n` constant-pitch clips with f0 drawn log-uniformly in `[f_lo, f_hi]`.
pub fn sawtooth_corpus(
    n: usize,
    f_lo: f64,
    f_hi: f64,
    duration_s: f64,
    sample_rate: u32,
    hop_seconds: f64,
    seed: u64,
) -> Result<Vec<(AudioBuffer, Annotation)>> {
    if !(f_lo > 0.0 && f_lo <= f_hi) {
        return Err(Error::invalid(format!("bad corpus range {f_lo}..{f_hi} Hz")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let f0 = (rng.random_range(f_lo.ln()..=f_hi.ln())).exp();
            synth_signal(
                Waveform::Sawtooth,
                &constant_curve(f0, duration_s, sample_rate),
                sample_rate,
                0.5,
                hop_seconds,
            )
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Noise
// ---------------------------------------------------------------------------

/// Adds white Gaussian noise at exactly `snr_db` (measured on this buffer).
/// `f64::INFINITY` returns the input unchanged.
pub fn add_noise(buf: &AudioBuffer, snr_db: f64, seed: u64) -> Result<AudioBuffer> {
    if snr_db == f64::INFINITY {
        return Ok(buf.clone());
    }
    if snr_db.is_nan() {
        return Err(Error::invalid("SNR is NaN"));
    }
    let signal_power = buf.power();
    if signal_power <= 0.0 {
        return Err(Error::invalid("cannot set an SNR on a silent buffer"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<f64> = (0..buf.len()).map(|_| rng.sample(StandardNormal)).collect();
    let noise_power = noise.iter().map(|v| v * v).sum::<f64>() / noise.len() as f64;
    let target = signal_power / 10f64.powf(snr_db / 10.0);
    let scale = (target / noise_power).sqrt();
    let samples = buf
        .samples
        .iter()
        .zip(&noise)
        .map(|(s, n)| s + scale * n)
        .collect();
    AudioBuffer::new(samples, buf.sample_rate)
}

// ---------------------------------------------------------------------------
// Resampling
// ---------------------------------------------------------------------------

const SINC_ZERO_CROSSINGS: f64 = 32.0;
const KAISER_BETA: f64 = 9.0;
const KAISER_TABLE_LEN: usize = 4096;

fn bessel_i0(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let q = x * x / 4.0;
    for k in 1..64 {
        term *= q / (k * k) as f64;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Kaiser window sampled over `|u|` in `[0, 1]`.
fn kaiser_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let norm = bessel_i0(KAISER_BETA);
        (0..=KAISER_TABLE_LEN)
            .map(|i| {
                let u = i as f64 / KAISER_TABLE_LEN as f64;
                bessel_i0(KAISER_BETA * (1.0 - u * u).max(0.0).sqrt()) / norm
            })
            .collect()
    })
}

fn kaiser(table: &[f64], u: f64) -> f64 {
    let x = u.abs() * KAISER_TABLE_LEN as f64;
    let i = x.floor() as usize;
    if i >= KAISER_TABLE_LEN {
        return table[KAISER_TABLE_LEN];
    }
    let frac = x - i as f64;
    (1.0 - frac) * table[i] + frac * table[i + 1]
}

/// Pitch shift by resampling with a Kaiser-windowed sinc interpolator.
///
/// Output sample `n` reads the input at `n * 2^(semitones/12)`, so periodic
/// content has its frequency multiplied by that ratio and the duration divided
/// by it. The sample-rate tag is unchanged.
pub fn resample_shift(buf: &AudioBuffer, semitones: f64) -> Result<AudioBuffer> {
    if semitones.is_nan() || semitones.abs() > 24.0 {
        return Err(Error::invalid(format!(
            "pitch shift of {semitones} semitones outside [-24, 24]"
        )));
    }
    if semitones == 0.0 {
        return Ok(buf.clone());
    }
    let ratio = 2f64.powf(semitones / 12.0);
    // Anti-aliasing cutoff relative to the input Nyquist.
    let cutoff = (1.0 / ratio).min(1.0);
    let half_width = SINC_ZERO_CROSSINGS / cutoff;
    let table = kaiser_table();
    let (step_sin, step_cos) = (PI * cutoff).sin_cos();
    let x = &buf.samples;
    if x.is_empty() {
        return Ok(buf.clone());
    }
    let out_len = (x.len() as f64 / ratio).floor() as usize;

    let mut out = Vec::with_capacity(out_len);
    for n in 0..out_len {
        let t = n as f64 * ratio;
        let lo = ((t - half_width).ceil().max(0.0)) as usize;
        let hi = ((t + half_width).floor() as usize).min(x.len() - 1);
        // sin(pi * cutoff * d) for d = t - m, stepped by the angle-addition rule.
        let (mut s, mut c) = (PI * cutoff * (t - lo as f64)).sin_cos();
        let mut acc = 0.0;
        for (m, &xm) in x.iter().enumerate().take(hi + 1).skip(lo) {
            let d = t - m as f64;
            let sinc = if d.abs() < 1e-12 {
                1.0
            } else {
                s / (PI * cutoff * d)
            };
            acc += xm * cutoff * sinc * kaiser(table, d / half_width);
            let next_s = s * step_cos - c * step_sin;
            c = c * step_cos + s * step_sin;
            s = next_s;
        }
        out.push(acc);
    }
    AudioBuffer::new(out, buf.sample_rate)
}

// ---------------------------------------------------------------------------
// Annotation and track text formats
// ---------------------------------------------------------------------------

fn split_fields(line: &str) -> Vec<&str> {
    line.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .collect()
}

fn is_header(fields: &[&str]) -> bool {
    fields
        .first()
        .is_some_and(|t| t.parse::<f64>().is_err() && t.chars().any(|c| c.is_alphabetic()))
}

/// Parses two-column `time f0` text (tab, space or comma separated).
///
/// A leading header line (such as the one written by [`write_track`]) and
/// blank or `#` lines are skipped; extra columns are ignored.
pub fn parse_annotation(text: &str, path: &Path) -> Result<Annotation> {
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut times = Vec::new();
    let mut f0 = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields = split_fields(line);
        if times.is_empty() && is_header(&fields) {
            continue;
        }
        if fields.len() < 2 {
            return Err(parse_err(line_no, format!("expected 2 columns, found {}", fields.len())));
        }
        let t: f64 = fields[0]
            .parse()
            .map_err(|_| parse_err(line_no, format!("non-numeric time {:?}", fields[0])))?;
        let f: f64 = fields[1]
            .parse()
            .map_err(|_| parse_err(line_no, format!("non-numeric f0 {:?}", fields[1])))?;
        if !(f.is_finite() && f >= 0.0) {
            return Err(parse_err(line_no, format!("invalid f0 {f}")));
        }
        times.push((t, line_no));
        f0.push(f);
    }
    if times.len() < 2 {
        return Err(parse_err(
            0,
            "need at least two timestamped lines to infer the hop".into(),
        ));
    }
    let t0 = times[0].0;
    let hop = times[1].0 - t0;
    if hop.is_nan() || hop <= 0.0 {
        return Err(parse_err(times[1].1, "timestamps must increase".into()));
    }
    for (j, &(t, line_no)) in times.iter().enumerate() {
        let expected = t0 + j as f64 * hop;
        if (t - expected).abs() > 0.01 * hop {
            return Err(parse_err(
                line_no,
                format!("non-uniform timestamp {t} (expected {expected:.6})"),
            ));
        }
    }
    Annotation::new(hop, f0)
}

pub fn read_annotation(path: impl AsRef<Path>) -> Result<Annotation> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_annotation(&text, path)
}

pub fn write_annotation(path: impl AsRef<Path>, ann: &Annotation) -> Result<()> {
    let mut out = String::new();
    for (j, f) in ann.f0.iter().enumerate() {
        let _ = writeln!(out, "{:.6}\t{:.6}", j as f64 * ann.hop_seconds, f);
    }
    fs::write(path, out)?;
    Ok(())
}

/// CSV `time,f0,confidence,voiced` with six-decimal floats and 0/1 voicing.
pub fn format_track(track: &PitchTrack) -> String {
    let mut out = String::from("time,f0,confidence,voiced\n");
    for (j, fr) in track.frames.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:.6},{:.6},{:.6},{}",
            j as f64 * track.hop_seconds,
            fr.f0_hz,
            fr.confidence,
            u8::from(fr.voiced)
        );
    }
    out
}

pub fn write_track(path: impl AsRef<Path>, track: &PitchTrack) -> Result<()> {
    fs::write(path, format_track(track))?;
    Ok(())
}

/// Reads a track CSV produced by [`write_track`].
pub fn read_track(path: impl AsRef<Path>) -> Result<PitchTrack> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let ann = parse_annotation(&text, path)?;
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut frames = Vec::with_capacity(ann.f0.len());
    for (i, raw) in text.lines().enumerate() {
        let fields = split_fields(raw.trim());
        if fields.is_empty() || raw.trim_start().starts_with('#') || is_header(&fields) {
            continue;
        }
        if fields.len() < 4 {
            return Err(parse_err(i + 1, "expected time,f0,confidence,voiced".into()));
        }
        let confidence: f64 = fields[2]
            .parse()
            .map_err(|_| parse_err(i + 1, format!("non-numeric confidence {:?}", fields[2])))?;
        let voiced = match fields[3] {
            "1" | "true" => true,
            "0" | "false" => false,
            other => return Err(parse_err(i + 1, format!("bad voicing flag {other:?}"))),
        };
        frames.push(PitchFrame {
            f0_hz: ann.f0[frames.len()],
            confidence,
            voiced,
        });
    }
    Ok(PitchTrack {
        hop_seconds: ann.hop_seconds,
        frames,
    })
}
