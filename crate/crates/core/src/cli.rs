//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on runtime failure, 2 on usage or validation
//! errors (bad flags, out-of-range values, mismatched hops).

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::audio::{
    constant_curve, glide_curve, read_annotation, read_track, read_wav, sawtooth_corpus, synth_signal,
    vibrato_curve, write_annotation, write_track, write_wav, write_wav_pcm16, format_track, AudioBuffer,
    Annotation, Waveform,
};
use crate::encoder::{
    encoder_track, load_weights, save_weights, train_self_supervised, train_supervised, AugmentConfig,
    ShiftMode, ToeplitzEncoder, TrainConfig,
};
use crate::error::{Error, Result};
use crate::kernels::{build_kernel_bank, build_pitch_grid, kernel_for, KernelBank, KernelVariant};
use crate::metrics::{evaluate, evaluate_with_noise_sweep, EvalReport};
use crate::scorer::{choose_windows, ScorerConfig, Scorer, WindowChoice, DEFAULT_HOP_SECONDS};
use crate::spectral::FrequencyScale;
use crate::tracker::{self, PitchTrack};

const DEFAULT_ENTROPY_THRESHOLD: f64 = 4.0;

#[derive(Debug, Parser)]
#[command(name = "swipe", version, about = "SWIPE' pitch estimation, evaluation and encoder training")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScaleArg {
    Mel,
    Erb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Swipe,
    #[value(name = "swipe-prime", alias = "swipe_prime")]
    SwipePrime,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Analysis hop in seconds [default: 0.01, or the annotation hop in `eval`]
    #[arg(long, global = true)]
    hop: Option<f64>,
    /// Lowest pitch candidate in Hz
    #[arg(long, global = true, default_value_t = crate::kernels::DEFAULT_F_MIN)]
    f_min: f64,
    /// Highest pitch candidate in Hz
    #[arg(long, global = true, default_value_t = crate::kernels::DEFAULT_F_MAX)]
    f_max: f64,
    #[arg(long, global = true, default_value_t = crate::kernels::DEFAULT_BINS_PER_SEMITONE)]
    bins_per_semitone: usize,
    /// Frequency scale of the spectral sampling grid
    #[arg(long, global = true, value_enum, default_value = "mel")]
    scale: ScaleArg,
    /// Kernel family
    #[arg(long, global = true, value_enum, default_value = "swipe-prime")]
    variant: VariantArg,
    /// Longest analysis window in samples (power of two)
    #[arg(long, global = true, default_value_t = crate::scorer::DEFAULT_MAX_WINDOW)]
    max_window: usize,
    /// Use only the longer of the two bracketing windows
    #[arg(long, global = true)]
    no_interp: bool,
    /// Refine peaks by parabolic interpolation
    #[arg(long, global = true)]
    refine: bool,
    /// Score a candidate must exceed for a frame to count as voiced
    #[arg(long, global = true, default_value_t = 0.0)]
    threshold: f64,
    /// Reject input whose sample rate differs from this
    #[arg(long, global = true)]
    expect_sample_rate: Option<u32>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Track the pitch of a WAV file and write a CSV track
    Analyze {
        wav: PathBuf,
        /// Output CSV, or `-` for stdout
        out_csv: PathBuf,
        /// Apply a trained encoder to the scores before peak picking
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Entropy (nats) below which encoder output counts as voiced
        #[arg(long, default_value_t = DEFAULT_ENTROPY_THRESHOLD)]
        entropy_threshold: f64,
    },
    /// Compare a CSV track, or a WAV analyzed on the fly, with an annotation
    Eval {
        /// Predicted track (.csv) or audio (.wav)
        input: PathBuf,
        annotation: PathBuf,
        /// Comma-separated SNRs in dB for a white-noise sweep (WAV input only)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        snr: Vec<f64>,
        #[arg(long, value_enum, default_value = "human")]
        format: ReportFormat,
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_ENTROPY_THRESHOLD)]
        entropy_threshold: f64,
    },
    /// Synthesize one clip with its annotation
    Synth(SynthArgs),
    /// Synthesize a seeded corpus of constant-pitch sawtooth clips
    Corpus(CorpusArgs),
    /// Train the Toeplitz encoder on a directory of WAV files
    Train(TrainArgs),
    /// Export one candidate's kernel as CSV
    Kernels {
        #[command(flatten)]
        candidate: CandidateArg,
        out_csv: PathBuf,
    },
    /// Export the candidate scores of one frame as CSV
    Scores {
        wav: PathBuf,
        /// Frame center in seconds
        time_s: f64,
        out_csv: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Human,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WaveArg {
    Sine,
    Sawtooth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CurveArg {
    Constant,
    Glide,
    Vibrato,
}

#[derive(Debug, Args)]
struct SynthArgs {
    out_wav: PathBuf,
    out_annotation: PathBuf,
    #[arg(long, value_enum, default_value = "sawtooth")]
    wave: WaveArg,
    #[arg(long, value_enum, default_value = "constant")]
    curve: CurveArg,
    /// Start (or constant / center) frequency in Hz
    #[arg(long, default_value_t = 220.0)]
    f0: f64,
    /// End frequency of a glide in Hz
    #[arg(long)]
    f0_end: Option<f64>,
    #[arg(long, default_value_t = 50.0)]
    depth_cents: f64,
    /// Vibrato rate in Hz
    #[arg(long, default_value_t = 5.0)]
    rate: f64,
    #[arg(long, default_value_t = 1.0)]
    duration: f64,
    #[arg(long, default_value_t = 44100)]
    sample_rate: u32,
    #[arg(long, default_value_t = 0.5)]
    amplitude: f64,
    /// Write 16-bit PCM instead of 32-bit float
    #[arg(long)]
    pcm16: bool,
}

#[derive(Debug, Args)]
struct CorpusArgs {
    out_dir: PathBuf,
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[arg(long, default_value_t = 55.0)]
    f_lo: f64,
    #[arg(long, default_value_t = 1760.0)]
    f_hi: f64,
    #[arg(long, default_value_t = 1.0)]
    duration: f64,
    #[arg(long, default_value_t = 44100)]
    sample_rate: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TrainMode {
    Ssl,
    Sup,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShiftArg {
    Resample,
    Translate,
}

#[derive(Debug, Args)]
struct TrainArgs {
    corpus_dir: PathBuf,
    out_weights: PathBuf,
    #[arg(long, value_enum, default_value = "ssl")]
    mode: TrainMode,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    #[arg(long, default_value_t = 16)]
    batch_size: usize,
    #[arg(long, default_value_t = 1e-4)]
    lr: f64,
    /// Base of the linear pitch mapping [default: 2^(1/36)]
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    w_equiv: f64,
    #[arg(long, default_value_t = 1.0)]
    w_sce: f64,
    #[arg(long, default_value_t = 1.0)]
    w_inv: f64,
    #[arg(long, default_value_t = crate::encoder::DEFAULT_HUBER_DELTA)]
    huber_delta: f64,
    /// Largest pitch shift in semitones
    #[arg(long, default_value_t = 6)]
    k_max: usize,
    #[arg(long, value_enum, default_value = "resample")]
    shift_mode: ShiftArg,
    /// Supervised target width in bins
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Augmentation SNR range in dB, `lo,hi`
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [10.0, 30.0])]
    aug_snr: Vec<f64>,
    /// Augmentation gain range in dB, `lo,hi`
    #[arg(long, value_delimiter = ',', num_args = 2, allow_hyphen_values = true, default_values_t = [-6.0, 6.0])]
    aug_gain: Vec<f64>,
    /// Loss history CSV [default: <out_weights>.loss.csv]
    #[arg(long)]
    loss_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct CandidateArg {
    /// Candidate frequency in Hz
    #[arg(long)]
    hz: Option<f64>,
    /// Candidate index on the pitch grid
    #[arg(long)]
    index: Option<usize>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) | Error::HopMismatch { .. } | Error::LengthMismatch { .. } => 2,
        _ => 1,
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let g = &cli.global;
    match cli.command {
        Command::Analyze {
            wav,
            out_csv,
            weights,
            entropy_threshold,
        } => cmd_analyze(g, &wav, &out_csv, weights.as_deref(), entropy_threshold),
        Command::Eval {
            input,
            annotation,
            snr,
            format,
            weights,
            entropy_threshold,
        } => cmd_eval(g, &input, &annotation, &snr, format, weights.as_deref(), entropy_threshold),
        Command::Synth(args) => cmd_synth(g, &args),
        Command::Corpus(args) => cmd_corpus(g, &args),
        Command::Train(args) => cmd_train(g, &args),
        Command::Kernels { candidate, out_csv } => cmd_kernels(g, &candidate, &out_csv),
        Command::Scores { wav, time_s, out_csv } => cmd_scores(g, &wav, time_s, &out_csv),
    }
}

fn bank_from(g: &GlobalOpts) -> Result<KernelBank> {
    let grid = build_pitch_grid(g.f_min, g.f_max, g.bins_per_semitone)?;
    let scale = match g.scale {
        ScaleArg::Mel => FrequencyScale::MelSlaney,
        ScaleArg::Erb => FrequencyScale::Erb,
    };
    let variant = match g.variant {
        VariantArg::Swipe => KernelVariant::Swipe,
        VariantArg::SwipePrime => KernelVariant::SwipePrime,
    };
    build_kernel_bank(&grid, &grid.frequency_grid(scale)?, variant)
}

fn scorer_cfg(g: &GlobalOpts, hop: f64) -> Result<ScorerConfig> {
    ScorerConfig::new(g.max_window, !g.no_interp, hop)
}

fn load_audio(g: &GlobalOpts, path: &Path) -> Result<AudioBuffer> {
    let buf = read_wav(path)?;
    if let Some(expected) = g.expect_sample_rate {
        if buf.sample_rate() != expected {
            return Err(Error::invalid(format!(
                "{} is sampled at {} Hz, expected {expected} Hz",
                path.display(),
                buf.sample_rate()
            )));
        }
    }
    Ok(buf)
}

/// Warns when the window cap cuts into the ideal windows of low candidates.
fn warn_if_capped(bank: &KernelBank, cfg: &ScorerConfig, sample_rate: u32) {
    let fs = sample_rate as f64;
    let capped = bank
        .ideal_window_s
        .iter()
        .zip(bank.grid.candidates())
        .filter(|(t, _)| {
            let ideal = *t * fs;
            match choose_windows(ideal, cfg) {
                WindowChoice::Single { len } => (len as f64) < ideal,
                WindowChoice::Blend { hi, .. } => hi > cfg.max_window_samples(),
            }
        })
        .map(|(_, &f)| f)
        .fold(f64::NEG_INFINITY, f64::max);
    if capped.is_finite() {
        eprintln!(
            "warning: --max-window {} is shorter than the ideal window of candidates up to {:.1} Hz; \
             estimates of low pitches are less reliable",
            cfg.max_window_samples(),
            capped
        );
    }
}

fn estimate(
    g: &GlobalOpts,
    bank: &KernelBank,
    buf: &AudioBuffer,
    cfg: &ScorerConfig,
    encoder: Option<&ToeplitzEncoder>,
    entropy_threshold: f64,
) -> Result<PitchTrack> {
    match encoder {
        Some(enc) => encoder_track(buf, bank, cfg, enc, g.refine, entropy_threshold),
        None => tracker::track(buf, bank, cfg, g.refine, g.threshold),
    }
}

fn write_output(path: &Path, contents: &str) -> Result<()> {
    if path == Path::new("-") {
        io::stdout().write_all(contents.as_bytes())?;
        Ok(())
    } else {
        fs::write(path, contents).map_err(Error::from)
    }
}

fn cmd_analyze(
    g: &GlobalOpts,
    wav: &Path,
    out_csv: &Path,
    weights: Option<&Path>,
    entropy_threshold: f64,
) -> Result<()> {
    let bank = bank_from(g)?;
    let cfg = scorer_cfg(g, g.hop.unwrap_or(DEFAULT_HOP_SECONDS))?;
    let encoder = weights.map(load_weights).transpose()?;
    let buf = load_audio(g, wav)?;
    warn_if_capped(&bank, &cfg, buf.sample_rate());
    let track = estimate(g, &bank, &buf, &cfg, encoder.as_ref(), entropy_threshold)?;
    if out_csv == Path::new("-") {
        write_output(out_csv, &format_track(&track))
    } else {
        write_track(out_csv, &track)
    }
}

fn is_wav(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("wav"))
}

fn cmd_eval(
    g: &GlobalOpts,
    input: &Path,
    annotation: &Path,
    snrs: &[f64],
    format: ReportFormat,
    weights: Option<&Path>,
    entropy_threshold: f64,
) -> Result<()> {
    let ann = read_annotation(annotation)?;
    let rows: Vec<(f64, EvalReport)> = if is_wav(input) {
        let bank = bank_from(g)?;
        let cfg = scorer_cfg(g, g.hop.unwrap_or(ann.hop_seconds))?;
        let encoder = weights.map(load_weights).transpose()?;
        let buf = load_audio(g, input)?;
        let est = |b: &AudioBuffer| estimate(g, &bank, b, &cfg, encoder.as_ref(), entropy_threshold);
        evaluate_with_noise_sweep(&buf, &ann, est, snrs, g.seed)?
    } else {
        if !snrs.is_empty() {
            return Err(Error::invalid("--snr needs WAV input"));
        }
        if weights.is_some() {
            return Err(Error::invalid("--weights needs WAV input"));
        }
        vec![(f64::INFINITY, evaluate(&read_track(input)?, &ann)?)]
    };
    print!("{}", format_reports(&rows, format));
    Ok(())
}

fn snr_label(snr: f64) -> String {
    if snr.is_infinite() {
        "clean".to_string()
    } else {
        format!("{snr}")
    }
}

fn format_reports(rows: &[(f64, EvalReport)], format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            out.push_str(&format!("snr_db,{}\n", EvalReport::CSV_HEADER));
            for (snr, r) in rows {
                out.push_str(&format!("{},{}\n", snr_label(*snr), r.csv_row()));
            }
        }
        ReportFormat::Human if rows.len() == 1 => {
            out.push_str(&format!("{}\n", rows[0].1));
        }
        ReportFormat::Human => {
            let pct = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{:.1}%", 100.0 * x));
            out.push_str(&format!("{:>8} {:>8} {:>8} {:>8}\n", "SNR(dB)", "RPA", "F", "OA"));
            for (snr, r) in rows {
                out.push_str(&format!(
                    "{:>8} {:>8} {:>8} {:>8}\n",
                    snr_label(*snr),
                    pct(r.rpa),
                    pct(r.f_score),
                    pct(r.oa)
                ));
            }
        }
    }
    out
}

fn write_clip(path: &Path, buf: &AudioBuffer, pcm16: bool) -> Result<()> {
    if pcm16 {
        write_wav_pcm16(path, buf)
    } else {
        write_wav(path, buf)
    }
}

fn cmd_synth(g: &GlobalOpts, a: &SynthArgs) -> Result<()> {
    if !(a.duration > 0.0 && a.duration.is_finite()) {
        return Err(Error::invalid(format!("duration must be positive, got {}", a.duration)));
    }
    if !(a.amplitude > 0.0 && a.amplitude <= 1.0) {
        return Err(Error::invalid(format!("amplitude must lie in (0, 1], got {}", a.amplitude)));
    }
    let curve = match a.curve {
        CurveArg::Constant => constant_curve(a.f0, a.duration, a.sample_rate),
        CurveArg::Glide => {
            let end = a
                .f0_end
                .ok_or_else(|| Error::invalid("a glide needs --f0-end"))?;
            glide_curve(a.f0, end, a.duration, a.sample_rate)
        }
        CurveArg::Vibrato => vibrato_curve(a.f0, a.depth_cents, a.rate, a.duration, a.sample_rate),
    };
    let kind = match a.wave {
        WaveArg::Sine => Waveform::Sine,
        WaveArg::Sawtooth => Waveform::Sawtooth,
    };
    let (buf, ann) = synth_signal(
        kind,
        &curve,
        a.sample_rate,
        a.amplitude,
        g.hop.unwrap_or(DEFAULT_HOP_SECONDS),
    )?;
    write_clip(&a.out_wav, &buf, a.pcm16)?;
    write_annotation(&a.out_annotation, &ann)
}

fn cmd_corpus(g: &GlobalOpts, a: &CorpusArgs) -> Result<()> {
    if a.count == 0 {
        return Err(Error::invalid("--count must be at least 1"));
    }
    let corpus = sawtooth_corpus(
        a.count,
        a.f_lo,
        a.f_hi,
        a.duration,
        a.sample_rate,
        g.hop.unwrap_or(DEFAULT_HOP_SECONDS),
        g.seed,
    )?;
    fs::create_dir_all(&a.out_dir)?;
    let width = (a.count - 1).to_string().len().max(3);
    for (i, (buf, ann)) in corpus.iter().enumerate() {
        let stem = format!("clip_{i:0width$}");
        write_wav(a.out_dir.join(format!("{stem}.wav")), buf)?;
        write_annotation(a.out_dir.join(format!("{stem}.txt")), ann)?;
    }
    Ok(())
}

/// WAV files of a directory in name order, with the annotation `<stem>.txt`
/// next to each if present.
fn list_corpus(dir: &Path) -> Result<Vec<(PathBuf, Option<PathBuf>)>> {
    let mut wavs: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<io::Result<Vec<_>>>()?
        .into_iter()
        .filter(|p| is_wav(p))
        .collect();
    wavs.sort();
    if wavs.is_empty() {
        return Err(Error::invalid(format!("no WAV files in {}", dir.display())));
    }
    Ok(wavs
        .into_iter()
        .map(|w| {
            let ann = w.with_extension("txt");
            let ann = ann.is_file().then_some(ann);
            (w, ann)
        })
        .collect())
}

fn train_config(g: &GlobalOpts, a: &TrainArgs) -> TrainConfig {
    let defaults = TrainConfig::default();
    TrainConfig {
        alpha: a.alpha.unwrap_or(defaults.alpha),
        w_equiv: a.w_equiv,
        w_sce: a.w_sce,
        w_inv: a.w_inv,
        huber_delta: a.huber_delta,
        lr: a.lr,
        batch_size: a.batch_size,
        steps: a.steps,
        shift_range_semitones: a.k_max,
        shift_mode: match a.shift_mode {
            ShiftArg::Resample => ShiftMode::Resample,
            ShiftArg::Translate => ShiftMode::BinTranslate,
        },
        augment: AugmentConfig {
            snr_db_range: (a.aug_snr[0], a.aug_snr[1]),
            gain_db_range: (a.aug_gain[0], a.aug_gain[1]),
            ..AugmentConfig::default()
        },
        sigma_bins: a.sigma,
        seed: g.seed,
        ..defaults
    }
}

fn cmd_train(g: &GlobalOpts, a: &TrainArgs) -> Result<()> {
    let bank = bank_from(g)?;
    let cfg = train_config(g, a);
    let scorer = scorer_cfg(g, g.hop.unwrap_or(DEFAULT_HOP_SECONDS))?;
    let files = list_corpus(&a.corpus_dir)?;
    let outcome = match a.mode {
        TrainMode::Ssl => {
            let clips = files
                .iter()
                .map(|(w, _)| load_audio(g, w))
                .collect::<Result<Vec<_>>>()?;
            train_self_supervised(&clips, &bank, &scorer, &cfg)?
        }
        TrainMode::Sup => {
            let pairs = files
                .iter()
                .map(|(w, ann)| {
                    let ann = ann.as_ref().ok_or_else(|| {
                        Error::invalid(format!(
                            "supervised training needs an annotation next to {}",
                            w.display()
                        ))
                    })?;
                    Ok((load_audio(g, w)?, read_annotation(ann)?))
                })
                .collect::<Result<Vec<(AudioBuffer, Annotation)>>>()?;
            train_supervised(&pairs, &bank, &scorer, &cfg)?
        }
    };
    save_weights(&outcome.encoder, &a.out_weights)?;
    let loss_path = a.loss_csv.clone().unwrap_or_else(|| {
        let mut p = a.out_weights.clone().into_os_string();
        p.push(".loss.csv");
        PathBuf::from(p)
    });
    let mut csv = String::from("step,loss\n");
    for (i, l) in outcome.history.iter().enumerate() {
        csv.push_str(&format!("{i},{l:.9}\n"));
    }
    fs::write(&loss_path, csv)?;
    if let (Some(first), Some(last)) = (outcome.history.first(), outcome.history.last()) {
        eprintln!("trained {} steps: loss {first:.4} -> {last:.4}", outcome.history.len());
    }
    Ok(())
}

fn cmd_kernels(g: &GlobalOpts, c: &CandidateArg, out_csv: &Path) -> Result<()> {
    let bank = bank_from(g)?;
    let grid = &bank.grid;
    let f_c = match (c.hz, c.index) {
        (Some(hz), _) => {
            // Small tolerance so the grid endpoints themselves are accepted.
            let tol = 1e-9 * grid.f_max();
            if !(hz >= grid.f_min() - tol && hz <= grid.f_max() + tol) {
                return Err(Error::invalid(format!(
                    "candidate {hz} Hz outside the pitch grid {}..{} Hz",
                    grid.f_min(),
                    grid.f_max()
                )));
            }
            hz
        }
        (None, Some(i)) => *grid.candidates().get(i).ok_or_else(|| {
            Error::invalid(format!("candidate index {i} outside 0..{}", grid.len()))
        })?,
        (None, None) => unreachable!("clap requires one of --hz and --index"),
    };
    let values = kernel_for(f_c, &bank.freq_grid, bank.variant)?;
    let mut csv = String::from("frequency_hz,value\n");
    for (f, v) in bank.freq_grid.freqs().iter().zip(&values) {
        csv.push_str(&format!("{f:.6},{v:.9}\n"));
    }
    write_output(out_csv, &csv)
}

fn cmd_scores(g: &GlobalOpts, wav: &Path, time_s: f64, out_csv: &Path) -> Result<()> {
    let bank = bank_from(g)?;
    let buf = load_audio(g, wav)?;
    if !(time_s >= 0.0 && time_s <= buf.duration_s()) {
        return Err(Error::invalid(format!(
            "time {time_s} s outside the {:.3} s input",
            buf.duration_s()
        )));
    }
    let cfg = scorer_cfg(g, g.hop.unwrap_or(DEFAULT_HOP_SECONDS))?;
    let center = (time_s * buf.sample_rate() as f64).round() as isize;
    let frame = Scorer::new(&bank, cfg, buf.sample_rate())?.score_frame(&buf, center)?;
    let mut csv = String::from("candidate_hz,score\n");
    for (f, s) in bank.grid.candidates().iter().zip(&frame.scores) {
        csv.push_str(&format!("{f:.6},{s:.9}\n"));
    }
    write_output(out_csv, &csv)
}
