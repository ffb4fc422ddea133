//! SWIPE' pitch estimation.
//!
//! The pipeline samples windowed magnitude spectra on a 1024-point auditory
//! frequency grid, scores 295 log-spaced pitch candidates against
//! sawtooth-inspired kernels, and picks the best candidate per frame. A
//! 647-parameter Toeplitz encoder can refine the score vectors; it is trained
//! either self-supervised (transposition equivariance plus timbre invariance)
//! or against Gaussian-blurred labels. [`metrics`] evaluates tracks with raw
//! pitch accuracy, voicing F-score and overall accuracy.

pub mod audio;
pub mod cli;
pub mod encoder;
pub mod error;
pub mod kernels;
pub mod metrics;
pub mod scorer;
pub mod spectral;
pub mod tracker;

pub use audio::{AudioBuffer, Annotation};
pub use error::{Error, Result};
pub use kernels::{KernelBank, KernelVariant, PitchGrid};
pub use scorer::{ScoreFrame, ScorerConfig};
pub use spectral::FrequencyScale;
pub use tracker::{PitchFrame, PitchTrack};
