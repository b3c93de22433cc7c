//! Coherence-model simulator for a noninterfering Sagnac SPDC
//! entangled-photon source.
//!
//! The library models the two output fields of the source as sums of
//! basis-tagged complex amplitudes, applies local polarizers at the signal
//! and idler ports, and evaluates singles intensities, post-selected
//! coincidence rates, the classical (non-post-selected) intensity product,
//! and CHSH Bell statistics on top of a deterministic Monte Carlo harness.

pub mod analyzers;
pub mod bellstats;
pub mod coincidence;
pub mod ensemble;
pub mod pairmodel;

pub use analyzers::{AnalyzerSettings, Detector, ProjectedField};
pub use bellstats::{ChshAngles, ChshResult};
pub use coincidence::{CoincidenceMode, DetectionMode, RatePoint, TimeModel};
pub use ensemble::{Accumulator, RunSpec};
pub use pairmodel::{BasisTag, OutputField, PairSample, Port, SourceConfig, SpectrumKind};

/// Error type shared by all modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid source config: {0}")]
    InvalidConfig(String),
    #[error("field from port {got:?} where port {expected:?} was required")]
    PortMismatch { expected: Port, got: Port },
    #[error("projected fields were built from different pair samples")]
    SampleMismatch,
    #[error("all four coincidence rates are zero; correlation E is undefined")]
    DegenerateCorrelation,
    #[error("ensemble requires at least one trial")]
    EmptyEnsemble,
    #[error("config parse error: {0}")]
    ConfigParse(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
