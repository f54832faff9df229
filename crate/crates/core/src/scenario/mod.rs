//! Scenario generation: ingestion, densification, day synthesis and physics/data fusion.

mod augment;
mod fusion;
mod ingest;
mod interp;

pub use augment::{augment_days, interpolate_profile, AugmentationConfig};
pub use fusion::{fit_residual_corrector, fuse_physics_data, DataCorrector, ResidualCorrector};
pub use ingest::{
    read_profile_csv, write_profile_csv, write_profiles_csv, IngestedSeries, CSV_HEADER,
    MAX_FILLABLE_GAP, TIMESTAMP_FORMAT,
};
pub use interp::Pchip;

use chrono::NaiveDateTime;
use thiserror::Error;

use crate::profile::ProfileError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("cannot resample {source_len} samples onto {target_len}: target must be a positive multiple")]
    ResamplingGrid {
        source_len: usize,
        target_len: usize,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("{what} differ in length ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },
    #[error("corrector has {expected} slots but the profile has {found} samples")]
    SlotCountMismatch { expected: usize, found: usize },
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("line {line}: timestamp {timestamp} is earlier than the previous row")]
    UnsortedTimestamps { line: u64, timestamp: NaiveDateTime },
    #[error("line {line}: duplicate timestamp {timestamp}")]
    DuplicateTimestamp { line: u64, timestamp: NaiveDateTime },
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}
