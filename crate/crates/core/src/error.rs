//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("EDF parse error at byte {offset}: {message}")]
    EdfParse { offset: u64, message: String },

    #[error("EDF file truncated: header declares {expected} data records, found {found}")]
    EdfTruncated { expected: i64, found: i64 },

    #[error("EDF calibration error in signal '{label}': physical_min == physical_max ({value})")]
    EdfCalibration { label: String, value: f64 },

    #[error("unknown channel '{requested}'; available: {}", available.join(", "))]
    UnknownChannel {
        requested: String,
        available: Vec<String>,
    },

    #[error("invalid recording: {0}")]
    InvalidRecording(String),

    #[error("invalid segment markers: {0}")]
    InvalidMarkers(String),

    #[error("empty segment: {0}")]
    EmptySegment(String),

    #[error("filter design error: {0}")]
    FilterDesign(String),

    #[error("recording too short: {n_samples} samples, filter needs more than {min_samples}")]
    RecordingTooShort {
        n_samples: usize,
        min_samples: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("whitening failed: {0}")]
    WhiteningFailed(String),

    #[error("component index {index} out of range for {n_components} components")]
    ComponentOutOfRange { index: usize, n_components: usize },

    #[error("analysis window of {window_samples} samples exceeds recording length {n_samples}")]
    WindowTooLong {
        window_samples: usize,
        n_samples: usize,
    },

    #[error("frequency range error: {0}")]
    FrequencyRange(String),

    #[error("segment too short: {got_seconds:.3} s, minimum {min_seconds:.3} s for the requested resolution")]
    SegmentTooShort {
        got_seconds: f64,
        min_seconds: f64,
    },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("incomplete design: missing cells {missing:?}")]
    IncompleteDesign { missing: Vec<String> },

    #[error("correlation matrices have mismatched labels: {0}")]
    LabelMismatch(String),

    #[error("synthesis spec error: {0}")]
    SynthSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
