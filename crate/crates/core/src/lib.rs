//! EEG mental-effort analysis: EDF ingest, signal cleaning, multitaper
//! band powers, relative-power metrics (inter-BRPD and cognitive indices)
//! and cohort-level statistics, plus a synthetic-recording generator used
//! as the end-to-end oracle.

pub mod error;
pub mod ingest;
pub mod metrics;
pub mod preprocess;
pub mod spectral;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use ingest::{Recording, SegmentMarkers, SegmentedRecording};
