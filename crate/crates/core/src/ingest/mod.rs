//! EDF ingest, channel selection and baseline/task segmentation.

mod edf;
mod markers;
mod recording;

pub use edf::{read_edf, write_edf};
pub use markers::{load_markers, SegmentMarkers};
pub use recording::Recording;

use crate::error::{Error, Result};

/// A recording split into its baseline (resting) and task (sketching) spans.
#[derive(Debug, Clone)]
pub struct SegmentedRecording {
    pub baseline: Recording,
    pub task: Recording,
    pub source_id: String,
}

/// Convert a time in seconds to a sample index (nearest integer, ties to even).
pub fn sample_index(time_s: f64, sampling_rate: f64) -> usize {
    let idx = (time_s * sampling_rate).round_ties_even();
    if idx < 0.0 {
        0
    } else {
        idx as usize
    }
}

/// Slice a recording into baseline `[t_start, t_bl)` and task
/// `[t_sketch_start, t_sketch_end)` spans, half-open at the right end.
pub fn segment(
    rec: &Recording,
    markers: &SegmentMarkers,
    source_id: &str,
) -> Result<SegmentedRecording> {
    markers.validate(rec.duration_seconds())?;
    let fs = rec.sampling_rate();

    let b0 = sample_index(markers.t_start, fs);
    let b1 = sample_index(markers.t_bl, fs);
    let t0 = sample_index(markers.t_sketch_start, fs);
    let t1 = sample_index(markers.t_sketch_end, fs);

    if b1 <= b0 {
        return Err(Error::EmptySegment(format!(
            "baseline [{}, {}) of '{source_id}' has no samples",
            markers.t_start, markers.t_bl
        )));
    }
    if t1 <= t0 {
        return Err(Error::EmptySegment(format!(
            "task [{}, {}) of '{source_id}' has no samples",
            markers.t_sketch_start, markers.t_sketch_end
        )));
    }

    Ok(SegmentedRecording {
        baseline: rec.slice(b0, b1)?,
        task: rec.slice(t0, t1)?,
        source_id: source_id.to_string(),
    })
}
