use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Baseline/task boundaries for one recording, in seconds from its start.
///
/// Supplied as a sidecar JSON file next to each EDF file, with keys
/// `t_start`, `t_bl`, `t_sketch_start`, `t_sketch_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentMarkers {
    pub t_start: f64,
    pub t_bl: f64,
    pub t_sketch_start: f64,
    pub t_sketch_end: f64,
}

impl SegmentMarkers {
    /// Check ordering and containment within a recording of the given
    /// duration (seconds).
    pub fn validate(&self, duration_s: f64) -> Result<()> {
        let SegmentMarkers {
            t_start,
            t_bl,
            t_sketch_start,
            t_sketch_end,
        } = *self;
        for (name, v) in [
            ("t_start", t_start),
            ("t_bl", t_bl),
            ("t_sketch_start", t_sketch_start),
            ("t_sketch_end", t_sketch_end),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidMarkers(format!("{name} is not finite")));
            }
        }
        if !(t_start <= t_bl && t_bl <= t_sketch_start && t_sketch_start < t_sketch_end) {
            return Err(Error::InvalidMarkers(format!(
                "need t_start <= t_bl <= t_sketch_start < t_sketch_end, got \
                 ({t_start}, {t_bl}, {t_sketch_start}, {t_sketch_end})"
            )));
        }
        if t_start < 0.0 || t_sketch_end > duration_s {
            return Err(Error::InvalidMarkers(format!(
                "markers [{t_start}, {t_sketch_end}] fall outside the {duration_s:.3} s recording"
            )));
        }
        Ok(())
    }
}

/// Load a marker sidecar JSON file.
pub fn load_markers(path: impl AsRef<Path>) -> Result<SegmentMarkers> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
