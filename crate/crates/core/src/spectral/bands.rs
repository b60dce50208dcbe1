//! Per-segment average band powers (Table-style rows).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::SegmentedRecording;
use crate::spectral::integrate::band_power;
use crate::spectral::psd::multitaper_psd;

/// Frequency bands in Hz: delta, theta, alpha, beta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bands {
    pub delta: (f64, f64),
    pub theta: (f64, f64),
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
}

impl Default for Bands {
    fn default() -> Self {
        Bands {
            delta: (1.0, 4.0),
            theta: (4.0, 8.0),
            alpha: (8.0, 13.0),
            beta: (13.0, 30.0),
        }
    }
}

impl Bands {
    pub fn validate(&self, nyquist: f64) -> Result<()> {
        for (name, (lo, hi)) in [
            ("delta", self.delta),
            ("theta", self.theta),
            ("alpha", self.alpha),
            ("beta", self.beta),
        ] {
            if !(0.0 <= lo && lo < hi && hi <= nyquist) {
                return Err(Error::FrequencyRange(format!(
                    "{name} band ({lo}, {hi}) must satisfy 0 <= low < high <= Nyquist ({nyquist})"
                )));
            }
        }
        Ok(())
    }

    /// Narrowest band width, which bounds the usable frequency resolution.
    fn min_width(&self) -> f64 {
        [self.delta, self.theta, self.alpha, self.beta]
            .iter()
            .map(|&(lo, hi)| hi - lo)
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Segment {
    Baseline,
    Task,
}

impl std::fmt::Display for Segment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Segment::Baseline => write!(f, "baseline"),
            Segment::Task => write!(f, "task"),
        }
    }
}

/// Average band powers for one channel in one segment (V^2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandPowerRow {
    pub source_id: String,
    pub channel: String,
    pub segment: Segment,
    pub delta_abp: f64,
    pub theta_abp: f64,
    pub alpha_abp: f64,
    pub beta_abp: f64,
    /// Sum of the four band powers.
    pub brain_abp: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BandPowerTable {
    pub rows: Vec<BandPowerRow>,
}

impl BandPowerTable {
    pub fn csv(&self) -> String {
        let mut out = String::from("source_id,channel,segment,delta,theta,alpha,beta,brain\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:e},{:e},{:e},{:e},{:e}\n",
                r.source_id, r.channel, r.segment, r.delta_abp, r.theta_abp, r.alpha_abp,
                r.beta_abp, r.brain_abp
            ));
        }
        out
    }
}

/// Minimum segment duration needed so that at least a few full cycles of
/// the narrowest band fit; fixed at 4 s for the default theta band.
pub fn min_segment_seconds(bands: &Bands) -> f64 {
    (4.0 / bands.min_width().max(1e-9)).max(4.0)
}

/// Multitaper band powers for both segments of a recording.
pub fn band_power_table(
    seg: &SegmentedRecording,
    nw: f64,
    bands: &Bands,
    fmax: f64,
) -> Result<BandPowerTable> {
    let fs = seg.baseline.sampling_rate();
    bands.validate(fs / 2.0)?;
    let min_s = min_segment_seconds(bands);
    for rec in [&seg.baseline, &seg.task] {
        let dur = rec.duration_seconds();
        if dur + 1e-9 < min_s {
            return Err(Error::SegmentTooShort {
                got_seconds: dur,
                min_seconds: min_s,
            });
        }
    }

    let mut rows = Vec::new();
    for (segment, rec) in [
        (Segment::Baseline, &seg.baseline),
        (Segment::Task, &seg.task),
    ] {
        let spectrum = multitaper_psd(rec, nw, fmax)?;
        for (ch_idx, label) in rec.channel_labels().iter().enumerate() {
            let delta = band_power(&spectrum, ch_idx, bands.delta)?;
            let theta = band_power(&spectrum, ch_idx, bands.theta)?;
            let alpha = band_power(&spectrum, ch_idx, bands.alpha)?;
            let beta = band_power(&spectrum, ch_idx, bands.beta)?;
            rows.push(BandPowerRow {
                source_id: seg.source_id.clone(),
                channel: label.clone(),
                segment,
                delta_abp: delta,
                theta_abp: theta,
                alpha_abp: alpha,
                beta_abp: beta,
                brain_abp: delta + theta + alpha + beta,
            });
        }
    }
    Ok(BandPowerTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Recording;
    use std::f64::consts::PI;

    fn segmented(signal: Vec<f64>, fs: f64) -> SegmentedRecording {
        let rec =
            Recording::new(vec!["AF3".into()], fs, vec![signal], None).unwrap();
        SegmentedRecording {
            baseline: rec.clone(),
            task: rec,
            source_id: "t".into(),
        }
    }

    #[test]
    fn pure_alpha_sine_dominates_the_alpha_band() {
        let fs = 256.0;
        let n = (30.0 * fs) as usize;
        let x: Vec<f64> = (0..n)
            .map(|i| 30e-6 * (2.0 * PI * 10.0 * i as f64 / fs).sin())
            .collect();
        let table = band_power_table(&segmented(x, fs), 4.0, &Bands::default(), 128.0).unwrap();
        for row in &table.rows {
            assert!(
                row.alpha_abp / row.brain_abp > 0.9,
                "alpha fraction {}",
                row.alpha_abp / row.brain_abp
            );
            let sum = row.delta_abp + row.theta_abp + row.alpha_abp + row.beta_abp;
            assert_eq!(sum, row.brain_abp);
        }
    }

    #[test]
    fn identical_segments_give_identical_rows() {
        let fs = 256.0;
        let n = (10.0 * fs) as usize;
        let x: Vec<f64> = (0..n)
            .map(|i| {
                20e-6 * (2.0 * PI * 6.0 * i as f64 / fs).sin()
                    + 10e-6 * (2.0 * PI * 21.0 * i as f64 / fs).sin()
            })
            .collect();
        let table = band_power_table(&segmented(x, fs), 4.0, &Bands::default(), 128.0).unwrap();
        assert_eq!(table.rows.len(), 2);
        let b = &table.rows[0];
        let t = &table.rows[1];
        assert_eq!(b.segment, Segment::Baseline);
        assert_eq!(t.segment, Segment::Task);
        assert!((b.delta_abp - t.delta_abp).abs() <= 1e-12 * b.brain_abp);
        assert!((b.alpha_abp - t.alpha_abp).abs() <= 1e-12 * b.brain_abp);
        assert!((b.brain_abp - t.brain_abp).abs() <= 1e-12 * b.brain_abp);
    }

    #[test]
    fn too_short_segment_names_the_minimum() {
        let fs = 256.0;
        let x = vec![1e-6; (2.0 * fs) as usize];
        let err = band_power_table(&segmented(x, fs), 4.0, &Bands::default(), 128.0).unwrap_err();
        assert!(err.to_string().contains('4'), "{err}");
    }

    #[test]
    fn alpha_abp_magnitude_matches_published_scale() {
        // Tens of microvolts of alpha-band EEG integrate to roughly
        // 1e-11 V^2, the magnitude printed in the worked feature table.
        let fs = 256.0;
        let n = (30.0 * fs) as usize;
        let amp = 5.9e-6; // ~1.7e-11 V^2 of sine power
        let x: Vec<f64> = (0..n)
            .map(|i| amp * (2.0 * PI * 10.0 * i as f64 / fs).sin())
            .collect();
        let table = band_power_table(&segmented(x, fs), 4.0, &Bands::default(), 128.0).unwrap();
        let alpha = table.rows[1].alpha_abp;
        assert!(
            (1e-12..1e-10).contains(&alpha),
            "alpha ABP {alpha} outside the published magnitude window"
        );
        assert!((alpha - 1.72e-11).abs() < 0.1 * 1.72e-11, "{alpha}");
    }
}
