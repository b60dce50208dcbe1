//! Muscle (EMG) artifact flagging by high-band power outliers.

use crate::error::{Error, Result};
use crate::ingest::Recording;
use crate::preprocess::annotate::{ArtifactAnnotations, ArtifactKind, ArtifactSpan};

/// Power of `x` inside `[low, high]` Hz from a direct DFT over the band
/// bins. Normalization is irrelevant here; only relative window power
/// matters.
fn window_band_power(x: &[f64], fs: f64, low: f64, high: f64) -> f64 {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let df = fs / n as f64;
    let k_lo = (low / df).ceil() as usize;
    let k_hi = ((high / df).floor() as usize).min(n / 2);
    let mut power = 0.0;
    for k in k_lo..=k_hi {
        let w = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (i, &v) in x.iter().enumerate() {
            let ph = w * i as f64;
            let centered = v - mean;
            re += centered * ph.cos();
            im -= centered * ph.sin();
        }
        power += re * re + im * im;
    }
    power
}

/// Flag windows whose band power z-score exceeds `z_threshold` on any
/// channel. Windows tile the recording without overlap; a trailing
/// partial window is ignored.
pub fn flag_muscle(
    rec: &Recording,
    band: (f64, f64),
    z_threshold: f64,
    window_s: f64,
) -> Result<ArtifactAnnotations> {
    let (low, high) = band;
    let fs = rec.sampling_rate();
    let nyq = fs / 2.0;
    if !(0.0 <= low && low < high && high <= nyq) {
        return Err(Error::FrequencyRange(format!(
            "band ({low}, {high}) Hz must satisfy 0 <= low < high <= Nyquist ({nyq} Hz)"
        )));
    }
    let win = (window_s * fs).round() as usize;
    let n = rec.n_samples();
    if win < 2 || win > n {
        return Err(Error::WindowTooLong {
            window_samples: win,
            n_samples: n,
        });
    }
    let n_windows = n / win;

    let mut flagged = vec![false; n_windows];
    for ch in rec.samples() {
        let powers: Vec<f64> = (0..n_windows)
            .map(|w| window_band_power(&ch[w * win..(w + 1) * win], fs, low, high))
            .collect();
        let mean = powers.iter().sum::<f64>() / n_windows as f64;
        let var = powers.iter().map(|&p| (p - mean).powi(2)).sum::<f64>() / n_windows as f64;
        let sd = var.sqrt();
        if sd == 0.0 {
            continue;
        }
        for (w, &p) in powers.iter().enumerate() {
            if (p - mean) / sd > z_threshold {
                flagged[w] = true;
            }
        }
    }

    let spans: Vec<ArtifactSpan> = flagged
        .iter()
        .enumerate()
        .filter(|(_, &f)| f)
        .map(|(w, _)| ArtifactSpan {
            start: w * win,
            end: (w + 1) * win - 1,
            kind: ArtifactKind::Muscle,
        })
        .collect();
    Ok(ArtifactAnnotations::from_spans(spans, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sinusoid(n: usize, fs: f64, freq: f64, amp: f64) -> Vec<f64> {
        (0..n).map(|i| amp * (2.0 * PI * freq * i as f64 / fs).sin()).collect()
    }

    #[test]
    fn clean_alpha_sinusoid_is_not_flagged() {
        let fs = 256.0;
        let x = sinusoid((30.0 * fs) as usize, fs, 10.0, 40e-6);
        let rec = Recording::new(vec!["AF3".into()], fs, vec![x], None).unwrap();
        let ann = flag_muscle(&rec, (25.0, 40.0), 4.0, 1.0).unwrap();
        assert!(ann.is_empty());
    }

    #[test]
    fn injected_high_frequency_burst_is_flagged() {
        let fs = 256.0;
        let n = (30.0 * fs) as usize;
        let mut x = sinusoid(n, fs, 10.0, 40e-6);
        // One second of 30 Hz noise starting at t = 10 s.
        let burst_start = (10.0 * fs) as usize;
        for i in 0..(fs as usize) {
            x[burst_start + i] += 60e-6 * (2.0 * PI * 30.0 * i as f64 / fs).sin();
        }
        let rec = Recording::new(vec!["AF3".into()], fs, vec![x], None).unwrap();
        let ann = flag_muscle(&rec, (25.0, 40.0), 4.0, 1.0).unwrap();
        assert_eq!(ann.spans.len(), 1, "{:?}", ann.spans);
        assert_eq!(ann.spans[0].start, burst_start);
        assert_eq!(ann.spans[0].end, burst_start + fs as usize - 1);
        assert_eq!(ann.spans[0].kind, ArtifactKind::Muscle);
    }

    #[test]
    fn infinite_threshold_flags_nothing() {
        let fs = 256.0;
        let mut x = sinusoid((20.0 * fs) as usize, fs, 10.0, 40e-6);
        for i in 0..(fs as usize) {
            x[1000 + i] += 80e-6 * (2.0 * PI * 35.0 * i as f64 / fs).sin();
        }
        let rec = Recording::new(vec!["AF3".into()], fs, vec![x], None).unwrap();
        let ann = flag_muscle(&rec, (25.0, 40.0), f64::INFINITY, 1.0).unwrap();
        assert!(ann.is_empty());
    }

    #[test]
    fn window_longer_than_recording_errors() {
        let rec = Recording::new(vec!["A".into()], 256.0, vec![vec![0.0; 256]], None).unwrap();
        assert!(matches!(
            flag_muscle(&rec, (25.0, 40.0), 4.0, 10.0),
            Err(Error::WindowTooLong { .. })
        ));
    }

    #[test]
    fn band_outside_nyquist_errors() {
        let rec = Recording::new(vec!["A".into()], 256.0, vec![vec![0.0; 2560]], None).unwrap();
        assert!(matches!(
            flag_muscle(&rec, (100.0, 200.0), 4.0, 1.0),
            Err(Error::FrequencyRange(_))
        ));
    }
}
