//! Windowed-sinc FIR design (Hamming) and zero-phase application.
//!
//! The bandpass is built from two independently designed linear-phase
//! sections: a highpass by spectral inversion of a lowpass at the low
//! -6 dB cutoff, and a lowpass at the high -6 dB cutoff. The sections are
//! convolved and the result cropped centrally to the longer section's
//! length, which keeps symmetry and reproduces the reported length.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Recording;

/// Hamming design rule: taps spanning 3.3 / transition-width seconds.
const HAMMING_LENGTH_FACTOR: f64 = 3.3;

/// Supported FIR design windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FirWindow {
    Hamming,
}

/// Bandpass FIR specification: passband edges plus transition bandwidths.
///
/// The -6 dB cutoffs sit in the middle of each transition band, so a
/// 1-40 Hz passband with 1/10 Hz transitions cuts at 0.5 and 45 Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub l_freq: f64,
    pub h_freq: f64,
    pub window: FirWindow,
    pub l_trans_bandwidth: f64,
    pub h_trans_bandwidth: f64,
}

impl Default for FilterSpec {
    fn default() -> Self {
        FilterSpec {
            l_freq: 1.0,
            h_freq: 40.0,
            window: FirWindow::Hamming,
            l_trans_bandwidth: 1.0,
            h_trans_bandwidth: 10.0,
        }
    }
}

impl FilterSpec {
    pub fn validate(&self, sampling_rate: f64) -> Result<()> {
        let nyq = sampling_rate / 2.0;
        if !(0.0 < self.l_freq && self.l_freq < self.h_freq && self.h_freq < nyq) {
            return Err(Error::FilterDesign(format!(
                "need 0 < l_freq < h_freq < Nyquist ({nyq} Hz), got {} and {}",
                self.l_freq, self.h_freq
            )));
        }
        if self.l_trans_bandwidth <= 0.0 || self.h_trans_bandwidth <= 0.0 {
            return Err(Error::FilterDesign(
                "transition bandwidths must be positive".into(),
            ));
        }
        if self.l_freq - self.l_trans_bandwidth < -1e-12 {
            return Err(Error::FilterDesign(format!(
                "lower transition band ({} Hz) extends below 0 Hz",
                self.l_trans_bandwidth
            )));
        }
        if self.h_freq + self.h_trans_bandwidth > nyq + 1e-12 {
            return Err(Error::FilterDesign(format!(
                "upper transition band ({} Hz above {} Hz) extends past Nyquist",
                self.h_trans_bandwidth, self.h_freq
            )));
        }
        Ok(())
    }

    /// Length in samples of the section handling the given transition,
    /// rounded to odd (linear-phase type I).
    pub fn section_length(transition_hz: f64, sampling_rate: f64) -> usize {
        let n = (HAMMING_LENGTH_FACTOR / (transition_hz / sampling_rate)).round() as usize;
        if n % 2 == 0 {
            n + 1
        } else {
            n
        }
    }
}

/// Designed bandpass sections and their combination.
#[derive(Debug, Clone)]
pub struct BandpassFilter {
    pub highpass: Vec<f64>,
    pub lowpass: Vec<f64>,
    /// Combined taps, length `max(highpass.len(), lowpass.len())`.
    pub taps: Vec<f64>,
    pub sampling_rate: f64,
}

fn hamming(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| {
            0.54 - 0.46 * (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos()
        })
        .collect()
}

/// Windowed-sinc lowpass with unit DC gain; `cutoff_hz` is the -6 dB point.
pub fn lowpass_taps(n: usize, cutoff_hz: f64, sampling_rate: f64) -> Vec<f64> {
    let fc = cutoff_hz / sampling_rate; // cycles per sample
    let mid = (n - 1) as f64 / 2.0;
    let win = hamming(n);
    let mut taps: Vec<f64> = (0..n)
        .map(|i| {
            let m = i as f64 - mid;
            let sinc = if m == 0.0 {
                2.0 * fc
            } else {
                (2.0 * std::f64::consts::PI * fc * m).sin() / (std::f64::consts::PI * m)
            };
            sinc * win[i]
        })
        .collect();
    let sum: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= sum;
    }
    taps
}

/// Highpass by spectral inversion: delta minus the unit-gain lowpass.
/// DC gain is exactly zero.
pub fn highpass_taps(n: usize, cutoff_hz: f64, sampling_rate: f64) -> Vec<f64> {
    let mut taps: Vec<f64> = lowpass_taps(n, cutoff_hz, sampling_rate)
        .into_iter()
        .map(|t| -t)
        .collect();
    taps[n / 2] += 1.0;
    taps
}

fn convolve_full(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Design the bandpass filter for the given rate and spec.
pub fn design_bandpass(sampling_rate: f64, spec: &FilterSpec) -> Result<BandpassFilter> {
    spec.validate(sampling_rate)?;
    let FirWindow::Hamming = spec.window;

    let n_hp = FilterSpec::section_length(spec.l_trans_bandwidth, sampling_rate);
    let n_lp = FilterSpec::section_length(spec.h_trans_bandwidth, sampling_rate);
    let f_hp = spec.l_freq - spec.l_trans_bandwidth / 2.0;
    let f_lp = spec.h_freq + spec.h_trans_bandwidth / 2.0;

    let highpass = highpass_taps(n_hp, f_hp, sampling_rate);
    let lowpass = lowpass_taps(n_lp, f_lp, sampling_rate);

    let full = convolve_full(&highpass, &lowpass);
    let n_out = n_hp.max(n_lp);
    let crop = (full.len() - n_out) / 2;
    let taps = full[crop..crop + n_out].to_vec();

    Ok(BandpassFilter {
        highpass,
        lowpass,
        taps,
        sampling_rate,
    })
}

/// Magnitude of the discrete-time Fourier response of `taps` at `freq_hz`.
pub fn frequency_response(taps: &[f64], freq_hz: f64, sampling_rate: f64) -> f64 {
    let w = 2.0 * std::f64::consts::PI * freq_hz / sampling_rate;
    let (mut re, mut im) = (0.0, 0.0);
    for (i, &t) in taps.iter().enumerate() {
        re += t * (w * i as f64).cos();
        im -= t * (w * i as f64).sin();
    }
    (re * re + im * im).sqrt()
}

/// Zero-phase filtering: reflection padding by half the filter length,
/// forward convolution, group-delay compensation. Output length equals
/// input length.
pub fn filter_channel(x: &[f64], taps: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    let l = taps.len();
    if n <= l {
        return Err(Error::RecordingTooShort {
            n_samples: n,
            min_samples: l,
        });
    }
    let pad = (l - 1) / 2;

    // Mirror about the first/last sample without repeating it.
    let mut padded = Vec::with_capacity(n + 2 * pad);
    for i in (1..=pad).rev() {
        padded.push(x[i]);
    }
    padded.extend_from_slice(x);
    for i in 1..=pad {
        padded.push(x[n - 1 - i]);
    }

    let mut out = vec![0.0; n];
    for (k, o) in out.iter_mut().enumerate() {
        // y[k] = sum_j taps[j] * padded[k + (l-1) - j] shifted back by pad
        let base = k + l - 1;
        let mut acc = 0.0;
        for (j, &t) in taps.iter().enumerate() {
            acc += t * padded[base - j];
        }
        *o = acc;
    }
    Ok(out)
}

/// Apply [`filter_channel`] across every channel of a recording.
pub fn filter_recording(rec: &Recording, taps: &[f64]) -> Result<Recording> {
    let filtered = rec
        .samples()
        .iter()
        .map(|ch| filter_channel(ch, taps))
        .collect::<Result<Vec<_>>>()?;
    rec.with_samples(filtered)
}

/// Zero-phase bandpass: the highpass and lowpass sections run in cascade.
///
/// The cascade keeps the highpass section's exact DC null, which the
/// centrally cropped combined taps trade away (their DC leak is about
/// -90 dB).
pub fn apply_bandpass(rec: &Recording, filter: &BandpassFilter) -> Result<Recording> {
    let highpassed = filter_recording(rec, &filter.highpass)?;
    filter_recording(&highpassed, &filter.lowpass)
}
