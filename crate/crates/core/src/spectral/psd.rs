//! Multitaper power spectral density.

use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};
use crate::ingest::Recording;
use crate::spectral::dpss::compute_dpss;

/// Per-channel one-sided PSD over a uniform frequency grid (V^2/Hz).
///
/// Scaled so the integral over [0, Nyquist] matches the signal variance
/// (mean removed before tapering).
#[derive(Debug, Clone)]
pub struct PowerSpectrum {
    pub freqs: Vec<f64>,
    pub psd: Vec<Vec<f64>>,
    pub fmax: f64,
}

impl PowerSpectrum {
    pub fn grid_spacing(&self) -> f64 {
        if self.freqs.len() >= 2 {
            self.freqs[1] - self.freqs[0]
        } else {
            0.0
        }
    }
}

/// Number of tapers used for a given time-half-bandwidth product.
pub fn default_taper_count(nw: f64) -> usize {
    ((2.0 * nw).floor() as usize).saturating_sub(1).max(1)
}

/// Eigenvalue-weighted multitaper PSD of every channel, truncated at
/// `fmax`. Uses `floor(2 nw) - 1` tapers.
pub fn multitaper_psd(rec: &Recording, nw: f64, fmax: f64) -> Result<PowerSpectrum> {
    let n = rec.n_samples();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "recording must have at least 2 samples".into(),
        ));
    }
    let fs = rec.sampling_rate();
    let nyquist = fs / 2.0;
    if fmax > nyquist + 1e-9 {
        return Err(Error::FrequencyRange(format!(
            "fmax {fmax} Hz exceeds Nyquist {nyquist} Hz"
        )));
    }

    let k = default_taper_count(nw);
    let dpss = compute_dpss(n, nw, k)?;
    let weight_sum: f64 = dpss.eigenvalues.iter().sum();

    let df = fs / n as f64;
    let n_bins = n / 2 + 1;
    let n_keep = (0..n_bins)
        .take_while(|&j| j as f64 * df <= fmax + 1e-9)
        .count();
    let freqs: Vec<f64> = (0..n_keep).map(|j| j as f64 * df).collect();

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);

    let mut psd = Vec::with_capacity(rec.n_channels());
    for ch in rec.samples() {
        let mean = ch.iter().sum::<f64>() / n as f64;
        let mut acc = vec![0.0f64; n_keep];
        for (taper, &lambda) in dpss.tapers.iter().zip(&dpss.eigenvalues) {
            let mut buf: Vec<Complex<f64>> = ch
                .iter()
                .zip(taper)
                .map(|(&x, &w)| Complex::new((x - mean) * w, 0.0))
                .collect();
            fft.process(&mut buf);
            for (j, a) in acc.iter_mut().enumerate() {
                // One-sided density: double everything except DC and the
                // Nyquist bin of an even-length transform.
                let two_sided = buf[j].norm_sqr() / fs;
                let double = j != 0 && !(n % 2 == 0 && j == n / 2);
                *a += lambda * if double { 2.0 * two_sided } else { two_sided };
            }
        }
        for a in acc.iter_mut() {
            *a /= weight_sum;
        }
        psd.push(acc);
    }

    Ok(PowerSpectrum { freqs, psd, fmax })
}
