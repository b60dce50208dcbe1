//! Composite Simpson integration of PSD samples over a band.

use crate::error::{Error, Result};
use crate::spectral::psd::PowerSpectrum;

/// Composite Simpson's rule over uniformly spaced samples; an odd
/// interval count is finished with one trapezoid at the right end.
pub fn simpson_uniform(y: &[f64], h: f64) -> f64 {
    let n_intervals = y.len().saturating_sub(1);
    if n_intervals == 0 {
        return 0.0;
    }
    let mut total = 0.0;
    let pairs = n_intervals / 2;
    for p in 0..pairs {
        let i = 2 * p;
        total += h / 3.0 * (y[i] + 4.0 * y[i + 1] + y[i + 2]);
    }
    if n_intervals % 2 == 1 {
        total += h / 2.0 * (y[n_intervals - 1] + y[n_intervals]);
    }
    total
}

/// Integrate channel `channel` of the spectrum over `[low, high]` Hz.
/// Band edges snap to the nearest grid points.
pub fn band_power(spec: &PowerSpectrum, channel: usize, band: (f64, f64)) -> Result<f64> {
    let (low, high) = band;
    if channel >= spec.psd.len() {
        return Err(Error::InvalidParameter(format!(
            "channel {channel} out of range for {} channels",
            spec.psd.len()
        )));
    }
    if spec.freqs.len() < 2 {
        return Err(Error::FrequencyRange("spectrum grid is degenerate".into()));
    }
    if !(low < high) {
        return Err(Error::FrequencyRange(format!(
            "band ({low}, {high}) must have low < high"
        )));
    }
    let f0 = spec.freqs[0];
    let df = spec.grid_spacing();
    let last = *spec.freqs.last().unwrap();
    if low < f0 - df / 2.0 || high > last + df / 2.0 {
        return Err(Error::FrequencyRange(format!(
            "band ({low}, {high}) Hz outside the grid [{f0}, {last}] Hz"
        )));
    }
    let i0 = (((low - f0) / df).round() as isize).clamp(0, spec.freqs.len() as isize - 1) as usize;
    let i1 = (((high - f0) / df).round() as isize).clamp(0, spec.freqs.len() as isize - 1) as usize;
    Ok(simpson_uniform(&spec.psd[channel][i0..=i1], df))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_spectrum(f_lo: f64, f_hi: f64, df: f64, f: impl Fn(f64) -> f64) -> PowerSpectrum {
        let n = ((f_hi - f_lo) / df).round() as usize + 1;
        let freqs: Vec<f64> = (0..n).map(|i| f_lo + i as f64 * df).collect();
        let psd = vec![freqs.iter().map(|&x| f(x)).collect()];
        PowerSpectrum {
            freqs,
            psd,
            fmax: f_hi,
        }
    }

    #[test]
    fn constant_psd_integrates_exactly() {
        let c = 3.7e-11;
        let spec = grid_spectrum(0.0, 128.0, 0.125, |_| c);
        let p = band_power(&spec, 0, (8.0, 13.0)).unwrap();
        let expected = c * 5.0;
        assert!((p - expected).abs() <= 1e-12 * expected, "{p} vs {expected}");
    }

    #[test]
    fn quadratic_psd_is_exact_for_simpson() {
        // integral of f^2 over [4, 8] = (8^3 - 4^3)/3 = 448/3
        let spec = grid_spectrum(0.0, 128.0, 0.25, |f| f * f);
        let p = band_power(&spec, 0, (4.0, 8.0)).unwrap();
        let expected = 448.0 / 3.0;
        assert!(
            (p - expected).abs() <= 1e-9 * expected,
            "{p} vs {expected}"
        );
    }

    #[test]
    fn quadratic_with_odd_interval_count_uses_a_right_trapezoid() {
        // [0,3] with h=1 on y=x^2: Simpson over [0,2] = 8/3, trapezoid
        // over [2,3] = (4+9)/2 = 6.5
        let y = [0.0, 1.0, 4.0, 9.0];
        let got = simpson_uniform(&y, 1.0);
        assert!((got - (8.0 / 3.0 + 6.5)).abs() < 1e-12);
    }

    #[test]
    fn additivity_with_a_shared_grid_point() {
        let spec = grid_spectrum(0.0, 64.0, 0.125, |f| (0.2 * f).sin().powi(2) + 0.5);
        let ab = band_power(&spec, 0, (4.0, 8.0)).unwrap();
        let bc = band_power(&spec, 0, (8.0, 13.0)).unwrap();
        let ac = band_power(&spec, 0, (4.0, 13.0)).unwrap();
        // Shared endpoint at 8 Hz: 32 + 40 intervals, both even, so the
        // composite rules agree exactly.
        assert!((ab + bc - ac).abs() <= 1e-9 * ac.abs());
    }

    #[test]
    fn band_outside_grid_errors() {
        let spec = grid_spectrum(0.0, 40.0, 0.5, |_| 1.0);
        assert!(matches!(
            band_power(&spec, 0, (30.0, 64.0)),
            Err(Error::FrequencyRange(_))
        ));
        assert!(matches!(
            band_power(&spec, 0, (13.0, 8.0)),
            Err(Error::FrequencyRange(_))
        ));
    }

    #[test]
    fn edges_snap_to_nearest_grid_point() {
        let c = 2.0;
        let spec = grid_spectrum(0.0, 64.0, 0.5, |_| c);
        // 8.1 snaps to 8.0, 13.2 snaps to 13.0.
        let p = band_power(&spec, 0, (8.1, 13.2)).unwrap();
        assert!((p - c * 5.0).abs() < 1e-12);
    }
}
