//! Descriptive statistics for report tables and box plots.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Descriptives {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Linear-interpolation quantile of sorted data (inclusive method).
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    }
}

/// Mean, spread and five-number summary with a t-based 95% CI.
pub fn describe(x: &[f64]) -> Result<Descriptives> {
    let n = x.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "descriptives need at least 2 values, got {n}"
        )));
    }
    let nf = n as f64;
    let mean = x.iter().sum::<f64>() / nf;
    let var = x.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0);
    let sd = var.sqrt();
    let se = sd / nf.sqrt();
    let t = StudentsT::new(0.0, 1.0, nf - 1.0)
        .map_err(|e| Error::InvalidParameter(format!("t distribution: {e}")))?
        .inverse_cdf(0.975);

    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(Descriptives {
        n,
        mean,
        sd,
        se,
        ci_low: mean - t * se,
        ci_high: mean + t * se,
        min: sorted[0],
        q1: quantile(&sorted, 0.25),
        median: quantile(&sorted, 0.5),
        q3: quantile(&sorted, 0.75),
        max: sorted[n - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_number_summary_of_a_known_sample() {
        let d = describe(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(d.min, 1.0);
        assert_eq!(d.q1, 2.0);
        assert_eq!(d.median, 3.0);
        assert_eq!(d.q3, 4.0);
        assert_eq!(d.max, 5.0);
        assert_eq!(d.mean, 3.0);
        assert!((d.sd - (2.5f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ci_uses_the_t_critical_value() {
        let x: Vec<f64> = (0..27).map(|i| i as f64).collect();
        let d = describe(&x).unwrap();
        // t_{0.975, 26} = 2.0555; CI must bracket the mean symmetrically.
        let half = d.ci_high - d.mean;
        assert!((half - (d.mean - d.ci_low)).abs() < 1e-12);
        assert!((half / d.se - 2.0555).abs() < 1e-3, "{}", half / d.se);
    }
}
