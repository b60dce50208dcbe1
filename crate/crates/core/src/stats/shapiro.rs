//! Shapiro-Wilk W test, Royston's AS R94 approximation.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).unwrap()
}

/// Shapiro-Wilk test; returns `(W, p)`.
///
/// Valid for 3 <= n <= 5000 samples that are not all equal.
pub fn shapiro_wilk(x: &[f64]) -> Result<(f64, f64)> {
    let n = x.len();
    if !(3..=5000).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "Shapiro-Wilk needs 3 <= n <= 5000 samples, got {n}"
        )));
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let range = sorted[n - 1] - sorted[0];
    if !(range > 0.0) {
        return Err(Error::DegenerateInput(
            "Shapiro-Wilk sample has zero range".into(),
        ));
    }

    let an = n as f64;
    let nn2 = n / 2;
    let normal = std_normal();

    // Coefficients for the upper-half order statistics.
    let mut a = vec![0.0f64; nn2];
    if n == 3 {
        a[0] = std::f64::consts::FRAC_1_SQRT_2;
    } else {
        const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
        const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
        let an25 = an + 0.25;
        let mut summ2 = 0.0;
        for (i, ai) in a.iter_mut().enumerate() {
            // Lower-tail quantile; negate for the upper-half coefficient.
            let m = normal.inverse_cdf((i as f64 + 1.0 - 0.375) / an25);
            *ai = -m;
            summ2 += m * m;
        }
        summ2 *= 2.0;
        let ssumm2 = summ2.sqrt();
        let rsn = 1.0 / an.sqrt();
        let a1 = poly(&C1, rsn) + a[0] / ssumm2;
        let (i1, fac) = if n > 5 {
            let a2 = a[1] / ssumm2 + poly(&C2, rsn);
            let fac = ((summ2 - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1])
                / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
                .sqrt();
            a[1] = a2;
            (2usize, fac)
        } else {
            let fac =
                ((summ2 - 2.0 * a[0] * a[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
            (1usize, fac)
        };
        a[0] = a1;
        for ai in a.iter_mut().skip(i1) {
            *ai /= fac;
        }
    }

    // W = (sum_i a_i (x_(n-1-i) - x_i))^2 / (ssa * ssx) with the sample
    // range-scaled for numerical stability; ssa corrects the slightly
    // off-unit norm of the approximate coefficients.
    let scaled: Vec<f64> = sorted.iter().map(|&v| v / range).collect();
    let mean = scaled.iter().sum::<f64>() / an;
    let ssx: f64 = scaled.iter().map(|&v| (v - mean) * (v - mean)).sum();
    let mut b = 0.0;
    for (i, &ai) in a.iter().enumerate() {
        b += ai * (scaled[n - 1 - i] - scaled[i]);
    }
    let ssa: f64 = 2.0 * a.iter().map(|&v| v * v).sum::<f64>();
    let w1 = ((ssa * ssx - b * b) / (ssa * ssx)).clamp(f64::MIN_POSITIVE, 1.0);
    let w = 1.0 - w1;

    // p-value per Royston's approximations.
    if n == 3 {
        let pi6 = 6.0 / std::f64::consts::PI;
        let stqr = (0.75f64).sqrt().asin();
        let p = (pi6 * (w.sqrt().asin() - stqr)).clamp(0.0, 1.0);
        return Ok((w, p));
    }

    const C3: [f64; 4] = [0.5440, -0.39978, 0.025054, -6.714e-4];
    const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
    const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
    const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
    const G: [f64; 2] = [-2.273, 0.459];

    let y = w1.ln();
    let p = if n <= 11 {
        let gamma = poly(&G, an);
        if y >= gamma {
            1e-19
        } else {
            let y2 = -(gamma - y).ln();
            let m = poly(&C3, an);
            let s = poly(&C4, an).exp();
            std_normal().sf((y2 - m) / s)
        }
    } else {
        let xx = an.ln();
        let m = poly(&C5, xx);
        let s = poly(&C6, xx).exp();
        std_normal().sf((y - m) / s)
    };
    Ok((w, p.clamp(0.0, 1.0)))
}
