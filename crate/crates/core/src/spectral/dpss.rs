//! Discrete prolate spheroidal (Slepian) sequences.
//!
//! Tapers are computed as eigenvectors of the symmetric tridiagonal
//! matrix whose top eigenvectors maximize spectral concentration in
//! [-W, W] cycles/sample (W = nw/n): Sturm bisection for the top-k
//! eigenvalues, inverse iteration for the vectors. Concentration ratios
//! come from the taper autocorrelation against the sinc kernel.

use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};

/// A set of DPSS tapers with their in-band concentration ratios.
#[derive(Debug, Clone)]
pub struct DpssSet {
    pub n: usize,
    pub nw: f64,
    pub k: usize,
    /// k tapers of length n, orthonormal, ordered by concentration.
    pub tapers: Vec<Vec<f64>>,
    /// Energy fraction of each taper inside [-nw/n, nw/n] cycles/sample.
    pub eigenvalues: Vec<f64>,
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0f64;
    for i in 0..diag.len() {
        let sub = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] / q };
        q = diag[i] - x - sub;
        if q < 0.0 {
            count += 1;
        }
        if q == 0.0 {
            q = 1e-300;
        }
    }
    count
}

/// The `idx`-th (0-based, ascending) eigenvalue by bisection.
fn bisect_eigenvalue(diag: &[f64], off: &[f64], idx: usize) -> f64 {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 }
            + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let scale = hi.abs().max(lo.abs()).max(1.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(diag, off, mid) > idx {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-16 * scale {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// LU factorization with partial pivoting of (T - sigma I), T tridiagonal.
struct TridiagLu {
    d: Vec<f64>,   // main diagonal of U
    du: Vec<f64>,  // first superdiagonal of U
    du2: Vec<f64>, // second superdiagonal of U
    dl: Vec<f64>,  // multipliers
    swapped: Vec<bool>,
}

fn factor_shifted(diag: &[f64], off: &[f64], sigma: f64) -> TridiagLu {
    let n = diag.len();
    let mut d: Vec<f64> = diag.iter().map(|&v| v - sigma).collect();
    let mut du = off.to_vec();
    let mut dl = off.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut swapped = vec![false; n.saturating_sub(1)];

    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = 1e-300;
            }
            let fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
            if i + 2 < n {
                du2[i] = 0.0;
            }
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            let temp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = temp - fact * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du[i + 1];
            }
            swapped[i] = true;
        }
    }
    if n > 0 && d[n - 1] == 0.0 {
        d[n - 1] = 1e-300;
    }
    TridiagLu {
        d,
        du,
        du2,
        dl,
        swapped,
    }
}

fn solve_factored(lu: &TridiagLu, b: &mut [f64]) {
    let n = b.len();
    for i in 0..n.saturating_sub(1) {
        if lu.swapped[i] {
            b.swap(i, i + 1);
        }
        b[i + 1] -= lu.dl[i] * b[i];
    }
    b[n - 1] /= lu.d[n - 1];
    if n >= 2 {
        b[n - 2] = (b[n - 2] - lu.du[n - 2] * b[n - 1]) / lu.d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - lu.du[i] * b[i + 1] - lu.du2[i] * b[i + 2]) / lu.d[i];
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|&x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

/// Linear autocorrelation r[m] = sum_t h[t] h[t+m] for m = 0..n-1, via FFT.
fn autocorrelation(h: &[f64], planner: &mut FftPlanner<f64>) -> Vec<f64> {
    let n = h.len();
    let m = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = (0..m)
        .map(|i| Complex::new(if i < n { h[i] } else { 0.0 }, 0.0))
        .collect();
    planner.plan_fft_forward(m).process(&mut buf);
    for v in buf.iter_mut() {
        *v = Complex::new(v.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(m).process(&mut buf);
    (0..n).map(|i| buf[i].re / m as f64).collect()
}

/// In-band energy fraction on [-w, w] cycles/sample for a unit-norm taper.
fn concentration(h: &[f64], w: f64, planner: &mut FftPlanner<f64>) -> f64 {
    let r = autocorrelation(h, planner);
    let mut lam = 2.0 * w * r[0];
    for (m, &rm) in r.iter().enumerate().skip(1) {
        let kernel = (2.0 * std::f64::consts::PI * w * m as f64).sin() / (std::f64::consts::PI * m as f64);
        lam += 2.0 * rm * kernel;
    }
    lam
}

/// Compute the first `k` Slepian tapers of length `n` with time-half-
/// bandwidth product `nw`.
pub fn compute_dpss(n: usize, nw: f64, k: usize) -> Result<DpssSet> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "taper length must be at least 2, got {n}"
        )));
    }
    if !(nw > 0.0 && nw < n as f64 / 2.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < nw < n/2, got nw = {nw} for n = {n}"
        )));
    }
    if k == 0 || (k as f64) > 2.0 * nw {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k <= 2*nw = {}, got k = {k}",
            2.0 * nw
        )));
    }

    let w = nw / n as f64;
    let cos_w = (2.0 * std::f64::consts::PI * w).cos();
    let diag: Vec<f64> = (0..n)
        .map(|t| {
            let c = (n as f64 - 1.0 - 2.0 * t as f64) / 2.0;
            c * c * cos_w
        })
        .collect();
    let off: Vec<f64> = (1..n)
        .map(|t| t as f64 * (n - t) as f64 / 2.0)
        .collect();

    let mut planner = FftPlanner::new();
    let mut tapers: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut eigenvalues = Vec::with_capacity(k);
    for order in 0..k {
        let lambda = bisect_eigenvalue(&diag, &off, n - 1 - order);
        let lu = factor_shifted(&diag, &off, lambda);

        // Deterministic start vector with energy everywhere.
        let mut v: Vec<f64> = (0..n)
            .map(|i| ((i as f64 + 1.0) * 0.7390851332151607).sin() + 0.5)
            .collect();
        normalize(&mut v);
        for _ in 0..3 {
            solve_factored(&lu, &mut v);
            // Re-orthogonalize against the tapers already found.
            for prev in tapers.iter() {
                let dot: f64 = v.iter().zip(prev as &Vec<f64>).map(|(&a, &b)| a * b).sum();
                for (x, &p) in v.iter_mut().zip(prev.iter()) {
                    *x -= dot * p;
                }
            }
            normalize(&mut v);
        }

        // Sign conventions: even orders have positive mean, odd orders a
        // positive first significant sample.
        if order % 2 == 0 {
            if v.iter().sum::<f64>() < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        } else {
            let thresh = (1.0 / n as f64).max(1e-7);
            if let Some(&first) = v.iter().find(|&&x| x * x > thresh) {
                if first < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
            }
        }

        eigenvalues.push(concentration(&v, w, &mut planner));
        tapers.push(v);
    }

    Ok(DpssSet {
        n,
        nw,
        k,
        tapers,
        eigenvalues,
    })
}
