//! FastICA with log-cosh contrast and symmetric decorrelation.
//!
//! Whitening is done by eigendecomposition of the channel covariance;
//! samples inside artifact spans are excluded from fitting but the model
//! transforms (and reconstructs) the complete recording.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Recording;
use crate::preprocess::annotate::ArtifactAnnotations;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IcaSettings {
    pub n_components: usize,
    pub max_iter: usize,
    pub tol: f64,
    /// log-cosh contrast steepness; 1.0 is the usual choice.
    pub alpha: f64,
    /// Seed for the initial rotation, fixed for reproducible fits.
    pub seed: u64,
    /// Fit the unmixing on every n-th clean sample (1 = all samples).
    /// The transform and reconstruction always use the full recording.
    /// A stride of 2 halves the fit cost and stays alias-free for
    /// signals lowpassed below a quarter of the sampling rate.
    pub fit_stride: usize,
}

impl IcaSettings {
    pub fn new(n_components: usize) -> Self {
        IcaSettings {
            n_components,
            max_iter: 15_000,
            tol: 1e-4,
            alpha: 1.0,
            seed: 0,
            fit_stride: 1,
        }
    }
}

/// A fitted ICA decomposition.
///
/// `sources = unmixing * (x - means)` and `x ~ means + mixing * sources`;
/// `unmixing * mixing` is the identity, and the rotation acting on
/// whitened data has orthonormal rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IcaModel {
    pub n_components: usize,
    pub channel_labels: Vec<String>,
    pub unmixing: DMatrix<f64>,
    pub mixing: DMatrix<f64>,
    pub whitener: DMatrix<f64>,
    pub means: DVector<f64>,
    pub converged: bool,
    pub iterations_used: usize,
}

fn data_matrix(rec: &Recording, exclude: Option<&[bool]>, stride: usize) -> DMatrix<f64> {
    let c = rec.n_channels();
    let cols: Vec<usize> = (0..rec.n_samples())
        .filter(|&i| exclude.map_or(true, |mask| !mask[i]))
        .step_by(stride.max(1))
        .collect();
    let mut m = DMatrix::zeros(c, cols.len());
    for (ch_idx, ch) in rec.samples().iter().enumerate() {
        for (j, &i) in cols.iter().enumerate() {
            m[(ch_idx, j)] = ch[i];
        }
    }
    m
}

/// W <- (W W^T)^{-1/2} W
fn sym_decorrelate(w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let wwt = w * w.transpose();
    let eig = wwt.symmetric_eigen();
    let mut inv_sqrt = DMatrix::zeros(w.nrows(), w.nrows());
    for (i, &val) in eig.eigenvalues.iter().enumerate() {
        if val <= 0.0 {
            return Err(Error::WhiteningFailed(
                "rotation matrix became singular during decorrelation".into(),
            ));
        }
        inv_sqrt[(i, i)] = 1.0 / val.sqrt();
    }
    let v = &eig.eigenvectors;
    Ok(v * inv_sqrt * v.transpose() * w)
}

/// Fit FastICA on the recording, ignoring samples covered by `annotations`.
pub fn fit_fastica(
    rec: &Recording,
    annotations: &ArtifactAnnotations,
    settings: &IcaSettings,
) -> Result<IcaModel> {
    let c = rec.n_channels();
    let k = settings.n_components;
    if k == 0 || k > c {
        return Err(Error::InvalidParameter(format!(
            "n_components must be in 1..={c}, got {k}"
        )));
    }
    let mask = annotations.sample_mask(rec.n_samples());
    let x = data_matrix(rec, Some(&mask), settings.fit_stride);
    let m = x.ncols();
    if m < 2 * c {
        return Err(Error::InvalidParameter(format!(
            "only {m} clean samples for {c} channels; not enough to fit"
        )));
    }

    let means = DVector::from_iterator(c, (0..c).map(|i| x.row(i).sum() / m as f64));
    let mut xc = x;
    for i in 0..c {
        for j in 0..m {
            xc[(i, j)] -= means[i];
        }
    }

    // Whitening from the eigendecomposition of the channel covariance.
    let cov = &xc * xc.transpose() / m as f64;
    let eig = cov.symmetric_eigen();
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let max_eig = eig.eigenvalues[order[0]];
    if max_eig <= 0.0 {
        return Err(Error::WhiteningFailed("zero channel covariance".into()));
    }
    let mut whitener = DMatrix::zeros(k, c);
    let mut dewhitener = DMatrix::zeros(c, k);
    for (row, &oi) in order.iter().take(k).enumerate() {
        let val = eig.eigenvalues[oi];
        if val <= max_eig * 1e-12 {
            return Err(Error::WhiteningFailed(format!(
                "channel covariance is rank deficient: eigenvalue {row} is {val:.3e}"
            )));
        }
        let scale = val.sqrt();
        for ch in 0..c {
            whitener[(row, ch)] = eig.eigenvectors[(ch, oi)] / scale;
            dewhitener[(ch, row)] = eig.eigenvectors[(ch, oi)] * scale;
        }
    }
    let z = &whitener * &xc; // k x m, identity covariance

    // Random initial rotation, made orthonormal.
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let init = DMatrix::from_fn(k, k, |_, _| rng.random_range(-1.0..1.0));
    let mut w = sym_decorrelate(&init)?;

    // Signals whose contrast is flat along some rotation (for instance a
    // circularly symmetric pair) push the fixed-point update into a limit
    // cycle that can never pass the tolerance. Give up once the update
    // magnitude stops reaching new lows; the model is returned with
    // converged = false either way.
    const STALL_GRACE: usize = 1000;
    const STALL_WINDOW: usize = 500;

    let z_t = z.transpose();
    let mut proj = DMatrix::zeros(k, m);
    let mut w_new = DMatrix::zeros(k, k);
    let mut converged = false;
    let mut iterations_used = 0;
    let mut best_lim = f64::INFINITY;
    let mut best_iter = 0usize;
    for iter in 0..settings.max_iter {
        iterations_used = iter + 1;
        w.mul_to(&z, &mut proj);
        proj.apply(|u| *u = (settings.alpha * *u).tanh());
        // E[g'(w^T z)] per component, with g now stored in `proj`.
        let g_prime_mean = DVector::from_iterator(
            k,
            (0..k).map(|i| {
                let s: f64 = proj
                    .row(i)
                    .iter()
                    .map(|&gi| settings.alpha * (1.0 - gi * gi))
                    .sum();
                s / m as f64
            }),
        );
        proj.mul_to(&z_t, &mut w_new);
        for i in 0..k {
            for j in 0..k {
                w_new[(i, j)] = w_new[(i, j)] / m as f64 - g_prime_mean[i] * w[(i, j)];
            }
        }
        let w_next = sym_decorrelate(&w_new)?;

        let mut lim: f64 = 0.0;
        for i in 0..k {
            let dot: f64 = (0..k).map(|j| w_next[(i, j)] * w[(i, j)]).sum();
            lim = lim.max((dot.abs() - 1.0).abs());
        }
        w = w_next;
        if lim < settings.tol {
            converged = true;
            break;
        }
        if lim < best_lim * 0.999 {
            best_lim = lim;
            best_iter = iter;
        } else if iter >= STALL_GRACE && iter - best_iter >= STALL_WINDOW {
            break;
        }
    }

    let unmixing = &w * &whitener;
    let mixing = &dewhitener * w.transpose();

    Ok(IcaModel {
        n_components: k,
        channel_labels: rec.channel_labels().to_vec(),
        unmixing,
        mixing,
        whitener,
        means,
        converged,
        iterations_used,
    })
}

impl IcaModel {
    fn check_compatible(&self, rec: &Recording) -> Result<()> {
        if rec.channel_labels() != self.channel_labels.as_slice() {
            return Err(Error::InvalidParameter(format!(
                "recording channels {:?} do not match the fitted model's {:?}",
                rec.channel_labels(),
                self.channel_labels
            )));
        }
        Ok(())
    }

    /// Component time courses for the complete recording.
    pub fn sources(&self, rec: &Recording) -> Result<DMatrix<f64>> {
        self.check_compatible(rec)?;
        let mut x = data_matrix(rec, None, 1);
        for i in 0..x.nrows() {
            for j in 0..x.ncols() {
                x[(i, j)] -= self.means[i];
            }
        }
        Ok(&self.unmixing * x)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Reconstruct the recording from all components except the rejected ones.
pub fn remove_components(
    rec: &Recording,
    model: &IcaModel,
    reject: &[usize],
) -> Result<Recording> {
    for &idx in reject {
        if idx >= model.n_components {
            return Err(Error::ComponentOutOfRange {
                index: idx,
                n_components: model.n_components,
            });
        }
    }
    let mut sources = model.sources(rec)?;
    for &idx in reject {
        sources.row_mut(idx).fill(0.0);
    }
    let recon = &model.mixing * sources;
    let samples: Vec<Vec<f64>> = (0..rec.n_channels())
        .map(|ch| {
            (0..rec.n_samples())
                .map(|j| recon[(ch, j)] + model.means[ch])
                .collect()
        })
        .collect();
    rec.with_samples(samples)
}

/// Suggest likely ocular components: sources whose time course correlates
/// strongly (|r| > 0.7) with the 1-3 Hz content of the mean of AF3 and AF4.
pub fn suggest_eog_components(rec: &Recording, model: &IcaModel) -> Result<Vec<usize>> {
    let af3 = rec
        .channel("AF3")
        .ok_or_else(|| Error::UnknownChannel {
            requested: "AF3".into(),
            available: rec.channel_labels().to_vec(),
        })?;
    let af4 = rec
        .channel("AF4")
        .ok_or_else(|| Error::UnknownChannel {
            requested: "AF4".into(),
            available: rec.channel_labels().to_vec(),
        })?;
    let frontal_mean: Vec<f64> = af3.iter().zip(af4).map(|(&a, &b)| (a + b) / 2.0).collect();

    let spec = crate::preprocess::fir::FilterSpec {
        l_freq: 1.0,
        h_freq: 3.0,
        window: crate::preprocess::fir::FirWindow::Hamming,
        l_trans_bandwidth: 1.0,
        h_trans_bandwidth: 1.0,
    };
    let filt = crate::preprocess::fir::design_bandpass(rec.sampling_rate(), &spec)?;
    let reference = crate::preprocess::fir::filter_channel(&frontal_mean, &filt.taps)?;

    let sources = model.sources(rec)?;
    let mut picks = Vec::new();
    for i in 0..model.n_components {
        let src: Vec<f64> = sources.row(i).iter().copied().collect();
        if let Some(r) = pearson(&src, &reference) {
            if r.abs() > 0.7 {
                picks.push(i);
            }
        }
    }
    Ok(picks)
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len().min(b.len());
    if n < 2 {
        return None;
    }
    let ma = a[..n].iter().sum::<f64>() / n as f64;
    let mb = b[..n].iter().sum::<f64>() / n as f64;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let da = a[i] - ma;
        let db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some(sab / (saa * sbb).sqrt())
}
