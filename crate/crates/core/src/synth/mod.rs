//! Synthetic EEG with known band structure: the independent oracle for
//! end-to-end pipeline checks.
//!
//! Signals are sums of within-band sinusoids with seeded random phases
//! plus a low broadband noise floor; amplitudes are solved analytically
//! from the target band powers, so the generator does not depend on the
//! spectral estimator it is used to validate.

mod cohort;

pub use cohort::{
    default_fixture_spec, fixture_manifest, generate_cohort, CellExpectation, CellTarget,
    CohortMember, CohortSpec, FixtureManifest,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Recording;

/// Channel labels used for synthetic recordings, frontal-first.
pub const SYNTH_CHANNELS: [&str; 8] = ["AF3", "AF4", "F3", "F4", "F7", "F8", "FC5", "FC6"];

/// Target relative band powers in percent; must sum to 100.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandTargets {
    pub delta: f64,
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl BandTargets {
    pub fn validate(&self) -> Result<()> {
        let vals = [self.delta, self.theta, self.alpha, self.beta];
        if vals.iter().any(|&v| v < 0.0) {
            return Err(Error::SynthSpec(format!("negative band target: {self:?}")));
        }
        let sum: f64 = vals.iter().sum();
        if (sum - 100.0).abs() > 1e-9 {
            return Err(Error::SynthSpec(format!(
                "band targets sum to {sum}, expected 100"
            )));
        }
        Ok(())
    }

    /// Targets realizing a given inter-BRPD: alpha + theta = 36 %, the
    /// remaining 64 % split fixed between delta and beta.
    pub fn from_inter_brpd(d: f64) -> Result<Self> {
        const ALPHA_PLUS_THETA: f64 = 36.0;
        if d.abs() > ALPHA_PLUS_THETA - 2.0 {
            return Err(Error::SynthSpec(format!(
                "inter-BRPD target {d} is not realizable with alpha+theta = {ALPHA_PLUS_THETA} %"
            )));
        }
        let alpha = (ALPHA_PLUS_THETA + d) / 2.0;
        let theta = (ALPHA_PLUS_THETA - d) / 2.0;
        let rest = 100.0 - ALPHA_PLUS_THETA;
        Ok(BandTargets {
            delta: rest * 0.55,
            theta,
            alpha,
            beta: rest * 0.45,
        })
    }

    pub fn inter_brpd(&self) -> f64 {
        self.alpha - self.theta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseModel {
    /// Three sinusoids per band at fixed in-band positions.
    SinusoidMix,
    /// A dense comb of random-phase lines per band.
    BandNoise,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub sampling_rate: f64,
    pub duration: f64,
    pub targets: BandTargets,
    pub model: NoiseModel,
    pub seed: u64,
    /// Total brain-band signal power in V^2; sets the amplitude scale.
    pub total_power: f64,
}

impl SynthSpec {
    pub fn new(targets: BandTargets, duration: f64, seed: u64) -> Self {
        SynthSpec {
            sampling_rate: 256.0,
            duration,
            targets,
            model: NoiseModel::SinusoidMix,
            seed,
            total_power: 9e-10, // 30 uV RMS
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sampling_rate > 0.0) {
            return Err(Error::SynthSpec("sampling rate must be positive".into()));
        }
        if self.duration < 8.0 {
            return Err(Error::SynthSpec(format!(
                "duration {} s below the 8 s minimum",
                self.duration
            )));
        }
        self.targets.validate()
    }
}

/// Default synthesis bands; match the analysis defaults.
const BANDS: [(f64, f64); 4] = [(1.0, 4.0), (4.0, 8.0), (8.0, 13.0), (13.0, 30.0)];

/// Broadband noise floor as a fraction of the total line power. The
/// in-band share is < 0.3 % of any band, far inside the +-2 point
/// envelope, while the independent per-channel noise keeps the channel
/// covariance well conditioned for ICA.
const NOISE_POWER_RATIO: f64 = 1e-2;

/// Sinusoid-mix line frequencies per band. Whole-hertz lines keep every
/// line on the same Simpson-weight parity for whole-second segments, so
/// the rule's narrow-peak bias cancels out of the relative powers.
const SINUSOID_LINES: [&[f64]; 4] = [
    &[2.0, 3.0],
    &[5.0, 6.0, 7.0],
    &[9.0, 10.0, 11.0],
    &[17.0, 21.0, 26.0],
];

/// In-band line frequencies for one band under the given model.
fn band_lines(model: NoiseModel, band_idx: usize) -> Vec<f64> {
    let (lo, hi) = BANDS[band_idx];
    let width = hi - lo;
    match model {
        NoiseModel::SinusoidMix => SINUSOID_LINES[band_idx].to_vec(),
        NoiseModel::BandNoise => {
            let n = ((width / 0.25).round() as usize).max(3);
            (0..n)
                .map(|i| lo + width * (0.1 + 0.8 * i as f64 / (n - 1) as f64))
                .collect()
        }
    }
}

/// One spectral line of the synthetic mix: fixed frequency and phase,
/// per-segment amplitude.
struct Line {
    freq: f64,
    phase: f64,
    amp_baseline: f64,
    amp_task: f64,
}

fn solve_lines(
    model: NoiseModel,
    baseline: &BandTargets,
    task: &BandTargets,
    total_power: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<Line> {
    let mut lines = Vec::new();
    let base_pcts = [baseline.delta, baseline.theta, baseline.alpha, baseline.beta];
    let task_pcts = [task.delta, task.theta, task.alpha, task.beta];
    for b in 0..BANDS.len() {
        let freqs = band_lines(model, b);
        let per_line = 1.0 / freqs.len() as f64;
        for f in freqs {
            // Sinusoid power A^2/2 = share of the band target.
            let p_base = base_pcts[b] / 100.0 * total_power * per_line;
            let p_task = task_pcts[b] / 100.0 * total_power * per_line;
            lines.push(Line {
                freq: f,
                phase: rng.random_range(0.0..std::f64::consts::TAU),
                amp_baseline: (2.0 * p_base).sqrt(),
                amp_task: (2.0 * p_task).sqrt(),
            });
        }
    }
    lines
}

/// Render one channel. The amplitude set switches from baseline to task
/// at `switch_at` seconds (phases stay continuous); a recording without
/// segments uses the same targets on both sides.
fn render_channel(
    n: usize,
    fs: f64,
    switch_at: f64,
    lines: &[Line],
    noise_amp: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let mut x = vec![0.0f64; n];
    for line in lines {
        let w = std::f64::consts::TAU * line.freq / fs;
        for (i, xi) in x.iter_mut().enumerate() {
            let t = i as f64 / fs;
            let amp = if t < switch_at {
                line.amp_baseline
            } else {
                line.amp_task
            };
            *xi += amp * (w * i as f64 + line.phase).sin();
        }
    }
    if noise_amp > 0.0 {
        for xi in x.iter_mut() {
            *xi += rng.random_range(-noise_amp..noise_amp);
        }
    }
    x
}

/// Generate a deterministic multichannel recording whose relative band
/// powers match the spec's targets.
pub fn generate_recording(spec: &SynthSpec, n_channels: usize) -> Result<Recording> {
    spec.validate()?;
    if n_channels == 0 || n_channels > SYNTH_CHANNELS.len() {
        return Err(Error::SynthSpec(format!(
            "n_channels must be in 1..={}, got {n_channels}",
            SYNTH_CHANNELS.len()
        )));
    }
    let n = (spec.duration * spec.sampling_rate).round() as usize;
    let noise_amp = (3.0 * NOISE_POWER_RATIO * spec.total_power).sqrt();

    let mut master = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut samples = Vec::with_capacity(n_channels);
    for _ in 0..n_channels {
        let mut rng = ChaCha8Rng::seed_from_u64(master.random());
        let lines = solve_lines(
            spec.model,
            &spec.targets,
            &spec.targets,
            spec.total_power,
            &mut rng,
        );
        samples.push(render_channel(
            n,
            spec.sampling_rate,
            f64::INFINITY,
            &lines,
            noise_amp,
            &mut rng,
        ));
    }
    let labels = SYNTH_CHANNELS[..n_channels]
        .iter()
        .map(|s| s.to_string())
        .collect();
    Recording::new(labels, spec.sampling_rate, samples, None)
}

/// Two-segment render used by the cohort generator: baseline targets up
/// to `switch_at` seconds, task targets after.
pub(crate) fn render_segmented_channel(
    baseline: &BandTargets,
    task: &BandTargets,
    duration: f64,
    switch_at: f64,
    fs: f64,
    total_power: f64,
    model: NoiseModel,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let n = (duration * fs).round() as usize;
    let noise_amp = (3.0 * NOISE_POWER_RATIO * total_power).sqrt();
    let lines = solve_lines(model, baseline, task, total_power, rng);
    render_channel(n, fs, switch_at, &lines, noise_amp, rng)
}
