//! Cohort fixture generation: per-cell normal draws of inter-BRPD
//! realized as synthetic recordings plus marker sidecars.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Recording, SegmentMarkers};
use crate::synth::{render_segmented_channel, BandTargets, NoiseModel, SYNTH_CHANNELS};

/// Target distribution of task-segment inter-BRPD for one task x channel
/// cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellTarget {
    pub task: String,
    pub channel: String,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortSpec {
    pub cells: Vec<CellTarget>,
    pub n_subjects: usize,
    pub seed: u64,
    pub sampling_rate: f64,
    /// Total recording length, whole seconds.
    pub duration_s: f64,
    /// Markers shared by every recording; segments sit clear of the
    /// baseline/task amplitude switch so filter transients never leak
    /// across.
    pub markers: SegmentMarkers,
    /// Baseline/task amplitude switch time (seconds).
    pub switch_at: f64,
    pub model: NoiseModel,
    pub total_power: f64,
}

/// One generated recording of the cohort.
#[derive(Debug, Clone)]
pub struct CohortMember {
    pub subject: String,
    pub task: String,
    pub source_id: String,
    pub recording: Recording,
    pub markers: SegmentMarkers,
    /// Drawn inter-BRPD target per metric channel.
    pub targets: Vec<(String, f64)>,
}

/// Realized per-cell statistics, written alongside the fixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellExpectation {
    pub task: String,
    pub channel: String,
    pub target_mean: f64,
    pub target_sd: f64,
    /// Sample mean/SD of the drawn targets (exact after standardizing).
    pub drawn_mean: f64,
    pub drawn_sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureManifest {
    pub n_subjects: usize,
    pub seed: u64,
    pub sampling_rate: f64,
    pub duration_s: f64,
    pub markers: SegmentMarkers,
    pub cells: Vec<CellExpectation>,
}

/// The bundled default fixture: 27 subjects, published per-cell
/// inter-BRPD means and SDs for tasks T1-T3 at AF3/AF4.
pub fn default_fixture_spec() -> CohortSpec {
    let cells = vec![
        ("T1", "AF3", 3.85, 7.78),
        ("T2", "AF3", -2.63, 4.61),
        ("T3", "AF3", -1.67, 4.85),
        ("T1", "AF4", 2.65, 7.56),
        ("T2", "AF4", -2.34, 4.95),
        ("T3", "AF4", -1.39, 4.78),
    ]
    .into_iter()
    .map(|(task, channel, mean, sd)| CellTarget {
        task: task.into(),
        channel: channel.into(),
        mean,
        sd,
    })
    .collect();

    CohortSpec {
        cells,
        n_subjects: 27,
        seed: 7,
        sampling_rate: 256.0,
        duration_s: 72.0,
        markers: SegmentMarkers {
            t_start: 1.0,
            t_bl: 29.0,
            t_sketch_start: 32.0,
            t_sketch_end: 70.0,
        },
        switch_at: 30.0,
        model: NoiseModel::SinusoidMix,
        total_power: 9e-10,
    }
}

/// Standard-normal draw via Box-Muller.
fn normal_draw(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    (-2.0 * u1.ln()).sqrt() * u2.cos()
}

/// Draw `n` values from N(mean, sd) and standardize them to the exact
/// sample mean and SD, so realized cell statistics equal the targets.
fn draw_cell(mean: f64, sd: f64, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    if sd == 0.0 {
        return Ok(vec![mean; n]);
    }
    for _attempt in 0..100 {
        let raw: Vec<f64> = (0..n).map(|_| normal_draw(rng)).collect();
        let m = raw.iter().sum::<f64>() / n as f64;
        let var = raw.iter().map(|&v| (v - m) * (v - m)).sum::<f64>() / (n as f64 - 1.0);
        if var <= 0.0 {
            continue;
        }
        let s = var.sqrt();
        let vals: Vec<f64> = raw.iter().map(|&v| mean + (v - m) / s * sd).collect();
        if vals
            .iter()
            .all(|&d| BandTargets::from_inter_brpd(d).is_ok())
        {
            return Ok(vals);
        }
    }
    Err(Error::SynthSpec(format!(
        "could not realize cell targets (mean {mean}, sd {sd}) in 100 attempts"
    )))
}

/// Generate every subject x task recording of the cohort.
///
/// Channels named in the cells get their drawn targets; the remaining
/// synthesis channels carry the average, so ICA sees a full frontal
/// montage. Deterministic per (seed, subject, task, channel).
pub fn generate_cohort(spec: &CohortSpec) -> Result<Vec<CohortMember>> {
    if spec.n_subjects < 3 {
        return Err(Error::SynthSpec(format!(
            "cohort needs at least 3 subjects, got {}",
            spec.n_subjects
        )));
    }
    if spec.cells.is_empty() {
        return Err(Error::SynthSpec("no cohort cells given".into()));
    }
    spec.markers.validate(spec.duration_s)?;

    let mut tasks: Vec<String> = Vec::new();
    let mut channels: Vec<String> = Vec::new();
    for cell in &spec.cells {
        if !tasks.contains(&cell.task) {
            tasks.push(cell.task.clone());
        }
        if !channels.contains(&cell.channel) {
            channels.push(cell.channel.clone());
        }
        if !SYNTH_CHANNELS.contains(&cell.channel.as_str()) {
            return Err(Error::SynthSpec(format!(
                "cell channel '{}' is not a synthesis channel",
                cell.channel
            )));
        }
    }
    for task in &tasks {
        for channel in &channels {
            if !spec
                .cells
                .iter()
                .any(|c| &c.task == task && &c.channel == channel)
            {
                return Err(Error::SynthSpec(format!(
                    "missing cell target for {task}/{channel}"
                )));
            }
        }
    }

    // Draw per-cell subject targets; cell seeds derive from the master
    // seed and the cell's position so cohorts are reproducible.
    let mut draws: Vec<Vec<f64>> = Vec::with_capacity(spec.cells.len());
    for (idx, cell) in spec.cells.iter().enumerate() {
        let mut rng =
            ChaCha8Rng::seed_from_u64(spec.seed ^ (0x9E37_79B9_7F4A_7C15u64.wrapping_mul(idx as u64 + 1)));
        draws.push(draw_cell(cell.mean, cell.sd, spec.n_subjects, &mut rng)?);
    }
    let cell_index = |task: &str, channel: &str| -> usize {
        spec.cells
            .iter()
            .position(|c| c.task == task && c.channel == channel)
            .unwrap()
    };

    let neutral = BandTargets::from_inter_brpd(0.0)?;
    let mut members = Vec::with_capacity(spec.n_subjects * tasks.len());
    for s in 0..spec.n_subjects {
        let subject = format!("s{:02}", s + 1);
        for task in &tasks {
            // Per-channel task targets: named cells use their draw, the
            // rest of the montage uses the channel average.
            let named: Vec<(String, f64)> = channels
                .iter()
                .map(|ch| (ch.clone(), draws[cell_index(task, ch)][s]))
                .collect();
            let avg = named.iter().map(|(_, d)| d).sum::<f64>() / named.len() as f64;

            let mut samples = Vec::with_capacity(SYNTH_CHANNELS.len());
            for (ch_idx, ch) in SYNTH_CHANNELS.iter().enumerate() {
                let d = named
                    .iter()
                    .find(|(label, _)| label == ch)
                    .map_or(avg, |(_, v)| *v);
                let task_targets = BandTargets::from_inter_brpd(d)?;
                let task_idx = tasks.iter().position(|t| t == task).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(
                    spec.seed
                        ^ (s as u64 + 1).wrapping_mul(0xA24B_AED4_963E_E407)
                        ^ ((task_idx as u64 + 1) << 32)
                        ^ ((ch_idx as u64 + 1) << 48),
                );
                samples.push(render_segmented_channel(
                    &neutral,
                    &task_targets,
                    spec.duration_s,
                    spec.switch_at,
                    spec.sampling_rate,
                    spec.total_power,
                    spec.model,
                    &mut rng,
                ));
            }
            let labels = SYNTH_CHANNELS.iter().map(|s| s.to_string()).collect();
            let recording = Recording::new(labels, spec.sampling_rate, samples, None)?;
            members.push(CohortMember {
                subject: subject.clone(),
                task: task.clone(),
                source_id: format!("{subject}_{task}"),
                recording,
                markers: spec.markers,
                targets: named,
            });
        }
    }
    Ok(members)
}

/// Manifest of realized cell statistics for a generated cohort.
pub fn fixture_manifest(spec: &CohortSpec, members: &[CohortMember]) -> FixtureManifest {
    let cells = spec
        .cells
        .iter()
        .map(|cell| {
            let drawn: Vec<f64> = members
                .iter()
                .filter(|m| m.task == cell.task)
                .filter_map(|m| {
                    m.targets
                        .iter()
                        .find(|(ch, _)| ch == &cell.channel)
                        .map(|(_, d)| *d)
                })
                .collect();
            let n = drawn.len() as f64;
            let mean = drawn.iter().sum::<f64>() / n;
            let sd = (drawn.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0))
                .sqrt();
            CellExpectation {
                task: cell.task.clone(),
                channel: cell.channel.clone(),
                target_mean: cell.mean,
                target_sd: cell.sd,
                drawn_mean: mean,
                drawn_sd: sd,
            }
        })
        .collect();
    FixtureManifest {
        n_subjects: spec.n_subjects,
        seed: spec.seed,
        sampling_rate: spec.sampling_rate,
        duration_s: spec.duration_s,
        markers: spec.markers,
        cells,
    }
}
