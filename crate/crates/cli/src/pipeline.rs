//! Batch pipeline: clean every recording in a directory, extract
//! metrics, then run cohort statistics over the task segments.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use brpd::ingest::{load_markers, read_edf, segment};
use brpd::metrics::{metrics_csv_header, metrics_csv_row, metrics_rows, MetricsRow};
use brpd::preprocess::{
    annotate_amplitude, apply_bandpass, design_bandpass, fit_fastica, flag_muscle,
    remove_components, suggest_eog_components,
};
use brpd::spectral::{band_power_table, Segment};
use brpd::stats::{
    bonferroni_pairwise, describe, fisher_pool, mixed_anova, normality_report, pearson_matrix,
    CohortMatrix,
};

use crate::config::PipelineConfig;
use crate::report::{
    CellDescriptives, CellNormality, CohortReport, LabeledMatrix, RpCellDescriptives,
};

/// Status of one input recording in the run manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileStatus {
    pub file: String,
    pub source_id: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_channels: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude_spans: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub muscle_spans: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ica_converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ica_iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejected_components: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config_hash: String,
    pub n_inputs: usize,
    pub n_processed: usize,
    pub n_excluded: usize,
    pub files: Vec<FileStatus>,
}

/// Everything produced by one `analyze` run.
#[derive(Debug)]
pub struct RunOutput {
    pub manifest: RunManifest,
    pub report: CohortReport,
    pub metrics: Vec<MetricsRow>,
}

struct ProcessedRecording {
    source_id: String,
    metrics: Vec<MetricsRow>,
    status: FileStatus,
}

fn process_one(
    edf_path: &Path,
    config: &PipelineConfig,
    out_rec_dir: &Path,
) -> Result<ProcessedRecording, (String, brpd::Error)> {
    let source_id = edf_path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| edf_path.display().to_string());
    let fail = |e: brpd::Error| (source_id.clone(), e);

    let markers_path = edf_path.with_extension("markers.json");
    let raw = read_edf(edf_path).map_err(&fail)?;
    let markers = load_markers(&markers_path).map_err(&fail)?;

    // Bandpass per the configured spec.
    let filter = design_bandpass(raw.sampling_rate(), &config.filter.to_spec()).map_err(&fail)?;
    let filtered = apply_bandpass(&raw, &filter).map_err(&fail)?;

    // Artifact annotation: amplitude threshold plus muscle-band outliers.
    let amplitude = annotate_amplitude(
        &filtered,
        config.artifacts.amplitude_threshold_uv * 1e-6,
        config.artifacts.amplitude_pad_s,
    );
    let muscle = flag_muscle(
        &filtered,
        (
            config.artifacts.muscle_low_hz,
            config.artifacts.muscle_high_hz,
        ),
        config.artifacts.muscle_z_threshold,
        config.artifacts.muscle_window_s,
    )
    .map_err(&fail)?;
    let annotations = amplitude.union(&muscle);

    // ICA on the configured montage; bad spans are excluded from the fit.
    let ica_input = filtered.select_channels(&config.channels.ica).map_err(&fail)?;
    let model = fit_fastica(&ica_input, &annotations, &config.ica.to_settings()).map_err(&fail)?;
    let mut reject = config.ica.reject.clone();
    if config.ica.eog_heuristic {
        for idx in suggest_eog_components(&ica_input, &model).map_err(&fail)? {
            if !reject.contains(&idx) {
                reject.push(idx);
            }
        }
    }
    reject.sort_unstable();
    let cleaned_subset = remove_components(&ica_input, &model, &reject).map_err(&fail)?;

    // Splice the cleaned channels back into the full montage.
    let mut samples = filtered.samples().to_vec();
    for (i, label) in config.channels.ica.iter().enumerate() {
        let target = filtered
            .channel_labels()
            .iter()
            .position(|l| l == label)
            .expect("label came from this recording");
        samples[target] = cleaned_subset.samples()[i].clone();
    }
    let cleaned = filtered.with_samples(samples).map_err(&fail)?;

    // Metric channels only, segmented, then band powers and metrics.
    let metric_rec = cleaned
        .select_channels(&config.channels.metrics)
        .map_err(&fail)?;
    let segmented = segment(&metric_rec, &markers, &source_id).map_err(&fail)?;
    let table = band_power_table(
        &segmented,
        config.spectral.nw,
        &config.spectral.bands(),
        config.spectral.fmax,
    )
    .map_err(&fail)?;
    let defs = config
        .indices
        .to_definition_set()
        .expect("config was validated");
    let rows = metrics_rows(&table, &defs).map_err(&fail)?;

    // Per-recording outputs.
    let write = |name: &str, contents: &str| -> Result<(), (String, brpd::Error)> {
        fs::write(out_rec_dir.join(name), contents).map_err(|e| fail(brpd::Error::Io(e)))
    };
    write(&format!("{source_id}_band_powers.csv"), &table.csv())?;
    let mut metrics_csv = String::from(metrics_csv_header());
    metrics_csv.push('\n');
    for row in &rows {
        metrics_csv.push_str(&metrics_csv_row(row));
        metrics_csv.push('\n');
    }
    write(&format!("{source_id}_metrics.csv"), &metrics_csv)?;
    write(
        &format!("{source_id}_annotations.json"),
        &serde_json::to_string_pretty(&annotations).map_err(|e| fail(e.into()))?,
    )?;
    write(
        &format!("{source_id}_ica.json"),
        &model.to_json().map_err(&fail)?,
    )?;

    let status = FileStatus {
        file: edf_path
            .file_name()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_default(),
        source_id: source_id.clone(),
        status: "ok".into(),
        reason: None,
        n_channels: Some(raw.n_channels()),
        n_samples: Some(raw.n_samples()),
        amplitude_spans: Some(amplitude.spans.len()),
        muscle_spans: Some(muscle.spans.len()),
        ica_converged: Some(model.converged),
        ica_iterations: Some(model.iterations_used),
        rejected_components: Some(reject),
    };
    Ok(ProcessedRecording {
        source_id,
        metrics: rows,
        status,
    })
}

/// `source_id` convention: `<subject>_<task>`, split at the last '_'.
fn parse_source_id(source_id: &str) -> Option<(String, String)> {
    let (subject, task) = source_id.rsplit_once('_')?;
    if subject.is_empty() || task.is_empty() {
        return None;
    }
    Some((subject.to_string(), task.to_string()))
}

/// The eight metric columns correlated per cell.
const CORRELATION_COLUMNS: [&str; 8] = [
    "alpha_rel",
    "theta_rel",
    "inter_brpd",
    "cognitive_load",
    "engagement",
    "excitement",
    "relaxation",
    "mental_fatigue",
];

fn metric_column(row: &MetricsRow, name: &str) -> f64 {
    match name {
        "alpha_rel" => row.relative.alpha_rel,
        "theta_rel" => row.relative.theta_rel,
        "inter_brpd" => row.relative.inter_brpd,
        "cognitive_load" => row.cognitive_load,
        "engagement" => row.engagement,
        "excitement" => row.excitement,
        "relaxation" => row.relaxation,
        "mental_fatigue" => row.mental_fatigue,
        _ => unreachable!(),
    }
}

fn build_cohort_report(
    metrics: &[MetricsRow],
    n_recordings: usize,
    weighted_pooling: bool,
) -> CohortReport {
    // Task-segment rows keyed by (subject, task, channel).
    let mut task_rows: BTreeMap<(String, String, String), &MetricsRow> = BTreeMap::new();
    let mut tasks: Vec<String> = Vec::new();
    let mut channels: Vec<String> = Vec::new();
    let mut subjects: Vec<String> = Vec::new();
    let mut unparsed = 0usize;
    for row in metrics {
        if row.relative.segment != Segment::Task {
            continue;
        }
        let Some((subject, task)) = parse_source_id(&row.relative.source_id) else {
            unparsed += 1;
            continue;
        };
        let channel = row.relative.channel.clone();
        if !tasks.contains(&task) {
            tasks.push(task.clone());
        }
        if !channels.contains(&channel) {
            channels.push(channel.clone());
        }
        if !subjects.contains(&subject) {
            subjects.push(subject.clone());
        }
        task_rows.insert((subject, task, channel), row);
    }
    tasks.sort();
    channels.sort();
    subjects.sort();

    let mut report = CohortReport {
        n_recordings,
        n_subjects: subjects.len(),
        tasks: tasks.clone(),
        channels: channels.clone(),
        ..Default::default()
    };
    if unparsed > 0 {
        report.stats_error = Some(format!(
            "{unparsed} task rows had source_ids without the <subject>_<task> pattern"
        ));
    }

    // Descriptives and normality per cell.
    for task in &tasks {
        for channel in &channels {
            let cell: Vec<f64> = subjects
                .iter()
                .filter_map(|s| {
                    task_rows
                        .get(&(s.clone(), task.clone(), channel.clone()))
                        .map(|r| r.relative.inter_brpd)
                })
                .collect();
            if let Ok(stats) = describe(&cell) {
                report.inter_brpd_cells.push(CellDescriptives {
                    task: task.clone(),
                    channel: channel.clone(),
                    stats,
                });
            }
            if let Ok(rep) = normality_report(&cell) {
                report.normality.push(CellNormality {
                    task: task.clone(),
                    channel: channel.clone(),
                    report: rep,
                });
            }
            type Getter = fn(&MetricsRow) -> f64;
            for (band, getter) in [
                ("alpha", (|r: &MetricsRow| r.relative.alpha_rel) as Getter),
                ("theta", (|r: &MetricsRow| r.relative.theta_rel) as Getter),
            ] {
                let vals: Vec<f64> = subjects
                    .iter()
                    .filter_map(|s| {
                        task_rows
                            .get(&(s.clone(), task.clone(), channel.clone()))
                            .map(|r| getter(r))
                    })
                    .collect();
                if let Ok(stats) = describe(&vals) {
                    report.rp_cells.push(RpCellDescriptives {
                        channel: channel.clone(),
                        task: task.clone(),
                        band: band.into(),
                        stats,
                    });
                }
            }
        }
    }

    // ANOVA and post-hoc need the complete design.
    let long_rows: Vec<(String, String, String, f64)> = task_rows
        .iter()
        .map(|((s, t, c), row)| (s.clone(), t.clone(), c.clone(), row.relative.inter_brpd))
        .collect();
    match CohortMatrix::from_rows(&long_rows) {
        Ok(matrix) if matrix.tasks.len() >= 2 && matrix.channels.len() >= 2 => {
            match mixed_anova(&matrix) {
                Ok(table) => report.anova = Some(table),
                Err(e) => report.stats_error = Some(format!("ANOVA failed: {e}")),
            }
            match bonferroni_pairwise(&matrix) {
                Ok(posthoc) => report.posthoc = Some(posthoc),
                Err(e) => report.stats_error = Some(format!("post-hoc failed: {e}")),
            }
        }
        Ok(_) => {
            report.stats_error = Some(
                "need at least 2 tasks and 2 channels for ANOVA and post-hoc tests".into(),
            );
        }
        Err(e) => report.stats_error = Some(format!("incomplete design: {e}")),
    }

    // Correlation matrices per cell, pooled over cells.
    let mut mats = Vec::new();
    for task in &tasks {
        for channel in &channels {
            let rows: Vec<&MetricsRow> = subjects
                .iter()
                .filter_map(|s| {
                    task_rows
                        .get(&(s.clone(), task.clone(), channel.clone()))
                        .copied()
                })
                .collect();
            if rows.len() < 3 {
                continue;
            }
            let columns: Vec<(String, Vec<f64>)> = CORRELATION_COLUMNS
                .iter()
                .map(|name| {
                    (
                        name.to_string(),
                        rows.iter().map(|r| metric_column(r, name)).collect(),
                    )
                })
                .collect();
            match pearson_matrix(&columns) {
                Ok(matrix) => {
                    mats.push(matrix.clone());
                    report.correlation_matrices.push(LabeledMatrix {
                        task: task.clone(),
                        channel: channel.clone(),
                        matrix,
                    });
                }
                Err(e) => {
                    report.stats_error =
                        Some(format!("correlation for {task}/{channel} failed: {e}"));
                }
            }
        }
    }
    if !mats.is_empty() {
        match fisher_pool(&mats, weighted_pooling) {
            Ok(pooled) => {
                report.pooled_correlation = Some(pooled.matrix);
                report.pooled_clipped_entries = pooled.clipped_entries;
            }
            Err(e) => report.stats_error = Some(format!("pooling failed: {e}")),
        }
    }

    report
}

/// Errors that should abort the run rather than skip a file.
#[derive(Debug)]
pub enum RunError {
    Usage(String),
    AllInputsFailed(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Usage(m) => write!(f, "{m}"),
            RunError::AllInputsFailed(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for RunError {}

/// Run the full pipeline over `input_dir`, writing the report bundle to
/// `out_dir`. Recordings that fail are skipped and listed in the run
/// manifest.
pub fn run_pipeline(
    input_dir: &Path,
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<RunOutput, RunError> {
    let mut edf_files: Vec<PathBuf> = fs::read_dir(input_dir)
        .map_err(|e| RunError::Usage(format!("cannot read {}: {e}", input_dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .map(|ext| ext.eq_ignore_ascii_case("edf"))
                .unwrap_or(false)
        })
        .collect();
    edf_files.sort();
    if edf_files.is_empty() {
        return Err(RunError::Usage(format!(
            "no .edf files in {}",
            input_dir.display()
        )));
    }

    let rec_dir = out_dir.join("recordings");
    fs::create_dir_all(&rec_dir)
        .map_err(|e| RunError::Usage(format!("cannot create {}: {e}", rec_dir.display())))?;

    // Recordings are independent; process them in parallel and restore
    // a deterministic order afterwards.
    use rayon::prelude::*;
    let results: Vec<Result<ProcessedRecording, (String, brpd::Error)>> = edf_files
        .par_iter()
        .map(|path| process_one(path, config, &rec_dir))
        .collect();

    let mut statuses = Vec::new();
    let mut processed = Vec::new();
    for (path, result) in edf_files.iter().zip(results) {
        match result {
            Ok(rec) => {
                statuses.push(rec.status.clone());
                processed.push(rec);
            }
            Err((source_id, err)) => {
                eprintln!("excluded {source_id}: {err}");
                statuses.push(FileStatus {
                    file: path
                        .file_name()
                        .map(|s| s.to_string_lossy().to_string())
                        .unwrap_or_default(),
                    source_id,
                    status: "excluded".into(),
                    reason: Some(err.to_string()),
                    n_channels: None,
                    n_samples: None,
                    amplitude_spans: None,
                    muscle_spans: None,
                    ica_converged: None,
                    ica_iterations: None,
                    rejected_components: None,
                });
            }
        }
    }
    statuses.sort_by(|a, b| a.source_id.cmp(&b.source_id));

    let n_processed = processed.len();
    if n_processed == 0 {
        return Err(RunError::AllInputsFailed(format!(
            "all {} recordings failed; see stderr",
            edf_files.len()
        )));
    }

    processed.sort_by(|a, b| a.source_id.cmp(&b.source_id));
    let mut all_metrics: Vec<MetricsRow> = Vec::new();
    for rec in &processed {
        all_metrics.extend(rec.metrics.iter().cloned());
    }

    let report = if config.stats.enabled {
        build_cohort_report(&all_metrics, n_processed, config.stats.weighted_pooling)
    } else {
        CohortReport {
            n_recordings: n_processed,
            ..Default::default()
        }
    };

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config.hash(),
        n_inputs: edf_files.len(),
        n_processed,
        n_excluded: edf_files.len() - n_processed,
        files: statuses,
    };

    write_outputs(out_dir, &manifest, &report, &all_metrics)
        .map_err(|e| RunError::Usage(format!("cannot write outputs: {e}")))?;

    Ok(RunOutput {
        manifest,
        report,
        metrics: all_metrics,
    })
}

fn write_outputs(
    out_dir: &Path,
    manifest: &RunManifest,
    report: &CohortReport,
    metrics: &[MetricsRow],
) -> std::io::Result<()> {
    let mut cohort_csv = String::from(metrics_csv_header());
    cohort_csv.push('\n');
    for row in metrics {
        cohort_csv.push_str(&metrics_csv_row(row));
        cohort_csv.push('\n');
    }
    fs::write(out_dir.join("cohort_metrics.csv"), cohort_csv)?;
    fs::write(
        out_dir.join("cohort_report.json"),
        serde_json::to_string_pretty(report).expect("report serializes"),
    )?;
    fs::write(out_dir.join("cohort_report.csv"), report.csv())?;
    if let Some(pooled) = &report.pooled_correlation {
        fs::write(out_dir.join("correlation_pooled.csv"), pooled.csv())?;
    }
    fs::write(
        out_dir.join("run_manifest.json"),
        serde_json::to_string_pretty(manifest).expect("manifest serializes"),
    )?;
    Ok(())
}
