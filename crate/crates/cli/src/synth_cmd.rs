//! The `synth` subcommand: write a synthetic cohort fixture to disk.

use std::fs;
use std::path::Path;

use brpd::ingest::write_edf;
use brpd::synth::{default_fixture_spec, fixture_manifest, generate_cohort, CohortSpec};

/// Generate the named fixture into `out_dir`: one EDF plus one marker
/// sidecar per subject-task recording, and a manifest of the per-cell
/// targets.
pub fn write_fixture(
    fixture: &str,
    n_subjects: Option<usize>,
    seed: Option<u64>,
    out_dir: &Path,
) -> anyhow::Result<()> {
    let mut spec: CohortSpec = match fixture {
        "default" => default_fixture_spec(),
        other => anyhow::bail!("unknown fixture '{other}'; available: default"),
    };
    if let Some(n) = n_subjects {
        spec.n_subjects = n;
    }
    if let Some(s) = seed {
        spec.seed = s;
    }

    let members = generate_cohort(&spec)?;
    fs::create_dir_all(out_dir)?;
    for member in &members {
        let edf_path = out_dir.join(format!("{}.edf", member.source_id));
        write_edf(&member.recording, &edf_path)?;
        let markers_path = out_dir.join(format!("{}.markers.json", member.source_id));
        fs::write(markers_path, serde_json::to_string_pretty(&member.markers)?)?;
    }
    let manifest = fixture_manifest(&spec, &members);
    fs::write(
        out_dir.join("fixture_manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    println!(
        "wrote {} recordings ({} subjects x {} tasks) to {}",
        members.len(),
        spec.n_subjects,
        members.len() / spec.n_subjects,
        out_dir.display()
    );
    Ok(())
}
