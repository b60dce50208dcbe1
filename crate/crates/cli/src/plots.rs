//! Plot-ready CSV grids from a cohort report.

use std::fs;
use std::path::Path;

use crate::report::CohortReport;

fn box_row(task: &str, channel: &str, extra: Option<&str>, s: &brpd::stats::Descriptives) -> String {
    let prefix = match extra {
        Some(band) => format!("{band},{task},{channel}"),
        None => format!("{task},{channel}"),
    };
    format!(
        "{prefix},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
        s.min, s.q1, s.median, s.q3, s.max, s.mean
    )
}

/// Write box-plot summary grids for inter-BRPD and the alpha/theta
/// relative powers. Empty cohorts produce header-only files.
pub fn emit_plots(report: &CohortReport, out_dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(out_dir)?;

    let mut brpd_csv = String::from("task,channel,min,q1,median,q3,max,mean\n");
    for cell in &report.inter_brpd_cells {
        brpd_csv.push_str(&box_row(&cell.task, &cell.channel, None, &cell.stats));
    }
    fs::write(out_dir.join("inter_brpd_box.csv"), brpd_csv)?;

    let mut rp_csv = String::from("band,task,channel,min,q1,median,q3,max,mean\n");
    for cell in &report.rp_cells {
        rp_csv.push_str(&box_row(
            &cell.task,
            &cell.channel,
            Some(&cell.band),
            &cell.stats,
        ));
    }
    fs::write(out_dir.join("relative_power_box.csv"), rp_csv)?;
    Ok(())
}
