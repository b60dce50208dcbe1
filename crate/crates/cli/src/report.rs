//! Cohort report structures and their CSV renderings.

use serde::{Deserialize, Serialize};

use brpd::stats::{
    AnovaTable, CorrelationMatrix, Descriptives, NormalityReport, PosthocReport,
};

/// Descriptives of task-segment inter-BRPD for one task x channel cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellDescriptives {
    pub task: String,
    pub channel: String,
    pub stats: Descriptives,
}

/// Descriptives of one relative-power band in one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RpCellDescriptives {
    pub channel: String,
    pub task: String,
    pub band: String,
    pub stats: Descriptives,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellNormality {
    pub task: String,
    pub channel: String,
    pub report: NormalityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledMatrix {
    pub task: String,
    pub channel: String,
    pub matrix: CorrelationMatrix,
}

/// Cohort-level statistics bundle written as `cohort_report.json`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CohortReport {
    pub n_recordings: usize,
    pub n_subjects: usize,
    pub tasks: Vec<String>,
    pub channels: Vec<String>,
    pub inter_brpd_cells: Vec<CellDescriptives>,
    pub rp_cells: Vec<RpCellDescriptives>,
    pub normality: Vec<CellNormality>,
    pub anova: Option<AnovaTable>,
    pub posthoc: Option<PosthocReport>,
    pub correlation_matrices: Vec<LabeledMatrix>,
    pub pooled_correlation: Option<CorrelationMatrix>,
    pub pooled_clipped_entries: usize,
    /// Set when cohort statistics could not be computed.
    pub stats_error: Option<String>,
}

impl CohortReport {
    /// Human-diffable CSV at display precision: descriptives, normality,
    /// ANOVA rows and post-hoc comparisons.
    pub fn csv(&self) -> String {
        let mut out = String::new();
        out.push_str("section,task,channel,field,value\n");
        for cell in &self.inter_brpd_cells {
            let s = &cell.stats;
            for (field, v) in [
                ("mean", s.mean),
                ("ci_low", s.ci_low),
                ("ci_high", s.ci_high),
                ("median", s.median),
                ("se", s.se),
                ("sd", s.sd),
                ("min", s.min),
                ("max", s.max),
            ] {
                out.push_str(&format!(
                    "inter_brpd,{},{},{field},{:.2}\n",
                    cell.task, cell.channel, v
                ));
            }
        }
        for n in &self.normality {
            let r = &n.report;
            out.push_str(&format!(
                "normality,{},{},W,{:.3}\n",
                n.task, n.channel, r.w
            ));
            out.push_str(&format!(
                "normality,{},{},p_sw,{:.3}\n",
                n.task, n.channel, r.p_sw
            ));
            out.push_str(&format!(
                "normality,{},{},D,{:.3}\n",
                n.task, n.channel, r.d
            ));
            let p_ks = if r.p_ks_is_lower_bound {
                ">=0.200".to_string()
            } else {
                format!("{:.3}", r.p_ks_lilliefors)
            };
            out.push_str(&format!(
                "normality,{},{},p_ks_lilliefors,{p_ks}\n",
                n.task, n.channel
            ));
        }
        if let Some(anova) = &self.anova {
            for row in anova.between.iter().chain(anova.within.iter()) {
                let f = row.f.map_or(String::new(), |v| format!("{v:.3}"));
                let p = row.p.map_or(String::new(), |v| format!("{v:.3}"));
                out.push_str(&format!(
                    "anova,,,{}: SS={:.3} df={} MS={:.3} F={f} p={p},\n",
                    row.source, row.ss, row.df, row.ms
                ));
            }
        }
        if let Some(posthoc) = &self.posthoc {
            for c in &posthoc.comparisons {
                out.push_str(&format!(
                    "posthoc,{} vs {},,diff={:.3} se={:.3} p={:.3} ci=[{:.3},{:.3}],\n",
                    c.group_i, c.group_j, c.mean_difference, c.std_error, c.p_adjusted,
                    c.ci_low, c.ci_high
                ));
            }
        }
        out
    }
}
