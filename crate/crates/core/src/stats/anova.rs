//! Mixed within/between ANOVA on the cohort grid.
//!
//! The design follows the source layout: every subject-task pair is one
//! unit, task is the between-groups factor and electrode the 2-level
//! within factor. F-tests use type-III sums of squares (the design is
//! balanced, so they coincide with type-I).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::error::{Error, Result};

/// Complete subjects x tasks x channels grid of a scalar metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortMatrix {
    pub subject_ids: Vec<String>,
    pub tasks: Vec<String>,
    pub channels: Vec<String>,
    /// `values[subject][task][channel]`
    pub values: Vec<Vec<Vec<f64>>>,
}

impl CohortMatrix {
    /// Assemble from long-format rows `(subject, task, channel, value)`.
    /// Every subject must have a value for every task x channel cell.
    pub fn from_rows(rows: &[(String, String, String, f64)]) -> Result<Self> {
        let subject_ids: Vec<String> = rows
            .iter()
            .map(|r| r.0.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let tasks: Vec<String> = rows
            .iter()
            .map(|r| r.1.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let channels: Vec<String> = rows
            .iter()
            .map(|r| r.2.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();

        let mut values =
            vec![vec![vec![f64::NAN; channels.len()]; tasks.len()]; subject_ids.len()];
        for (subject, task, channel, value) in rows {
            let s = subject_ids.iter().position(|v| v == subject).unwrap();
            let t = tasks.iter().position(|v| v == task).unwrap();
            let c = channels.iter().position(|v| v == channel).unwrap();
            values[s][t][c] = *value;
        }

        let mut missing = Vec::new();
        for (s, subject) in subject_ids.iter().enumerate() {
            for (t, task) in tasks.iter().enumerate() {
                for (c, channel) in channels.iter().enumerate() {
                    if values[s][t][c].is_nan() {
                        missing.push(format!("{subject}/{task}/{channel}"));
                    }
                }
            }
        }
        if !missing.is_empty() {
            return Err(Error::IncompleteDesign { missing });
        }
        Ok(CohortMatrix {
            subject_ids,
            tasks,
            channels,
            values,
        })
    }

    pub fn n_subjects(&self) -> usize {
        self.subject_ids.len()
    }

    /// Electrode-averaged value for one subject-task unit.
    pub fn unit_mean(&self, subject: usize, task: usize) -> f64 {
        let vals = &self.values[subject][task];
        vals.iter().sum::<f64>() / vals.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaRow {
    pub source: String,
    pub ss: f64,
    pub df: usize,
    pub ms: f64,
    pub f: Option<f64>,
    pub p: Option<f64>,
}

/// Between- and within-subjects effect tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaTable {
    pub between: Vec<AnovaRow>,
    pub within: Vec<AnovaRow>,
}

impl AnovaTable {
    pub fn row(&self, source: &str) -> Option<&AnovaRow> {
        self.between
            .iter()
            .chain(self.within.iter())
            .find(|r| r.source == source)
    }
}

fn f_sf(f: f64, df1: usize, df2: usize) -> f64 {
    if !(f > 0.0) {
        return 1.0;
    }
    FisherSnedecor::new(df1 as f64, df2 as f64)
        .map(|dist| dist.sf(f))
        .unwrap_or(f64::NAN)
}

/// Mixed ANOVA with task as between factor and channel as within factor.
pub fn mixed_anova(m: &CohortMatrix) -> Result<AnovaTable> {
    let a = m.tasks.len();
    let b = m.channels.len();
    let n = m.n_subjects();
    if a < 2 || b < 2 || n < 2 {
        return Err(Error::InvalidParameter(format!(
            "mixed ANOVA needs >=2 tasks, >=2 channels and >=2 subjects; got {a}/{b}/{n}"
        )));
    }
    let units = a * n; // each subject-task pair is one unit
    let bf = b as f64;
    let total_obs = (units * b) as f64;

    // Grand, group (task), level (channel) and cell means.
    let mut grand = 0.0;
    for s in 0..n {
        for t in 0..a {
            for c in 0..b {
                grand += m.values[s][t][c];
            }
        }
    }
    grand /= total_obs;

    let group_mean: Vec<f64> = (0..a)
        .map(|t| {
            (0..n)
                .flat_map(|s| m.values[s][t].iter().copied())
                .sum::<f64>()
                / (n as f64 * bf)
        })
        .collect();
    let level_mean: Vec<f64> = (0..b)
        .map(|c| {
            (0..n)
                .flat_map(|s| (0..a).map(move |t| (s, t)))
                .map(|(s, t)| m.values[s][t][c])
                .sum::<f64>()
                / units as f64
        })
        .collect();
    let cell_mean = |t: usize, c: usize| -> f64 {
        (0..n).map(|s| m.values[s][t][c]).sum::<f64>() / n as f64
    };

    // Between-subjects part (on electrode sums, i.e. b * unit means).
    let ss_intercept = total_obs * grand * grand;
    let ss_task: f64 = bf
        * (0..a)
            .map(|t| n as f64 * (group_mean[t] - grand).powi(2))
            .sum::<f64>();
    let mut ss_between_error = 0.0;
    for t in 0..a {
        for s in 0..n {
            let um = m.unit_mean(s, t);
            ss_between_error += bf * (um - group_mean[t]).powi(2);
        }
    }
    let df_task = a - 1;
    let df_between_error = units - a;

    // Within-subjects part.
    let ss_channel: f64 = (0..b)
        .map(|c| units as f64 * (level_mean[c] - grand).powi(2))
        .sum();
    let mut ss_interaction = 0.0;
    for t in 0..a {
        for c in 0..b {
            ss_interaction +=
                n as f64 * (cell_mean(t, c) - group_mean[t] - level_mean[c] + grand).powi(2);
        }
    }
    let mut ss_within_error = 0.0;
    for t in 0..a {
        for s in 0..n {
            let um = m.unit_mean(s, t);
            for c in 0..b {
                let resid = m.values[s][t][c] - cell_mean(t, c) - um + group_mean[t];
                ss_within_error += resid * resid;
            }
        }
    }
    let df_channel = b - 1;
    let df_interaction = (a - 1) * (b - 1);
    let df_within_error = (units - a) * (b - 1);

    let ms_between_error = ss_between_error / df_between_error as f64;
    let ms_within_error = ss_within_error / df_within_error as f64;

    let make = |source: &str, ss: f64, df: usize, ms_err: f64, df_err: usize| {
        let ms = ss / df as f64;
        // A zero error term only happens for degenerate effects; keep
        // F = 0 when the effect itself is zero too.
        let f = if ms_err > 0.0 {
            ms / ms_err
        } else if ms == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        let p = if f.is_infinite() { 0.0 } else { f_sf(f, df, df_err) };
        AnovaRow {
            source: source.into(),
            ss,
            df,
            ms,
            f: Some(f),
            p: Some(p),
        }
    };

    let between = vec![
        make(
            "Intercept",
            ss_intercept,
            1,
            ms_between_error,
            df_between_error,
        ),
        make("Task", ss_task, df_task, ms_between_error, df_between_error),
        AnovaRow {
            source: "Error".into(),
            ss: ss_between_error,
            df: df_between_error,
            ms: ms_between_error,
            f: None,
            p: None,
        },
    ];
    let within = vec![
        make(
            "Electrode",
            ss_channel,
            df_channel,
            ms_within_error,
            df_within_error,
        ),
        make(
            "Electrode x Task",
            ss_interaction,
            df_interaction,
            ms_within_error,
            df_within_error,
        ),
        AnovaRow {
            source: "Error(Electrode)".into(),
            ss: ss_within_error,
            df: df_within_error,
            ms: ms_within_error,
            f: None,
            p: None,
        },
    ];

    Ok(AnovaTable { between, within })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 3 groups x 2 units x 2 levels, small integers for hand checking.
    fn hand_matrix() -> CohortMatrix {
        // Values chosen so every mean is exact in binary.
        // Group T1: units (s1: 1, 3), (s2: 2, 4)
        // Group T2: units (s1: 5, 7), (s2: 6, 8)
        // Group T3: units (s1: 2, 2), (s2: 4, 6)
        let rows = vec![
            ("s1", "T1", "AF3", 1.0),
            ("s1", "T1", "AF4", 3.0),
            ("s2", "T1", "AF3", 2.0),
            ("s2", "T1", "AF4", 4.0),
            ("s1", "T2", "AF3", 5.0),
            ("s1", "T2", "AF4", 7.0),
            ("s2", "T2", "AF3", 6.0),
            ("s2", "T2", "AF4", 8.0),
            ("s1", "T3", "AF3", 2.0),
            ("s1", "T3", "AF4", 2.0),
            ("s2", "T3", "AF3", 4.0),
            ("s2", "T3", "AF4", 6.0),
        ];
        let rows: Vec<(String, String, String, f64)> = rows
            .into_iter()
            .map(|(s, t, c, v)| (s.into(), t.into(), c.into(), v))
            .collect();
        CohortMatrix::from_rows(&rows).unwrap()
    }

    /// Brute-force oracle: every sum of squares from first principles.
    fn oracle(m: &CohortMatrix) -> (f64, f64, f64, f64, f64) {
        let (a, b, n) = (m.tasks.len(), m.channels.len(), m.n_subjects());
        let mut all = Vec::new();
        for s in 0..n {
            for t in 0..a {
                for c in 0..b {
                    all.push((s, t, c, m.values[s][t][c]));
                }
            }
        }
        let total: f64 = all.iter().map(|r| r.3).sum();
        let grand = total / all.len() as f64;

        let gmean = |t: usize| -> f64 {
            let vals: Vec<f64> = all.iter().filter(|r| r.1 == t).map(|r| r.3).collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        };
        let lmean = |c: usize| -> f64 {
            let vals: Vec<f64> = all.iter().filter(|r| r.2 == c).map(|r| r.3).collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        };
        let cmean = |t: usize, c: usize| -> f64 {
            let vals: Vec<f64> = all
                .iter()
                .filter(|r| r.1 == t && r.2 == c)
                .map(|r| r.3)
                .collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        };
        let umean = |s: usize, t: usize| -> f64 {
            let vals: Vec<f64> = all
                .iter()
                .filter(|r| r.0 == s && r.1 == t)
                .map(|r| r.3)
                .collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        };

        let ss_task: f64 = (0..a)
            .map(|t| (n * b) as f64 * (gmean(t) - grand).powi(2))
            .sum();
        let ss_sub_within: f64 = (0..a)
            .flat_map(|t| (0..n).map(move |s| (s, t)))
            .map(|(s, t)| b as f64 * (umean(s, t) - gmean(t)).powi(2))
            .sum();
        let ss_channel: f64 = (0..b)
            .map(|c| (a * n) as f64 * (lmean(c) - grand).powi(2))
            .sum();
        let ss_inter: f64 = (0..a)
            .flat_map(|t| (0..b).map(move |c| (t, c)))
            .map(|(t, c)| n as f64 * (cmean(t, c) - gmean(t) - lmean(c) + grand).powi(2))
            .sum();
        let ss_resid: f64 = all
            .iter()
            .map(|&(s, t, c, v)| (v - cmean(t, c) - umean(s, t) + gmean(t)).powi(2))
            .sum();
        (ss_task, ss_sub_within, ss_channel, ss_inter, ss_resid)
    }

    #[test]
    fn sums_of_squares_match_the_brute_force_oracle() {
        let m = hand_matrix();
        let table = mixed_anova(&m).unwrap();
        let (ss_task, ss_be, ss_ch, ss_int, ss_we) = oracle(&m);

        let task = table.row("Task").unwrap();
        assert!((task.ss - ss_task).abs() < 1e-10, "{} vs {ss_task}", task.ss);
        assert_eq!(task.df, 2);

        let be = table.row("Error").unwrap();
        assert!((be.ss - ss_be).abs() < 1e-10);
        assert_eq!(be.df, 3); // 6 units - 3 groups

        let ch = table.row("Electrode").unwrap();
        assert!((ch.ss - ss_ch).abs() < 1e-10);
        assert_eq!(ch.df, 1);

        let int = table.row("Electrode x Task").unwrap();
        assert!((int.ss - ss_int).abs() < 1e-10);
        assert_eq!(int.df, 2);

        let we = table.row("Error(Electrode)").unwrap();
        assert!((we.ss - ss_we).abs() < 1e-10);
        assert_eq!(we.df, 3);

        // Mean squares are SS/df and F ratios use the matching error.
        assert!((task.ms - task.ss / 2.0).abs() < 1e-12);
        let f_expected = task.ms / be.ms;
        assert!((task.f.unwrap() - f_expected).abs() < 1e-12);
    }

    #[test]
    fn hand_dataset_exact_values() {
        // Unit means: T1 (2,3), T2 (6,7), T3 (2,5); grand mean 4.1666..
        // SS_task on sums-over-levels = 2*[2*(2.5-4.1666)^2 + ...]
        let m = hand_matrix();
        let table = mixed_anova(&m).unwrap();
        let task = table.row("Task").unwrap();
        // group means: T1 2.5, T2 6.5, T3 3.5; grand 25/6
        let grand = 25.0 / 6.0;
        let expect = 2.0
            * 2.0
            * ((2.5f64 - grand).powi(2) + (6.5 - grand).powi(2) + (3.5 - grand).powi(2));
        assert!((task.ss - expect).abs() < 1e-10, "{} vs {expect}", task.ss);
    }

    #[test]
    fn identical_within_levels_zero_electrode_effect() {
        let mut rows = Vec::new();
        for (s, t, v) in [
            ("s1", "T1", 1.5),
            ("s2", "T1", 2.5),
            ("s1", "T2", 4.0),
            ("s2", "T2", 6.0),
        ] {
            rows.push((s.to_string(), t.to_string(), "AF3".to_string(), v));
            rows.push((s.to_string(), t.to_string(), "AF4".to_string(), v));
        }
        let m = CohortMatrix::from_rows(&rows).unwrap();
        let table = mixed_anova(&m).unwrap();
        let ch = table.row("Electrode").unwrap();
        assert!(ch.ss.abs() < 1e-12);
        assert_eq!(ch.f.unwrap(), 0.0);
        assert_eq!(ch.p.unwrap(), 1.0);
    }

    #[test]
    fn incomplete_design_lists_missing_cells() {
        let rows = vec![
            ("s1".to_string(), "T1".to_string(), "AF3".to_string(), 1.0),
            ("s1".to_string(), "T1".to_string(), "AF4".to_string(), 2.0),
            ("s1".to_string(), "T2".to_string(), "AF3".to_string(), 3.0),
        ];
        match CohortMatrix::from_rows(&rows) {
            Err(Error::IncompleteDesign { missing }) => {
                assert!(missing.contains(&"s1/T2/AF4".to_string()), "{missing:?}");
            }
            other => panic!("expected incomplete-design error, got {other:?}"),
        }
    }

    #[test]
    fn f_invariant_under_shift_and_ss_scales_quadratically() {
        let m = hand_matrix();
        let base = mixed_anova(&m).unwrap();

        let shifted_rows: Vec<(String, String, String, f64)> = m
            .subject_ids
            .iter()
            .enumerate()
            .flat_map(|(s, sid)| {
                let m = &m;
                m.tasks.iter().enumerate().flat_map(move |(t, task)| {
                    m.channels.iter().enumerate().map(move |(c, ch)| {
                        (
                            sid.clone(),
                            task.clone(),
                            ch.clone(),
                            m.values[s][t][c] + 100.0,
                        )
                    })
                })
            })
            .collect();
        let shifted = mixed_anova(&CohortMatrix::from_rows(&shifted_rows).unwrap()).unwrap();
        for src in ["Task", "Electrode", "Electrode x Task"] {
            let f0 = base.row(src).unwrap().f.unwrap();
            let f1 = shifted.row(src).unwrap().f.unwrap();
            assert!((f0 - f1).abs() < 1e-9, "{src}: {f0} vs {f1}");
        }

        let scaled_rows: Vec<(String, String, String, f64)> = m
            .subject_ids
            .iter()
            .enumerate()
            .flat_map(|(s, sid)| {
                let m = &m;
                m.tasks.iter().enumerate().flat_map(move |(t, task)| {
                    m.channels.iter().enumerate().map(move |(c, ch)| {
                        (
                            sid.clone(),
                            task.clone(),
                            ch.clone(),
                            m.values[s][t][c] * 3.0,
                        )
                    })
                })
            })
            .collect();
        let scaled = mixed_anova(&CohortMatrix::from_rows(&scaled_rows).unwrap()).unwrap();
        let t0 = base.row("Task").unwrap().ss;
        let t1 = scaled.row("Task").unwrap().ss;
        assert!((t1 - 9.0 * t0).abs() < 1e-9);
    }
}
