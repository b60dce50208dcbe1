//! Bonferroni-corrected pairwise comparisons on electrode-averaged
//! values, one-way error term across task groups.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::stats::anova::CohortMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseComparison {
    pub group_i: String,
    pub group_j: String,
    pub mean_difference: f64,
    pub std_error: f64,
    pub t: f64,
    pub p_adjusted: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosthocReport {
    pub comparisons: Vec<PairwiseComparison>,
    /// Pooled mean square error of the electrode-averaged one-way layout.
    pub mse: f64,
    pub df_error: usize,
    /// Set when group sizes differ and the pooled-SE variant was used.
    pub unequal_sizes_warning: bool,
}

/// Bonferroni post-hoc over task groups of electrode-averaged values.
pub fn bonferroni_pairwise(m: &CohortMatrix) -> Result<PosthocReport> {
    let groups: Vec<(String, Vec<f64>)> = m
        .tasks
        .iter()
        .enumerate()
        .map(|(t, task)| {
            let vals = (0..m.n_subjects()).map(|s| m.unit_mean(s, t)).collect();
            (task.clone(), vals)
        })
        .collect();
    bonferroni_pairwise_groups(&groups)
}

/// The same comparison over explicit groups of unit values.
pub fn bonferroni_pairwise_groups(groups: &[(String, Vec<f64>)]) -> Result<PosthocReport> {
    if groups.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "post-hoc comparison needs at least 2 groups, got {}",
            groups.len()
        )));
    }
    let mut n_total = 0usize;
    let mut sse = 0.0;
    let mut means = Vec::with_capacity(groups.len());
    for (name, vals) in groups {
        if vals.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "group '{name}' has fewer than 2 units"
            )));
        }
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        sse += vals.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>();
        n_total += vals.len();
        means.push(mean);
    }
    let df_error = n_total - groups.len();
    let mse = sse / df_error as f64;
    let unequal = groups.windows(2).any(|w| w[0].1.len() != w[1].1.len());

    let n_pairs = groups.len() * (groups.len() - 1) / 2;
    let dist = StudentsT::new(0.0, 1.0, df_error as f64)
        .map_err(|e| Error::InvalidParameter(format!("t distribution: {e}")))?;
    // Bonferroni-adjusted two-sided critical value for the CIs.
    let alpha_adj = 0.05 / n_pairs as f64;
    let t_crit = dist.inverse_cdf(1.0 - alpha_adj / 2.0);

    let mut comparisons = Vec::with_capacity(n_pairs);
    for i in 0..groups.len() {
        for j in (i + 1)..groups.len() {
            let (ni, nj) = (groups[i].1.len() as f64, groups[j].1.len() as f64);
            let diff = means[i] - means[j];
            let se = (mse * (1.0 / ni + 1.0 / nj)).sqrt();
            let t = diff / se;
            let p_raw = 2.0 * dist.sf(t.abs());
            let p_adjusted = (p_raw * n_pairs as f64).min(1.0);
            comparisons.push(PairwiseComparison {
                group_i: groups[i].0.clone(),
                group_j: groups[j].0.clone(),
                mean_difference: diff,
                std_error: se,
                t,
                p_adjusted,
                ci_low: diff - t_crit * se,
                ci_high: diff + t_crit * se,
            });
        }
    }

    Ok(PosthocReport {
        comparisons,
        mse,
        df_error,
        unequal_sizes_warning: unequal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Numerical-quadrature oracle for the two-sided t-tail probability.
    fn t_two_sided_by_quadrature(t: f64, df: f64) -> f64 {
        // Integrate the t pdf on [0, |t|] with Simpson's rule and use
        // symmetry: p = 1 - 2 * integral.
        let pdf = |x: f64| -> f64 {
            let half = (df + 1.0) / 2.0;
            // log Beta(1/2, df/2) via ln-gamma (Lanczos).
            fn ln_gamma(z: f64) -> f64 {
                const G: [f64; 9] = [
                    0.99999999999980993,
                    676.5203681218851,
                    -1259.1392167224028,
                    771.32342877765313,
                    -176.61502916214059,
                    12.507343278686905,
                    -0.13857109526572012,
                    9.9843695780195716e-6,
                    1.5056327351493116e-7,
                ];
                if z < 0.5 {
                    return (std::f64::consts::PI / (std::f64::consts::PI * z).sin()).ln()
                        - ln_gamma(1.0 - z);
                }
                let z = z - 1.0;
                let mut x = G[0];
                for (i, &gi) in G.iter().enumerate().skip(1) {
                    x += gi / (z + i as f64);
                }
                let t = z + 7.5;
                0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
            }
            let ln_c = ln_gamma(half) - ln_gamma(df / 2.0) - 0.5 * (df * std::f64::consts::PI).ln();
            (ln_c - half * (1.0 + x * x / df).ln()).exp()
        };
        let n = 20_000;
        let h = t.abs() / n as f64;
        let mut integral = pdf(0.0) + pdf(t.abs());
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            integral += w * pdf(i as f64 * h);
        }
        integral *= h / 3.0;
        1.0 - 2.0 * integral
    }

    #[test]
    fn published_consistency_check() {
        // MSE 33.493 with n = 27 per group reproduces SE = 1.575, and a
        // 5.733 difference at df 78 lands at the printed p = .001.
        let se = (2.0 * 33.493f64 / 27.0).sqrt();
        assert!((se - 1.575).abs() < 5e-4, "SE = {se}");

        let t = 5.733 / se;
        let dist = StudentsT::new(0.0, 1.0, 78.0).unwrap();
        let p = (3.0 * 2.0 * dist.sf(t)).min(1.0);
        // Exact Bonferroni p is 0.00147; the source table prints the
        // 3-decimal rounding .001.
        assert!((p - 0.001465).abs() < 1e-4, "p = {p}");
        assert_eq!((p * 1000.0).round() / 1000.0, 0.001);
        // Cross-check the t tail with the quadrature oracle.
        let p_oracle = (3.0 * t_two_sided_by_quadrature(t, 78.0)).min(1.0);
        assert!((p - p_oracle).abs() < 1e-6, "{p} vs {p_oracle}");
    }

    #[test]
    fn identical_groups_compare_at_p_one() {
        let g = vec![
            ("T1".to_string(), vec![1.0, 2.0, 3.0, 4.0]),
            ("T2".to_string(), vec![1.0, 2.0, 3.0, 4.0]),
        ];
        let rep = bonferroni_pairwise_groups(&g).unwrap();
        assert_eq!(rep.comparisons.len(), 1);
        let c = &rep.comparisons[0];
        assert_eq!(c.mean_difference, 0.0);
        assert_eq!(c.p_adjusted, 1.0);
        assert!(!rep.unequal_sizes_warning);
        assert!(c.ci_low < 0.0 && c.ci_high > 0.0);
    }

    #[test]
    fn unequal_group_sizes_set_the_warning_flag() {
        let g = vec![
            ("T1".to_string(), vec![1.0, 2.0, 3.0]),
            ("T2".to_string(), vec![4.0, 5.0, 6.0, 7.0]),
        ];
        let rep = bonferroni_pairwise_groups(&g).unwrap();
        assert!(rep.unequal_sizes_warning);
        let c = &rep.comparisons[0];
        let expected_se = (rep.mse * (1.0 / 3.0 + 1.0 / 4.0)).sqrt();
        assert!((c.std_error - expected_se).abs() < 1e-12);
    }

    #[test]
    fn significance_flags_survive_positive_affine_maps() {
        let base = vec![
            ("T1".to_string(), vec![10.1, 11.4, 9.8, 10.9, 10.3]),
            ("T2".to_string(), vec![14.9, 15.7, 15.1, 16.0, 14.6]),
            ("T3".to_string(), vec![10.6, 11.0, 10.2, 11.1, 10.7]),
        ];
        let mapped: Vec<(String, Vec<f64>)> = base
            .iter()
            .map(|(n, v)| (n.clone(), v.iter().map(|&x| 2.5 * x + 7.0).collect()))
            .collect();
        let a = bonferroni_pairwise_groups(&base).unwrap();
        let b = bonferroni_pairwise_groups(&mapped).unwrap();
        for (ca, cb) in a.comparisons.iter().zip(&b.comparisons) {
            assert!((ca.p_adjusted - cb.p_adjusted).abs() < 1e-9);
            assert_eq!(ca.p_adjusted < 0.05, cb.p_adjusted < 0.05);
        }
    }

    #[test]
    fn statrs_t_tail_matches_quadrature_oracle() {
        let dist = StudentsT::new(0.0, 1.0, 78.0).unwrap();
        for t in [0.5, 1.0, 2.0, 3.64] {
            let sf2 = 2.0 * dist.sf(t);
            let oracle = t_two_sided_by_quadrature(t, 78.0);
            assert!((sf2 - oracle).abs() < 1e-6, "t={t}: {sf2} vs {oracle}");
        }
    }
}
