//! Cohort-level statistics: normality tests, mixed ANOVA, Bonferroni
//! post-hoc comparisons, correlation matrices and Fisher-z pooling.

pub mod anova;
pub mod correlation;
pub mod describe;
pub mod lilliefors;
pub mod posthoc;
pub mod shapiro;

#[cfg(test)]
mod test_data;

use serde::{Deserialize, Serialize};

pub use anova::{mixed_anova, AnovaRow, AnovaTable, CohortMatrix};
pub use correlation::{fisher_pool, pearson_matrix, CorrelationMatrix, FisherPooled};
pub use describe::{describe, Descriptives};
pub use lilliefors::{lilliefors_ks, LillieforsResult};
pub use posthoc::{bonferroni_pairwise, bonferroni_pairwise_groups, PairwiseComparison, PosthocReport};
pub use shapiro::shapiro_wilk;

use crate::error::Result;

/// Combined normality evidence for one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub n: usize,
    /// Shapiro-Wilk statistic, in (0, 1].
    pub w: f64,
    pub p_sw: f64,
    /// Lilliefors-corrected KS distance.
    pub d: f64,
    pub p_ks_lilliefors: f64,
    /// True when the KS p-value is only a lower bound (> 0.2).
    pub p_ks_is_lower_bound: bool,
}

/// Run both normality tests on one sample.
pub fn normality_report(x: &[f64]) -> Result<NormalityReport> {
    let (w, p_sw) = shapiro_wilk(x)?;
    let ks = lilliefors_ks(x)?;
    Ok(NormalityReport {
        n: x.len(),
        w,
        p_sw,
        d: ks.d,
        p_ks_lilliefors: ks.p,
        p_ks_is_lower_bound: ks.p_is_lower_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_combines_both_tests() {
        let x: Vec<f64> = (0..30).map(|i| ((i * 37) % 17) as f64 * 0.3 - 2.0).collect();
        let r = normality_report(&x).unwrap();
        assert_eq!(r.n, 30);
        assert!(r.w > 0.0 && r.w <= 1.0);
        assert!((0.0..=1.0).contains(&r.p_sw));
        assert!(r.d >= 0.0);
        assert!((0.0..=1.0).contains(&r.p_ks_lilliefors));
    }
}
