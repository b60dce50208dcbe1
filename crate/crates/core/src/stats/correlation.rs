//! Pearson correlation matrices and Fisher-z pooling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric correlation matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    pub r: Vec<Vec<f64>>,
    /// Sample size behind the matrix (sum of inputs after pooling).
    pub n: usize,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        Some(self.r[i][j])
    }

    /// Plot-ready CSV grid with a label header row and column.
    pub fn csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(",{}\n", self.labels.join(",")));
        for (i, label) in self.labels.iter().enumerate() {
            let row: Vec<String> = self.r[i].iter().map(|v| format!("{v:.6}")).collect();
            out.push_str(&format!("{label},{}\n", row.join(",")));
        }
        out
    }
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let dx = x - ma;
        let dy = y - mb;
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    sab / (saa * sbb).sqrt()
}

/// Pairwise Pearson correlations of named, equal-length columns.
pub fn pearson_matrix(columns: &[(String, Vec<f64>)]) -> Result<CorrelationMatrix> {
    if columns.is_empty() {
        return Err(Error::InvalidParameter("no columns given".into()));
    }
    let n = columns[0].1.len();
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "correlation needs at least 3 rows, got {n}"
        )));
    }
    for (label, col) in columns {
        if col.len() != n {
            return Err(Error::InvalidParameter(format!(
                "column '{label}' has {} rows, expected {n}",
                col.len()
            )));
        }
        let mean = col.iter().sum::<f64>() / n as f64;
        if col.iter().all(|&v| (v - mean).abs() < f64::EPSILON * mean.abs().max(1.0)) {
            return Err(Error::DegenerateInput(format!(
                "column '{label}' is constant; correlation undefined"
            )));
        }
    }

    let m = columns.len();
    let mut r = vec![vec![0.0; m]; m];
    for i in 0..m {
        r[i][i] = 1.0;
        for j in (i + 1)..m {
            let v = pearson(&columns[i].1, &columns[j].1);
            r[i][j] = v;
            r[j][i] = v;
        }
    }
    Ok(CorrelationMatrix {
        labels: columns.iter().map(|(l, _)| l.clone()).collect(),
        r,
        n,
    })
}

/// Result of pooling correlation matrices via Fisher's z-transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherPooled {
    pub matrix: CorrelationMatrix,
    /// Off-diagonal entries clipped to |r| = 1 - 1e-7 before atanh.
    pub clipped_entries: usize,
}

/// Pool matrices elementwise: z = atanh(r), average (weighted by n-3
/// when requested), pooled r = tanh(mean z). The diagonal is forced
/// to 1.
pub fn fisher_pool(mats: &[CorrelationMatrix], weighted: bool) -> Result<FisherPooled> {
    let first = mats
        .first()
        .ok_or_else(|| Error::InvalidParameter("no matrices to pool".into()))?;
    for m in mats {
        if m.labels != first.labels {
            return Err(Error::LabelMismatch(format!(
                "{:?} vs {:?}",
                m.labels, first.labels
            )));
        }
    }
    let dim = first.labels.len();
    let clip = 1.0 - 1e-7;
    let mut clipped = 0usize;
    let mut pooled = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        pooled[i][i] = 1.0;
        for j in (i + 1)..dim {
            let mut z_sum = 0.0;
            let mut w_sum = 0.0;
            for m in mats {
                let mut r = m.r[i][j];
                if r.abs() >= 1.0 {
                    r = r.clamp(-clip, clip);
                    clipped += 1;
                }
                let w = if weighted {
                    (m.n.saturating_sub(3)).max(1) as f64
                } else {
                    1.0
                };
                z_sum += w * r.atanh();
                w_sum += w;
            }
            let r = (z_sum / w_sum).tanh();
            pooled[i][j] = r;
            pooled[j][i] = r;
        }
    }
    Ok(FisherPooled {
        matrix: CorrelationMatrix {
            labels: first.labels.clone(),
            r: pooled,
            n: mats.iter().map(|m| m.n).sum(),
        },
        clipped_entries: clipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cols(data: &[(&str, &[f64])]) -> Vec<(String, Vec<f64>)> {
        data.iter()
            .map(|(l, v)| (l.to_string(), v.to_vec()))
            .collect()
    }

    #[test]
    fn affine_columns_correlate_at_one() {
        let x = [1.0, 2.0, 3.5, 7.0, -1.0];
        let y: Vec<f64> = x.iter().map(|&v| 2.0 * v + 3.0).collect();
        let m = pearson_matrix(&cols(&[("x", &x), ("y", &y)])).unwrap();
        assert!((m.get("x", "y").unwrap() - 1.0).abs() < 1e-12);
        let z: Vec<f64> = x.iter().map(|&v| -v).collect();
        let m = pearson_matrix(&cols(&[("x", &x), ("z", &z)])).unwrap();
        assert!((m.get("x", "z").unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_column_sample_matches_covariance_formula() {
        let a = [0.2, 1.4, -0.7, 2.2, 0.9, -1.3];
        let b = [1.0, 0.5, 0.3, 1.9, -0.2, -0.8];
        let c = [-2.0, 0.7, 0.1, 0.4, 1.6, 0.9];
        let m = pearson_matrix(&cols(&[("a", &a), ("b", &b), ("c", &c)])).unwrap();

        // Direct covariance-formula oracle.
        let oracle = |x: &[f64], y: &[f64]| -> f64 {
            let n = x.len() as f64;
            let sx: f64 = x.iter().sum();
            let sy: f64 = y.iter().sum();
            let sxy: f64 = x.iter().zip(y).map(|(&p, &q)| p * q).sum();
            let sxx: f64 = x.iter().map(|&p| p * p).sum();
            let syy: f64 = y.iter().map(|&q| q * q).sum();
            (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
        };
        assert!((m.get("a", "b").unwrap() - oracle(&a, &b)).abs() < 1e-12);
        assert!((m.get("a", "c").unwrap() - oracle(&a, &c)).abs() < 1e-12);
        assert!((m.get("b", "c").unwrap() - oracle(&b, &c)).abs() < 1e-12);
        // Symmetry and unit diagonal.
        for i in 0..3 {
            assert_eq!(m.r[i][i], 1.0);
            for j in 0..3 {
                assert_eq!(m.r[i][j], m.r[j][i]);
            }
        }
    }

    #[test]
    fn per_column_affine_invariance() {
        let a = [0.2, 1.4, -0.7, 2.2, 0.9, -1.3];
        let b = [1.0, 0.5, 0.3, 1.9, -0.2, -0.8];
        let a2: Vec<f64> = a.iter().map(|&v| 10.0 * v + 5.0).collect();
        let b2: Vec<f64> = b.iter().map(|&v| 0.1 * v - 2.0).collect();
        let m1 = pearson_matrix(&cols(&[("a", &a), ("b", &b)])).unwrap();
        let m2 = pearson_matrix(&cols(&[("a", &a2), ("b", &b2)])).unwrap();
        assert!((m1.r[0][1] - m2.r[0][1]).abs() < 1e-12);
    }

    #[test]
    fn constant_column_is_named_in_the_error() {
        let err = pearson_matrix(&cols(&[("x", &[1.0, 2.0, 3.0]), ("flat", &[4.0, 4.0, 4.0])]))
            .unwrap_err();
        assert!(err.to_string().contains("flat"), "{err}");
    }

    fn toy_matrix(r01: f64, n: usize) -> CorrelationMatrix {
        CorrelationMatrix {
            labels: vec!["a".into(), "b".into()],
            r: vec![vec![1.0, r01], vec![r01, 1.0]],
            n,
        }
    }

    #[test]
    fn pooling_identical_matrices_is_a_fixed_point() {
        let mats = vec![toy_matrix(0.42, 27); 6];
        let pooled = fisher_pool(&mats, false).unwrap();
        assert!((pooled.matrix.r[0][1] - 0.42).abs() < 1e-12);
        assert_eq!(pooled.clipped_entries, 0);
    }

    #[test]
    fn opposite_correlations_pool_to_zero() {
        let mats = vec![toy_matrix(0.5, 27), toy_matrix(-0.5, 27)];
        let pooled = fisher_pool(&mats, false).unwrap();
        assert!(pooled.matrix.r[0][1].abs() < 1e-12);
    }

    #[test]
    fn unweighted_pool_of_point_three_and_point_seven() {
        let mats = vec![toy_matrix(0.3, 27), toy_matrix(0.7, 27)];
        let pooled = fisher_pool(&mats, false).unwrap();
        let expected = ((0.3f64.atanh() + 0.7f64.atanh()) / 2.0).tanh();
        assert!((expected - 0.5287511467899559).abs() < 1e-12);
        assert!((pooled.matrix.r[0][1] - expected).abs() < 1e-12);
    }

    #[test]
    fn weighted_pool_leans_toward_the_larger_sample() {
        let mats = vec![toy_matrix(0.3, 103), toy_matrix(0.7, 13)];
        let unweighted = fisher_pool(&mats, false).unwrap().matrix.r[0][1];
        let weighted = fisher_pool(&mats, true).unwrap().matrix.r[0][1];
        assert!(weighted < unweighted, "{weighted} vs {unweighted}");
        let expected = ((100.0 * 0.3f64.atanh() + 10.0 * 0.7f64.atanh()) / 110.0).tanh();
        assert!((weighted - expected).abs() < 1e-12);
    }

    #[test]
    fn pooling_a_single_matrix_is_identity() {
        let m = toy_matrix(-0.63, 27);
        let pooled = fisher_pool(&[m.clone()], false).unwrap();
        assert!((pooled.matrix.r[0][1] - m.r[0][1]).abs() < 1e-12);
    }

    #[test]
    fn perfect_correlations_are_clipped_with_a_count() {
        let mats = vec![toy_matrix(1.0, 27), toy_matrix(0.5, 27)];
        let pooled = fisher_pool(&mats, false).unwrap();
        assert_eq!(pooled.clipped_entries, 1);
        assert!(pooled.matrix.r[0][1] < 1.0);
    }

    #[test]
    fn label_mismatch_errors() {
        let a = toy_matrix(0.3, 27);
        let mut b = toy_matrix(0.4, 27);
        b.labels[1] = "c".into();
        assert!(matches!(
            fisher_pool(&[a, b], false),
            Err(Error::LabelMismatch(_))
        ));
    }
}
