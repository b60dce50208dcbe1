//! Artifact span bookkeeping and amplitude-threshold annotation.

use serde::{Deserialize, Serialize};

use crate::ingest::Recording;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArtifactKind {
    Amplitude,
    Muscle,
    Manual,
}

/// One bad span, inclusive sample bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactSpan {
    pub start: usize,
    pub end: usize,
    pub kind: ArtifactKind,
}

/// A set of bad spans over one recording; sorted, and non-overlapping
/// within each kind.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ArtifactAnnotations {
    pub spans: Vec<ArtifactSpan>,
    pub threshold_volts: Option<f64>,
}

impl ArtifactAnnotations {
    pub fn from_spans(mut spans: Vec<ArtifactSpan>, threshold_volts: Option<f64>) -> Self {
        spans.sort_by_key(|s| (s.start, s.end));
        let mut merged: Vec<ArtifactSpan> = Vec::with_capacity(spans.len());
        for span in spans {
            match merged
                .iter_mut()
                .rev()
                .find(|m| m.kind == span.kind && span.start <= m.end.saturating_add(1))
            {
                Some(m) if span.start >= m.start => m.end = m.end.max(span.end),
                _ => merged.push(span),
            }
        }
        merged.sort_by_key(|s| (s.start, s.end));
        ArtifactAnnotations {
            spans: merged,
            threshold_volts,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    /// Merge two annotation sets into one.
    pub fn union(&self, other: &ArtifactAnnotations) -> ArtifactAnnotations {
        let mut spans = self.spans.clone();
        spans.extend_from_slice(&other.spans);
        ArtifactAnnotations::from_spans(spans, self.threshold_volts.or(other.threshold_volts))
    }

    /// Boolean per-sample mask: true where the sample falls in any span.
    pub fn sample_mask(&self, n_samples: usize) -> Vec<bool> {
        let mut mask = vec![false; n_samples];
        for span in &self.spans {
            let end = span.end.min(n_samples.saturating_sub(1));
            for m in mask.iter_mut().take(end + 1).skip(span.start) {
                *m = true;
            }
        }
        mask
    }

    pub fn total_bad_samples(&self, n_samples: usize) -> usize {
        self.sample_mask(n_samples).iter().filter(|&&b| b).count()
    }
}

/// Mark every sample whose magnitude exceeds `threshold` volts on any
/// channel, expand each span by `pad` seconds on both sides, and merge.
pub fn annotate_amplitude(rec: &Recording, threshold: f64, pad: f64) -> ArtifactAnnotations {
    assert!(threshold > 0.0, "amplitude threshold must be positive");
    let n = rec.n_samples();
    let pad_samples = (pad * rec.sampling_rate()).round() as usize;

    let mut bad = vec![false; n];
    for ch in rec.samples() {
        for (i, &x) in ch.iter().enumerate() {
            if x.abs() > threshold {
                bad[i] = true;
            }
        }
    }

    let mut spans = Vec::new();
    let mut i = 0;
    while i < n {
        if bad[i] {
            let start = i;
            while i + 1 < n && bad[i + 1] {
                i += 1;
            }
            spans.push(ArtifactSpan {
                start: start.saturating_sub(pad_samples),
                end: (i + pad_samples).min(n - 1),
                kind: ArtifactKind::Amplitude,
            });
        }
        i += 1;
    }
    ArtifactAnnotations::from_spans(spans, Some(threshold))
}
