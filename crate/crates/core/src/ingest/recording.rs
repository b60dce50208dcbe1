use crate::error::{Error, Result};

/// A multichannel EEG time series with per-channel samples in volts.
///
/// All channels share one sampling rate and have equal length; labels are
/// unique 10-20 electrode names such as `"AF3"`.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    channel_labels: Vec<String>,
    sampling_rate: f64,
    samples: Vec<Vec<f64>>,
    start_time: Option<f64>,
}

impl Recording {
    pub fn new(
        channel_labels: Vec<String>,
        sampling_rate: f64,
        samples: Vec<Vec<f64>>,
        start_time: Option<f64>,
    ) -> Result<Self> {
        if !(sampling_rate > 0.0) {
            return Err(Error::InvalidRecording(format!(
                "sampling rate must be positive, got {sampling_rate}"
            )));
        }
        if channel_labels.len() != samples.len() {
            return Err(Error::InvalidRecording(format!(
                "{} labels but {} sample channels",
                channel_labels.len(),
                samples.len()
            )));
        }
        if let Some(first) = samples.first() {
            if samples.iter().any(|ch| ch.len() != first.len()) {
                return Err(Error::InvalidRecording(
                    "channels have unequal lengths".into(),
                ));
            }
        }
        for (i, a) in channel_labels.iter().enumerate() {
            if channel_labels[..i].contains(a) {
                return Err(Error::InvalidRecording(format!(
                    "duplicate channel label '{a}'"
                )));
            }
        }
        Ok(Self {
            channel_labels,
            sampling_rate,
            samples,
            start_time,
        })
    }

    pub fn channel_labels(&self) -> &[String] {
        &self.channel_labels
    }

    pub fn sampling_rate(&self) -> f64 {
        self.sampling_rate
    }

    pub fn start_time(&self) -> Option<f64> {
        self.start_time
    }

    pub fn n_channels(&self) -> usize {
        self.channel_labels.len()
    }

    pub fn n_samples(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    pub fn duration_seconds(&self) -> f64 {
        self.n_samples() as f64 / self.sampling_rate
    }

    /// Per-channel sample data, channel-major.
    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn channel(&self, label: &str) -> Option<&[f64]> {
        let idx = self.channel_labels.iter().position(|l| l == label)?;
        Some(&self.samples[idx])
    }

    /// Replace the sample data, keeping labels, rate and start time.
    /// The new data must have the same channel count and equal lengths.
    pub fn with_samples(&self, samples: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(
            self.channel_labels.clone(),
            self.sampling_rate,
            samples,
            self.start_time,
        )
    }

    /// Restrict to the requested channels, in the requested order.
    pub fn select_channels(&self, labels: &[String]) -> Result<Self> {
        let mut picked = Vec::with_capacity(labels.len());
        for want in labels {
            let idx = self
                .channel_labels
                .iter()
                .position(|l| l == want)
                .ok_or_else(|| Error::UnknownChannel {
                    requested: want.clone(),
                    available: self.channel_labels.clone(),
                })?;
            picked.push(self.samples[idx].clone());
        }
        Self::new(labels.to_vec(), self.sampling_rate, picked, self.start_time)
    }

    /// Half-open sample slice `[start, end)` across all channels.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        let n = self.n_samples();
        if start >= end || end > n {
            return Err(Error::InvalidRecording(format!(
                "slice [{start}, {end}) out of range for {n} samples"
            )));
        }
        let samples = self
            .samples
            .iter()
            .map(|ch| ch[start..end].to_vec())
            .collect();
        let start_time = self
            .start_time
            .map(|t| t + start as f64 / self.sampling_rate);
        Self::new(
            self.channel_labels.clone(),
            self.sampling_rate,
            samples,
            start_time,
        )
    }
}
