//! Pipeline configuration: TOML sections with paper-default values.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use brpd::metrics::{IndexDefinitionSet, RatioDef};
use brpd::preprocess::{FilterSpec, FirWindow, IcaSettings};
use brpd::spectral::Bands;

fn default_ica_channels() -> Vec<String> {
    ["AF3", "F7", "F3", "FC5", "FC6", "F4", "F8", "AF4"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

fn default_metric_channels() -> Vec<String> {
    vec!["AF3".to_string(), "AF4".to_string()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelsConfig {
    pub ica: Vec<String>,
    pub metrics: Vec<String>,
}

impl Default for ChannelsConfig {
    fn default() -> Self {
        ChannelsConfig {
            ica: default_ica_channels(),
            metrics: default_metric_channels(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub l_freq: f64,
    pub h_freq: f64,
    pub l_trans_bandwidth: f64,
    pub h_trans_bandwidth: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            l_freq: 1.0,
            h_freq: 40.0,
            l_trans_bandwidth: 1.0,
            h_trans_bandwidth: 10.0,
        }
    }
}

impl FilterConfig {
    pub fn to_spec(&self) -> FilterSpec {
        FilterSpec {
            l_freq: self.l_freq,
            h_freq: self.h_freq,
            window: FirWindow::Hamming,
            l_trans_bandwidth: self.l_trans_bandwidth,
            h_trans_bandwidth: self.h_trans_bandwidth,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArtifactsConfig {
    pub amplitude_threshold_uv: f64,
    pub amplitude_pad_s: f64,
    pub muscle_low_hz: f64,
    pub muscle_high_hz: f64,
    pub muscle_z_threshold: f64,
    pub muscle_window_s: f64,
}

impl Default for ArtifactsConfig {
    fn default() -> Self {
        ArtifactsConfig {
            amplitude_threshold_uv: 200.0,
            amplitude_pad_s: 0.25,
            muscle_low_hz: 25.0,
            muscle_high_hz: 40.0,
            muscle_z_threshold: 4.0,
            muscle_window_s: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IcaConfig {
    pub n_components: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
    /// Fit the unmixing on every n-th clean sample; the transform uses
    /// all samples. 2 is alias-free for the default 1-40 Hz passband.
    pub fit_stride: usize,
    /// Component indices to reject on every recording.
    pub reject: Vec<usize>,
    /// Also reject components flagged by the ocular heuristic.
    pub eog_heuristic: bool,
}

impl Default for IcaConfig {
    fn default() -> Self {
        IcaConfig {
            n_components: 8,
            max_iter: 15_000,
            tol: 1e-4,
            seed: 0,
            fit_stride: 2,
            reject: Vec::new(),
            eog_heuristic: false,
        }
    }
}

impl IcaConfig {
    pub fn to_settings(&self) -> IcaSettings {
        IcaSettings {
            n_components: self.n_components,
            max_iter: self.max_iter,
            tol: self.tol,
            alpha: 1.0,
            seed: self.seed,
            fit_stride: self.fit_stride,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralConfig {
    pub nw: f64,
    pub fmax: f64,
    pub delta: (f64, f64),
    pub theta: (f64, f64),
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            nw: 4.0,
            fmax: 128.0,
            delta: (1.0, 4.0),
            theta: (4.0, 8.0),
            alpha: (8.0, 13.0),
            beta: (13.0, 30.0),
        }
    }
}

impl SpectralConfig {
    pub fn bands(&self) -> Bands {
        Bands {
            delta: self.delta,
            theta: self.theta,
            alpha: self.alpha,
            beta: self.beta,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndicesConfig {
    /// Definition-set name; the built-in default is "default-v1".
    pub definition: Option<String>,
    pub cognitive_load: Option<String>,
    pub engagement: Option<String>,
    pub excitement: Option<String>,
    pub relaxation: Option<String>,
    pub mental_fatigue: Option<String>,
}

impl IndicesConfig {
    pub fn to_definition_set(&self) -> anyhow::Result<IndexDefinitionSet> {
        let mut set = IndexDefinitionSet::default();
        if let Some(name) = &self.definition {
            if name != "default-v1" {
                anyhow::bail!("unknown index definition set '{name}'; available: default-v1");
            }
        }
        let mut customized = false;
        let mut apply = |slot: &mut RatioDef, expr: &Option<String>| -> anyhow::Result<()> {
            if let Some(expr) = expr {
                *slot = RatioDef::parse(expr)?;
                customized = true;
            }
            Ok(())
        };
        apply(&mut set.cognitive_load, &self.cognitive_load)?;
        apply(&mut set.engagement, &self.engagement)?;
        apply(&mut set.excitement, &self.excitement)?;
        apply(&mut set.relaxation, &self.relaxation)?;
        apply(&mut set.mental_fatigue, &self.mental_fatigue)?;
        if customized {
            set.name = "custom".into();
        }
        Ok(set)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatsConfig {
    pub enabled: bool,
    /// Weight matrices by n-3 when pooling correlations.
    pub weighted_pooling: bool,
}

impl Default for StatsConfig {
    fn default() -> Self {
        StatsConfig {
            enabled: true,
            weighted_pooling: false,
        }
    }
}

/// Full pipeline configuration, one struct per TOML section.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub channels: ChannelsConfig,
    pub filter: FilterConfig,
    pub artifacts: ArtifactsConfig,
    pub ica: IcaConfig,
    pub spectral: SpectralConfig,
    pub indices: IndicesConfig,
    pub stats: StatsConfig,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        let cfg: PipelineConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.channels.metrics.is_empty() {
            anyhow::bail!("channels.metrics must name at least one channel");
        }
        if self.channels.ica.is_empty() {
            anyhow::bail!("channels.ica must name at least one channel");
        }
        if self.ica.n_components == 0 || self.ica.n_components > self.channels.ica.len() {
            anyhow::bail!(
                "ica.n_components must be in 1..={}, got {}",
                self.channels.ica.len(),
                self.ica.n_components
            );
        }
        for idx in &self.ica.reject {
            if *idx >= self.ica.n_components {
                anyhow::bail!(
                    "ica.reject index {idx} out of range for {} components",
                    self.ica.n_components
                );
            }
        }
        for (name, (lo, hi)) in [
            ("delta", self.spectral.delta),
            ("theta", self.spectral.theta),
            ("alpha", self.spectral.alpha),
            ("beta", self.spectral.beta),
            ("muscle", (self.artifacts.muscle_low_hz, self.artifacts.muscle_high_hz)),
        ] {
            if !(0.0 <= lo && lo < hi) {
                anyhow::bail!("{name} band ({lo}, {hi}) must satisfy 0 <= low < high");
            }
        }
        if !(self.filter.l_freq > 0.0 && self.filter.l_freq < self.filter.h_freq) {
            anyhow::bail!(
                "filter passband ({}, {}) must satisfy 0 < l_freq < h_freq",
                self.filter.l_freq,
                self.filter.h_freq
            );
        }
        self.indices.to_definition_set()?;
        Ok(())
    }

    /// Hash of the resolved configuration; any field change changes it.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_mirror_the_published_parameters() {
        let cfg = PipelineConfig::default();
        assert_eq!(cfg.filter.l_freq, 1.0);
        assert_eq!(cfg.filter.h_freq, 40.0);
        assert_eq!(cfg.artifacts.amplitude_threshold_uv, 200.0);
        assert_eq!(cfg.channels.ica.len(), 8);
        assert_eq!(cfg.ica.max_iter, 15_000);
        assert_eq!(cfg.spectral.fmax, 128.0);
        cfg.validate().unwrap();
    }

    #[test]
    fn toml_roundtrip_and_partial_files() {
        let cfg = PipelineConfig::from_toml(
            r#"
            [filter]
            l_freq = 2.0

            [stats]
            enabled = false
            "#,
        )
        .unwrap();
        assert_eq!(cfg.filter.l_freq, 2.0);
        assert_eq!(cfg.filter.h_freq, 40.0); // default preserved
        assert!(!cfg.stats.enabled);
    }

    #[test]
    fn hash_changes_iff_a_field_changes() {
        let a = PipelineConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.spectral.nw = 3.5;
        assert_ne!(a.hash(), b.hash());
        b.spectral.nw = 4.0;
        assert_eq!(a.hash(), b.hash());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(PipelineConfig::from_toml("[ica]\nn_components = 0").is_err());
        assert!(PipelineConfig::from_toml("[spectral]\nalpha = [13.0, 8.0]").is_err());
        assert!(PipelineConfig::from_toml("[indices]\ncognitive_load = \"gamma/alpha\"").is_err());
        assert!(PipelineConfig::from_toml("[unknown_section]\nx = 1").is_err());
    }

    #[test]
    fn index_overrides_rename_the_set() {
        let cfg = PipelineConfig::from_toml("[indices]\nexcitement = \"beta/(alpha+theta)\"")
            .unwrap();
        let set = cfg.indices.to_definition_set().unwrap();
        assert_eq!(set.name, "custom");
    }
}
