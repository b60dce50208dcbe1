//! Relative band powers, inter-BRPD and cognitive-index ratios.
//!
//! Inter-BRPD is the alpha relative power minus the theta relative power
//! in percentage points; between two conditions, the one with the lower
//! value carries the higher mental effort.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::bands::{BandPowerRow, BandPowerTable, Segment};

/// Relative band powers (percent of brain ABP) for one channel/segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativePowerRecord {
    pub source_id: String,
    pub channel: String,
    pub segment: Segment,
    pub delta_rel: f64,
    pub theta_rel: f64,
    pub alpha_rel: f64,
    pub beta_rel: f64,
    /// alpha_rel - theta_rel, percentage points.
    pub inter_brpd: f64,
}

/// Relative powers from one band-power row; the four percentages sum
/// to 100.
pub fn relative_powers(row: &BandPowerRow) -> Result<RelativePowerRecord> {
    if !(row.brain_abp > 0.0) {
        return Err(Error::DegenerateInput(format!(
            "brain ABP of {}/{} {} is {}; relative powers undefined",
            row.source_id, row.channel, row.segment, row.brain_abp
        )));
    }
    let delta_rel = row.delta_abp / row.brain_abp * 100.0;
    let theta_rel = row.theta_abp / row.brain_abp * 100.0;
    let alpha_rel = row.alpha_abp / row.brain_abp * 100.0;
    let beta_rel = row.beta_abp / row.brain_abp * 100.0;
    Ok(RelativePowerRecord {
        source_id: row.source_id.clone(),
        channel: row.channel.clone(),
        segment: row.segment,
        delta_rel,
        theta_rel,
        alpha_rel,
        beta_rel,
        inter_brpd: alpha_rel - theta_rel,
    })
}

/// Alpha relative power minus theta relative power.
pub fn inter_brpd(r: &RelativePowerRecord) -> f64 {
    r.alpha_rel - r.theta_rel
}

/// Weights for the generalized index
/// `k0 + k1*alpha + k2*theta + k3*delta + k4*beta` over relative powers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexCoefficients {
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
}

impl IndexCoefficients {
    /// Coefficients that reduce the index to inter-BRPD.
    pub fn inter_brpd() -> Self {
        IndexCoefficients {
            k0: 0.0,
            k1: 1.0,
            k2: -1.0,
            k3: 0.0,
            k4: 0.0,
        }
    }
}

pub fn general_index(r: &RelativePowerRecord, k: &IndexCoefficients) -> f64 {
    k.k0 + k.k1 * r.alpha_rel + k.k2 * r.theta_rel + k.k3 * r.delta_rel + k.k4 * r.beta_rel
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Delta,
    Theta,
    Alpha,
    Beta,
}

impl Band {
    fn name(self) -> &'static str {
        match self {
            Band::Delta => "delta",
            Band::Theta => "theta",
            Band::Alpha => "alpha",
            Band::Beta => "beta",
        }
    }

    fn power(self, row: &BandPowerRow) -> f64 {
        match self {
            Band::Delta => row.delta_abp,
            Band::Theta => row.theta_abp,
            Band::Alpha => row.alpha_abp,
            Band::Beta => row.beta_abp,
        }
    }
}

/// A ratio of band-power sums, e.g. `beta / (alpha + theta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioDef {
    pub numerator: Vec<Band>,
    pub denominator: Vec<Band>,
}

impl RatioDef {
    /// Parse expressions of the form `band/band` or
    /// `band/(band+band+...)`, also with a parenthesized numerator.
    pub fn parse(text: &str) -> Result<Self> {
        fn side(s: &str) -> Result<Vec<Band>> {
            let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
            trimmed
                .split('+')
                .map(|b| match b.trim() {
                    "delta" => Ok(Band::Delta),
                    "theta" => Ok(Band::Theta),
                    "alpha" => Ok(Band::Alpha),
                    "beta" => Ok(Band::Beta),
                    other => Err(Error::InvalidParameter(format!(
                        "unknown band '{other}' in index expression"
                    ))),
                })
                .collect()
        }
        let (num, den) = text.split_once('/').ok_or_else(|| {
            Error::InvalidParameter(format!("index expression '{text}' needs a '/'"))
        })?;
        Ok(RatioDef {
            numerator: side(num)?,
            denominator: side(den)?,
        })
    }

    pub fn evaluate(&self, row: &BandPowerRow) -> Result<f64> {
        let num: f64 = self.numerator.iter().map(|&b| b.power(row)).sum();
        let den: f64 = self.denominator.iter().map(|&b| b.power(row)).sum();
        if den == 0.0 {
            let names: Vec<&str> = self.denominator.iter().map(|&b| b.name()).collect();
            return Err(Error::DegenerateInput(format!(
                "zero denominator ({}) in cognitive index",
                names.join("+")
            )));
        }
        Ok(num / den)
    }
}

/// Named set of cognitive-index formulas over band powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexDefinitionSet {
    pub name: String,
    pub cognitive_load: RatioDef,
    pub engagement: RatioDef,
    pub excitement: RatioDef,
    pub relaxation: RatioDef,
    pub mental_fatigue: RatioDef,
}

impl Default for IndexDefinitionSet {
    /// The `default-v1` set: load = theta/alpha, fatigue = alpha/theta
    /// (reciprocal by construction), engagement = beta/(alpha+theta),
    /// excitement = beta/alpha, relaxation = alpha/beta.
    fn default() -> Self {
        IndexDefinitionSet {
            name: "default-v1".into(),
            cognitive_load: RatioDef::parse("theta/alpha").unwrap(),
            engagement: RatioDef::parse("beta/(alpha+theta)").unwrap(),
            excitement: RatioDef::parse("beta/alpha").unwrap(),
            relaxation: RatioDef::parse("alpha/beta").unwrap(),
            mental_fatigue: RatioDef::parse("alpha/theta").unwrap(),
        }
    }
}

/// Literature cognitive indices for one channel/segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CognitiveIndexRecord {
    pub source_id: String,
    pub channel: String,
    pub segment: Segment,
    pub cognitive_load: f64,
    pub engagement: f64,
    pub excitement: f64,
    pub relaxation: f64,
    pub mental_fatigue: f64,
}

pub fn cognitive_indices(
    row: &BandPowerRow,
    defs: &IndexDefinitionSet,
) -> Result<CognitiveIndexRecord> {
    Ok(CognitiveIndexRecord {
        source_id: row.source_id.clone(),
        channel: row.channel.clone(),
        segment: row.segment,
        cognitive_load: defs.cognitive_load.evaluate(row)?,
        engagement: defs.engagement.evaluate(row)?,
        excitement: defs.excitement.evaluate(row)?,
        relaxation: defs.relaxation.evaluate(row)?,
        mental_fatigue: defs.mental_fatigue.evaluate(row)?,
    })
}

/// One exported metrics row: relative powers plus indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    #[serde(flatten)]
    pub relative: RelativePowerRecord,
    pub cognitive_load: f64,
    pub engagement: f64,
    pub excitement: f64,
    pub relaxation: f64,
    pub mental_fatigue: f64,
}

/// Evaluate relative powers and indices for every row of a band-power
/// table.
pub fn metrics_rows(table: &BandPowerTable, defs: &IndexDefinitionSet) -> Result<Vec<MetricsRow>> {
    table
        .rows
        .iter()
        .map(|row| {
            let relative = relative_powers(row)?;
            let idx = cognitive_indices(row, defs)?;
            Ok(MetricsRow {
                relative,
                cognitive_load: idx.cognitive_load,
                engagement: idx.engagement,
                excitement: idx.excitement,
                relaxation: idx.relaxation,
                mental_fatigue: idx.mental_fatigue,
            })
        })
        .collect()
}

pub fn metrics_csv_header() -> &'static str {
    "source_id,channel,segment,alpha_rel,theta_rel,delta_rel,beta_rel,inter_brpd,cognitive_load,engagement,excitement,relaxation,mental_fatigue"
}

pub fn metrics_csv_row(m: &MetricsRow) -> String {
    let r = &m.relative;
    format!(
        "{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
        r.source_id,
        r.channel,
        r.segment,
        r.alpha_rel,
        r.theta_rel,
        r.delta_rel,
        r.beta_rel,
        r.inter_brpd,
        m.cognitive_load,
        m.engagement,
        m.excitement,
        m.relaxation,
        m.mental_fatigue
    )
}
