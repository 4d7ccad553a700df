//! On-disk scenario document.
//!
//! Every field is optional at the serde layer so that validation can report
//! exactly which field is missing instead of a generic parse error.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::units::Quantity;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    #[serde(default)]
    pub satellites: Vec<RawSatellite>,
    #[serde(default)]
    pub ground_stations: Vec<RawGroundStation>,
    #[serde(default)]
    pub data_centers: Vec<RawDataCenter>,
    pub sim: Option<RawSim>,
}

/// Daily volume as either a fixed value or a `[min, max]` range to draw from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawVolume {
    Fixed(f64),
    Range([f64; 2]),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSatellite {
    pub id: Option<String>,
    pub altitude_km: Option<f64>,
    pub inclination_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raan_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_deg: Option<f64>,
    /// MB per day; defaults to the 0.9–1.1 TB range.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub daily_volume_mb: Option<RawVolume>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duty_cycle: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGroundStation {
    pub id: Option<String>,
    pub provider: Option<String>,
    pub lat_deg: Option<f64>,
    pub lon_deg: Option<f64>,
    pub antennas: Option<i64>,
    /// Per-antenna rental price per unit time.
    pub price: Option<Quantity>,
    /// Per-data-center backhaul rate overrides, keyed by data-center id.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub backhaul: BTreeMap<String, Quantity>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDataCenter {
    pub id: Option<String>,
    pub provider: Option<String>,
    /// Compute price per unit time.
    pub price: Option<Quantity>,
    /// Processing time per unit of data.
    pub processing: Option<Quantity>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPolicyParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provider: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub withhold_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub greedy_metric: Option<super::GreedyMetric>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSim {
    /// Slot length in minutes.
    pub tau: Option<f64>,
    /// Number of slots.
    pub horizon: Option<i64>,
    /// Latency threshold, minutes per MB.
    pub xi: Option<f64>,
    pub v: Option<f64>,
    pub seed: Option<u64>,
    pub policy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy_params: Option<RawPolicyParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elevation_mask_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backhaul_default: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contact_plan_path: Option<String>,
}
