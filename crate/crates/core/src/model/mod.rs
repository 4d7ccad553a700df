//! Domain types shared by every module, plus scenario loading and validation.
//!
//! All quantities are held in canonical units after validation: MB, minutes,
//! MB/min and USD. A validated [`Scenario`] is immutable and can be shared
//! read-only between concurrent runs.

pub mod raw;
pub mod units;
mod validate;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::PolicyKind;
use crate::error::ScenarioError;

pub use raw::RawScenario;
pub use validate::validate_scenario;

/// Default daily volume range, MB/day (0.9–1.1 TB).
pub const DEFAULT_DAILY_VOLUME_MB: (f64, f64) = (0.9e6, 1.1e6);
pub const DEFAULT_ELEVATION_MASK_DEG: f64 = 10.0;
pub const DEFAULT_NOISE: (f64, f64) = (0.9, 1.1);
pub const DEFAULT_RHO: f64 = 0.8;
pub const DEFAULT_WITHHOLD_THRESHOLD: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Satellite {
    pub id: String,
    pub altitude_km: f64,
    pub inclination_deg: f64,
    pub raan_deg: f64,
    pub phase_deg: f64,
    /// Range the per-run daily volume is drawn from, MB/day. `min == max`
    /// for a fixed volume.
    pub daily_volume_mb: (f64, f64),
    /// Fraction of slots during which the satellite collects data.
    pub duty_cycle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundStation {
    pub id: String,
    pub provider: String,
    pub lat_deg: f64,
    pub lon_deg: f64,
    /// Number of antennas ψ_g.
    pub antennas: usize,
    /// Per-antenna rental price, $/min.
    pub price_per_min: f64,
    /// Backhaul rate to each data center (same order as
    /// [`Scenario::data_centers`]), MB/min.
    pub backhaul: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DataCenter {
    pub id: String,
    pub provider: String,
    /// Compute price, $ per minute of processing.
    pub price_per_min: f64,
    /// Processing intensity κ_d, minutes of compute per MB.
    pub processing_min_per_mb: f64,
}

/// One physical antenna: station index and antenna number within it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AntennaRef {
    pub station: usize,
    pub index: usize,
}

/// Parameters consumed by the baseline policies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyParams {
    pub provider: Option<String>,
    pub withhold_threshold: f64,
    pub rho: f64,
    /// Ranking used by the greedy baselines (SG, BG, BWG).
    pub greedy_metric: GreedyMetric,
}

/// How the greedy baselines rank a (station, data center) option.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreedyMetric {
    /// Lowest C^s / D̃.
    #[default]
    CostPerMb,
    /// Lowest C^s.
    Cost,
    /// Largest D̃, then lowest C^s.
    Throughput,
}

impl Default for PolicyParams {
    fn default() -> Self {
        Self {
            provider: None,
            withhold_threshold: DEFAULT_WITHHOLD_THRESHOLD,
            rho: DEFAULT_RHO,
            greedy_metric: GreedyMetric::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    /// Slot length τ, minutes.
    pub tau: f64,
    /// Horizon T, slots.
    pub horizon: usize,
    /// Latency threshold ξ, minutes per MB.
    pub xi: f64,
    /// Lyapunov weight V.
    pub v: f64,
    pub seed: u64,
    pub policy: PolicyKind,
    pub policy_params: PolicyParams,
    pub elevation_mask_deg: f64,
    /// Peak GSL rate, MB/min.
    pub r_max: f64,
    /// Multiplicative rate-noise range.
    pub noise: (f64, f64),
    pub contact_plan_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub satellites: Vec<Satellite>,
    pub ground_stations: Vec<GroundStation>,
    pub data_centers: Vec<DataCenter>,
    pub sim: SimConfig,
}

impl Scenario {
    /// Reads and validates a scenario file. A relative `contact_plan_path`
    /// is resolved against the scenario file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut scenario = Self::from_json(&text)?;
        if let Some(plan) = &scenario.sim.contact_plan_path {
            if plan.is_relative() {
                if let Some(dir) = path.parent() {
                    scenario.sim.contact_plan_path = Some(dir.join(plan));
                }
            }
        }
        Ok(scenario)
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let raw: RawScenario = serde_json::from_str(text)?;
        validate_scenario(&raw)
    }

    /// Per-slot rental price of one antenna at station `g`, P_g in $/slot.
    pub fn rental_per_slot(&self, g: usize) -> f64 {
        self.ground_stations[g].price_per_min * self.sim.tau
    }

    pub fn total_antennas(&self) -> usize {
        self.ground_stations.iter().map(|g| g.antennas).sum()
    }

    pub fn satellite_index(&self, id: &str) -> Option<usize> {
        self.satellites.iter().position(|s| s.id == id)
    }

    pub fn station_index(&self, id: &str) -> Option<usize> {
        self.ground_stations.iter().position(|g| g.id == id)
    }

    /// Re-resolves the policy from a name, keeping the scenario's parameters.
    pub fn set_policy(&mut self, name: &str) -> Result<(), ScenarioError> {
        self.sim.policy = PolicyKind::resolve(name, &self.sim.policy_params, self)?;
        Ok(())
    }

    /// Canonical document: numbers in canonical units, backhaul fully
    /// expanded. Validating it reproduces `self`.
    pub fn to_raw(&self) -> RawScenario {
        use raw::*;
        RawScenario {
            satellites: self
                .satellites
                .iter()
                .map(|s| RawSatellite {
                    id: Some(s.id.clone()),
                    altitude_km: Some(s.altitude_km),
                    inclination_deg: Some(s.inclination_deg),
                    raan_deg: Some(s.raan_deg),
                    phase_deg: Some(s.phase_deg),
                    daily_volume_mb: Some(RawVolume::Range([s.daily_volume_mb.0, s.daily_volume_mb.1])),
                    duty_cycle: Some(s.duty_cycle),
                })
                .collect(),
            ground_stations: self
                .ground_stations
                .iter()
                .map(|g| RawGroundStation {
                    id: Some(g.id.clone()),
                    provider: Some(g.provider.clone()),
                    lat_deg: Some(g.lat_deg),
                    lon_deg: Some(g.lon_deg),
                    antennas: Some(g.antennas as i64),
                    price: Some(g.price_per_min.into()),
                    backhaul: self
                        .data_centers
                        .iter()
                        .zip(&g.backhaul)
                        .map(|(d, &r)| (d.id.clone(), r.into()))
                        .collect(),
                })
                .collect(),
            data_centers: self
                .data_centers
                .iter()
                .map(|d| RawDataCenter {
                    id: Some(d.id.clone()),
                    provider: Some(d.provider.clone()),
                    price: Some(d.price_per_min.into()),
                    processing: Some(d.processing_min_per_mb.into()),
                })
                .collect(),
            sim: Some(RawSim {
                tau: Some(self.sim.tau),
                horizon: Some(self.sim.horizon as i64),
                xi: Some(self.sim.xi),
                v: Some(self.sim.v),
                seed: Some(self.sim.seed),
                policy: Some(self.sim.policy.name().to_string()),
                policy_params: Some(RawPolicyParams {
                    provider: self.sim.policy_params.provider.clone(),
                    withhold_threshold: Some(self.sim.policy_params.withhold_threshold),
                    rho: Some(self.sim.policy_params.rho),
                    greedy_metric: Some(self.sim.policy_params.greedy_metric),
                }),
                elevation_mask_deg: Some(self.sim.elevation_mask_deg),
                r_max: Some(self.sim.r_max.into()),
                noise: Some([self.sim.noise.0, self.sim.noise.1]),
                backhaul_default: None,
                contact_plan_path: self
                    .sim
                    .contact_plan_path
                    .as_ref()
                    .map(|p| p.to_string_lossy().into_owned()),
            }),
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("scenario serializes")
    }

    /// SHA-256 of the canonical document, hex encoded.
    pub fn content_hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.to_raw()).expect("scenario serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}
