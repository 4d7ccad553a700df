use std::collections::HashSet;
use std::path::PathBuf;

use super::raw::*;
use super::units::{to_canonical, Dimension, Quantity};
use super::*;

fn require<T: Clone>(v: &Option<T>, field: impl FnOnce() -> String) -> Result<T, ScenarioError> {
    v.clone().ok_or_else(|| ScenarioError::Missing(field()))
}

fn quantity(q: &Quantity, dim: Dimension, field: &str) -> Result<f64, ScenarioError> {
    let v = to_canonical(q, dim).map_err(|reason| ScenarioError::invalid(field, reason))?;
    if !v.is_finite() {
        return Err(ScenarioError::invalid(field, "must be finite"));
    }
    Ok(v)
}

fn check(ok: bool, field: impl FnOnce() -> String, reason: impl FnOnce() -> String) -> Result<(), ScenarioError> {
    if ok {
        Ok(())
    } else {
        Err(ScenarioError::invalid(field(), reason()))
    }
}

fn unique<'a>(collection: &'static str, ids: impl Iterator<Item = &'a str>) -> Result<(), ScenarioError> {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(ScenarioError::DuplicateId {
                collection,
                id: id.to_string(),
            });
        }
    }
    Ok(())
}

fn satellite(i: usize, raw: &RawSatellite) -> Result<Satellite, ScenarioError> {
    let id = require(&raw.id, || format!("satellites[{i}].id"))?;
    let f = |name: &str| format!("satellites[{id}].{name}");
    let altitude_km = require(&raw.altitude_km, || f("altitude_km"))?;
    check(
        altitude_km > 0.0 && altitude_km.is_finite(),
        || f("altitude_km"),
        || format!("must be > 0 (got {altitude_km})"),
    )?;
    let inclination_deg = require(&raw.inclination_deg, || f("inclination_deg"))?;
    check(
        (0.0..=180.0).contains(&inclination_deg),
        || f("inclination_deg"),
        || format!("must be within [0, 180] (got {inclination_deg})"),
    )?;
    let raan_deg = raw.raan_deg.unwrap_or(0.0);
    let phase_deg = raw.phase_deg.unwrap_or(0.0);
    check(
        raan_deg.is_finite() && phase_deg.is_finite(),
        || f("raan_deg/phase_deg"),
        || "must be finite".into(),
    )?;
    let daily_volume_mb = match raw.daily_volume_mb {
        None => DEFAULT_DAILY_VOLUME_MB,
        Some(RawVolume::Fixed(v)) => (v, v),
        Some(RawVolume::Range([lo, hi])) => (lo, hi),
    };
    check(
        daily_volume_mb.0 > 0.0 && daily_volume_mb.0 <= daily_volume_mb.1 && daily_volume_mb.1.is_finite(),
        || f("daily_volume_mb"),
        || format!("must be positive with min <= max (got {daily_volume_mb:?})"),
    )?;
    let duty_cycle = raw.duty_cycle.unwrap_or(1.0);
    check(
        duty_cycle > 0.0 && duty_cycle <= 1.0,
        || f("duty_cycle"),
        || format!("must be within (0, 1] (got {duty_cycle})"),
    )?;
    Ok(Satellite {
        id,
        altitude_km,
        inclination_deg,
        raan_deg,
        phase_deg,
        daily_volume_mb,
        duty_cycle,
    })
}

fn data_center(i: usize, raw: &RawDataCenter) -> Result<DataCenter, ScenarioError> {
    let id = require(&raw.id, || format!("data_centers[{i}].id"))?;
    let f = |name: &str| format!("data_centers[{id}].{name}");
    let provider = require(&raw.provider, || f("provider"))?;
    let price_per_min = quantity(
        &require(&raw.price, || f("price"))?,
        Dimension::PricePerTime,
        &f("price"),
    )?;
    check(
        price_per_min >= 0.0,
        || f("price"),
        || format!("must be >= 0 (got {price_per_min})"),
    )?;
    let processing_min_per_mb = quantity(
        &require(&raw.processing, || f("processing"))?,
        Dimension::Processing,
        &f("processing"),
    )?;
    check(
        processing_min_per_mb > 0.0,
        || f("processing"),
        || format!("must be > 0 (got {processing_min_per_mb})"),
    )?;
    Ok(DataCenter {
        id,
        provider,
        price_per_min,
        processing_min_per_mb,
    })
}

fn ground_station(
    i: usize,
    raw: &RawGroundStation,
    data_centers: &[DataCenter],
    backhaul_default: Option<f64>,
) -> Result<GroundStation, ScenarioError> {
    let id = require(&raw.id, || format!("ground_stations[{i}].id"))?;
    let f = |name: &str| format!("ground_stations[{id}].{name}");
    let provider = require(&raw.provider, || f("provider"))?;
    let lat_deg = require(&raw.lat_deg, || f("lat_deg"))?;
    check(
        lat_deg.abs() <= 90.0,
        || f("lat_deg"),
        || format!("must be within [-90, 90] (got {lat_deg})"),
    )?;
    let lon_deg = require(&raw.lon_deg, || f("lon_deg"))?;
    check(
        (-180.0..180.0).contains(&lon_deg),
        || f("lon_deg"),
        || format!("must be within [-180, 180) (got {lon_deg})"),
    )?;
    let antennas = require(&raw.antennas, || f("antennas"))?;
    check(
        antennas >= 1,
        || f("antennas"),
        || format!("must be >= 1 (got {antennas})"),
    )?;
    let price_per_min = quantity(
        &require(&raw.price, || f("price"))?,
        Dimension::PricePerTime,
        &f("price"),
    )?;
    check(
        price_per_min >= 0.0,
        || f("price"),
        || format!("must be >= 0 (got {price_per_min})"),
    )?;

    for key in raw.backhaul.keys() {
        if !data_centers.iter().any(|d| &d.id == key) {
            return Err(ScenarioError::UnknownBackhaulTarget {
                station: id.clone(),
                data_center: key.clone(),
            });
        }
    }
    let mut backhaul = Vec::with_capacity(data_centers.len());
    for d in data_centers {
        let field = format!("ground_stations[{id}].backhaul[{}]", d.id);
        let rate = match raw.backhaul.get(&d.id) {
            Some(q) => quantity(q, Dimension::Rate, &field)?,
            None => backhaul_default.ok_or_else(|| ScenarioError::IncompleteBackhaul {
                station: id.clone(),
                data_center: d.id.clone(),
            })?,
        };
        check(rate > 0.0, || field.clone(), || format!("must be > 0 (got {rate})"))?;
        backhaul.push(rate);
    }
    Ok(GroundStation {
        id,
        provider,
        lat_deg,
        lon_deg,
        antennas: antennas as usize,
        price_per_min,
        backhaul,
    })
}

/// Validates a parsed scenario document and converts it to canonical units.
pub fn validate_scenario(raw: &RawScenario) -> Result<Scenario, ScenarioError> {
    let sim = raw.sim.as_ref().ok_or_else(|| ScenarioError::Missing("sim".into()))?;

    let satellites = raw
        .satellites
        .iter()
        .enumerate()
        .map(|(i, s)| satellite(i, s))
        .collect::<Result<Vec<_>, _>>()?;
    unique("satellites", satellites.iter().map(|s| s.id.as_str()))?;

    let data_centers = raw
        .data_centers
        .iter()
        .enumerate()
        .map(|(i, d)| data_center(i, d))
        .collect::<Result<Vec<_>, _>>()?;
    unique("data_centers", data_centers.iter().map(|d| d.id.as_str()))?;

    let backhaul_default = sim
        .backhaul_default
        .as_ref()
        .map(|q| quantity(q, Dimension::Rate, "sim.backhaul_default"))
        .transpose()?;
    let ground_stations = raw
        .ground_stations
        .iter()
        .enumerate()
        .map(|(i, g)| ground_station(i, g, &data_centers, backhaul_default))
        .collect::<Result<Vec<_>, _>>()?;
    unique("ground_stations", ground_stations.iter().map(|g| g.id.as_str()))?;

    let tau = require(&sim.tau, || "sim.tau".into())?;
    check(
        tau > 0.0 && tau.is_finite(),
        || "sim.tau".into(),
        || format!("must be > 0 (got {tau})"),
    )?;
    let horizon = require(&sim.horizon, || "sim.horizon".into())?;
    check(
        horizon >= 1,
        || "sim.horizon".into(),
        || format!("must be >= 1 (got {horizon})"),
    )?;
    let xi = require(&sim.xi, || "sim.xi".into())?;
    check(
        xi > 0.0 && xi.is_finite(),
        || "sim.xi".into(),
        || format!("must be > 0 (got {xi})"),
    )?;
    let v = require(&sim.v, || "sim.v".into())?;
    check(
        v >= 0.0 && v.is_finite(),
        || "sim.v".into(),
        || format!("must be >= 0 (got {v})"),
    )?;
    let seed = require(&sim.seed, || "sim.seed".into())?;
    let policy_name = require(&sim.policy, || "sim.policy".into())?;

    let elevation_mask_deg = sim.elevation_mask_deg.unwrap_or(DEFAULT_ELEVATION_MASK_DEG);
    check(
        (-90.0..90.0).contains(&elevation_mask_deg),
        || "sim.elevation_mask_deg".into(),
        || format!("must be within [-90, 90) (got {elevation_mask_deg})"),
    )?;
    let r_max = match &sim.r_max {
        Some(q) => quantity(q, Dimension::Rate, "sim.r_max")?,
        None => 1.6 * units::MB_PER_MIN_PER_GBPS,
    };
    check(
        r_max > 0.0,
        || "sim.r_max".into(),
        || format!("must be > 0 (got {r_max})"),
    )?;
    let noise = sim.noise.map(|[lo, hi]| (lo, hi)).unwrap_or(DEFAULT_NOISE);
    check(
        noise.0 > 0.0 && noise.1 < 2.0 && noise.0 <= noise.1,
        || "sim.noise".into(),
        || format!("must satisfy 0 < min <= max < 2 (got {noise:?})"),
    )?;

    let params = sim.policy_params.clone().unwrap_or_default();
    let policy_params = PolicyParams {
        provider: params.provider,
        withhold_threshold: params.withhold_threshold.unwrap_or(DEFAULT_WITHHOLD_THRESHOLD),
        rho: params.rho.unwrap_or(DEFAULT_RHO),
        greedy_metric: params.greedy_metric.unwrap_or_default(),
    };
    check(
        policy_params.rho > 0.0 && policy_params.rho <= 1.0,
        || "sim.policy_params.rho".into(),
        || format!("must be within (0, 1] (got {})", policy_params.rho),
    )?;
    check(
        policy_params.withhold_threshold > 0.0 && policy_params.withhold_threshold.is_finite(),
        || "sim.policy_params.withhold_threshold".into(),
        || format!("must be > 0 (got {})", policy_params.withhold_threshold),
    )?;

    let mut scenario = Scenario {
        satellites,
        ground_stations,
        data_centers,
        sim: SimConfig {
            tau,
            horizon: horizon as usize,
            xi,
            v,
            seed,
            policy: PolicyKind::SkyGs,
            policy_params,
            elevation_mask_deg,
            r_max,
            noise,
            contact_plan_path: sim.contact_plan_path.as_ref().map(PathBuf::from),
        },
    };
    scenario.set_policy(&policy_name)?;
    Ok(scenario)
}
