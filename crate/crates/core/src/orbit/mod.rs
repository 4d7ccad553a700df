//! Satellite visibility and ground-satellite link rates.
//!
//! Orbits are circular Keplerian orbits over a spherical, rotating Earth.
//! Slot `t` is centred on time `t·τ` minutes after epoch. At epoch the
//! Greenwich meridian is aligned with the inertial x axis, so an equatorial
//! satellite with zero RAAN and phase sits over (0°, 0°).

mod contacts;

pub use contacts::{Contact, ContactTable, CONTACT_PLAN_HEADER};

use std::f64::consts::PI;

use rand::Rng;

use crate::model::{GroundStation, Satellite, Scenario};
use crate::rng::{stream_rng, Stream};

pub const EARTH_RADIUS_KM: f64 = 6371.0;
/// Standard gravitational parameter of Earth, km^3/s^2.
pub const EARTH_MU_KM3_S2: f64 = 398_600.441_8;
/// Earth rotation relative to inertial space, one sidereal day ≈ 1436 min.
pub const EARTH_ROTATION_DEG_PER_MIN: f64 = 360.0 / 1436.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    pub lat_deg: f64,
    pub lon_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EarthModel {
    Rotating,
    /// Inertial ground track; used to check orbit symmetry in isolation.
    Fixed,
}

pub fn orbital_period_min(altitude_km: f64) -> f64 {
    let a = EARTH_RADIUS_KM + altitude_km;
    2.0 * PI * (a.powi(3) / EARTH_MU_KM3_S2).sqrt() / 60.0
}

/// Wraps a longitude into [-180, 180).
pub fn wrap_lon(lon: f64) -> f64 {
    let w = (lon + 180.0).rem_euclid(360.0) - 180.0;
    if w >= 180.0 {
        w - 360.0
    } else {
        w
    }
}

/// Sub-satellite point `t_min` minutes after epoch.
pub fn sub_point_at(sat: &Satellite, t_min: f64, earth: EarthModel) -> GeoPoint {
    let u = (sat.phase_deg + 360.0 * t_min / orbital_period_min(sat.altitude_km)).to_radians();
    let raan = sat.raan_deg.to_radians();
    let inc = sat.inclination_deg.to_radians();
    let (su, cu) = u.sin_cos();
    let (so, co) = raan.sin_cos();
    let x = co * cu - so * su * inc.cos();
    let y = so * cu + co * su * inc.cos();
    let z = su * inc.sin();
    let lat_deg = z.clamp(-1.0, 1.0).asin().to_degrees();
    let mut lon_deg = y.atan2(x).to_degrees();
    if earth == EarthModel::Rotating {
        lon_deg -= EARTH_ROTATION_DEG_PER_MIN * t_min;
    }
    GeoPoint {
        lat_deg,
        lon_deg: wrap_lon(lon_deg),
    }
}

/// Sub-satellite point at the centre of slot `slot`.
pub fn propagate(sat: &Satellite, slot: usize, tau: f64) -> GeoPoint {
    sub_point_at(sat, slot as f64 * tau, EarthModel::Rotating)
}

/// Great-circle angle between two points, radians.
pub fn central_angle(a: GeoPoint, b: GeoPoint) -> f64 {
    let (la, lb) = (a.lat_deg.to_radians(), b.lat_deg.to_radians());
    let dlat = lb - la;
    let dlon = (b.lon_deg - a.lon_deg).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + la.cos() * lb.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * h.sqrt().clamp(0.0, 1.0).asin()
}

/// Elevation of a satellite above the local horizon of `station`, degrees.
pub fn elevation_deg(sub: GeoPoint, altitude_km: f64, station: GeoPoint) -> f64 {
    let gamma = central_angle(sub, station);
    let k = EARTH_RADIUS_KM / (EARTH_RADIUS_KM + altitude_km);
    (gamma.cos() - k).atan2(gamma.sin()).to_degrees()
}

/// Largest central angle at which a satellite at `altitude_km` is at or
/// above `mask_deg`, radians.
pub fn max_central_angle(altitude_km: f64, mask_deg: f64) -> f64 {
    let k = EARTH_RADIUS_KM / (EARTH_RADIUS_KM + altitude_km);
    let e = mask_deg.to_radians();
    (k * e.cos()).acos() - e
}

pub fn station_point(g: &GroundStation) -> GeoPoint {
    GeoPoint {
        lat_deg: g.lat_deg,
        lon_deg: g.lon_deg,
    }
}

/// Rate law: peak rate scaled by sin(elevation) and a noise factor.
pub fn rate_from_elevation(r_max: f64, elevation_deg: f64, noise_factor: f64) -> f64 {
    r_max * elevation_deg.to_radians().sin() * noise_factor
}

/// Multiplicative noise for link (s, g) at `slot`, uniform on the scenario's
/// noise range and fixed by the seed.
pub fn noise_factor(seed: u64, noise: (f64, f64), s: usize, g: usize, slot: usize) -> f64 {
    if noise.0 == noise.1 {
        return noise.0;
    }
    stream_rng(seed, Stream::GslNoise, &[s as u64, g as u64, slot as u64]).gen_range(noise.0..noise.1)
}

/// GSL rate R_{s,g}(t) in MB/min for a contact at `elevation_deg`.
///
/// Panics if the elevation is below the scenario's mask: callers only ask
/// for rates of listed contacts.
pub fn gsl_rate(scenario: &Scenario, s: usize, g: usize, slot: usize, elevation_deg: f64) -> f64 {
    assert!(
        elevation_deg >= scenario.sim.elevation_mask_deg,
        "gsl_rate below elevation mask: {elevation_deg} < {}",
        scenario.sim.elevation_mask_deg
    );
    let u = noise_factor(scenario.sim.seed, scenario.sim.noise, s, g, slot);
    rate_from_elevation(scenario.sim.r_max, elevation_deg, u)
}
