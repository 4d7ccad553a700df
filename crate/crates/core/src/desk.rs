//! Reference desk scenario: 10 sun-synchronous satellites, 6 stations from
//! 3 providers, 8 data centers, one day at 1-minute slots.

use crate::model::Scenario;

pub const DESK_JSON: &str = include_str!("../../../scenarios/desk.json");

pub const DESK_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

pub fn desk_scenario() -> Scenario {
    Scenario::from_json(DESK_JSON).expect("bundled desk scenario is valid")
}

/// The desk scenario with the given seed and V.
pub fn desk_with(seed: u64, v: f64) -> Scenario {
    let mut s = desk_scenario();
    s.sim.seed = seed;
    s.sim.v = v;
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_shape() {
        let s = desk_scenario();
        assert_eq!(s.satellites.len(), 10);
        assert_eq!(s.ground_stations.len(), 6);
        assert_eq!(s.data_centers.len(), 8);
        assert_eq!(s.sim.horizon, 1440);
        assert_eq!(s.sim.xi, 60.0);
        let mut prices: Vec<f64> = s.ground_stations.iter().map(|g| g.price_per_min).collect();
        prices.dedup();
        assert_eq!(prices, vec![18.0, 22.0, 26.0]);
    }
}
