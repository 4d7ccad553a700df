//! Small hand-built and random slot instances.
//!
//! Used by the oracle-equivalence checks and handy for experimenting with the
//! scheduler outside a full simulation.

use rand::Rng;

use crate::baselines::PolicyKind;
use crate::model::{DataCenter, GroundStation, PolicyParams, Satellite, Scenario, SimConfig};
use crate::orbit::{Contact, ContactTable};
use crate::queues::SatelliteState;
use crate::scheduler::SlotContext;

/// A self-contained single-slot problem.
#[derive(Debug, Clone)]
pub struct SlotInstance {
    pub scenario: Scenario,
    pub contacts: ContactTable,
    pub slot: usize,
    pub states: Vec<SatelliteState>,
    pub arrivals: Vec<f64>,
    pub q: f64,
}

impl SlotInstance {
    pub fn ctx(&self) -> SlotContext<'_> {
        SlotContext {
            scenario: &self.scenario,
            contacts: &self.contacts,
            slot: self.slot,
            states: &self.states,
            arrivals: &self.arrivals,
            q: self.q,
        }
    }
}

/// Builder for hand-written instances. Geometry is irrelevant: contacts are
/// given explicitly.
#[derive(Debug, Clone)]
pub struct InstanceBuilder {
    satellites: Vec<Vec<(usize, f64)>>,
    stations: Vec<(String, f64, usize)>,
    data_centers: Vec<(String, f64, f64)>,
    contacts: Vec<(usize, usize, f64)>,
    backhaul: f64,
    slot: usize,
    tau: f64,
    xi: f64,
    v: f64,
    q: f64,
}

impl Default for InstanceBuilder {
    fn default() -> Self {
        Self {
            satellites: Vec::new(),
            stations: Vec::new(),
            data_centers: Vec::new(),
            contacts: Vec::new(),
            backhaul: 7_500.0,
            slot: 10,
            tau: 1.0,
            xi: 60.0,
            v: 0.0,
            q: 0.0,
        }
    }
}

impl InstanceBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a satellite with backlog chunks `(arrival_slot, MB)`.
    pub fn satellite(mut self, chunks: &[(usize, f64)]) -> Self {
        self.satellites.push(chunks.to_vec());
        self
    }

    /// Adds a station with price in $/min and antenna count, provider "p0".
    pub fn station(self, price_per_min: f64, antennas: usize) -> Self {
        self.station_of("p0", price_per_min, antennas)
    }

    pub fn station_of(mut self, provider: &str, price_per_min: f64, antennas: usize) -> Self {
        self.stations.push((provider.to_string(), price_per_min, antennas));
        self
    }

    /// Adds a data center with price in $/min and κ in min/MB, provider "p0".
    pub fn data_center(self, price_per_min: f64, processing_min_per_mb: f64) -> Self {
        self.data_center_of("p0", price_per_min, processing_min_per_mb)
    }

    pub fn data_center_of(mut self, provider: &str, price_per_min: f64, processing_min_per_mb: f64) -> Self {
        self.data_centers
            .push((provider.to_string(), price_per_min, processing_min_per_mb));
        self
    }

    /// Marks station `g` visible to satellite `s` at the instance slot.
    pub fn contact(mut self, s: usize, g: usize, rate: f64) -> Self {
        self.contacts.push((s, g, rate));
        self
    }

    pub fn backhaul(mut self, rate: f64) -> Self {
        self.backhaul = rate;
        self
    }

    pub fn slot(mut self, slot: usize) -> Self {
        self.slot = slot;
        self
    }

    pub fn tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn xi(mut self, xi: f64) -> Self {
        self.xi = xi;
        self
    }

    pub fn v(mut self, v: f64) -> Self {
        self.v = v;
        self
    }

    pub fn q(mut self, q: f64) -> Self {
        self.q = q;
        self
    }

    pub fn build(self) -> SlotInstance {
        let data_centers: Vec<DataCenter> = self
            .data_centers
            .iter()
            .enumerate()
            .map(|(i, (provider, price, kappa))| DataCenter {
                id: format!("dc-{i}"),
                provider: provider.clone(),
                price_per_min: *price,
                processing_min_per_mb: *kappa,
            })
            .collect();
        let scenario = Scenario {
            satellites: (0..self.satellites.len())
                .map(|i| Satellite {
                    id: format!("sat-{i}"),
                    altitude_km: 475.0,
                    inclination_deg: 97.4,
                    raan_deg: 0.0,
                    phase_deg: 0.0,
                    daily_volume_mb: (1e6, 1e6),
                    duty_cycle: 1.0,
                })
                .collect(),
            ground_stations: self
                .stations
                .iter()
                .enumerate()
                .map(|(i, (provider, price, antennas))| GroundStation {
                    id: format!("gs-{i}"),
                    provider: provider.clone(),
                    lat_deg: 0.0,
                    lon_deg: 0.0,
                    antennas: *antennas,
                    price_per_min: *price,
                    backhaul: vec![self.backhaul; data_centers.len()],
                })
                .collect(),
            data_centers,
            sim: SimConfig {
                tau: self.tau,
                horizon: self.slot + 1,
                xi: self.xi,
                v: self.v,
                seed: 0,
                policy: PolicyKind::SkyGs,
                policy_params: PolicyParams::default(),
                elevation_mask_deg: 10.0,
                r_max: 12_000.0,
                noise: (1.0, 1.0),
                contact_plan_path: None,
            },
        };
        let contacts = ContactTable::from_contacts(
            self.slot + 1,
            self.contacts.iter().map(|&(s, g, rate)| Contact {
                slot: self.slot,
                satellite: s,
                station: g,
                elevation_deg: 45.0,
                rate,
            }),
        );
        let states = self
            .satellites
            .iter()
            .enumerate()
            .map(|(i, chunks)| {
                let mut st = SatelliteState::new(i);
                for &(t, mb) in chunks {
                    st.advance_backlog(mb, t);
                }
                st
            })
            .collect();
        SlotInstance {
            arrivals: vec![0.0; self.satellites.len()],
            scenario,
            contacts,
            slot: self.slot,
            states,
            q: self.q,
        }
    }
}

/// Size limits for [`random_instance`].
#[derive(Debug, Clone, Copy)]
pub struct RandomLimits {
    pub satellites: usize,
    pub antennas: usize,
    pub data_centers: usize,
}

/// Random single-slot instance within `limits`, with a mix of empty and
/// loaded satellites, free and contended antennas, and V and Q spanning many
/// orders of magnitude.
pub fn random_instance<R: Rng>(rng: &mut R, limits: RandomLimits) -> SlotInstance {
    let slot = 100;
    let n = rng.gen_range(1..=limits.satellites);
    let mut antennas_left = rng.gen_range(1..=limits.antennas);
    let mut b = InstanceBuilder::new()
        .slot(slot)
        .xi(rng.gen_range(5.0..120.0))
        .tau(if rng.gen_bool(0.8) { 1.0 } else { 0.5 })
        .backhaul(rng.gen_range(2_000.0..10_000.0));
    b = b.v(match rng.gen_range(0..5) {
        0 => 0.0,
        1 => 1.0,
        2 => 10f64.powi(rng.gen_range(2..8)),
        _ => rng.gen_range(0.0..1e6),
    });
    b = b.q(match rng.gen_range(0..4) {
        0 => 0.0,
        1 => rng.gen_range(0.0..1e3),
        _ => rng.gen_range(0.0..1e7),
    });
    let mut stations = 0;
    while antennas_left > 0 {
        let k = rng.gen_range(1..=antennas_left.min(3));
        antennas_left -= k;
        b = b.station(rng.gen_range(0.0..30.0), k);
        stations += 1;
    }
    for _ in 0..rng.gen_range(1..=limits.data_centers) {
        b = b.data_center(rng.gen_range(0.005..0.02), rng.gen_range(0.004..0.015));
    }
    for s in 0..n {
        let chunks: Vec<(usize, f64)> = if rng.gen_bool(0.15) {
            Vec::new()
        } else {
            let mut t = rng.gen_range(0..slot);
            let mut v = Vec::new();
            for _ in 0..rng.gen_range(1..5) {
                v.push((t, rng.gen_range(1.0..20_000.0)));
                t = rng.gen_range(t..slot);
            }
            v
        };
        b = b.satellite(&chunks);
        for g in 0..stations {
            if rng.gen_bool(0.6) {
                b = b.contact(s, g, rng.gen_range(100.0..12_000.0));
            }
        }
    }
    let mut inst = b.build();
    inst.arrivals = (0..n).map(|_| rng.gen_range(0.0..1_500.0)).collect();
    inst
}
