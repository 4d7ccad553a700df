//! Drift-plus-penalty slot scheduler.
//!
//! Each slot the broker minimises
//!
//! ```text
//! V·C(t) + Σ_s D_s(t)·(D_s^i(t) − D̃_s(t)) + Q(t)·φ(t)
//! ```
//!
//! over feasible satellite → antenna → data-center selections. The objective
//! separates per satellite, so each (satellite, antenna) edge gets the weight
//!
//! ```text
//! w(s, a) = min_d  V·C^s − D_s·D̃_s + Q·φ^s
//! ```
//!
//! and "stay silent" is a zero-weight edge to a private virtual antenna. The
//! D_s·D_s^i term is common to every edge of satellite `s` (including the
//! virtual one), so it is left out of the weights; it shifts the objective
//! value but not the argmin. A min-cost left-perfect matching over this graph
//! is the slot decision.

pub mod hungarian;
pub mod oracle;

use serde::Serialize;

use crate::accounting::{evaluate_leg, Latency};
use crate::model::{AntennaRef, Scenario};
use crate::orbit::ContactTable;
use crate::queues::{downlink_capacity, SatelliteState};

pub use hungarian::{min_cost_matching, Matching};
pub use oracle::{brute_force_schedule, p3_objective, OracleError};

/// Everything a policy may look at when deciding slot `slot`.
#[derive(Debug, Clone, Copy)]
pub struct SlotContext<'a> {
    pub scenario: &'a Scenario,
    pub contacts: &'a ContactTable,
    pub slot: usize,
    /// Backlog of every satellite at the start of the slot.
    pub states: &'a [SatelliteState],
    /// D_s^i(t) for every satellite. Not used by any decision; it restores
    /// the constant term when reporting the objective.
    pub arrivals: &'a [f64],
    /// Q(t).
    pub q: f64,
}

/// One (satellite, antenna, data center) selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Leg {
    pub satellite: usize,
    pub antenna: AntennaRef,
    pub data_center: usize,
    /// Expected D̃ = min(R·τ, D_s), MB.
    pub amount: f64,
}

/// The slot decision x(t).
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Assignment {
    pub slot: usize,
    /// At most one leg per satellite, ordered by satellite.
    pub legs: Vec<Leg>,
    /// Satellites that do not downlink this slot, ascending.
    pub unassigned: Vec<usize>,
}

impl Assignment {
    /// Builds an assignment from legs; every other satellite is unassigned.
    pub fn from_legs(slot: usize, satellites: usize, mut legs: Vec<Leg>) -> Self {
        legs.sort_by_key(|l| (l.satellite, l.antenna));
        let mut unassigned = Vec::new();
        let mut it = legs.iter().peekable();
        for s in 0..satellites {
            if it.peek().map(|l| l.satellite) == Some(s) {
                while it.peek().map(|l| l.satellite) == Some(s) {
                    it.next();
                }
            } else {
                unassigned.push(s);
            }
        }
        Self { slot, legs, unassigned }
    }

    pub fn empty(slot: usize, satellites: usize) -> Self {
        Self::from_legs(slot, satellites, Vec::new())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AntennaTarget {
    Real(AntennaRef),
    /// The satellite's private "no downlink" antenna.
    Virtual,
}

/// A weighted edge of the slot graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeCandidate {
    pub satellite: usize,
    pub antenna: AntennaTarget,
    /// Weight-minimising data center; `None` for virtual edges.
    pub data_center: Option<usize>,
    pub weight: f64,
    /// Previewed D̃, MB.
    pub amount: f64,
    pub latency: Latency,
}

impl EdgeCandidate {
    pub fn virtual_edge(satellite: usize) -> Self {
        Self {
            satellite,
            antenna: AntennaTarget::Virtual,
            data_center: None,
            weight: 0.0,
            amount: 0.0,
            latency: Latency::default(),
        }
    }
}

/// Weight of the edge from satellite `s` to any antenna of station `g`,
/// choosing the data center that minimises it (ties go to the lowest index).
///
/// Panics if (s, g) is not a contact at the context's slot.
pub fn station_edge(ctx: &SlotContext<'_>, s: usize, g: usize) -> EdgeCandidate {
    let rate = ctx
        .contacts
        .rate(s, g, ctx.slot)
        .unwrap_or_else(|| panic!("satellite {s} has no contact with station {g} at slot {}", ctx.slot));
    let state = &ctx.states[s];
    let backlog = state.total();
    let (amount, popped) = state.preview(downlink_capacity(rate, ctx.scenario.sim.tau));
    let v = ctx.scenario.sim.v;

    let mut best: Option<EdgeCandidate> = None;
    for d in 0..ctx.scenario.data_centers.len() {
        let leg = evaluate_leg(ctx.scenario, ctx.slot, g, d, rate, amount, &popped);
        let weight = v * leg.cost.total() - backlog * amount + ctx.q * leg.phi;
        if best.is_none_or(|b| weight < b.weight) {
            best = Some(EdgeCandidate {
                satellite: s,
                antenna: AntennaTarget::Real(AntennaRef { station: g, index: 0 }),
                data_center: Some(d),
                weight,
                amount,
                latency: leg.latency,
            });
        }
    }
    best.expect("scenario has at least one data center")
}

/// Edge weight for a specific antenna. All antennas of a station share it.
pub fn edge_weight(ctx: &SlotContext<'_>, s: usize, antenna: AntennaRef) -> EdgeCandidate {
    EdgeCandidate {
        antenna: AntennaTarget::Real(antenna),
        ..station_edge(ctx, s, antenna.station)
    }
}

/// Weighted bipartite graph for one slot.
///
/// Rows are all satellites. Columns `0..n` are the virtual antennas (column
/// `s` belongs to satellite `s`); the remaining columns are the real antennas
/// in (station, index) order.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    pub satellites: usize,
    pub antennas: Vec<AntennaRef>,
    pub weights: Vec<Vec<Option<f64>>>,
    /// Best data center and previewed D̃ per (row, real column).
    pub edges: Vec<Vec<Option<EdgeCandidate>>>,
}

impl BipartiteGraph {
    pub fn columns(&self) -> usize {
        self.satellites + self.antennas.len()
    }

    pub fn real_edge_count(&self) -> usize {
        self.edges.iter().flatten().filter(|e| e.is_some()).count()
    }
}

/// Builds the slot graph.
///
/// A real edge whose previewed D̃ is zero is left out: its weight is V·P_g ≥ 0,
/// never below the virtual edge, so dropping it cannot change the optimum
/// and it keeps empty satellites from renting antennas on ties.
pub fn build_bipartite(ctx: &SlotContext<'_>) -> BipartiteGraph {
    let scenario = ctx.scenario;
    let n = scenario.satellites.len();
    let mut antennas = Vec::with_capacity(scenario.total_antennas());
    let mut first_col = Vec::with_capacity(scenario.ground_stations.len());
    for (g, station) in scenario.ground_stations.iter().enumerate() {
        first_col.push(n + antennas.len());
        antennas.extend((0..station.antennas).map(|index| AntennaRef { station: g, index }));
    }
    let cols = n + antennas.len();
    let mut weights = vec![vec![None; cols]; n];
    let mut edges = vec![vec![None; antennas.len()]; n];
    for s in 0..n {
        weights[s][s] = Some(0.0);
        if ctx.states[s].total() <= 0.0 {
            continue;
        }
        for contact in ctx.contacts.stations_for(s, ctx.slot) {
            let g = contact.station;
            let edge = station_edge(ctx, s, g);
            if edge.amount <= 0.0 {
                continue;
            }
            for index in 0..scenario.ground_stations[g].antennas {
                let col = first_col[g] + index;
                weights[s][col] = Some(edge.weight);
                edges[s][col - n] = Some(EdgeCandidate {
                    antenna: AntennaTarget::Real(AntennaRef { station: g, index }),
                    ..edge
                });
            }
        }
    }
    BipartiteGraph {
        satellites: n,
        antennas,
        weights,
        edges,
    }
}

/// Converts a matching over `graph` into an assignment.
pub fn hungarian_min_matching(graph: &BipartiteGraph, slot: usize) -> Assignment {
    let matching = min_cost_matching(&graph.weights, graph.columns())
        .expect("every satellite has a virtual antenna, so a left-perfect matching exists");
    let n = graph.satellites;
    let legs = matching
        .row_to_col
        .iter()
        .enumerate()
        .filter(|&(_, &col)| col >= n)
        .map(|(s, &col)| {
            let e = graph.edges[s][col - n].expect("matched real edge exists");
            Leg {
                satellite: s,
                antenna: graph.antennas[col - n],
                data_center: e.data_center.expect("real edge has a data center"),
                amount: e.amount,
            }
        })
        .collect();
    Assignment::from_legs(slot, n, legs)
}

/// The slot decision: argmin of the drift-plus-penalty bound.
pub fn schedule_slot(ctx: &SlotContext<'_>) -> Assignment {
    let graph = build_bipartite(ctx);
    hungarian_min_matching(&graph, ctx.slot)
}

/// Every real edge of the slot graph (one row per antenna), for inspection.
pub fn weight_table(ctx: &SlotContext<'_>) -> Vec<EdgeCandidate> {
    build_bipartite(ctx).edges.into_iter().flatten().flatten().collect()
}

#[cfg(test)]
mod tests;
