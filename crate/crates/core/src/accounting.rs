//! Latency, cost and excess-latency accounting, and run-level metrics.
//!
//! Latencies are in unit-minutes: the sum over every 1 MB unit of the time
//! that unit spends in a stage. Propagation delay is not counted.

use std::io::Write;

use serde::Serialize;

use crate::model::{AntennaRef, Scenario};
use crate::queues::DataChunk;

/// Σ size × (t − arrival) × τ over the popped chunks.
///
/// Panics if a chunk arrived after `slot`.
pub fn queuing_latency(popped: &[DataChunk], slot: usize, tau: f64) -> f64 {
    popped
        .iter()
        .map(|c| {
            assert!(
                c.arrival_slot <= slot,
                "chunk from slot {} popped at {slot}",
                c.arrival_slot
            );
            c.size * (slot - c.arrival_slot) as f64 * tau
        })
        .sum()
}

/// D̃ / R_{s,g}.
pub fn transmission_latency_gsl(amount: f64, rate: f64) -> f64 {
    assert!(rate > 0.0, "GSL rate must be positive (got {rate})");
    amount / rate
}

/// D̃ / R_{g,d}.
pub fn transmission_latency_backhaul(amount: f64, rate: f64) -> f64 {
    assert!(rate > 0.0, "backhaul rate must be positive (got {rate})");
    amount / rate
}

/// κ_d × D̃.
pub fn computation_latency(amount: f64, processing_min_per_mb: f64) -> f64 {
    processing_min_per_mb * amount
}

/// φ^s = L^s − ξ·D̃.
pub fn excess_latency(latency: f64, amount: f64, xi: f64) -> f64 {
    latency - xi * amount
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Latency {
    pub queuing: f64,
    pub gsl: f64,
    pub backhaul: f64,
    pub compute: f64,
}

impl Latency {
    /// L^s = L_q + L_t1 + L_t2 + L_c.
    pub fn total(&self) -> f64 {
        self.queuing + self.gsl + self.backhaul + self.compute
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Cost {
    pub rental: f64,
    pub compute: f64,
}

impl Cost {
    /// C^s = C_r + C_c.
    pub fn total(&self) -> f64 {
        self.rental + self.compute
    }
}

/// Monetary cost of one satellite's slot. Rental is charged for a reserved
/// antenna whether or not anything moves; compute is P_d·κ_d·D̃.
pub fn costs(
    selected: bool,
    amount: f64,
    rental_per_slot: f64,
    price_per_min: f64,
    processing_min_per_mb: f64,
) -> Cost {
    if !selected {
        return Cost::default();
    }
    Cost {
        rental: rental_per_slot,
        compute: price_per_min * computation_latency(amount, processing_min_per_mb),
    }
}

/// Latency, cost and φ^s of sending `popped` (totalling `amount`) from
/// satellite to station `g` at `rate`, then to data center `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegOutcome {
    pub amount: f64,
    pub latency: Latency,
    pub cost: Cost,
    pub phi: f64,
}

pub fn evaluate_leg(
    scenario: &Scenario,
    slot: usize,
    g: usize,
    d: usize,
    rate: f64,
    amount: f64,
    popped: &[DataChunk],
) -> LegOutcome {
    let dc = &scenario.data_centers[d];
    let latency = Latency {
        queuing: queuing_latency(popped, slot, scenario.sim.tau),
        gsl: transmission_latency_gsl(amount, rate),
        backhaul: transmission_latency_backhaul(amount, scenario.ground_stations[g].backhaul[d]),
        compute: computation_latency(amount, dc.processing_min_per_mb),
    };
    let cost = costs(
        true,
        amount,
        scenario.rental_per_slot(g),
        dc.price_per_min,
        dc.processing_min_per_mb,
    );
    LegOutcome {
        amount,
        latency,
        cost,
        phi: excess_latency(latency.total(), amount, scenario.sim.xi),
    }
}

/// One executed downlink.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DownlinkRecord {
    pub slot: usize,
    pub satellite: usize,
    pub antenna: AntennaRef,
    pub data_center: usize,
    /// D̃, MB.
    pub amount: f64,
    pub latency: Latency,
    pub cost: Cost,
    pub phi: f64,
}

impl DownlinkRecord {
    pub fn average_latency(&self) -> Option<f64> {
        (self.amount > 0.0).then(|| self.latency.total() / self.amount)
    }
}

/// Per-slot aggregates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SlotTrace {
    pub slot: usize,
    /// Q(t).
    pub q_before: f64,
    /// Q(t+1).
    pub q_after: f64,
    /// φ(t) = Σ_s φ^s(t).
    pub phi: f64,
    /// C(t).
    pub cost: f64,
    /// Σ_s D_s(t) before the slot's downlinks.
    pub backlog_before: f64,
    /// Σ_s D_s(t+1).
    pub backlog_after: f64,
    pub downlinked: f64,
    pub arrivals: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetrics {
    pub total_cost: f64,
    /// Σ L^s / Σ D̃, minutes per MB; `None` if nothing was downlinked.
    pub avg_latency_min_per_mb: Option<f64>,
    /// Share of downlink events whose average latency exceeds ξ.
    pub violation_rate: f64,
    pub downlink_events: usize,
    pub total_downlinked_mb: f64,
    pub total_arrivals_mb: f64,
    pub final_backlogs_mb: Vec<f64>,
    pub final_backlog_mb: f64,
    /// Time average of φ(t).
    pub mean_phi: f64,
    pub mean_q: f64,
    pub max_q: f64,
}

pub fn aggregate_metrics(
    records: &[DownlinkRecord],
    traces: &[SlotTrace],
    xi: f64,
    final_backlogs: &[f64],
) -> RunMetrics {
    let total_cost = records.iter().map(|r| r.cost.total()).sum();
    let total_latency: f64 = records.iter().map(|r| r.latency.total()).sum();
    let total_downlinked: f64 = records.iter().map(|r| r.amount).sum();
    let events: Vec<f64> = records.iter().filter_map(DownlinkRecord::average_latency).collect();
    let violations = events.iter().filter(|&&l| l > xi).count();
    let n = traces.len().max(1) as f64;
    RunMetrics {
        total_cost,
        avg_latency_min_per_mb: (total_downlinked > 0.0).then(|| total_latency / total_downlinked),
        violation_rate: if events.is_empty() {
            0.0
        } else {
            violations as f64 / events.len() as f64
        },
        downlink_events: events.len(),
        total_downlinked_mb: total_downlinked,
        total_arrivals_mb: traces.iter().map(|t| t.arrivals).sum(),
        final_backlogs_mb: final_backlogs.to_vec(),
        final_backlog_mb: final_backlogs.iter().sum(),
        mean_phi: traces.iter().map(|t| t.phi).sum::<f64>() / n,
        mean_q: traces.iter().map(|t| t.q_after).sum::<f64>() / n,
        max_q: traces.iter().map(|t| t.q_after).fold(0.0, f64::max),
    }
}

pub const RECORD_CSV_HEADER: [&str; 17] = [
    "slot",
    "policy",
    "satellite",
    "ground_station",
    "antenna",
    "data_center",
    "mb",
    "lq",
    "lt1",
    "lt2",
    "lc",
    "l_total",
    "cr",
    "cc",
    "c_total",
    "phi_s",
    "q_after",
];

/// Writes the run-record CSV: one row per downlink, then one summary row
/// per slot with empty entity columns. In summary rows `mb` is Σ_s D_s(t+1),
/// latency and cost columns are slot totals, `phi_s` is φ(t).
pub fn write_record_csv<W: Write>(
    writer: W,
    scenario: &Scenario,
    policy: &str,
    records: &[DownlinkRecord],
    traces: &[SlotTrace],
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(RECORD_CSV_HEADER)?;
    let mut i = 0;
    for trace in traces {
        let mut slot_latency = Latency::default();
        let mut slot_cost = Cost::default();
        while i < records.len() && records[i].slot == trace.slot {
            let r = &records[i];
            slot_latency.queuing += r.latency.queuing;
            slot_latency.gsl += r.latency.gsl;
            slot_latency.backhaul += r.latency.backhaul;
            slot_latency.compute += r.latency.compute;
            slot_cost.rental += r.cost.rental;
            slot_cost.compute += r.cost.compute;
            w.write_record([
                r.slot.to_string(),
                policy.to_string(),
                scenario.satellites[r.satellite].id.clone(),
                scenario.ground_stations[r.antenna.station].id.clone(),
                r.antenna.index.to_string(),
                scenario.data_centers[r.data_center].id.clone(),
                r.amount.to_string(),
                r.latency.queuing.to_string(),
                r.latency.gsl.to_string(),
                r.latency.backhaul.to_string(),
                r.latency.compute.to_string(),
                r.latency.total().to_string(),
                r.cost.rental.to_string(),
                r.cost.compute.to_string(),
                r.cost.total().to_string(),
                r.phi.to_string(),
                trace.q_after.to_string(),
            ])?;
            i += 1;
        }
        w.write_record([
            trace.slot.to_string(),
            policy.to_string(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            trace.backlog_after.to_string(),
            slot_latency.queuing.to_string(),
            slot_latency.gsl.to_string(),
            slot_latency.backhaul.to_string(),
            slot_latency.compute.to_string(),
            slot_latency.total().to_string(),
            slot_cost.rental.to_string(),
            slot_cost.compute.to_string(),
            trace.cost.to_string(),
            trace.phi.to_string(),
            trace.q_after.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
