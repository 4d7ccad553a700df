//! Slotted simulation loop.
//!
//! Each slot runs the same phases in a fixed order: the policy decides, the
//! decision is checked, downlinks pop data and are accounted, Q is updated
//! from φ(t), and only then are the slot's arrivals appended.

use std::io::Write;

use log::{debug, info};
use serde::Serialize;

use crate::accounting::{aggregate_metrics, evaluate_leg, write_record_csv, DownlinkRecord, RunMetrics, SlotTrace};
use crate::baselines::PolicyKind;
use crate::error::SimError;
use crate::feasibility::check_assignment;
use crate::model::Scenario;
use crate::orbit::ContactTable;
use crate::queues::{downlink_capacity, ArrivalProcess, SatelliteState, VirtualQueueState};
use crate::scheduler::{Assignment, SlotContext};

/// Mutable state of one run. Backlogs and Q start at zero.
#[derive(Debug, Clone)]
pub struct SimState {
    pub slot: usize,
    pub satellites: Vec<SatelliteState>,
    pub queue: VirtualQueueState,
    pub arrivals: Vec<ArrivalProcess>,
    pub records: Vec<DownlinkRecord>,
    pub traces: Vec<SlotTrace>,
    /// Per-satellite totals, MB.
    pub arrived: Vec<f64>,
    pub downlinked: Vec<f64>,
}

impl SimState {
    pub fn new(scenario: &Scenario) -> Self {
        let n = scenario.satellites.len();
        Self {
            slot: 0,
            satellites: (0..n).map(SatelliteState::new).collect(),
            queue: VirtualQueueState::default(),
            arrivals: scenario
                .satellites
                .iter()
                .enumerate()
                .map(|(i, s)| ArrivalProcess::new(s, i, scenario.sim.seed, scenario.sim.tau))
                .collect(),
            records: Vec::new(),
            traces: Vec::new(),
            arrived: vec![0.0; n],
            downlinked: vec![0.0; n],
        }
    }

    pub fn backlogs(&self) -> Vec<f64> {
        self.satellites.iter().map(SatelliteState::total).collect()
    }
}

/// Advances `state` by one slot and returns the slot's trace.
///
/// `observe` sees the slot context before the policy runs.
pub fn step(
    scenario: &Scenario,
    contacts: &ContactTable,
    policy: &PolicyKind,
    state: &mut SimState,
    observe: &mut dyn FnMut(&SlotContext<'_>),
) -> Result<SlotTrace, SimError> {
    let t = state.slot;
    let tau = scenario.sim.tau;
    let arrivals: Vec<f64> = state.arrivals.iter().map(|a| a.arrivals_for_slot(t)).collect();
    let backlog_before: f64 = state.satellites.iter().map(SatelliteState::total).sum();
    let q_before = state.queue.q;

    let ctx = SlotContext {
        scenario,
        contacts,
        slot: t,
        states: &state.satellites,
        arrivals: &arrivals,
        q: q_before,
    };
    observe(&ctx);
    let assignment: Assignment = policy.schedule(&ctx);
    check_assignment(&assignment, scenario, contacts, t).map_err(|violation| SimError::Infeasible {
        slot: t,
        policy: policy.name().to_string(),
        violation,
    })?;

    let mut phi = 0.0;
    let mut cost = 0.0;
    let mut downlinked = 0.0;
    for leg in &assignment.legs {
        let g = leg.antenna.station;
        let rate = contacts.rate(leg.satellite, g, t).expect("checked visible");
        let (amount, popped) = state.satellites[leg.satellite].actual_downlink(downlink_capacity(rate, tau));
        let out = evaluate_leg(scenario, t, g, leg.data_center, rate, amount, &popped);
        phi += out.phi;
        cost += out.cost.total();
        downlinked += amount;
        state.downlinked[leg.satellite] += amount;
        state.records.push(DownlinkRecord {
            slot: t,
            satellite: leg.satellite,
            antenna: leg.antenna,
            data_center: leg.data_center,
            amount,
            latency: out.latency,
            cost: out.cost,
            phi: out.phi,
        });
    }

    let q_after = state.queue.update(phi);

    for (s, &a) in arrivals.iter().enumerate() {
        state.satellites[s].advance_backlog(a, t);
        state.arrived[s] += a;
    }

    let trace = SlotTrace {
        slot: t,
        q_before,
        q_after,
        phi,
        cost,
        backlog_before,
        backlog_after: state.satellites.iter().map(SatelliteState::total).sum(),
        downlinked,
        arrivals: arrivals.iter().sum(),
    };
    debug!(
        "slot {t}: {} legs, cost {cost:.3}, phi {phi:.1}, Q {q_after:.1}",
        assignment.legs.len()
    );
    state.traces.push(trace);
    state.slot += 1;
    Ok(trace)
}

/// Everything recorded during one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub policy: String,
    pub seed: u64,
    pub scenario_hash: String,
    pub records: Vec<DownlinkRecord>,
    pub traces: Vec<SlotTrace>,
    pub arrived_mb: Vec<f64>,
    pub downlinked_mb: Vec<f64>,
    pub final_backlogs_mb: Vec<f64>,
    /// Mean arrivals per slot of each satellite's collection process, MB.
    pub mean_arrivals_per_slot_mb: Vec<f64>,
}

/// Run-summary document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub policy: String,
    pub seed: u64,
    pub total_cost: f64,
    pub avg_latency_min_per_mb: Option<f64>,
    pub violation_rate: f64,
    pub final_backlog_mb: f64,
    pub mean_q: f64,
    pub max_q: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub record: RunRecord,
    pub metrics: RunMetrics,
}

impl RunOutput {
    pub fn summary(&self) -> RunSummary {
        RunSummary {
            policy: self.record.policy.clone(),
            seed: self.record.seed,
            total_cost: self.metrics.total_cost,
            avg_latency_min_per_mb: self.metrics.avg_latency_min_per_mb,
            violation_rate: self.metrics.violation_rate,
            final_backlog_mb: self.metrics.final_backlog_mb,
            mean_q: self.metrics.mean_q,
            max_q: self.metrics.max_q,
        }
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary()).expect("summary serializes")
    }

    pub fn write_records<W: Write>(&self, writer: W, scenario: &Scenario) -> csv::Result<()> {
        write_record_csv(
            writer,
            scenario,
            &self.record.policy,
            &self.record.records,
            &self.record.traces,
        )
    }

    pub fn records_csv(&self, scenario: &Scenario) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_records(&mut buf, scenario).expect("writing to memory");
        buf
    }
}

/// Runs `policy` over the scenario horizon.
pub fn run(scenario: &Scenario, contacts: &ContactTable, policy: &PolicyKind) -> Result<RunOutput, SimError> {
    run_observed(scenario, contacts, policy, &mut |_| {})
}

/// [`run`], calling `observe` with every slot context before scheduling.
pub fn run_observed(
    scenario: &Scenario,
    contacts: &ContactTable,
    policy: &PolicyKind,
    observe: &mut dyn FnMut(&SlotContext<'_>),
) -> Result<RunOutput, SimError> {
    let horizon = scenario.sim.horizon;
    let mut state = SimState::new(scenario);
    while state.slot < horizon {
        step(scenario, contacts, policy, &mut state, observe)?;
    }
    let final_backlogs = state.backlogs();
    let metrics = aggregate_metrics(&state.records, &state.traces, scenario.sim.xi, &final_backlogs);
    info!(
        "{} seed {}: cost {:.2}, latency {:?}, violations {:.4}",
        policy.name(),
        scenario.sim.seed,
        metrics.total_cost,
        metrics.avg_latency_min_per_mb,
        metrics.violation_rate
    );
    Ok(RunOutput {
        record: RunRecord {
            policy: policy.name().to_string(),
            seed: scenario.sim.seed,
            scenario_hash: scenario.content_hash(),
            mean_arrivals_per_slot_mb: state.arrivals.iter().map(ArrivalProcess::mean_per_slot).collect(),
            records: state.records,
            traces: state.traces,
            arrived_mb: state.arrived,
            downlinked_mb: state.downlinked,
            final_backlogs_mb: final_backlogs,
        },
        metrics,
    })
}
