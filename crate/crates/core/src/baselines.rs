//! Scheduling policies: the drift-plus-penalty broker and the comparison
//! baselines, behind one interface.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::ScenarioError;
use crate::model::{AntennaRef, GreedyMetric, PolicyParams, Scenario};
use crate::queues::downlink_capacity;
use crate::rng::{stream_rng, Stream};
use crate::scheduler::{self, min_cost_matching, Assignment, Leg, SlotContext};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PolicyKind {
    /// Drift-plus-penalty broker.
    SkyGs,
    /// Greedy, restricted to one provider's stations and data centers.
    SingleProviderGreedy { provider: String },
    /// Greedy over every provider.
    BrokerGreedy,
    /// Uniformly random antenna and data center.
    BrokerRandom,
    /// Greedy, but only when the backlog fills `threshold` × R·τ.
    BrokerWithholdGreedy { threshold: f64 },
    /// Per-slot cost minimisation with a forced high-priority queue for
    /// satellites whose oldest data is at least `rho`·ξ old.
    IlpHighPriority { rho: f64 },
}

impl PolicyKind {
    pub const NAMES: &'static [&'static str] = &["skygs", "sg", "bg", "br", "bwg", "ilp"];

    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::SkyGs => "skygs",
            PolicyKind::SingleProviderGreedy { .. } => "sg",
            PolicyKind::BrokerGreedy => "bg",
            PolicyKind::BrokerRandom => "br",
            PolicyKind::BrokerWithholdGreedy { .. } => "bwg",
            PolicyKind::IlpHighPriority { .. } => "ilp",
        }
    }

    /// Resolves a policy name against the scenario. SG needs a provider
    /// that owns at least one station and one data center.
    pub fn resolve(name: &str, params: &PolicyParams, scenario: &Scenario) -> Result<Self, ScenarioError> {
        let kind = match name.trim().to_ascii_lowercase().as_str() {
            "skygs" => PolicyKind::SkyGs,
            "sg" => {
                let provider = params
                    .provider
                    .clone()
                    .ok_or_else(|| ScenarioError::Missing("sim.policy_params.provider (required by sg)".into()))?;
                let owns_station = scenario.ground_stations.iter().any(|g| g.provider == provider);
                let owns_dc = scenario.data_centers.iter().any(|d| d.provider == provider);
                if !(owns_station && owns_dc) {
                    return Err(ScenarioError::invalid(
                        "sim.policy_params.provider",
                        format!("provider {provider:?} must own at least one ground station and one data center"),
                    ));
                }
                PolicyKind::SingleProviderGreedy { provider }
            }
            "bg" => PolicyKind::BrokerGreedy,
            "br" => PolicyKind::BrokerRandom,
            "bwg" => PolicyKind::BrokerWithholdGreedy {
                threshold: params.withhold_threshold,
            },
            "ilp" | "ilp_hpq" => PolicyKind::IlpHighPriority { rho: params.rho },
            _ => {
                return Err(ScenarioError::UnknownPolicy {
                    name: name.to_string(),
                    valid: Self::NAMES.to_vec(),
                })
            }
        };
        Ok(kind)
    }

    pub fn schedule(&self, ctx: &SlotContext<'_>) -> Assignment {
        match self {
            PolicyKind::SkyGs => scheduler::schedule_slot(ctx),
            PolicyKind::SingleProviderGreedy { provider } => sg_schedule(ctx, provider),
            PolicyKind::BrokerGreedy => bg_schedule(ctx),
            PolicyKind::BrokerRandom => br_schedule(ctx),
            PolicyKind::BrokerWithholdGreedy { threshold } => bwg_schedule(ctx, *threshold),
            PolicyKind::IlpHighPriority { rho } => ilp_hpq_schedule(ctx, *rho),
        }
    }
}

/// C^s for sending `amount` via station `g` to data center `d`.
fn slot_cost(scenario: &Scenario, g: usize, d: usize, amount: f64) -> f64 {
    let dc = &scenario.data_centers[d];
    scenario.rental_per_slot(g) + dc.price_per_min * dc.processing_min_per_mb * amount
}

/// Ranking key, lower is better.
fn greedy_key(metric: GreedyMetric, scenario: &Scenario, g: usize, d: usize, amount: f64) -> (f64, f64) {
    let cost = slot_cost(scenario, g, d, amount);
    match metric {
        GreedyMetric::CostPerMb => (cost / amount, 0.0),
        GreedyMetric::Cost => (cost, 0.0),
        GreedyMetric::Throughput => (-amount, cost),
    }
}

/// Shared greedy loop: satellites with backlog in descending backlog order
/// each take the free usable antenna and data center ranked best by the
/// scenario's greedy metric. Ties go to lower station, then data-center,
/// indices.
fn greedy(
    ctx: &SlotContext<'_>,
    station_ok: impl Fn(usize) -> bool,
    dc_ok: impl Fn(usize) -> bool,
    eligible: impl Fn(f64, f64) -> bool,
) -> Assignment {
    let sc = ctx.scenario;
    let mut order: Vec<usize> = (0..ctx.states.len()).filter(|&s| ctx.states[s].total() > 0.0).collect();
    order.sort_by(|&a, &b| ctx.states[b].total().total_cmp(&ctx.states[a].total()).then(a.cmp(&b)));
    let mut used = vec![0usize; sc.ground_stations.len()];
    let mut legs = Vec::new();
    for s in order {
        let backlog = ctx.states[s].total();
        let mut best: Option<((f64, f64), usize, usize, f64)> = None;
        for c in ctx.contacts.stations_for(s, ctx.slot) {
            let g = c.station;
            if !station_ok(g) || used[g] >= sc.ground_stations[g].antennas {
                continue;
            }
            let capacity = downlink_capacity(c.rate, sc.sim.tau);
            if !eligible(backlog, capacity) {
                continue;
            }
            let amount = capacity.min(backlog);
            for d in (0..sc.data_centers.len()).filter(|&d| dc_ok(d)) {
                let key = greedy_key(sc.sim.policy_params.greedy_metric, sc, g, d, amount);
                if best.is_none_or(|(b, ..)| key < b) {
                    best = Some((key, g, d, amount));
                }
            }
        }
        if let Some((_, g, d, amount)) = best {
            legs.push(Leg {
                satellite: s,
                antenna: AntennaRef {
                    station: g,
                    index: used[g],
                },
                data_center: d,
                amount,
            });
            used[g] += 1;
        }
    }
    Assignment::from_legs(ctx.slot, ctx.states.len(), legs)
}

pub fn bg_schedule(ctx: &SlotContext<'_>) -> Assignment {
    greedy(ctx, |_| true, |_| true, |_, _| true)
}

pub fn sg_schedule(ctx: &SlotContext<'_>, provider: &str) -> Assignment {
    let sc = ctx.scenario;
    greedy(
        ctx,
        |g| sc.ground_stations[g].provider == provider,
        |d| sc.data_centers[d].provider == provider,
        |_, _| true,
    )
}

/// Greedy with withholding: a contact is usable only when the backlog is at
/// least `threshold` times what the link can carry this slot.
pub fn bwg_schedule(ctx: &SlotContext<'_>, threshold: f64) -> Assignment {
    greedy(
        ctx,
        |_| true,
        |_| true,
        |backlog, capacity| backlog >= threshold * capacity,
    )
}

/// Random order, random free antenna among the visible ones, random data
/// center. Draws come from a stream keyed by the slot.
pub fn br_schedule(ctx: &SlotContext<'_>) -> Assignment {
    let sc = ctx.scenario;
    let mut rng = stream_rng(sc.sim.seed, Stream::BrokerRandom, &[ctx.slot as u64]);
    let mut order: Vec<usize> = (0..ctx.states.len()).filter(|&s| ctx.states[s].total() > 0.0).collect();
    order.shuffle(&mut rng);
    let mut taken: Vec<AntennaRef> = Vec::new();
    let mut legs = Vec::new();
    for s in order {
        let free: Vec<AntennaRef> = ctx
            .contacts
            .antennas_for(s, ctx.slot, sc)
            .into_iter()
            .filter(|a| !taken.contains(a))
            .collect();
        if free.is_empty() || sc.data_centers.is_empty() {
            continue;
        }
        let antenna = free[rng.gen_range(0..free.len())];
        let data_center = rng.gen_range(0..sc.data_centers.len());
        let rate = ctx.contacts.rate(s, antenna.station, ctx.slot).expect("visible");
        taken.push(antenna);
        legs.push(Leg {
            satellite: s,
            antenna,
            data_center,
            amount: downlink_capacity(rate, sc.sim.tau).min(ctx.states[s].total()),
        });
    }
    Assignment::from_legs(ctx.slot, ctx.states.len(), legs)
}

/// Whether satellite `s`'s oldest data has waited at least ρ·ξ minutes.
pub fn is_high_priority(ctx: &SlotContext<'_>, s: usize, rho: f64) -> bool {
    ctx.states[s]
        .oldest_arrival()
        .is_some_and(|a| (ctx.slot - a) as f64 * ctx.scenario.sim.tau >= rho * ctx.scenario.sim.xi)
}

/// Per-slot cost minimisation over the assignment polytope, with every
/// high-priority satellite that can see a free antenna forced to downlink.
///
/// Solved as a matching: real edges carry the cheapest C^s, virtual edges
/// carry 0, except for high-priority satellites whose virtual edge carries a
/// penalty larger than the sum of all real weights.
pub fn ilp_hpq_schedule(ctx: &SlotContext<'_>, rho: f64) -> Assignment {
    let sc = ctx.scenario;
    let n = ctx.states.len();
    let mut antennas = Vec::new();
    let mut first_col = Vec::new();
    for (g, st) in sc.ground_stations.iter().enumerate() {
        first_col.push(n + antennas.len());
        antennas.extend((0..st.antennas).map(|index| AntennaRef { station: g, index }));
    }
    let cols = n + antennas.len();
    let mut weights = vec![vec![None; cols]; n];
    let mut choice = vec![vec![None; antennas.len()]; n];
    let mut abs_sum = 0.0;
    for s in 0..n {
        let backlog = ctx.states[s].total();
        if backlog <= 0.0 {
            continue;
        }
        for c in ctx.contacts.stations_for(s, ctx.slot) {
            let g = c.station;
            let amount = downlink_capacity(c.rate, sc.sim.tau).min(backlog);
            let mut best: Option<(f64, usize)> = None;
            for d in 0..sc.data_centers.len() {
                let dc = &sc.data_centers[d];
                let cost = sc.rental_per_slot(g) + dc.price_per_min * dc.processing_min_per_mb * amount;
                if best.is_none_or(|(b, _)| cost < b) {
                    best = Some((cost, d));
                }
            }
            let Some((cost, d)) = best else { continue };
            for index in 0..sc.ground_stations[g].antennas {
                let col = first_col[g] + index;
                weights[s][col] = Some(cost);
                choice[s][col - n] = Some((d, amount));
                abs_sum += cost.abs();
            }
        }
    }
    let penalty = abs_sum + 1.0;
    for (s, row) in weights.iter_mut().enumerate() {
        row[s] = Some(if is_high_priority(ctx, s, rho) { penalty } else { 0.0 });
    }
    let matching = min_cost_matching(&weights, cols).expect("virtual edges make the matching feasible");
    let legs = matching
        .row_to_col
        .iter()
        .enumerate()
        .filter(|&(_, &col)| col >= n)
        .map(|(s, &col)| {
            let (data_center, amount) = choice[s][col - n].expect("matched real edge");
            Leg {
                satellite: s,
                antenna: antennas[col - n],
                data_center,
                amount,
            }
        })
        .collect();
    Assignment::from_legs(ctx.slot, n, legs)
}
