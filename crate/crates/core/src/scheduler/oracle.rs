//! Exhaustive slot search, used as a test oracle for the matching scheduler.
//!
//! This path shares nothing with the graph construction: it enumerates every
//! feasible selection, including every data center for every antenna, and
//! scores each one on the full per-slot objective with the constant term
//! restored.

use thiserror::Error;

use super::{Assignment, Leg, SlotContext};
use crate::accounting::evaluate_leg;
use crate::model::AntennaRef;
use crate::queues::downlink_capacity;

pub const MAX_SATELLITES: usize = 6;
pub const MAX_ANTENNAS: usize = 6;
pub const MAX_DATA_CENTERS: usize = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for exhaustive search: {what} = {got} > {limit}")]
    TooLarge {
        what: &'static str,
        got: usize,
        limit: usize,
    },
}

/// Per-slot objective of `assignment`:
///
/// V·Σ C^s + Σ_s D_s·(D_s^i − D̃_s) + Q·Σ φ^s
///
/// Each leg is executed on a copy of the satellite's backlog.
pub fn p3_objective(ctx: &SlotContext<'_>, assignment: &Assignment) -> f64 {
    let sc = ctx.scenario;
    let mut cost = 0.0;
    let mut phi = 0.0;
    let mut sent = vec![0.0; ctx.states.len()];
    for leg in &assignment.legs {
        let g = leg.antenna.station;
        let rate = ctx
            .contacts
            .rate(leg.satellite, g, ctx.slot)
            .expect("objective of an infeasible assignment");
        let mut state = ctx.states[leg.satellite].clone();
        let (amount, popped) = state.actual_downlink(downlink_capacity(rate, sc.sim.tau));
        let out = evaluate_leg(sc, ctx.slot, g, leg.data_center, rate, amount, &popped);
        cost += out.cost.total();
        phi += out.phi;
        sent[leg.satellite] += amount;
    }
    let drift: f64 = ctx
        .states
        .iter()
        .zip(ctx.arrivals)
        .zip(&sent)
        .map(|((st, &arr), &out)| st.total() * (arr - out))
        .sum();
    sc.sim.v * cost + drift + ctx.q * phi
}

#[derive(Debug, Clone, Copy)]
struct Choice {
    antenna: AntennaRef,
    data_center: usize,
    amount: f64,
    cost: f64,
    phi: f64,
}

/// Exact minimiser of [`p3_objective`] by enumeration.
///
/// Refuses instances with more than 6 visible satellites, 6 visible antennas
/// or 4 data centers.
pub fn brute_force_schedule(ctx: &SlotContext<'_>) -> Result<(Assignment, f64), OracleError> {
    let sc = ctx.scenario;
    let n = sc.satellites.len();
    let visible = ctx.contacts.visible_satellites(ctx.slot);
    let mut stations: Vec<usize> = ctx.contacts.contacts(ctx.slot).iter().map(|c| c.station).collect();
    stations.sort_unstable();
    stations.dedup();
    let antennas: usize = stations.iter().map(|&g| sc.ground_stations[g].antennas).sum();
    for (what, got, limit) in [
        ("visible satellites", visible.len(), MAX_SATELLITES),
        ("visible antennas", antennas, MAX_ANTENNAS),
        ("data centers", sc.data_centers.len(), MAX_DATA_CENTERS),
    ] {
        if got > limit {
            return Err(OracleError::TooLarge { what, got, limit });
        }
    }

    // Options per visible satellite, evaluated on a copy of its backlog.
    let options: Vec<Vec<Choice>> = visible
        .iter()
        .map(|&s| {
            let mut out = Vec::new();
            for contact in ctx.contacts.stations_for(s, ctx.slot) {
                let g = contact.station;
                for d in 0..sc.data_centers.len() {
                    let mut state = ctx.states[s].clone();
                    let (amount, popped) = state.actual_downlink(downlink_capacity(contact.rate, sc.sim.tau));
                    let o = evaluate_leg(sc, ctx.slot, g, d, contact.rate, amount, &popped);
                    for index in 0..sc.ground_stations[g].antennas {
                        out.push(Choice {
                            antenna: AntennaRef { station: g, index },
                            data_center: d,
                            amount,
                            cost: o.cost.total(),
                            phi: o.phi,
                        });
                    }
                }
            }
            out
        })
        .collect();

    let base: f64 = ctx.states.iter().zip(ctx.arrivals).map(|(st, &a)| st.total() * a).sum();

    struct Search<'a> {
        visible: &'a [usize],
        options: &'a [Vec<Choice>],
        backlogs: Vec<f64>,
        v: f64,
        q: f64,
        base: f64,
        picked: Vec<Option<Choice>>,
        used: Vec<AntennaRef>,
        best: Option<(f64, Vec<Option<Choice>>)>,
    }

    impl Search<'_> {
        fn run(&mut self, i: usize) {
            if i == self.visible.len() {
                let mut cost = 0.0;
                let mut phi = 0.0;
                let mut out = 0.0;
                for (k, p) in self.picked.iter().enumerate() {
                    if let Some(c) = p {
                        cost += c.cost;
                        phi += c.phi;
                        out += self.backlogs[k] * c.amount;
                    }
                }
                let value = self.v * cost + self.base - out + self.q * phi;
                if self.best.as_ref().is_none_or(|(b, _)| value < *b) {
                    self.best = Some((value, self.picked.clone()));
                }
                return;
            }
            self.picked[i] = None;
            self.run(i + 1);
            for c in self.options[i].iter() {
                if self.used.contains(&c.antenna) {
                    continue;
                }
                self.used.push(c.antenna);
                self.picked[i] = Some(*c);
                self.run(i + 1);
                self.used.pop();
            }
            self.picked[i] = None;
        }
    }

    let mut search = Search {
        visible: &visible,
        options: &options,
        backlogs: visible.iter().map(|&s| ctx.states[s].total()).collect(),
        v: sc.sim.v,
        q: ctx.q,
        base,
        picked: vec![None; visible.len()],
        used: Vec::new(),
        best: None,
    };
    search.run(0);
    let (value, picked) = search.best.expect("the all-silent selection is always feasible");
    let legs = visible
        .iter()
        .zip(picked)
        .filter_map(|(&s, p)| {
            p.map(|c| Leg {
                satellite: s,
                antenna: c.antenna,
                data_center: c.data_center,
                amount: c.amount,
            })
        })
        .collect();
    Ok((Assignment::from_legs(ctx.slot, n, legs), value))
}
