//! Satellite backlogs and the latency virtual queue.
//!
//! Data is tracked in chunks: all MB collected in one slot share an arrival
//! slot, so per-unit latency sums reduce to size-weighted chunk sums without
//! approximation.

use std::collections::VecDeque;

use rand::Rng;

use crate::model::units::MINUTES_PER_DAY;
use crate::model::Satellite;
use crate::orbit::orbital_period_min;
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataChunk {
    pub arrival_slot: usize,
    /// MB, strictly positive.
    pub size: f64,
}

/// FIFO backlog of one satellite; `total()` is D_s(t).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SatelliteState {
    pub satellite: usize,
    backlog: VecDeque<DataChunk>,
    total: f64,
}

/// D_{gd}^s(t) for a selected link: the most that can move in one slot.
pub fn downlink_capacity(rate: f64, tau: f64) -> f64 {
    rate * tau
}

impl SatelliteState {
    pub fn new(satellite: usize) -> Self {
        Self {
            satellite,
            backlog: VecDeque::new(),
            total: 0.0,
        }
    }

    /// D_s(t), MB.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn chunks(&self) -> impl Iterator<Item = &DataChunk> {
        self.backlog.iter()
    }

    pub fn oldest_arrival(&self) -> Option<usize> {
        self.backlog.front().map(|c| c.arrival_slot)
    }

    pub fn is_empty(&self) -> bool {
        self.backlog.is_empty()
    }

    /// The chunks `actual_downlink(capacity)` would pop, without popping.
    pub fn preview(&self, capacity: f64) -> (f64, Vec<DataChunk>) {
        let amount = capacity.max(0.0).min(self.total);
        if amount >= self.total {
            return (self.total, self.backlog.iter().copied().collect());
        }
        let mut left = amount;
        let mut out = Vec::new();
        for c in &self.backlog {
            if left <= 0.0 {
                break;
            }
            let take = c.size.min(left);
            out.push(DataChunk {
                arrival_slot: c.arrival_slot,
                size: take,
            });
            left -= take;
        }
        (amount, out)
    }

    /// Pops up to `capacity` MB in FIFO order, returning D̃ = min(capacity,
    /// D_s) and the popped chunks. A partially sent chunk keeps its arrival
    /// slot and stays at the head.
    pub fn actual_downlink(&mut self, capacity: f64) -> (f64, Vec<DataChunk>) {
        let capacity = capacity.max(0.0);
        if capacity >= self.total {
            let amount = self.total;
            self.total = 0.0;
            return (amount, self.backlog.drain(..).collect());
        }
        let mut left = capacity;
        let mut out = Vec::new();
        while left > 0.0 {
            let Some(head) = self.backlog.front_mut() else { break };
            if head.size <= left {
                left -= head.size;
                out.push(*head);
                self.backlog.pop_front();
            } else {
                head.size -= left;
                out.push(DataChunk {
                    arrival_slot: head.arrival_slot,
                    size: left,
                });
                left = 0.0;
            }
        }
        self.total -= capacity;
        if self.backlog.is_empty() {
            self.total = 0.0;
        }
        (capacity, out)
    }

    /// Appends the slot's arrivals; applied after the slot's downlink.
    pub fn advance_backlog(&mut self, arrivals: f64, slot: usize) {
        if arrivals > 0.0 {
            if let Some(last) = self.backlog.back() {
                debug_assert!(last.arrival_slot <= slot, "arrivals out of order");
            }
            self.backlog.push_back(DataChunk {
                arrival_slot: slot,
                size: arrivals,
            });
            self.total += arrivals;
        }
    }
}

/// Latency virtual queue Q(t), unit-minutes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VirtualQueueState {
    pub q: f64,
}

/// Q(t+1) = max(Q(t) + φ(t), 0).
pub fn update_virtual_queue(q: f64, phi: f64) -> f64 {
    (q + phi).max(0.0)
}

impl VirtualQueueState {
    pub fn update(&mut self, phi: f64) -> f64 {
        self.q = update_virtual_queue(self.q, phi);
        self.q
    }
}

/// Per-satellite data collection for one run.
///
/// Collection follows an on/off mask that repeats once per orbit, with a
/// seeded phase, standing in for imaging over lit land. The daily volume is
/// drawn once per run from the satellite's configured range.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalProcess {
    pub daily_volume_mb: f64,
    /// MB collected in each "on" slot.
    pub per_on_slot_mb: f64,
    pub period_slots: usize,
    pub on_slots: usize,
    pub offset: usize,
}

impl ArrivalProcess {
    pub fn new(sat: &Satellite, index: usize, seed: u64, tau: f64) -> Self {
        let (lo, hi) = sat.daily_volume_mb;
        let daily_volume_mb = if lo == hi {
            lo
        } else {
            stream_rng(seed, Stream::DailyVolume, &[index as u64]).gen_range(lo..=hi)
        };
        let period_slots = ((orbital_period_min(sat.altitude_km) / tau).round() as usize).max(1);
        let on_slots = ((sat.duty_cycle * period_slots as f64).round() as usize).clamp(1, period_slots);
        let offset = if sat.duty_cycle >= 1.0 {
            0
        } else {
            stream_rng(seed, Stream::DutyPhase, &[index as u64]).gen_range(0..period_slots)
        };
        Self {
            daily_volume_mb,
            per_on_slot_mb: daily_volume_mb / (MINUTES_PER_DAY * sat.duty_cycle) * tau,
            period_slots,
            on_slots,
            offset,
        }
    }

    pub fn is_on(&self, slot: usize) -> bool {
        (slot + self.offset) % self.period_slots < self.on_slots
    }

    /// D_s^i(t), MB.
    pub fn arrivals_for_slot(&self, slot: usize) -> f64 {
        if self.is_on(slot) {
            self.per_on_slot_mb
        } else {
            0.0
        }
    }

    /// Mean collection per slot over a full cycle, MB.
    pub fn mean_per_slot(&self) -> f64 {
        self.per_on_slot_mb * self.on_slots as f64 / self.period_slots as f64
    }
}
