//! Run statistics.
//!
//! [`MetricsAccumulator`] folds [`SlotRecord`]s in `(slot, node)` order —
//! either streamed from the engine or replayed from a materialized trace —
//! and finishes into a [`MetricsReport`]. Integer tallies (queues, backlog,
//! service, switch edges) are exact; energy tallies are plain f64 sums.
//!
//! Conventions:
//! - per-node queue averages and duty cycles are taken over the node's
//!   *alive* slots;
//! - network backlog is the mean over all observed slots of the total
//!   queue across then-alive nodes;
//! - a transmit burst is a maximal run of two or more consecutive slots in
//!   which the same node holds the channel with positive offered service.

use crate::engine::{RunOutcome, SlotRecord, Trace};
use crate::model::Mode;

#[derive(Debug, Clone)]
pub struct MetricsAccumulator {
    node_count: u32,
    slots: u64,
    active_slots: Vec<u64>,
    alive_slots: Vec<u64>,
    queue_sums: Vec<u128>,
    served_packets: u64,
    arrival_packets: u64,
    e_sleep: f64,
    e_circuit: f64,
    e_tx: f64,
    e_switch: f64,
    e_bcast: f64,
    idle_slots: u64,
    switch_on: u64,
    switch_off: u64,
    backlog_sum: u128,
    cur_slot: Option<u64>,
    cur_tx: Option<u32>,
    run_node: Option<u32>,
    run_len: u64,
    bursts: u64,
    burst_len_sum: u64,
}

impl MetricsAccumulator {
    pub fn new(node_count: u32) -> Self {
        MetricsAccumulator {
            node_count,
            slots: 0,
            active_slots: vec![0; node_count as usize],
            alive_slots: vec![0; node_count as usize],
            queue_sums: vec![0; node_count as usize],
            served_packets: 0,
            arrival_packets: 0,
            e_sleep: 0.0,
            e_circuit: 0.0,
            e_tx: 0.0,
            e_switch: 0.0,
            e_bcast: 0.0,
            idle_slots: 0,
            switch_on: 0,
            switch_off: 0,
            backlog_sum: 0,
            cur_slot: None,
            cur_tx: None,
            run_node: None,
            run_len: 0,
            bursts: 0,
            burst_len_sum: 0,
        }
    }

    fn close_slot(&mut self) {
        match (self.run_node, self.cur_tx) {
            (Some(n), Some(t)) if n == t => self.run_len += 1,
            _ => {
                self.close_run();
                if let Some(t) = self.cur_tx {
                    self.run_node = Some(t);
                    self.run_len = 1;
                }
            }
        }
        self.cur_tx = None;
    }

    fn close_run(&mut self) {
        if self.run_len >= 2 {
            self.bursts += 1;
            self.burst_len_sum += self.run_len;
        }
        self.run_node = None;
        self.run_len = 0;
    }

    pub fn push(&mut self, r: &SlotRecord) {
        if self.cur_slot != Some(r.slot) {
            if self.cur_slot.is_some() {
                self.close_slot();
            }
            self.cur_slot = Some(r.slot);
            self.slots += 1;
            if r.idle_flag {
                self.idle_slots += 1;
            }
        }
        let idx = r.node as usize;
        if r.alive {
            self.alive_slots[idx] += 1;
            if r.mode == Mode::Active {
                self.active_slots[idx] += 1;
            }
            self.queue_sums[idx] += r.queue as u128;
            self.backlog_sum += r.queue as u128;
        }
        if r.served > 0 {
            self.cur_tx = Some(r.node);
        }
        self.served_packets += r.served as u64;
        self.arrival_packets += r.arrivals as u64;
        self.e_sleep += r.e_sleep;
        self.e_circuit += r.e_active;
        self.e_tx += r.e_tx;
        self.e_switch += r.e_switch;
        self.e_bcast += r.e_bcast;
        match r.switch {
            "01" => self.switch_on += 1,
            "10" => self.switch_off += 1,
            _ => {}
        }
    }

    /// Merge a later chunk of the same run into this accumulator. Integer
    /// tallies merge exactly; energy sums can differ from a sequential fold
    /// by rounding only.
    pub fn merge(&mut self, later: &MetricsAccumulator) {
        assert_eq!(self.node_count, later.node_count);
        self.close_slot();
        self.close_run();
        self.slots += later.slots;
        for i in 0..self.node_count as usize {
            self.active_slots[i] += later.active_slots[i];
            self.alive_slots[i] += later.alive_slots[i];
            self.queue_sums[i] += later.queue_sums[i];
        }
        self.served_packets += later.served_packets;
        self.arrival_packets += later.arrival_packets;
        self.e_sleep += later.e_sleep;
        self.e_circuit += later.e_circuit;
        self.e_tx += later.e_tx;
        self.e_switch += later.e_switch;
        self.e_bcast += later.e_bcast;
        self.idle_slots += later.idle_slots;
        self.switch_on += later.switch_on;
        self.switch_off += later.switch_off;
        self.backlog_sum += later.backlog_sum;
        // Burst runs do not bridge the chunk seam; each chunk's runs are
        // counted within it.
        self.bursts += later.bursts;
        self.burst_len_sum += later.burst_len_sum;
        self.cur_slot = later.cur_slot;
        self.cur_tx = later.cur_tx;
        self.run_node = later.run_node;
        self.run_len = later.run_len;
    }

    pub fn finish(mut self, outcome: &RunOutcome) -> MetricsReport {
        self.close_slot();
        self.close_run();
        let slots = self.slots.max(1) as f64;
        let per_slot = |x: f64| x / slots;
        let total_alive: u64 = self.alive_slots.iter().sum();
        let total_active: u64 = self.active_slots.iter().sum();
        MetricsReport {
            node_count: self.node_count,
            slots: self.slots,
            e_sleep_j_per_slot: per_slot(self.e_sleep),
            e_circuit_j_per_slot: per_slot(self.e_circuit),
            e_tx_j_per_slot: per_slot(self.e_tx),
            e_switch_j_per_slot: per_slot(self.e_switch),
            e_bcast_j_per_slot: per_slot(self.e_bcast),
            e_active_j_per_slot: per_slot(self.e_circuit + self.e_tx),
            e_total_j_per_slot: per_slot(
                self.e_sleep + self.e_circuit + self.e_tx + self.e_switch + self.e_bcast,
            ),
            avg_backlog_packets: self.backlog_sum as f64 / slots,
            per_node_avg_queue: self
                .queue_sums
                .iter()
                .zip(&self.alive_slots)
                .map(|(&q, &a)| if a == 0 { 0.0 } else { q as f64 / a as f64 })
                .collect(),
            per_node_duty_cycle: self
                .active_slots
                .iter()
                .zip(&self.alive_slots)
                .map(|(&act, &a)| if a == 0 { 0.0 } else { act as f64 / a as f64 })
                .collect(),
            duty_cycle: if total_alive == 0 {
                0.0
            } else {
                total_active as f64 / total_alive as f64
            },
            idle_fraction: self.idle_slots as f64 / slots,
            served_packets_per_slot: self.served_packets as f64 / slots,
            arrival_packets_per_slot: self.arrival_packets as f64 / slots,
            switch_on_count: self.switch_on,
            switch_off_count: self.switch_off,
            transmit_bursts: self.bursts,
            avg_burst_len: if self.bursts == 0 {
                0.0
            } else {
                self.burst_len_sum as f64 / self.bursts as f64
            },
            death_slots: outcome.death_slots.clone(),
            first_death: outcome.first_death(),
            network_lifetime: outcome.network_lifetime(),
        }
    }
}

/// Aggregated statistics for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub node_count: u32,
    pub slots: u64,
    pub e_sleep_j_per_slot: f64,
    pub e_circuit_j_per_slot: f64,
    pub e_tx_j_per_slot: f64,
    pub e_switch_j_per_slot: f64,
    pub e_bcast_j_per_slot: f64,
    /// Circuit plus transmission energy per slot.
    pub e_active_j_per_slot: f64,
    /// Average network energy per slot across all categories.
    pub e_total_j_per_slot: f64,
    pub avg_backlog_packets: f64,
    pub per_node_avg_queue: Vec<f64>,
    pub per_node_duty_cycle: Vec<f64>,
    /// Active slot fraction pooled over nodes' alive slots.
    pub duty_cycle: f64,
    pub idle_fraction: f64,
    pub served_packets_per_slot: f64,
    pub arrival_packets_per_slot: f64,
    pub switch_on_count: u64,
    pub switch_off_count: u64,
    pub transmit_bursts: u64,
    pub avg_burst_len: f64,
    pub death_slots: Vec<Option<u64>>,
    pub first_death: Option<u64>,
    pub network_lifetime: Option<u64>,
}

impl MetricsReport {
    pub fn from_trace(trace: &Trace) -> MetricsReport {
        let mut acc = MetricsAccumulator::new(trace.node_count);
        for r in &trace.records {
            acc.push(r);
        }
        acc.finish(&trace.outcome)
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// 95% normal-approximation confidence interval for the mean.
pub fn ci95(xs: &[f64]) -> (f64, f64) {
    let m = mean(xs);
    let half = 1.96 * sample_std(xs) / (xs.len().max(1) as f64).sqrt();
    (m - half, m + half)
}

pub fn intervals_overlap(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.1 && b.0 <= a.1
}

pub fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

/// Non-increasing up to a relative slack on each step.
pub fn non_increasing_with_tol(xs: &[f64], rel_tol: f64) -> bool {
    xs.windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + rel_tol) + f64::EPSILON)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run;
    use crate::model::{Policy, SimConfig};

    fn rec(slot: u64, node: u32, mode: Mode, served: u32, queue: u64, alive: bool) -> SlotRecord {
        SlotRecord {
            slot,
            node,
            mode,
            switch: "none",
            served,
            arrivals: 0,
            queue,
            battery_j: 1.0,
            e_sleep: 0.0,
            e_active: 0.0,
            e_tx: 0.0,
            e_switch: 0.0,
            e_bcast: 0.0,
            idle_flag: served == 0,
            alive,
        }
    }

    fn outcome(n: usize) -> RunOutcome {
        RunOutcome {
            death_slots: vec![None; n],
            slots_run: 0,
        }
    }

    #[test]
    fn hand_built_trace_statistics() {
        let mut acc = MetricsAccumulator::new(2);
        let mut records = Vec::new();
        // Slot 0: node 0 transmits with queue 4; node 1 asleep, queue 2.
        records.push(rec(0, 0, Mode::Active, 10, 4, true));
        records.push(rec(0, 1, Mode::Sleep, 0, 2, true));
        // Slot 1: idle.
        records.push(rec(1, 0, Mode::Sleep, 0, 6, true));
        records.push(rec(1, 1, Mode::Sleep, 0, 0, true));
        // Slot 2: node 1 dead, node 0 active without the channel.
        let mut r = rec(2, 0, Mode::Active, 0, 2, true);
        r.idle_flag = true;
        records.push(r);
        records.push(rec(2, 1, Mode::Sleep, 0, 7, false));
        for r in &records {
            acc.push(r);
        }
        let m = acc.finish(&outcome(2));
        assert_eq!(m.slots, 3);
        assert_eq!(m.per_node_avg_queue, vec![4.0, 1.0]);
        assert_eq!(m.per_node_duty_cycle, vec![2.0 / 3.0, 0.0]);
        assert_eq!(m.duty_cycle, 2.0 / 5.0);
        // Dead node's queue is excluded from backlog: (4+2) + (6+0) + 2.
        assert!((m.avg_backlog_packets - 14.0 / 3.0).abs() < 1e-12);
        assert!((m.idle_fraction - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.served_packets_per_slot - 10.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn bursts_require_two_consecutive_slots_of_the_same_node() {
        let mut acc = MetricsAccumulator::new(2);
        // Transmitter sequence: 0, 0, 1, idle, 1, 1, 1.
        let seq = [Some(0u32), Some(0), Some(1), None, Some(1), Some(1), Some(1)];
        for (slot, tx) in seq.iter().enumerate() {
            for node in 0..2u32 {
                let served = if *tx == Some(node) { 5 } else { 0 };
                acc.push(&rec(slot as u64, node, Mode::Active, served, 1, true));
            }
        }
        let m = acc.finish(&outcome(2));
        assert_eq!(m.transmit_bursts, 2);
        assert!((m.avg_burst_len - 2.5).abs() < 1e-12);
    }

    #[test]
    fn merged_chunks_match_sequential_fold() {
        let mut cfg = SimConfig::network(3, Policy::Ess, 2000.0);
        cfg.horizon_slots = Some(400);
        let t = run(&cfg).unwrap();
        let seq = MetricsReport::from_trace(&t);

        let cut = t
            .records
            .iter()
            .position(|r| r.slot == 250 && r.node == 0)
            .unwrap();
        let mut a = MetricsAccumulator::new(3);
        let mut b = MetricsAccumulator::new(3);
        for r in &t.records[..cut] {
            a.push(r);
        }
        for r in &t.records[cut..] {
            b.push(r);
        }
        a.merge(&b);
        let merged = a.finish(&t.outcome);

        assert_eq!(merged.slots, seq.slots);
        assert_eq!(merged.switch_on_count, seq.switch_on_count);
        assert_eq!(merged.avg_backlog_packets, seq.avg_backlog_packets);
        assert_eq!(merged.per_node_avg_queue, seq.per_node_avg_queue);
        for (x, y) in [
            (merged.e_total_j_per_slot, seq.e_total_j_per_slot),
            (merged.e_tx_j_per_slot, seq.e_tx_j_per_slot),
            (merged.duty_cycle, seq.duty_cycle),
        ] {
            assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0), "{x} vs {y}");
        }
    }

    #[test]
    fn burst_runs_do_not_bridge_chunk_seams() {
        // A 4-slot run of node 0 split 2/2 across chunks counts as two
        // bursts of length 2 after a merge, not one of length 4.
        let mut a = MetricsAccumulator::new(1);
        let mut b = MetricsAccumulator::new(1);
        for slot in 0..2 {
            a.push(&rec(slot, 0, Mode::Active, 5, 1, true));
        }
        for slot in 2..4 {
            b.push(&rec(slot, 0, Mode::Active, 5, 1, true));
        }
        a.merge(&b);
        let m = a.finish(&outcome(1));
        assert_eq!(m.transmit_bursts, 2);
    }

    #[test]
    fn death_slots_flow_from_the_engine_outcome() {
        let o = RunOutcome {
            death_slots: vec![Some(7), None, Some(3)],
            slots_run: 10,
        };
        let m = MetricsAccumulator::new(3).finish(&o);
        assert_eq!(m.first_death, Some(3));
        assert_eq!(m.network_lifetime, None);
    }

    #[test]
    fn trend_and_interval_helpers() {
        assert!(strictly_decreasing(&[5.0, 4.0, 1.0]));
        assert!(!strictly_decreasing(&[5.0, 5.0]));
        assert!(non_increasing_with_tol(&[5.0, 5.0001, 4.0], 1e-3));
        assert!(!non_increasing_with_tol(&[5.0, 5.5], 1e-3));
        let (lo, hi) = ci95(&[2.0, 4.0, 6.0]);
        assert!((mean(&[2.0, 4.0, 6.0]) - 4.0).abs() < 1e-12);
        assert!(lo < 4.0 && 4.0 < hi);
        assert!(intervals_overlap((0.0, 2.0), (1.0, 3.0)));
        assert!(!intervals_overlap((0.0, 1.0), (2.0, 3.0)));
    }
}
