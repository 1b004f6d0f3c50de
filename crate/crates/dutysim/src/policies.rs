//! Scheduling policies.
//!
//! All policies see the same slot snapshot — queue lengths, current modes,
//! and this slot's channel rates — and emit a [`SlotDecision`]: the mode
//! each node is directed into and at most one transmitter.
//!
//! - `ess`: switching-cost-aware max-weight. A node is a transmit candidate
//!   only if its transmit weight (queue-times-rate minus `V` times the
//!   energy the transmission slot would cost from its current mode) beats
//!   its own do-nothing alternative; among candidates the largest weight
//!   wins, ties to the lowest node id, and every non-transmitter is
//!   directed to sleep. No candidates means an idle slot with the whole
//!   network asleep.
//! - `benchmark`: the same rule with the switching pulses `e01`/`e10`
//!   zeroed *inside the weights only* — the simulator still charges the
//!   real cost. It prices a wake-up below its true cost, which makes it
//!   systematically switch-happier.
//! - `periodic`: every node half-duty-cycles unconditionally; the
//!   transmitter is the queue/rate argmax when its net weight is positive.
//! - `distributed`: each node compares its own queue against its own
//!   wake/stay threshold (no coordinator), every active node broadcasts a
//!   control message, and the best active node transmits unconditionally.
//! - `rnd`: stationary randomized policy given per-(node, channel-state)
//!   flip and transmit-attempt probabilities — the family the oracle
//!   optimizes over.

use crate::energy::slot_energy;
use crate::model::{EnergyParams, Mode, NodeState, SimConfig};
use crate::stochastic::{RngStream, StreamLabel};
use serde::{Deserialize, Serialize};

/// Stationary randomized policy parameters, indexed `[node][channel state]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RndPolicyParams {
    /// Wake probability when asleep.
    pub p01: Vec<Vec<f64>>,
    /// Sleep probability when active.
    pub p10: Vec<Vec<f64>>,
    /// Transmit-attempt probability when active.
    pub pi_tr: Vec<Vec<f64>>,
}

impl RndPolicyParams {
    /// Same probabilities for every node and state.
    pub fn uniform(node_count: u32, state_count: usize, p01: f64, p10: f64, pi_tr: f64) -> Self {
        let table = |v: f64| vec![vec![v; state_count]; node_count as usize];
        RndPolicyParams {
            p01: table(p01),
            p10: table(p10),
            pi_tr: table(pi_tr),
        }
    }

    /// Validate dimensions and probability ranges against a configuration.
    pub fn check_shape(&self, node_count: u32, state_count: usize) -> Result<(), String> {
        for (name, table) in [("p01", &self.p01), ("p10", &self.p10), ("pi_tr", &self.pi_tr)] {
            if table.len() != node_count as usize {
                return Err(format!(
                    "{name} has {} rows, expected one per node ({node_count})",
                    table.len()
                ));
            }
            for (node, row) in table.iter().enumerate() {
                if row.len() != state_count {
                    return Err(format!(
                        "{name}[{node}] has {} entries, expected one per channel state ({state_count})",
                        row.len()
                    ));
                }
                for (state, &p) in row.iter().enumerate() {
                    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                        return Err(format!(
                            "{name}[{node}][{state}] = {p} is not a probability"
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// One slot's scheduling outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotDecision {
    /// Mode each node is directed into for this slot (dead nodes keep their
    /// last mode).
    pub new_modes: Vec<Mode>,
    /// The node granted the channel, if any.
    pub transmitter: Option<u32>,
    /// Nodes paying a control-broadcast this slot (distributed policy only).
    pub broadcasters: Vec<bool>,
}

impl SlotDecision {
    pub fn idle(&self) -> bool {
        self.transmitter.is_none()
    }
}

/// The four one-slot energies that enter the weights, for a given channel
/// rate: stay-asleep, wake-and-transmit, stay-and-transmit, go-to-sleep.
fn case_energies(
    p: &EnergyParams,
    slot_ms: f64,
    include_e01_on_wake: bool,
    rate: u32,
) -> (f64, f64, f64, f64) {
    let total = |prev, new, served| {
        slot_energy(p, slot_ms, prev, new, served, include_e01_on_wake)
            .expect("weight cases never transmit while asleep")
            .total_j()
    };
    (
        total(Mode::Sleep, Mode::Sleep, 0),
        total(Mode::Sleep, Mode::Active, rate),
        total(Mode::Active, Mode::Active, rate),
        total(Mode::Active, Mode::Sleep, 0),
    )
}

/// Energy charged against a transmission from sleep: the switching pulse on
/// top of the wake-slot energy (which itself already contains the pulse
/// unless the configuration folds it into circuit power).
fn sleep_transmit_charge(p: &EnergyParams, slot_ms: f64, include_e01_on_wake: bool, rate: u32) -> f64 {
    let (_, e_sa, _, _) = case_energies(p, slot_ms, include_e01_on_wake, rate);
    p.e01_j + e_sa
}

/// Weight of transmitting this slot from `mode` with `queue` packets and
/// channel `rate`.
pub fn transmit_weight(
    v: f64,
    p: &EnergyParams,
    slot_ms: f64,
    include_e01_on_wake: bool,
    mode: Mode,
    queue: u64,
    rate: u32,
) -> f64 {
    let throughput = queue as f64 * rate as f64;
    match mode {
        Mode::Active => {
            let (_, _, e_aa, _) = case_energies(p, slot_ms, include_e01_on_wake, rate);
            throughput - v * e_aa
        }
        Mode::Sleep => {
            throughput - v * sleep_transmit_charge(p, slot_ms, include_e01_on_wake, rate)
        }
    }
}

/// Weight of the node's do-nothing alternative: stay asleep, or shut down
/// if currently active.
pub fn no_transmit_weight(v: f64, p: &EnergyParams, slot_ms: f64, mode: Mode) -> f64 {
    let (e_ss, _, _, e_as) = case_energies(p, slot_ms, true, 0);
    match mode {
        Mode::Sleep => -v * e_ss,
        Mode::Active => -v * e_as,
    }
}

/// Queue length above which an active node prefers transmitting over
/// shutting down. Infinite when the channel rate is zero.
pub fn active_stay_threshold(v: f64, p: &EnergyParams, slot_ms: f64, rate: u32) -> f64 {
    if rate == 0 {
        return f64::INFINITY;
    }
    let (_, _, e_aa, e_as) = case_energies(p, slot_ms, true, rate);
    v * (e_aa - e_as) / rate as f64
}

/// Queue length above which a sleeping node prefers waking to transmit over
/// staying asleep. Infinite when the channel rate is zero.
pub fn sleep_stay_threshold(
    v: f64,
    p: &EnergyParams,
    slot_ms: f64,
    include_e01_on_wake: bool,
    rate: u32,
) -> f64 {
    if rate == 0 {
        return f64::INFINITY;
    }
    let (e_ss, _, _, _) = case_energies(p, slot_ms, include_e01_on_wake, rate);
    let charge = sleep_transmit_charge(p, slot_ms, include_e01_on_wake, rate);
    v * (charge - e_ss) / rate as f64
}

fn weight_params(cfg: &SimConfig, zero_switch: bool) -> EnergyParams {
    let mut p = cfg.energy.clone();
    if zero_switch {
        p.e01_j = 0.0;
        p.e10_j = 0.0;
    }
    p
}

fn keep_modes(nodes: &[NodeState]) -> Vec<Mode> {
    nodes.iter().map(|n| n.mode).collect()
}

/// Candidate-filtered argmax: a node enters the candidate set only if its
/// transmit weight strictly beats its own no-transmit alternative; the
/// winner is the largest transmit weight, ties to the lowest node id.
fn max_weight_decide(cfg: &SimConfig, nodes: &[NodeState], rates: &[(usize, u32)], zero_switch: bool) -> SlotDecision {
    let p = weight_params(cfg, zero_switch);
    let v = cfg.v_param;
    let mut best: Option<(u32, f64)> = None;
    for node in nodes.iter().filter(|n| n.alive) {
        let rate = rates[node.node_id as usize].1;
        let w_tx = transmit_weight(
            v,
            &p,
            cfg.slot_ms,
            cfg.include_e01_on_wake,
            node.mode,
            node.queue_packets,
            rate,
        );
        let w_nt = no_transmit_weight(v, &p, cfg.slot_ms, node.mode);
        if w_tx > w_nt && best.map_or(true, |(_, bw)| w_tx > bw) {
            best = Some((node.node_id, w_tx));
        }
    }
    let transmitter = best.map(|(id, _)| id);
    let new_modes = nodes
        .iter()
        .map(|n| {
            if !n.alive {
                n.mode
            } else if Some(n.node_id) == transmitter {
                Mode::Active
            } else {
                Mode::Sleep
            }
        })
        .collect();
    SlotDecision {
        new_modes,
        transmitter,
        broadcasters: vec![false; nodes.len()],
    }
}

pub fn ess_decide(cfg: &SimConfig, nodes: &[NodeState], rates: &[(usize, u32)]) -> SlotDecision {
    max_weight_decide(cfg, nodes, rates, false)
}

pub fn benchmark_decide(cfg: &SimConfig, nodes: &[NodeState], rates: &[(usize, u32)]) -> SlotDecision {
    max_weight_decide(cfg, nodes, rates, true)
}

/// Fixed half-duty cycle: every live node is active each slot (the engine
/// charges the composite sleep/wake/active slot cost), and the
/// queue/rate argmax transmits when its net weight is positive.
pub fn periodic_decide(cfg: &SimConfig, nodes: &[NodeState], rates: &[(usize, u32)]) -> SlotDecision {
    let alpha = cfg.energy.alpha_j_per_packet;
    let mut best: Option<(u32, f64)> = None;
    for node in nodes.iter().filter(|n| n.alive) {
        let rate = rates[node.node_id as usize].1 as f64;
        let w = rate * (node.queue_packets as f64 - cfg.v_param * alpha);
        if w > 0.0 && best.map_or(true, |(_, bw)| w > bw) {
            best = Some((node.node_id, w));
        }
    }
    let new_modes = nodes
        .iter()
        .map(|n| if n.alive { Mode::Active } else { n.mode })
        .collect();
    SlotDecision {
        new_modes,
        transmitter: best.map(|(id, _)| id),
        broadcasters: vec![false; nodes.len()],
    }
}

/// Threshold rule each node evaluates on its own state: a sleeper wakes
/// when its queue reaches its wake threshold (inclusive), an active node
/// stays only while its queue strictly exceeds its stay threshold. Every
/// active node pays a control broadcast; the best active transmit weight
/// wins the channel unconditionally.
pub fn distributed_decide(cfg: &SimConfig, nodes: &[NodeState], rates: &[(usize, u32)]) -> SlotDecision {
    let p = &cfg.energy;
    let v = cfg.v_param;
    let mut new_modes = keep_modes(nodes);
    let mut broadcasters = vec![false; nodes.len()];
    let mut best: Option<(u32, f64)> = None;
    for node in nodes.iter().filter(|n| n.alive) {
        let idx = node.node_id as usize;
        let rate = rates[idx].1;
        let q = node.queue_packets as f64;
        let stays_up = match node.mode {
            Mode::Sleep => {
                q >= sleep_stay_threshold(v, p, cfg.slot_ms, cfg.include_e01_on_wake, rate)
            }
            Mode::Active => q > active_stay_threshold(v, p, cfg.slot_ms, rate),
        };
        new_modes[idx] = if stays_up { Mode::Active } else { Mode::Sleep };
        if stays_up {
            broadcasters[idx] = true;
            let w_tx = transmit_weight(
                v,
                p,
                cfg.slot_ms,
                cfg.include_e01_on_wake,
                node.mode,
                node.queue_packets,
                rate,
            );
            if best.map_or(true, |(_, bw)| w_tx > bw) {
                best = Some((node.node_id, w_tx));
            }
        }
    }
    SlotDecision {
        new_modes,
        transmitter: best.map(|(id, _)| id),
        broadcasters,
    }
}

/// Stationary randomized policy: independent mode-flip and transmit-attempt
/// coins per node, read from dedicated counter streams so the environment
/// sample path is untouched. The lowest-id active node with a successful
/// attempt transmits.
pub fn rnd_decide(
    cfg: &SimConfig,
    params: &RndPolicyParams,
    nodes: &[NodeState],
    rates: &[(usize, u32)],
    slot: u64,
) -> SlotDecision {
    let mut new_modes = keep_modes(nodes);
    let mut transmitter = None;
    for node in nodes.iter().filter(|n| n.alive) {
        let idx = node.node_id as usize;
        let state = rates[idx].0;
        let u_mode = RngStream::new(cfg.seed, StreamLabel::PolicyMode, node.node_id).uniform(slot);
        let u_tx = RngStream::new(cfg.seed, StreamLabel::PolicyTx, node.node_id).uniform(slot);
        new_modes[idx] = match node.mode {
            Mode::Sleep if u_mode < params.p01[idx][state] => Mode::Active,
            Mode::Sleep => Mode::Sleep,
            Mode::Active if u_mode < params.p10[idx][state] => Mode::Sleep,
            Mode::Active => Mode::Active,
        };
        if transmitter.is_none() && new_modes[idx] == Mode::Active && u_tx < params.pi_tr[idx][state]
        {
            transmitter = Some(node.node_id);
        }
    }
    SlotDecision {
        new_modes,
        transmitter,
        broadcasters: vec![false; nodes.len()],
    }
}

/// Dispatch on the configured policy.
pub fn decide(cfg: &SimConfig, nodes: &[NodeState], rates: &[(usize, u32)], slot: u64) -> SlotDecision {
    match &cfg.policy {
        crate::model::Policy::Ess => ess_decide(cfg, nodes, rates),
        crate::model::Policy::Benchmark => benchmark_decide(cfg, nodes, rates),
        crate::model::Policy::Periodic => periodic_decide(cfg, nodes, rates),
        crate::model::Policy::Distributed => distributed_decide(cfg, nodes, rates),
        crate::model::Policy::Rnd(params) => rnd_decide(cfg, params, nodes, rates, slot),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ChannelModel, Policy};
    use proptest::prelude::*;

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-9, "{a} != {b}");
    }

    fn node(id: u32, mode: Mode, queue: u64) -> NodeState {
        NodeState {
            node_id: id,
            mode,
            prev_mode: mode,
            queue_packets: queue,
            battery_j: 10.0,
            alive: true,
        }
    }

    fn good(n: usize) -> Vec<(usize, u32)> {
        vec![(0, 20); n]
    }

    #[test]
    fn frozen_threshold_values() {
        let p = EnergyParams::default();
        close(active_stay_threshold(1000.0, &p, 2.0, 20), 0.0334560075);
        close(sleep_stay_threshold(1000.0, &p, 2.0, true, 20), 0.0348585);
        close(sleep_stay_threshold(80000.0, &p, 2.0, true, 20), 2.78868);
        close(sleep_stay_threshold(80000.0, &p, 2.0, true, 5), 3.95472);
        assert_eq!(active_stay_threshold(1000.0, &p, 2.0, 0), f64::INFINITY);
        assert_eq!(
            sleep_stay_threshold(1000.0, &p, 2.0, true, 0),
            f64::INFINITY
        );
    }

    #[test]
    fn v_zero_reduces_to_pure_max_weight() {
        let cfg = SimConfig::network(2, Policy::Ess, 0.0);
        let nodes = [node(0, Mode::Sleep, 10), node(1, Mode::Sleep, 20)];
        let rates = vec![(0, 3), (1, 20)];
        let d = ess_decide(&cfg, &nodes, &rates);
        assert_eq!(d.transmitter, Some(1));
        assert_eq!(d.new_modes, vec![Mode::Sleep, Mode::Active]);
    }

    #[test]
    fn ties_break_to_lowest_node_id() {
        let cfg = SimConfig::network(3, Policy::Ess, 0.0);
        let nodes = [
            node(0, Mode::Active, 20),
            node(1, Mode::Active, 20),
            node(2, Mode::Active, 20),
        ];
        let d = ess_decide(&cfg, &nodes, &good(3));
        assert_eq!(d.transmitter, Some(0));
    }

    #[test]
    fn empty_queues_idle_the_network() {
        let cfg = SimConfig::network(2, Policy::Ess, 1000.0);
        // One sleeper, one active node, nothing to send: the sleeper stays
        // down and the active node is sent to sleep (its shutdown cost is
        // below a fruitless transmit slot).
        let nodes = [node(0, Mode::Sleep, 0), node(1, Mode::Active, 0)];
        let d = ess_decide(&cfg, &nodes, &good(2));
        assert!(d.idle());
        assert_eq!(d.new_modes, vec![Mode::Sleep, Mode::Sleep]);
    }

    #[test]
    fn losing_candidates_are_sent_to_sleep() {
        let cfg = SimConfig::network(3, Policy::Ess, 1000.0);
        let nodes = [
            node(0, Mode::Active, 50),
            node(1, Mode::Active, 80),
            node(2, Mode::Sleep, 60),
        ];
        let d = ess_decide(&cfg, &nodes, &good(3));
        assert_eq!(d.transmitter, Some(1));
        assert_eq!(d.new_modes, vec![Mode::Sleep, Mode::Active, Mode::Sleep]);
    }

    #[test]
    fn dead_nodes_are_ignored_and_keep_mode() {
        let cfg = SimConfig::network(2, Policy::Ess, 0.0);
        let mut n0 = node(0, Mode::Active, 100);
        n0.alive = false;
        let nodes = [n0, node(1, Mode::Sleep, 5)];
        let d = ess_decide(&cfg, &nodes, &good(2));
        assert_eq!(d.transmitter, Some(1));
        assert_eq!(d.new_modes[0], Mode::Active);
    }

    #[test]
    fn candidate_test_is_strict_but_distributed_wake_is_inclusive() {
        // Free hardware: every weight and threshold collapses to zero. The
        // centralized rule requires a strict win, so a zero-queue network
        // idles; the distributed rule wakes on the (inclusive) threshold
        // and transmits unconditionally.
        let mut cfg = SimConfig::network(1, Policy::Ess, 1000.0);
        cfg.energy = EnergyParams {
            e0_rate_j_per_ms: 0.0,
            c_rate_j_per_ms: 0.0,
            alpha_j_per_packet: 0.0,
            e01_j: 0.0,
            e10_j: 0.0,
            ..EnergyParams::default()
        };
        let nodes = [node(0, Mode::Sleep, 0)];
        assert!(ess_decide(&cfg, &nodes, &good(1)).idle());
        let d = distributed_decide(&cfg, &nodes, &good(1));
        assert_eq!(d.transmitter, Some(0));
        assert_eq!(d.new_modes, vec![Mode::Active]);
        assert_eq!(d.broadcasters, vec![true]);
    }

    #[test]
    fn switch_blind_weights_wake_where_switch_aware_sleep() {
        // At V = 30000 a sleeping node with one queued packet sits between
        // the two wake thresholds: the true charge prices waking at ~1.046
        // packets, the switch-blind one at ~0.970.
        let cfg_ess = SimConfig::network(1, Policy::Ess, 30000.0);
        let nodes = [node(0, Mode::Sleep, 1)];
        let d_ess = ess_decide(&cfg_ess, &nodes, &good(1));
        assert!(d_ess.idle());
        assert_eq!(d_ess.new_modes, vec![Mode::Sleep]);
        let d_bm = benchmark_decide(&cfg_ess, &nodes, &good(1));
        assert_eq!(d_bm.transmitter, Some(0));
        assert_eq!(d_bm.new_modes, vec![Mode::Active]);
    }

    #[test]
    fn periodic_keeps_everyone_active_and_gates_on_positive_weight() {
        let cfg = SimConfig::network(2, Policy::Periodic, 1000.0);
        // mu (q - V alpha): 12 * 4.97 = 59.64 beats 20 * 2.97 = 59.4.
        let nodes = [node(0, Mode::Sleep, 5), node(1, Mode::Sleep, 3)];
        let rates = vec![(1, 12), (0, 20)];
        let d = periodic_decide(&cfg, &nodes, &rates);
        assert_eq!(d.transmitter, Some(0));
        assert_eq!(d.new_modes, vec![Mode::Active, Mode::Active]);

        let empty = [node(0, Mode::Sleep, 0), node(1, Mode::Sleep, 0)];
        let d = periodic_decide(&cfg, &empty, &rates);
        assert!(d.idle());
        assert_eq!(d.new_modes, vec![Mode::Active, Mode::Active]);
    }

    #[test]
    fn distributed_nodes_decide_alone_and_active_ones_broadcast() {
        let cfg = SimConfig::network(3, Policy::Distributed, 1000.0);
        // Thresholds at V=1000 are well under one packet, so any queued
        // node wakes; empty nodes stay down.
        let nodes = [
            node(0, Mode::Sleep, 0),
            node(1, Mode::Sleep, 4),
            node(2, Mode::Active, 7),
        ];
        let d = distributed_decide(&cfg, &nodes, &good(3));
        assert_eq!(d.new_modes, vec![Mode::Sleep, Mode::Active, Mode::Active]);
        assert_eq!(d.broadcasters, vec![false, true, true]);
        // Both active nodes contend; node 2 has the larger weight.
        assert_eq!(d.transmitter, Some(2));
    }

    #[test]
    fn rnd_deterministic_flips_alternate() {
        let mut cfg = SimConfig::network(2, Policy::Ess, 0.0);
        cfg.channel = ChannelModel::fixed(20);
        let params = RndPolicyParams::uniform(2, 1, 1.0, 1.0, 1.0);
        let nodes = [node(0, Mode::Sleep, 3), node(1, Mode::Active, 3)];
        let rates = vec![(0, 20), (0, 20)];
        let d = rnd_decide(&cfg, &params, &nodes, &rates, 0);
        assert_eq!(d.new_modes, vec![Mode::Active, Mode::Sleep]);
        assert_eq!(d.transmitter, Some(0));
        let swapped = [node(0, Mode::Active, 3), node(1, Mode::Sleep, 3)];
        let d = rnd_decide(&cfg, &params, &swapped, &rates, 1);
        assert_eq!(d.new_modes, vec![Mode::Sleep, Mode::Active]);
        assert_eq!(d.transmitter, Some(1));
    }

    #[test]
    fn rnd_zero_attempt_probability_never_transmits() {
        let mut cfg = SimConfig::network(2, Policy::Ess, 0.0);
        cfg.channel = ChannelModel::fixed(20);
        let params = RndPolicyParams::uniform(2, 1, 1.0, 0.0, 0.0);
        let nodes = [node(0, Mode::Sleep, 9), node(1, Mode::Active, 9)];
        let rates = vec![(0, 20), (0, 20)];
        for slot in 0..50 {
            assert!(rnd_decide(&cfg, &params, &nodes, &rates, slot).idle());
        }
    }

    #[test]
    fn shape_check_rejects_bad_tables() {
        let ok = RndPolicyParams::uniform(2, 3, 0.5, 0.5, 0.3);
        assert!(ok.check_shape(2, 3).is_ok());

        let mut wrong_nodes = ok.clone();
        wrong_nodes.p01.pop();
        assert!(wrong_nodes.check_shape(2, 3).unwrap_err().contains("rows"));

        let mut wrong_states = ok.clone();
        wrong_states.p10[1].pop();
        assert!(wrong_states
            .check_shape(2, 3)
            .unwrap_err()
            .contains("channel state"));

        let mut bad_prob = ok.clone();
        bad_prob.pi_tr[0][2] = 1.5;
        assert!(bad_prob
            .check_shape(2, 3)
            .unwrap_err()
            .contains("not a probability"));
    }

    fn scaled(cfg: &SimConfig, factor: f64) -> SimConfig {
        let mut s = cfg.clone();
        s.v_param = cfg.v_param * factor;
        s.energy.e0_rate_j_per_ms /= factor;
        s.energy.c_rate_j_per_ms /= factor;
        s.energy.alpha_j_per_packet /= factor;
        s.energy.e01_j /= factor;
        s.energy.e10_j /= factor;
        s
    }

    proptest! {
        // Scaling V up and all energy magnitudes down by the same power of
        // two leaves every weight product bit-identical, so decisions must
        // not change.
        #[test]
        fn decisions_are_invariant_under_power_of_two_rescaling(
            queues in proptest::collection::vec(0u64..10_000, 1..5),
            modes in proptest::collection::vec(proptest::bool::ANY, 1..5),
            rate_picks in proptest::collection::vec(0usize..4, 1..5),
            v in prop_oneof![Just(250.0), Just(1000.0), Just(4000.0), Just(80_000.0)],
            k in -3i32..=3,
        ) {
            let n = queues.len().min(modes.len()).min(rate_picks.len());
            let cfg = SimConfig::network(n as u32, Policy::Ess, v);
            let cfg2 = scaled(&cfg, (2f64).powi(k));
            let rates: Vec<(usize, u32)> = rate_picks[..n]
                .iter()
                .map(|&i| (i.min(2), [0u32, 5, 12, 20][i]))
                .collect();
            let nodes: Vec<NodeState> = (0..n)
                .map(|i| node(i as u32, if modes[i] { Mode::Active } else { Mode::Sleep }, queues[i]))
                .collect();
            for f in [ess_decide, benchmark_decide, periodic_decide, distributed_decide] {
                prop_assert_eq!(f(&cfg, &nodes, &rates), f(&cfg2, &nodes, &rates));
            }
        }
    }
}
