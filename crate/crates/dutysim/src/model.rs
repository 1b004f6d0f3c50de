//! Configuration and state types shared by the engine, policies, and oracle.
//!
//! A simulation is described by one [`SimConfig`]: node count, slot length,
//! energy parameters, channel and arrival models, the scheduling policy, and
//! the RNG seed. [`validate_config`] checks the whole document and reports
//! every violation, not just the first, so a bad config round-trips into a
//! complete error list.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::policies::RndPolicyParams;

/// Radio mode of a node during one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Sleep,
    Active,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Sleep => "sleep",
            Mode::Active => "active",
        }
    }
}

/// Energy and timing parameters shared by all nodes.
///
/// Rates are per millisecond, one-shot switching costs in joules. The
/// defaults model a short-range radio node: a sleeping node draws almost
/// nothing, an active circuit draws three orders of magnitude more, and each
/// transmitted packet costs a fixed amount on top.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyParams {
    /// Sleep-mode draw, J per ms.
    pub e0_rate_j_per_ms: f64,
    /// Active-mode circuit draw, J per ms.
    pub c_rate_j_per_ms: f64,
    /// Transmission cost, J per packet.
    pub alpha_j_per_packet: f64,
    /// One-shot sleep-to-active switching cost, J.
    pub e01_j: f64,
    /// One-shot active-to-sleep switching cost, J.
    pub e10_j: f64,
    /// Sleep-to-active switching time, ms.
    pub t01_ms: f64,
    /// Active-to-sleep switching time, ms.
    pub t10_ms: f64,
    /// Broadcast cost, J per bit (distributed policy only).
    pub eb_j_per_bit: f64,
    /// Size of one weight-broadcast message, bits (distributed policy only).
    #[serde(default = "default_broadcast_bits")]
    pub broadcast_bits_per_weight_msg: u32,
}

fn default_broadcast_bits() -> u32 {
    128
}

impl Default for EnergyParams {
    fn default() -> Self {
        EnergyParams {
            e0_rate_j_per_ms: 0.015e-6,
            c_rate_j_per_ms: 36e-6,
            alpha_j_per_packet: 30e-6,
            e01_j: 25.2e-6,
            e10_j: 2.85e-6,
            t01_ms: 0.7,
            t10_ms: 0.01,
            eb_j_per_bit: 8.33e-8,
            broadcast_bits_per_weight_msg: 128,
        }
    }
}

/// One channel state: a label, the service rate a transmitter gets in this
/// state, and the per-slot probability of drawing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelState {
    pub label: String,
    pub rate_packets_per_slot: u32,
    pub probability: f64,
}

/// I.i.d. per-node, per-slot channel model over a finite state set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub states: Vec<ChannelState>,
}

impl ChannelModel {
    /// Three equally likely states at 20/12/5 packets per slot.
    pub fn three_state_default() -> Self {
        let p = 1.0 / 3.0;
        ChannelModel {
            states: vec![
                ChannelState {
                    label: "good".into(),
                    rate_packets_per_slot: 20,
                    probability: p,
                },
                ChannelState {
                    label: "medium".into(),
                    rate_packets_per_slot: 12,
                    probability: p,
                },
                ChannelState {
                    label: "bad".into(),
                    rate_packets_per_slot: 5,
                    probability: p,
                },
            ],
        }
    }

    /// Single deterministic state at the given rate.
    pub fn fixed(rate_packets_per_slot: u32) -> Self {
        ChannelModel {
            states: vec![ChannelState {
                label: "fixed".into(),
                rate_packets_per_slot,
                probability: 1.0,
            }],
        }
    }

    /// Largest service rate over all states.
    pub fn max_rate(&self) -> u32 {
        self.states
            .iter()
            .map(|s| s.rate_packets_per_slot)
            .max()
            .unwrap_or(0)
    }
}

/// One support point of an arrival batch distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrivalAtom {
    pub packet_count: u32,
    pub probability: f64,
}

/// Per-slot arrival model: every slot each node independently draws a batch
/// size from a finite distribution. `per_node`, when present, overrides the
/// shared distribution node by node (index == node id).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrivalModel {
    pub distribution: Vec<ArrivalAtom>,
    #[serde(default)]
    pub per_node: Option<Vec<Vec<ArrivalAtom>>>,
    #[serde(default = "default_packet_size")]
    pub packet_size_bytes: u32,
}

fn default_packet_size() -> u32 {
    45
}

impl ArrivalModel {
    /// Batch of 8 with probability 1/2, else nothing: mean 4 packets/slot.
    pub fn default_batch() -> Self {
        ArrivalModel {
            distribution: vec![
                ArrivalAtom {
                    packet_count: 8,
                    probability: 0.5,
                },
                ArrivalAtom {
                    packet_count: 0,
                    probability: 0.5,
                },
            ],
            per_node: None,
            packet_size_bytes: 45,
        }
    }

    /// No arrivals ever.
    pub fn none() -> Self {
        ArrivalModel {
            distribution: vec![ArrivalAtom {
                packet_count: 0,
                probability: 1.0,
            }],
            per_node: None,
            packet_size_bytes: 45,
        }
    }

    /// The distribution that applies to `node`.
    pub fn distribution_for(&self, node: u32) -> &[ArrivalAtom] {
        match &self.per_node {
            Some(per) => per
                .get(node as usize)
                .map(|d| d.as_slice())
                .unwrap_or(&self.distribution),
            None => &self.distribution,
        }
    }

    /// Mean arrival rate of `node`, packets per slot.
    pub fn mean_rate(&self, node: u32) -> f64 {
        self.distribution_for(node)
            .iter()
            .map(|a| a.packet_count as f64 * a.probability)
            .sum()
    }

    /// Largest batch any node can receive in one slot.
    pub fn max_batch(&self, node_count: u32) -> u32 {
        (0..node_count)
            .flat_map(|n| self.distribution_for(n).iter())
            .map(|a| a.packet_count)
            .max()
            .unwrap_or(0)
    }
}

/// Scheduling policy selector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Switching-cost-aware max-weight scheduling (the headline policy).
    Ess,
    /// Same rule with switching energies zeroed inside the decision weights.
    Benchmark,
    /// Fixed half-slot sleep / half-slot active duty cycle.
    Periodic,
    /// Per-node threshold decisions plus a weight broadcast from every
    /// active node; transmitter picked from the active set.
    Distributed,
    /// Stationary randomized mode flips and transmit attempts.
    Rnd(RndPolicyParams),
}

impl Policy {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::Ess => "ess",
            Policy::Benchmark => "benchmark",
            Policy::Periodic => "periodic",
            Policy::Distributed => "distributed",
            Policy::Rnd(_) => "rnd",
        }
    }
}

/// Complete description of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub node_count: u32,
    /// Slot length in milliseconds.
    pub slot_ms: f64,
    /// Number of slots to simulate; `null`/absent runs until network death.
    #[serde(default)]
    pub horizon_slots: Option<u64>,
    /// Starting battery per node, joules.
    pub initial_battery_j: f64,
    /// Energy-vs-backlog tradeoff weight (larger favors energy).
    pub v_param: f64,
    pub policy: Policy,
    pub energy: EnergyParams,
    pub channel: ChannelModel,
    pub arrivals: ArrivalModel,
    pub seed: u64,
    /// When true, packets served in a wake-up slot are scaled down by the
    /// fraction of the slot actually spent active.
    #[serde(default)]
    pub wake_slot_rate_scaling: bool,
    /// When true (default), the wake-up slot's energy total includes the
    /// sleep-to-active switching charge.
    #[serde(default = "default_true")]
    pub include_e01_on_wake: bool,
    /// When true, batteries are never debited and nodes never die; used by
    /// bound-verification runs.
    #[serde(default)]
    pub infinite_battery: bool,
}

fn default_true() -> bool {
    true
}

impl SimConfig {
    /// A network of `node_count` nodes with the default energy profile,
    /// three-state channel, and mean-4 batch arrivals.
    pub fn network(node_count: u32, policy: Policy, v_param: f64) -> Self {
        SimConfig {
            node_count,
            slot_ms: 2.0,
            horizon_slots: None,
            initial_battery_j: 10.0,
            v_param,
            policy,
            energy: EnergyParams::default(),
            channel: ChannelModel::three_state_default(),
            arrivals: ArrivalModel::default_batch(),
            seed: 1,
            wake_slot_rate_scaling: false,
            include_e01_on_wake: true,
            infinite_battery: false,
        }
    }

    /// Mean arrival rate per node, packets per slot.
    pub fn lambda(&self) -> Vec<f64> {
        (0..self.node_count)
            .map(|n| self.arrivals.mean_rate(n))
            .collect()
    }
}

/// Live per-node state tracked by the engine.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeState {
    pub node_id: u32,
    /// Mode after the most recent decision.
    pub mode: Mode,
    /// Mode entering the current slot.
    pub prev_mode: Mode,
    pub queue_packets: u64,
    pub battery_j: f64,
    pub alive: bool,
}

/// One violation found by [`validate_config`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("energy parameter {field} is negative")]
    NegativeEnergy { field: &'static str },
    #[error("{what} probabilities sum to {sum:.12}, expected 1")]
    BadProbabilitySum { what: String, sum: f64 },
    #[error("switching time {field} = {value_ms} ms does not fit in a {slot_ms} ms slot")]
    SwitchingExceedsSlot {
        field: &'static str,
        value_ms: f64,
        slot_ms: f64,
    },
    #[error("channel model has no states")]
    EmptyChannelSet,
    #[error("{field} must be positive")]
    NonPositive { field: &'static str },
    #[error("invalid policy parameters: {0}")]
    InvalidPolicyParams(String),
}

const PROB_SUM_TOL: f64 = 1e-9;

fn check_distribution(what: &str, atoms: &[ArrivalAtom], errors: &mut Vec<ConfigError>) {
    if atoms.is_empty() {
        errors.push(ConfigError::BadProbabilitySum {
            what: format!("{what} (empty distribution)"),
            sum: 0.0,
        });
        return;
    }
    let sum: f64 = atoms.iter().map(|a| a.probability).sum();
    let any_negative = atoms.iter().any(|a| a.probability < 0.0);
    if any_negative || (sum - 1.0).abs() > PROB_SUM_TOL {
        errors.push(ConfigError::BadProbabilitySum {
            what: what.to_string(),
            sum,
        });
    }
}

/// Check every structural invariant of `cfg`, returning the full list of
/// violations. A valid config returns `Ok(())`.
pub fn validate_config(cfg: &SimConfig) -> Result<(), Vec<ConfigError>> {
    let mut errors = Vec::new();

    if cfg.node_count == 0 {
        errors.push(ConfigError::NonPositive {
            field: "node_count",
        });
    }
    if !(cfg.slot_ms > 0.0) {
        errors.push(ConfigError::NonPositive { field: "slot_ms" });
    }
    if !(cfg.initial_battery_j > 0.0) {
        errors.push(ConfigError::NonPositive {
            field: "initial_battery_j",
        });
    }
    if cfg.v_param < 0.0 {
        errors.push(ConfigError::NonPositive { field: "v_param" });
    }

    let e = &cfg.energy;
    for (field, value) in [
        ("e0_rate_j_per_ms", e.e0_rate_j_per_ms),
        ("c_rate_j_per_ms", e.c_rate_j_per_ms),
        ("alpha_j_per_packet", e.alpha_j_per_packet),
        ("e01_j", e.e01_j),
        ("e10_j", e.e10_j),
        ("eb_j_per_bit", e.eb_j_per_bit),
    ] {
        if value < 0.0 {
            errors.push(ConfigError::NegativeEnergy { field });
        }
    }
    for (field, value) in [("t01_ms", e.t01_ms), ("t10_ms", e.t10_ms)] {
        if value < 0.0 {
            errors.push(ConfigError::NegativeEnergy { field });
        }
        if cfg.slot_ms > 0.0 && value > cfg.slot_ms {
            errors.push(ConfigError::SwitchingExceedsSlot {
                field,
                value_ms: value,
                slot_ms: cfg.slot_ms,
            });
        }
    }

    if cfg.channel.states.is_empty() {
        errors.push(ConfigError::EmptyChannelSet);
    } else {
        let sum: f64 = cfg.channel.states.iter().map(|s| s.probability).sum();
        let any_negative = cfg.channel.states.iter().any(|s| s.probability < 0.0);
        if any_negative || (sum - 1.0).abs() > PROB_SUM_TOL {
            errors.push(ConfigError::BadProbabilitySum {
                what: "channel state".to_string(),
                sum,
            });
        }
    }

    check_distribution("arrival batch", &cfg.arrivals.distribution, &mut errors);
    if let Some(per) = &cfg.arrivals.per_node {
        if per.len() != cfg.node_count as usize {
            errors.push(ConfigError::InvalidPolicyParams(format!(
                "per_node arrivals cover {} nodes, config has {}",
                per.len(),
                cfg.node_count
            )));
        }
        for (n, dist) in per.iter().enumerate() {
            check_distribution(&format!("arrival batch (node {n})"), dist, &mut errors);
        }
    }

    if let Policy::Rnd(params) = &cfg.policy {
        if let Err(msg) = params.check_shape(cfg.node_count, cfg.channel.states.len()) {
            errors.push(ConfigError::InvalidPolicyParams(msg));
        }
    }

    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

/// Quadratic drift constant `(node_count / 2) * (mu_max^2 + r_max^2)` used by
/// the backlog and energy bounds: `mu_max` is the largest channel rate,
/// `r_max` the largest arrival batch.
pub fn compute_b(cfg: &SimConfig) -> f64 {
    let mu_max = cfg.channel.max_rate() as f64;
    let r_max = cfg.arrivals.max_batch(cfg.node_count) as f64;
    cfg.node_count as f64 / 2.0 * (mu_max * mu_max + r_max * r_max)
}
