//! Per-slot energy accounting.
//!
//! A node's slot energy is determined by its mode transition for the slot
//! plus what it transmitted:
//!
//! - stay asleep: sleep-rate power for the whole slot;
//! - wake (sleep -> active): switching pulse `e01` (unless the
//!   configuration folds it into circuit power), then circuit power for the
//!   remainder of the slot after the wake latency `t01`, plus transmission
//!   energy;
//! - stay active: circuit power for the whole slot plus transmission
//!   energy;
//! - go to sleep (active -> sleep): switching pulse `e10`, then sleep-rate
//!   power for the remainder after the shutdown latency `t10`.
//!
//! Transmission energy is `alpha` joules per packet actually served.
//! Broadcast energy (control traffic for the distributed policy) is metered
//! separately per bit. All category fields are kept apart so reports can
//! attribute consumption; `total_j` is their exact sum.

use crate::model::{EnergyParams, Mode, SimConfig};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EnergyError {
    #[error("node cannot transmit {served} packets while directed to sleep")]
    TransmitWhileAsleep { served: u32 },
}

/// Energy spent by one node (or a whole network, when summed) over one or
/// more slots, split by category.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyBreakdown {
    pub sleep_j: f64,
    pub active_circuit_j: f64,
    pub transmission_j: f64,
    pub switching_j: f64,
    pub broadcast_j: f64,
}

impl EnergyBreakdown {
    pub fn total_j(&self) -> f64 {
        self.sleep_j + self.active_circuit_j + self.transmission_j + self.switching_j
            + self.broadcast_j
    }

    pub fn accumulate(&mut self, other: &EnergyBreakdown) {
        self.sleep_j += other.sleep_j;
        self.active_circuit_j += other.active_circuit_j;
        self.transmission_j += other.transmission_j;
        self.switching_j += other.switching_j;
        self.broadcast_j += other.broadcast_j;
    }
}

/// Packets actually deliverable in the slot. On a wake slot with rate
/// scaling enabled, the radio is only up for `slot - t01` ms, so the channel
/// rate is prorated (rounded down); otherwise the full rate is available.
pub fn effective_service(
    rate_packets_per_slot: u32,
    slot_ms: f64,
    t01_ms: f64,
    waking: bool,
    wake_slot_rate_scaling: bool,
) -> u32 {
    if waking && wake_slot_rate_scaling {
        (rate_packets_per_slot as f64 * (slot_ms - t01_ms) / slot_ms).floor() as u32
    } else {
        rate_packets_per_slot
    }
}

/// Energy for one node over one slot, given its mode transition and the
/// packets it served. `served > 0` is only legal when `new_mode` is active.
pub fn slot_energy(
    params: &EnergyParams,
    slot_ms: f64,
    prev_mode: Mode,
    new_mode: Mode,
    served: u32,
    include_e01_on_wake: bool,
) -> Result<EnergyBreakdown, EnergyError> {
    if new_mode == Mode::Sleep && served > 0 {
        return Err(EnergyError::TransmitWhileAsleep { served });
    }
    let mut e = EnergyBreakdown::default();
    match (prev_mode, new_mode) {
        (Mode::Sleep, Mode::Sleep) => {
            e.sleep_j = slot_ms * params.e0_rate_j_per_ms;
        }
        (Mode::Sleep, Mode::Active) => {
            if include_e01_on_wake {
                e.switching_j = params.e01_j;
            }
            e.active_circuit_j = (slot_ms - params.t01_ms) * params.c_rate_j_per_ms;
            e.transmission_j = params.alpha_j_per_packet * served as f64;
        }
        (Mode::Active, Mode::Active) => {
            e.active_circuit_j = slot_ms * params.c_rate_j_per_ms;
            e.transmission_j = params.alpha_j_per_packet * served as f64;
        }
        (Mode::Active, Mode::Sleep) => {
            e.switching_j = params.e10_j;
            e.sleep_j = (slot_ms - params.t10_ms) * params.e0_rate_j_per_ms;
        }
    }
    Ok(e)
}

/// Energy for one slot of the fixed-duty-cycle policy: half the slot asleep,
/// half active (less the wake latency), paying both switching pulses every
/// slot, plus transmission energy if the node serves.
pub fn periodic_slot_energy(params: &EnergyParams, slot_ms: f64, served: u32) -> EnergyBreakdown {
    EnergyBreakdown {
        sleep_j: slot_ms / 2.0 * params.e0_rate_j_per_ms,
        active_circuit_j: (slot_ms / 2.0 - params.t01_ms) * params.c_rate_j_per_ms,
        transmission_j: params.alpha_j_per_packet * served as f64,
        switching_j: params.e01_j + params.e10_j,
        broadcast_j: 0.0,
    }
}

/// Energy to broadcast one control message of the configured length.
pub fn broadcast_energy(params: &EnergyParams) -> f64 {
    params.broadcast_bits_per_weight_msg as f64 * params.eb_j_per_bit
}

/// Largest possible one-slot energy for a single node under this
/// configuration (the max over the four transition cases at the top channel
/// rate).
pub fn per_node_max_slot_energy(cfg: &SimConfig) -> f64 {
    let mu_max = cfg.channel.max_rate();
    [
        (Mode::Sleep, Mode::Sleep, 0),
        (Mode::Sleep, Mode::Active, mu_max),
        (Mode::Active, Mode::Active, mu_max),
        (Mode::Active, Mode::Sleep, 0),
    ]
    .into_iter()
    .map(|(p, n, served)| {
        slot_energy(&cfg.energy, cfg.slot_ms, p, n, served, cfg.include_e01_on_wake)
            .expect("case table never transmits while asleep")
            .total_j()
    })
    .fold(0.0, f64::max)
}

/// Upper bound on total network energy spent in any single slot.
pub fn h_max(cfg: &SimConfig) -> f64 {
    cfg.node_count as f64 * per_node_max_slot_energy(cfg)
}
