//! Discrete-time simulation engine.
//!
//! Slot order: channel states are drawn, then arrivals, then the policy
//! decides on the pre-arrival queue snapshot (a decision in slot `t` sees
//! `Q(t)`, this slot's channel rates, and current modes — never this
//! slot's arrivals). The transmitter's offered service is subtracted
//! (queues never go negative), arrivals are added, and energy is debited.
//!
//! `served` is the offered rate — the packets the channel could carry, not
//! capped by queue content — which is also what the energy model charges
//! transmission for.
//!
//! Battery accounting: a node that cannot afford its slot's energy freezes
//! — it does nothing, pays nothing, keeps its residual charge, and is dead
//! from that slot on. A node that lands exactly on zero completes the slot
//! and is dead from the next. Dead nodes still produce one record per slot
//! (zero activity, frozen queue and battery) so every run yields exactly
//! `slots x node_count` records under a fixed horizon; without a horizon
//! the run ends when the last node dies.

use crate::energy::{broadcast_energy, effective_service, periodic_slot_energy, slot_energy, EnergyBreakdown};
use crate::model::{validate_config, Mode, NodeState, Policy, SimConfig};
use crate::policies::{decide, SlotDecision};
use crate::stochastic::{sample_arrivals, sample_channels};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("run would never terminate: no horizon and battery is infinite")]
    UnboundedRun,
}

/// One node's outcome for one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotRecord {
    pub slot: u64,
    pub node: u32,
    /// Mode the node occupied this slot (the decision's directive).
    pub mode: Mode,
    /// "01" on a wake transition, "10" on a shutdown, else "none".
    pub switch: &'static str,
    /// Offered service (packets) if this node held the channel.
    pub served: u32,
    pub arrivals: u32,
    /// Queue after service and arrivals.
    pub queue: u64,
    /// Battery after this slot's debit.
    pub battery_j: f64,
    pub e_sleep: f64,
    pub e_active: f64,
    pub e_tx: f64,
    pub e_switch: f64,
    pub e_bcast: f64,
    /// True when the policy granted nobody the channel this slot.
    pub idle_flag: bool,
    /// False once the node is dead (including its freeze slot).
    pub alive: bool,
}

/// Death bookkeeping for a finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// First slot each node was dead in (`None` = survived the horizon).
    pub death_slots: Vec<Option<u64>>,
    pub slots_run: u64,
}

impl RunOutcome {
    /// Slot the first node died in.
    pub fn first_death(&self) -> Option<u64> {
        self.death_slots.iter().flatten().min().copied()
    }

    /// Slots until the whole network was dead (`None` while any node
    /// survives).
    pub fn network_lifetime(&self) -> Option<u64> {
        if self.death_slots.iter().any(|d| d.is_none()) {
            None
        } else {
            self.death_slots.iter().flatten().max().copied()
        }
    }
}

/// A fully materialized run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub node_count: u32,
    pub records: Vec<SlotRecord>,
    pub outcome: RunOutcome,
}

fn switch_label(prev: Mode, new: Mode) -> &'static str {
    match (prev, new) {
        (Mode::Sleep, Mode::Active) => "01",
        (Mode::Active, Mode::Sleep) => "10",
        _ => "none",
    }
}

/// Run the configured simulation, feeding every record to `on_record` in
/// `(slot, node)` order.
pub fn run_with<F: FnMut(&SlotRecord)>(
    cfg: &SimConfig,
    mut on_record: F,
) -> Result<RunOutcome, EngineError> {
    if let Err(errors) = validate_config(cfg) {
        let joined = errors
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join("; ");
        return Err(EngineError::InvalidConfig(joined));
    }
    if cfg.horizon_slots.is_none() && cfg.infinite_battery {
        return Err(EngineError::UnboundedRun);
    }

    let n = cfg.node_count as usize;
    let mut nodes: Vec<NodeState> = (0..cfg.node_count)
        .map(|id| NodeState {
            node_id: id,
            mode: Mode::Sleep,
            prev_mode: Mode::Sleep,
            queue_packets: 0,
            battery_j: cfg.initial_battery_j,
            alive: true,
        })
        .collect();
    let mut death_slots: Vec<Option<u64>> = vec![None; n];
    let mut alive_count = n;
    let bcast_cost = broadcast_energy(&cfg.energy);

    let mut slot = 0u64;
    loop {
        match cfg.horizon_slots {
            Some(h) if slot >= h => break,
            None if alive_count == 0 => break,
            _ => {}
        }

        let rates = sample_channels(cfg, slot);
        let arrivals = sample_arrivals(cfg, slot);
        let decision: SlotDecision = decide(cfg, &nodes, &rates, slot);
        let idle_flag = decision.idle();

        for idx in 0..n {
            let node = &mut nodes[idx];
            if !node.alive {
                on_record(&SlotRecord {
                    slot,
                    node: node.node_id,
                    mode: node.mode,
                    switch: "none",
                    served: 0,
                    arrivals: 0,
                    queue: node.queue_packets,
                    battery_j: node.battery_j,
                    e_sleep: 0.0,
                    e_active: 0.0,
                    e_tx: 0.0,
                    e_switch: 0.0,
                    e_bcast: 0.0,
                    idle_flag,
                    alive: false,
                });
                continue;
            }

            let prev = node.mode;
            let new_mode = decision.new_modes[idx];
            let is_tx = decision.transmitter == Some(node.node_id);
            let rate = rates[idx].1;
            let woke = prev == Mode::Sleep && new_mode == Mode::Active;
            let served = if is_tx {
                effective_service(rate, cfg.slot_ms, cfg.energy.t01_ms, woke, cfg.wake_slot_rate_scaling)
            } else {
                0
            };

            let (mut energy, switch): (EnergyBreakdown, &'static str) =
                if matches!(cfg.policy, Policy::Periodic) {
                    // The periodic policy cycles within the slot; its
                    // composite cost already contains both switching pulses
                    // and the record carries no edge label.
                    (periodic_slot_energy(&cfg.energy, cfg.slot_ms, served), "none")
                } else {
                    (
                        slot_energy(
                            &cfg.energy,
                            cfg.slot_ms,
                            prev,
                            new_mode,
                            served,
                            cfg.include_e01_on_wake,
                        )
                        .expect("policies only grant the channel to active-directed nodes"),
                        switch_label(prev, new_mode),
                    )
                };
            if decision.broadcasters[idx] {
                energy.broadcast_j += bcast_cost;
            }
            let cost = energy.total_j();

            if !cfg.infinite_battery && cost > node.battery_j {
                // Freeze: the node cannot fund the directed action and is
                // dead from this slot on, retaining its residual charge.
                node.alive = false;
                death_slots[idx] = Some(slot);
                alive_count -= 1;
                on_record(&SlotRecord {
                    slot,
                    node: node.node_id,
                    mode: node.mode,
                    switch: "none",
                    served: 0,
                    arrivals: 0,
                    queue: node.queue_packets,
                    battery_j: node.battery_j,
                    e_sleep: 0.0,
                    e_active: 0.0,
                    e_tx: 0.0,
                    e_switch: 0.0,
                    e_bcast: 0.0,
                    idle_flag,
                    alive: false,
                });
                continue;
            }

            node.prev_mode = prev;
            node.mode = new_mode;
            node.queue_packets =
                node.queue_packets.saturating_sub(served as u64) + arrivals[idx] as u64;
            if !cfg.infinite_battery {
                node.battery_j -= cost;
            }
            on_record(&SlotRecord {
                slot,
                node: node.node_id,
                mode: new_mode,
                switch,
                served,
                arrivals: arrivals[idx],
                queue: node.queue_packets,
                battery_j: node.battery_j,
                e_sleep: energy.sleep_j,
                e_active: energy.active_circuit_j,
                e_tx: energy.transmission_j,
                e_switch: energy.switching_j,
                e_bcast: energy.broadcast_j,
                idle_flag,
                alive: true,
            });
            if !cfg.infinite_battery && node.battery_j <= 0.0 {
                // Landed exactly on empty: this slot counted, the next
                // does not.
                node.alive = false;
                death_slots[idx] = Some(slot + 1);
                alive_count -= 1;
            }
        }

        slot += 1;
    }

    Ok(RunOutcome {
        death_slots,
        slots_run: slot,
    })
}

/// Run and materialize every record.
pub fn run(cfg: &SimConfig) -> Result<Trace, EngineError> {
    let mut records = Vec::new();
    let outcome = run_with(cfg, |r| records.push(r.clone()))?;
    Ok(Trace {
        node_count: cfg.node_count,
        records,
        outcome,
    })
}
