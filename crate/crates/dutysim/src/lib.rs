//! Discrete-time simulator and policy library for energy-aware sleep/active
//! scheduling in single-hop sensor networks.
//!
//! A set of battery-powered nodes shares one collector over slotted time. Each
//! slot every node is either asleep (cheap) or active (expensive), at most one
//! active node transmits, and mode switches cost energy and time. The crate
//! provides:
//!
//! - a deterministic, seedable slot engine ([`engine`]) with exact per-slot
//!   energy accounting ([`energy`]),
//! - five scheduling policies ([`policies`]): a switching-cost-aware
//!   max-weight rule (`ess`), the same rule blind to switching costs
//!   (`benchmark`), a fixed half-slot duty cycle (`periodic`), a per-node
//!   threshold rule with weight broadcasts (`distributed`), and a stationary
//!   randomized policy (`rnd`),
//! - a brute-force oracle ([`oracle`]) that grid-searches stationary
//!   randomized policies for the minimum-energy point serving a target rate,
//!   used to verify the analytic energy/backlog bounds,
//! - trace metrics ([`metrics`]) and a CSV-reporting CLI ([`cli`]).
//!
//! Every random draw is a pure function of `(seed, stream, node, slot)`, so
//! runs are bit-reproducible across platforms and run order, and paired-seed
//! policy comparisons share identical arrival/channel sample paths.
//!
//! The `parallel` feature (on by default) runs oracle grid searches and sweep
//! batches on a rayon pool; disabling it falls back to sequential loops with
//! bit-identical results.

pub mod cli;
pub mod energy;
pub mod engine;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod policies;
pub mod stochastic;

pub use model::{
    ArrivalModel, ChannelModel, ChannelState, ConfigError, EnergyParams, Mode, NodeState, Policy,
    SimConfig,
};
