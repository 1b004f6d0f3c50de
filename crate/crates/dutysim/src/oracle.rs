//! Minimum-energy stationary randomized policies.
//!
//! A stationary randomized policy is a [`RndPolicyParams`] table: per node
//! and channel state, a wake probability, a sleep probability, and a
//! transmit-attempt probability (lowest node id wins a contested slot).
//! Because mode chains are two-state Markov chains driven by iid channel
//! draws, long-run service rates and energy have a closed form, evaluated
//! here exactly via stationary mode splits and lowest-id-wins prefix
//! products. A direct simulation evaluator cross-checks it.
//!
//! [`minimize_energy`] exhaustively scans the probability grid for the
//! cheapest policy that covers every node's mean arrival rate, subject to a
//! shared-medium contention budget: within each channel state the attempt
//! probabilities summed over nodes may not exceed one. The scan is
//! deterministic regardless of parallelism — ties resolve to the smallest
//! grid index — and refuses grids above a fixed point budget rather than
//! running forever. [`stability_margin`] scans the same family for the best
//! achievable worst-node service slack.
//!
//! Closed-form results describe steady state; simulations start asleep, so
//! short runs carry a warm-up bias that fades with horizon.

use crate::energy::slot_energy;
use crate::engine::run_with;
use crate::model::{Mode, Policy, SimConfig};
use crate::policies::RndPolicyParams;
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Hard cap on grid points a single scan may enumerate.
pub const MAX_GRID_POINTS: f64 = 3e8;

const RATE_SLACK_REL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("grid step {0} must lie in (0, 1] and evenly divide the unit interval")]
    BadGridStep(f64),
    #[error("grid has {points:.3e} points, over the {limit:.0e} budget; coarsen the step or shrink the instance")]
    GridTooLarge { points: f64, limit: f64 },
    #[error("no stationary policy on the grid covers the arrival rates (best worst-node slack: {best_margin} packets/slot)")]
    InfeasibleRate { best_margin: f64 },
    #[error("closed form does not model {0}")]
    Unsupported(String),
    #[error("simulation failed: {0}")]
    Sim(String),
}

/// Long-run per-slot behavior of one stationary randomized policy.
#[derive(Debug, Clone, PartialEq)]
pub struct RndEvaluation {
    /// Offered packets per slot each node wins the channel for.
    pub per_node_service_rate: Vec<f64>,
    pub per_node_energy_j_per_slot: Vec<f64>,
    pub network_energy_j_per_slot: f64,
}

/// Outcome of a grid scan.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub params: RndPolicyParams,
    pub evaluation: RndEvaluation,
    pub grid_step: f64,
    pub points_scanned: u64,
}

/// Instance constants the closed form needs.
struct Env {
    nodes: usize,
    states: usize,
    state_probs: Vec<f64>,
    state_rates: Vec<f64>,
    lambdas: Vec<f64>,
    e_ss: f64,
    e_sa_base: f64,
    e_aa_base: f64,
    e_as: f64,
    alpha: f64,
}

fn env_from(cfg: &SimConfig) -> Result<Env, OracleError> {
    if cfg.wake_slot_rate_scaling {
        return Err(OracleError::Unsupported(
            "wake-slot rate scaling".to_string(),
        ));
    }
    let base = |prev, new| {
        slot_energy(&cfg.energy, cfg.slot_ms, prev, new, 0, cfg.include_e01_on_wake)
            .expect("zero service never transmits")
            .total_j()
    };
    Ok(Env {
        nodes: cfg.node_count as usize,
        states: cfg.channel.states.len(),
        state_probs: cfg.channel.states.iter().map(|s| s.probability).collect(),
        state_rates: cfg
            .channel
            .states
            .iter()
            .map(|s| s.rate_packets_per_slot as f64)
            .collect(),
        lambdas: (0..cfg.node_count).map(|n| cfg.arrivals.mean_rate(n)).collect(),
        e_ss: base(Mode::Sleep, Mode::Sleep),
        e_sa_base: base(Mode::Sleep, Mode::Active),
        e_aa_base: base(Mode::Active, Mode::Active),
        e_as: base(Mode::Active, Mode::Sleep),
        alpha: cfg.energy.alpha_j_per_packet,
    })
}

/// Evaluate one policy in closed form. `visit` receives each node's
/// achieved service rate and per-slot energy; the return is `(network
/// energy, worst-node slack, rates covered, contention budget respected)`.
fn closed_form_core<C, V>(env: &Env, cell: C, mut visit: V) -> (f64, f64, bool, bool)
where
    C: Fn(usize, usize) -> (f64, f64, f64),
    V: FnMut(usize, f64, f64),
{
    let mut prefix = 1.0;
    let mut energy = 0.0;
    let mut margin = f64::INFINITY;
    let mut rates_ok = true;
    for n in 0..env.nodes {
        let mut p01_eff = 0.0;
        let mut p10_eff = 0.0;
        for k in 0..env.states {
            let (p01, p10, _) = cell(n, k);
            p01_eff += env.state_probs[k] * p01;
            p10_eff += env.state_probs[k] * p10;
        }
        // Stationary active share; a chain that never wakes stays in its
        // initial (sleeping) mode.
        let pi_a = if p01_eff == 0.0 {
            0.0
        } else {
            p01_eff / (p01_eff + p10_eff)
        };
        let pi_s = 1.0 - pi_a;
        let mut claim = 0.0;
        let mut gross = 0.0;
        for k in 0..env.states {
            let (p01, p10, pi_tr) = cell(n, k);
            let active_prob = pi_s * p01 + pi_a * (1.0 - p10);
            claim += env.state_probs[k] * active_prob * pi_tr;
            gross += env.state_probs[k] * active_prob * pi_tr * env.state_rates[k];
        }
        let achieved = prefix * gross;
        prefix *= 1.0 - claim;
        let e_base = pi_s * ((1.0 - p01_eff) * env.e_ss + p01_eff * env.e_sa_base)
            + pi_a * ((1.0 - p10_eff) * env.e_aa_base + p10_eff * env.e_as);
        let e_node = e_base + env.alpha * achieved;
        energy += e_node;
        margin = margin.min(achieved - env.lambdas[n]);
        rates_ok &= achieved >= env.lambdas[n] * (1.0 - RATE_SLACK_REL);
        visit(n, achieved, e_node);
    }
    let mut contention_ok = true;
    for k in 0..env.states {
        let total: f64 = (0..env.nodes).map(|n| cell(n, k).2).sum();
        if total > 1.0 + 1e-12 {
            contention_ok = false;
            break;
        }
    }
    (energy, margin, rates_ok, contention_ok)
}

/// Exact long-run service rates and energy of `params` on `cfg`'s
/// environment (the configured policy field is ignored).
pub fn evaluate_closed_form(
    cfg: &SimConfig,
    params: &RndPolicyParams,
) -> Result<RndEvaluation, OracleError> {
    let env = env_from(cfg)?;
    params
        .check_shape(cfg.node_count, env.states)
        .map_err(OracleError::Unsupported)?;
    let mut rates = vec![0.0; env.nodes];
    let mut energies = vec![0.0; env.nodes];
    let (network, _, _, _) = closed_form_core(
        &env,
        |n, k| (params.p01[n][k], params.p10[n][k], params.pi_tr[n][k]),
        |n, achieved, e| {
            rates[n] = achieved;
            energies[n] = e;
        },
    );
    Ok(RndEvaluation {
        per_node_service_rate: rates,
        per_node_energy_j_per_slot: energies,
        network_energy_j_per_slot: network,
    })
}

/// Measure the same quantities by running the engine (infinite battery,
/// fixed horizon).
pub fn evaluate_simulated(
    cfg: &SimConfig,
    params: &RndPolicyParams,
    horizon: u64,
    seed: u64,
) -> Result<RndEvaluation, OracleError> {
    let mut sim = cfg.clone();
    sim.policy = Policy::Rnd(params.clone());
    sim.infinite_battery = true;
    sim.horizon_slots = Some(horizon);
    sim.seed = seed;
    let n = sim.node_count as usize;
    let mut served = vec![0u64; n];
    let mut energy = vec![0.0f64; n];
    let outcome = run_with(&sim, |r| {
        let i = r.node as usize;
        served[i] += r.served as u64;
        energy[i] += r.e_sleep + r.e_active + r.e_tx + r.e_switch + r.e_bcast;
    })
    .map_err(|e| OracleError::Sim(e.to_string()))?;
    let slots = outcome.slots_run.max(1) as f64;
    let per_node_energy: Vec<f64> = energy.iter().map(|e| e / slots).collect();
    Ok(RndEvaluation {
        per_node_service_rate: served.iter().map(|&s| s as f64 / slots).collect(),
        network_energy_j_per_slot: per_node_energy.iter().sum(),
        per_node_energy_j_per_slot: per_node_energy,
    })
}

struct Grid {
    axis: Vec<f64>,
    /// Triples per cell: axis^3, decoded p01-fastest then p10 then pi_tr.
    cell_combos: u64,
    total: u64,
}

impl Grid {
    fn build(cfg: &SimConfig, step: f64) -> Result<Grid, OracleError> {
        if !(step > 0.0 && step <= 1.0) {
            return Err(OracleError::BadGridStep(step));
        }
        let steps = (1.0 / step).round();
        if ((steps * step) - 1.0).abs() > 1e-9 {
            return Err(OracleError::BadGridStep(step));
        }
        let p = steps as usize + 1;
        let axis: Vec<f64> = (0..p)
            .map(|i| if i == p - 1 { 1.0 } else { i as f64 * step })
            .collect();
        let cell_combos = (p * p * p) as u64;
        let cells = cfg.node_count as usize * cfg.channel.states.len();
        let total_f = (cell_combos as f64).powi(cells as i32);
        if total_f > MAX_GRID_POINTS {
            return Err(OracleError::GridTooLarge {
                points: total_f,
                limit: MAX_GRID_POINTS,
            });
        }
        let total = cell_combos.pow(cells as u32);
        Ok(Grid {
            axis,
            cell_combos,
            total,
        })
    }

    /// The `(p01, p10, pi_tr)` triple of cell `node * states + state` at
    /// flat point `idx`.
    #[inline]
    fn triple(&self, idx: u64, cell: usize) -> (f64, f64, f64) {
        let mut t = idx;
        for _ in 0..cell {
            t /= self.cell_combos;
        }
        let t = (t % self.cell_combos) as usize;
        let p = self.axis.len();
        (self.axis[t % p], self.axis[(t / p) % p], self.axis[t / (p * p)])
    }

    fn params_at(&self, idx: u64, nodes: usize, states: usize) -> RndPolicyParams {
        let mut params = RndPolicyParams::uniform(nodes as u32, states, 0.0, 0.0, 0.0);
        for n in 0..nodes {
            for k in 0..states {
                let (p01, p10, pi_tr) = self.triple(idx, n * states + k);
                params.p01[n][k] = p01;
                params.p10[n][k] = p10;
                params.pi_tr[n][k] = pi_tr;
            }
        }
        params
    }
}

/// Scan accumulator: cheapest feasible point by `(energy, index)` order,
/// plus the best worst-node slack over the whole family.
#[derive(Debug, Clone, Copy)]
struct ScanBest {
    energy: f64,
    idx: Option<u64>,
    margin: f64,
}

impl ScanBest {
    fn empty() -> ScanBest {
        ScanBest {
            energy: f64::INFINITY,
            idx: None,
            margin: f64::NEG_INFINITY,
        }
    }

    fn absorb(mut self, env: &Env, grid: &Grid, idx: u64) -> ScanBest {
        let states = env.states;
        let (energy, margin, rates_ok, contention_ok) = closed_form_core(
            env,
            |n, k| grid.triple(idx, n * states + k),
            |_, _, _| {},
        );
        if contention_ok {
            self.margin = self.margin.max(margin);
            if rates_ok
                && (energy < self.energy
                    || (energy == self.energy && Some(idx) < self.idx.or(Some(u64::MAX))))
            {
                self.energy = energy;
                self.idx = Some(idx);
            }
        }
        self
    }

    #[cfg(feature = "parallel")]
    fn merge(a: ScanBest, b: ScanBest) -> ScanBest {
        let mut out = a;
        out.margin = a.margin.max(b.margin);
        let better = match (a.idx, b.idx) {
            (None, _) => true,
            (Some(ai), Some(bi)) => {
                b.energy < a.energy || (b.energy == a.energy && bi < ai)
            }
            _ => false,
        };
        if better {
            out.energy = b.energy;
            out.idx = b.idx;
        }
        out
    }
}

fn scan(cfg: &SimConfig, step: f64, parallel: bool) -> Result<(Env, Grid, ScanBest), OracleError> {
    let env = env_from(cfg)?;
    let grid = Grid::build(cfg, step)?;
    let best = if parallel {
        #[cfg(feature = "parallel")]
        {
            (0..grid.total)
                .into_par_iter()
                .fold(ScanBest::empty, |b, idx| b.absorb(&env, &grid, idx))
                .reduce(ScanBest::empty, ScanBest::merge)
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..grid.total).fold(ScanBest::empty(), |b, idx| b.absorb(&env, &grid, idx))
        }
    } else {
        (0..grid.total).fold(ScanBest::empty(), |b, idx| b.absorb(&env, &grid, idx))
    };
    Ok((env, grid, best))
}

fn solution_from(
    cfg: &SimConfig,
    env: &Env,
    grid: &Grid,
    best: ScanBest,
    step: f64,
) -> Result<OracleSolution, OracleError> {
    let idx = best.idx.ok_or(OracleError::InfeasibleRate {
        best_margin: best.margin,
    })?;
    let params = grid.params_at(idx, env.nodes, env.states);
    let evaluation = evaluate_closed_form(cfg, &params)?;
    Ok(OracleSolution {
        params,
        evaluation,
        grid_step: step,
        points_scanned: grid.total,
    })
}

/// Cheapest rate-covering policy on the grid (parallel scan when the
/// `parallel` feature is on; the result is identical either way).
pub fn minimize_energy(cfg: &SimConfig, grid_step: f64) -> Result<OracleSolution, OracleError> {
    let (env, grid, best) = scan(cfg, grid_step, cfg!(feature = "parallel"))?;
    solution_from(cfg, &env, &grid, best, grid_step)
}

/// Single-threaded scan, available regardless of features.
pub fn minimize_energy_serial(
    cfg: &SimConfig,
    grid_step: f64,
) -> Result<OracleSolution, OracleError> {
    let (env, grid, best) = scan(cfg, grid_step, false)?;
    solution_from(cfg, &env, &grid, best, grid_step)
}

/// Best achievable worst-node service slack (packets/slot) over the
/// gridded policy family — positive means some policy covers every node's
/// arrivals with room to spare.
pub fn stability_margin(cfg: &SimConfig, grid_step: f64) -> Result<f64, OracleError> {
    let (_, _, best) = scan(cfg, grid_step, cfg!(feature = "parallel"))?;
    Ok(best.margin)
}
