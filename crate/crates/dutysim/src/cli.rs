//! Command-line interface.
//!
//! Four subcommands:
//! - `run`: one simulation; writes `slots.csv` (one row per slot per node),
//!   `summary.csv` (one aggregate row), and `nodes.csv` (per-node
//!   aggregates) into the output directory.
//! - `sweep`: a policy x V x seed batch; writes `sweep.csv` with one
//!   summary row per run, ordered `(policy, v, seed)` no matter how the
//!   batch was parallelized.
//! - `oracle`: grid search for the cheapest feasible stationary randomized
//!   policy; writes the policy table, per-node rates, and a summary.
//! - `verify`: simulates a configuration and checks its averages against
//!   the theory bounds (energy within a slack of the stationary optimum
//!   plus B/V; backlog within the Lyapunov bound), printing one
//!   `[PASS]`/`[FAIL]`/`[SKIP]` line per check.
//!
//! All CSV output uses `\n` line endings and a fixed 12-significant-digit
//! float format, so identical runs produce byte-identical files.

use crate::engine::{run_with, EngineError};
use crate::metrics::{MetricsAccumulator, MetricsReport};
use crate::model::{compute_b, Policy, SimConfig};
use crate::oracle::{minimize_energy, stability_margin, OracleError, OracleSolution};
use clap::{Args, Parser, Subcommand};
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Parser)]
#[command(
    name = "dutysim",
    about = "Deterministic simulator for energy-aware sleep/active scheduling in single-hop sensor networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one configuration and write per-slot records.
    Run(RunArgs),
    /// Simulate a policy x V x seed batch and write one row per run.
    Sweep(SweepArgs),
    /// Find the cheapest feasible stationary randomized policy.
    Oracle(OracleArgs),
    /// Check simulated averages against the theory bounds.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Configuration JSON; defaults to the built-in five-node network.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory for CSV files.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Override the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the configured horizon (slots).
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Ignore battery depletion.
    #[arg(long)]
    pub infinite_battery: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Policies to sweep, comma separated (rnd needs a config whose policy
    /// carries the probability tables).
    #[arg(long, default_value = "ess,benchmark,periodic,distributed")]
    pub policies: String,
    /// V values to sweep, comma separated; defaults to the configured V.
    #[arg(long)]
    pub v_list: Option<String>,
    /// Number of seeds per (policy, V) cell.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    /// First seed; later seeds count up from it. Defaults to the
    /// configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the configured horizon (slots).
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Ignore battery depletion.
    #[arg(long)]
    pub infinite_battery: bool,
    /// Worker threads (0 = library default).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Probability grid step; must evenly divide [0, 1].
    #[arg(long, default_value_t = 0.1)]
    pub grid_step: f64,
    /// Worker threads (0 = library default).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Configuration JSON; defaults to the built-in five-node network.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Probability grid step for the reference optimum.
    #[arg(long, default_value_t = 0.1)]
    pub grid_step: f64,
    /// Simulation horizon (slots) for measuring averages.
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Override the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{0}")]
    BadArg(String),
}

/// Parse arguments, dispatch, and return the process exit code: 0 on
/// success (and all checks passing), 1 when a verify check fails, 2 on any
/// error.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(&args).map(|()| 0),
        Command::Sweep(args) => cmd_sweep(&args).map(|()| 0),
        Command::Oracle(args) => cmd_oracle(&args).map(|()| 0),
        Command::Verify(args) => cmd_verify(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<SimConfig, CliError> {
    match path {
        None => Ok(SimConfig::network(5, Policy::Ess, 1000.0)),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|source| CliError::Io {
                path: p.clone(),
                source,
            })?;
            serde_json::from_str(&text).map_err(|source| CliError::Json {
                path: p.clone(),
                source,
            })
        }
    }
}

fn configure_jobs(jobs: usize) {
    if jobs == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    {
        // Only the first global pool wins; later calls are no-ops.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    eprintln!("note: built without the parallel feature; --jobs {jobs} has no effect");
}

/// Fixed 12-significant-digit scientific float format shared by all CSV
/// output.
fn fmt_f(x: f64) -> String {
    format!("{x:.11e}")
}

fn fmt_opt(x: Option<u64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    let mut f = fs::File::create(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    f.write_all(content.as_bytes()).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

const SUMMARY_COLUMNS: &str = "policy,v,seed,slots,node_count,e_total_j_per_slot,e_sleep_j_per_slot,e_circuit_j_per_slot,e_tx_j_per_slot,e_switch_j_per_slot,e_bcast_j_per_slot,e_active_j_per_slot,avg_backlog_packets,duty_cycle,idle_fraction,served_packets_per_slot,arrival_packets_per_slot,switch_on_count,switch_off_count,transmit_bursts,avg_burst_len,first_death,network_lifetime";

fn summary_row(policy: &str, v: f64, seed: u64, m: &MetricsReport) -> String {
    let mut row = String::new();
    let _ = write!(
        row,
        "{policy},{},{seed},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        fmt_f(v),
        m.slots,
        m.node_count,
        fmt_f(m.e_total_j_per_slot),
        fmt_f(m.e_sleep_j_per_slot),
        fmt_f(m.e_circuit_j_per_slot),
        fmt_f(m.e_tx_j_per_slot),
        fmt_f(m.e_switch_j_per_slot),
        fmt_f(m.e_bcast_j_per_slot),
        fmt_f(m.e_active_j_per_slot),
        fmt_f(m.avg_backlog_packets),
        fmt_f(m.duty_cycle),
        fmt_f(m.idle_fraction),
        fmt_f(m.served_packets_per_slot),
        fmt_f(m.arrival_packets_per_slot),
        m.switch_on_count,
        m.switch_off_count,
        m.transmit_bursts,
        fmt_f(m.avg_burst_len),
        fmt_opt(m.first_death),
        fmt_opt(m.network_lifetime),
    );
    row
}

/// Simulate one configuration, streaming records into the metrics fold.
pub fn simulate(cfg: &SimConfig) -> Result<MetricsReport, EngineError> {
    let mut acc = MetricsAccumulator::new(cfg.node_count);
    let outcome = run_with(cfg, |r| acc.push(r))?;
    Ok(acc.finish(&outcome))
}

/// Simulate a batch, one report per configuration, in input order.
/// Parallel across runs when the `parallel` feature is on.
pub fn simulate_batch(cfgs: &[SimConfig]) -> Result<Vec<MetricsReport>, EngineError> {
    #[cfg(feature = "parallel")]
    {
        cfgs.par_iter().map(simulate).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        simulate_batch_serial(cfgs)
    }
}

/// Single-threaded batch, available regardless of features.
pub fn simulate_batch_serial(cfgs: &[SimConfig]) -> Result<Vec<MetricsReport>, EngineError> {
    cfgs.iter().map(simulate).collect()
}

fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let mut cfg = load_config(&args.common.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(h) = args.horizon {
        cfg.horizon_slots = Some(h);
    }
    if args.infinite_battery {
        cfg.infinite_battery = true;
    }

    let mut slots_csv = String::from(
        "slot,node,mode,switch,served,arrivals,queue,battery_j,e_sleep,e_active,e_tx,e_switch,e_bcast,idle_flag\n",
    );
    let mut acc = MetricsAccumulator::new(cfg.node_count);
    let outcome = run_with(&cfg, |r| {
        acc.push(r);
        let _ = write!(
            slots_csv,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.slot,
            r.node,
            r.mode.as_str(),
            r.switch,
            r.served,
            r.arrivals,
            r.queue,
            fmt_f(r.battery_j),
            fmt_f(r.e_sleep),
            fmt_f(r.e_active),
            fmt_f(r.e_tx),
            fmt_f(r.e_switch),
            fmt_f(r.e_bcast),
            u8::from(r.idle_flag),
        );
    })?;
    let report = acc.finish(&outcome);

    let mut summary = format!("{SUMMARY_COLUMNS}\n");
    summary.push_str(&summary_row(cfg.policy.name(), cfg.v_param, cfg.seed, &report));
    summary.push('\n');

    let mut nodes_csv = String::from("node,avg_queue_packets,duty_cycle,death_slot\n");
    for n in 0..cfg.node_count as usize {
        let _ = write!(
            nodes_csv,
            "{n},{},{},{}\n",
            fmt_f(report.per_node_avg_queue[n]),
            fmt_f(report.per_node_duty_cycle[n]),
            fmt_opt(report.death_slots[n]),
        );
    }

    write_file(&args.common.out.join("slots.csv"), &slots_csv)?;
    write_file(&args.common.out.join("summary.csv"), &summary)?;
    write_file(&args.common.out.join("nodes.csv"), &nodes_csv)?;
    println!(
        "run: {} slots, {} nodes, avg energy {} J/slot -> {}",
        report.slots,
        cfg.node_count,
        fmt_f(report.e_total_j_per_slot),
        args.common.out.display()
    );
    Ok(())
}

fn parse_policy(name: &str, base: &SimConfig) -> Result<Policy, CliError> {
    match name {
        "ess" => Ok(Policy::Ess),
        "benchmark" => Ok(Policy::Benchmark),
        "periodic" => Ok(Policy::Periodic),
        "distributed" => Ok(Policy::Distributed),
        "rnd" => match &base.policy {
            Policy::Rnd(p) => Ok(Policy::Rnd(p.clone())),
            _ => Err(CliError::BadArg(
                "policy 'rnd' needs a config whose policy carries the probability tables".into(),
            )),
        },
        other => Err(CliError::BadArg(format!("unknown policy '{other}'"))),
    }
}

fn parse_v_list(arg: &Option<String>, base: &SimConfig) -> Result<Vec<f64>, CliError> {
    match arg {
        None => Ok(vec![base.v_param]),
        Some(text) => text
            .split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<f64>()
                    .map_err(|_| CliError::BadArg(format!("bad V value '{s}'")))
            })
            .collect(),
    }
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    configure_jobs(args.jobs);
    let base = load_config(&args.common.config)?;
    let policies: Vec<(String, Policy)> = args
        .policies
        .split(',')
        .map(|s| {
            let name = s.trim().to_string();
            parse_policy(&name, &base).map(|p| (name, p))
        })
        .collect::<Result<_, _>>()?;
    let v_list = parse_v_list(&args.v_list, &base)?;
    let seed0 = args.seed.unwrap_or(base.seed);

    let mut labels = Vec::new();
    let mut cfgs = Vec::new();
    for (name, policy) in &policies {
        for &v in &v_list {
            for s in 0..args.seeds {
                let mut cfg = base.clone();
                cfg.policy = policy.clone();
                cfg.v_param = v;
                cfg.seed = seed0 + s;
                if let Some(h) = args.horizon {
                    cfg.horizon_slots = Some(h);
                }
                if args.infinite_battery {
                    cfg.infinite_battery = true;
                }
                labels.push((name.clone(), v, seed0 + s));
                cfgs.push(cfg);
            }
        }
    }

    let reports = simulate_batch(&cfgs)?;
    let mut csv = format!("{SUMMARY_COLUMNS}\n");
    for ((name, v, seed), report) in labels.iter().zip(&reports) {
        csv.push_str(&summary_row(name, *v, *seed, report));
        csv.push('\n');
    }
    write_file(&args.common.out.join("sweep.csv"), &csv)?;
    println!(
        "sweep: {} runs ({} policies x {} V x {} seeds) -> {}",
        cfgs.len(),
        policies.len(),
        v_list.len(),
        args.seeds,
        args.common.out.display()
    );
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> Result<(), CliError> {
    configure_jobs(args.jobs);
    let cfg = load_config(&args.common.config)?;
    let sol: OracleSolution = minimize_energy(&cfg, args.grid_step)?;
    let margin = stability_margin(&cfg, args.grid_step)?;

    let mut table = String::from("node,state,p01,p10,pi_tr\n");
    for n in 0..cfg.node_count as usize {
        for k in 0..cfg.channel.states.len() {
            let _ = write!(
                table,
                "{n},{k},{},{},{}\n",
                fmt_f(sol.params.p01[n][k]),
                fmt_f(sol.params.p10[n][k]),
                fmt_f(sol.params.pi_tr[n][k]),
            );
        }
    }

    let mut nodes_csv = String::from("node,service_rate_packets_per_slot,energy_j_per_slot\n");
    for n in 0..cfg.node_count as usize {
        let _ = write!(
            nodes_csv,
            "{n},{},{}\n",
            fmt_f(sol.evaluation.per_node_service_rate[n]),
            fmt_f(sol.evaluation.per_node_energy_j_per_slot[n]),
        );
    }

    let summary = format!(
        "grid_step,points_scanned,network_energy_j_per_slot,stability_margin_packets_per_slot\n{},{},{},{}\n",
        fmt_f(sol.grid_step),
        sol.points_scanned,
        fmt_f(sol.evaluation.network_energy_j_per_slot),
        fmt_f(margin),
    );

    write_file(&args.common.out.join("oracle.csv"), &table)?;
    write_file(&args.common.out.join("oracle_nodes.csv"), &nodes_csv)?;
    write_file(&args.common.out.join("oracle_summary.csv"), &summary)?;
    println!(
        "oracle: optimum {} J/slot over {} grid points (margin {} packets/slot) -> {}",
        fmt_f(sol.evaluation.network_energy_j_per_slot),
        sol.points_scanned,
        fmt_f(margin),
        args.common.out.display()
    );
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32, CliError> {
    let mut cfg = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    // Bounds describe steady-state averages, so measure them without
    // battery truncation over a fixed horizon.
    cfg.infinite_battery = true;
    cfg.horizon_slots = Some(args.horizon.or(cfg.horizon_slots).unwrap_or(200_000));

    let b = compute_b(&cfg);
    let h_max = crate::energy::h_max(&cfg);
    let margin = stability_margin(&cfg, args.grid_step)?;
    let report = simulate(&cfg)?;
    let mut failed = false;

    match minimize_energy(&cfg, args.grid_step) {
        Err(OracleError::InfeasibleRate { best_margin }) => {
            println!(
                "[SKIP] energy bound: no stationary policy covers this load (best margin {})",
                fmt_f(best_margin)
            );
        }
        Err(e) => return Err(e.into()),
        Ok(sol) if cfg.v_param == 0.0 => {
            let _ = sol;
            println!("[SKIP] energy bound: V = 0 leaves it without content");
        }
        Ok(sol) => {
            let h_star = sol.evaluation.network_energy_j_per_slot;
            let bound = (h_star + b / cfg.v_param) * 1.05;
            let ok = report.e_total_j_per_slot <= bound;
            failed |= !ok;
            println!(
                "[{}] avg network energy {} J/slot <= {} J/slot (grid optimum {} + B/V, 5% slack)",
                if ok { "PASS" } else { "FAIL" },
                fmt_f(report.e_total_j_per_slot),
                fmt_f(bound),
                fmt_f(h_star),
            );
        }
    }

    if margin > 0.0 {
        let bound = (b + cfg.v_param * h_max) / margin * 1.05;
        let ok = report.avg_backlog_packets <= bound;
        failed |= !ok;
        println!(
            "[{}] avg backlog {} packets <= {} packets ((B + V*h_max)/margin, 5% slack)",
            if ok { "PASS" } else { "FAIL" },
            fmt_f(report.avg_backlog_packets),
            fmt_f(bound),
        );
    } else {
        println!(
            "[SKIP] backlog bound: load is not stabilizable on this grid (margin {})",
            fmt_f(margin)
        );
    }

    println!("overall: {}", if failed { "FAIL" } else { "PASS" });
    Ok(if failed { 1 } else { 0 })
}
