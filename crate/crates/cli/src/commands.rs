//! `backtest` and `consistency`.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use corn_core::backtest::{self, run_strategy, WealthTrajectory};
use corn_core::consistency::{self, ConsistencyError, ConvergenceReport};
use corn_core::corn::{self, CornRun};
use corn_core::logopt::Portfolio;
use corn_core::market::{self, MarketSequence};
use rayon::prelude::*;

use crate::config::{Input, RunConfig};
use crate::CliError;

/// Below this horizon `consistency` reports numbers but makes no pass/fail
/// claim.
pub const MIN_VERDICT_N: usize = 1000;
/// Checkpoints before this are excluded from the upper-bound excess.
pub const BURN_IN: usize = 500;

fn data_err(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Data(format!("cannot write {}: {e}", path.display()))
}

fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {jobs} workers: {e}")))?;
    Ok(pool.install(f))
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(|e| io_err(path, e))
}

fn seed_dir(out: &Path, seed: Option<u64>) -> PathBuf {
    match seed {
        Some(s) => out.join(format!("seed_{s}")),
        None => out.to_path_buf(),
    }
}

fn rate(config: &RunConfig, nats: f64) -> String {
    if config.log2 {
        format!("{:.6} bits", nats / std::f64::consts::LN_2)
    } else {
        format!("{nats:.6} nats")
    }
}

/// Markets to run: one for CSV input, one per seed for synthetic input.
fn markets(config: &RunConfig) -> Result<Vec<(Option<u64>, MarketSequence)>, CliError> {
    match &config.input {
        Input::Csv { path, prices } => {
            let seq = if *prices {
                market::load_price_csv(path)
            } else {
                market::load_csv(path)
            }
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            let seq = match config.n {
                Some(n) if n > seq.len() => {
                    return Err(CliError::Data(format!(
                        "n = {n} exceeds the {} periods in the file",
                        seq.len()
                    )))
                }
                Some(n) => seq.prefix(n),
                None => seq,
            };
            Ok(vec![(None, seq)])
        }
        Input::Synthetic(spec) => {
            let n = config.n.expect("validated");
            config
                .seeds
                .iter()
                .map(|&s| Ok((Some(s), market::generate(&spec.with_seed(s), n).map_err(data_err)?)))
                .collect()
        }
    }
}

/// Every strategy of one backtest, in output order.
pub struct BacktestResult {
    pub seed: Option<u64>,
    pub strategies: Vec<(String, WealthTrajectory)>,
    /// `max_k [W_n(expert_k) + log(q_k) / n]`.
    pub mixture_bound: f64,
}

fn strategies(seq: &MarketSequence, run: &CornRun, tol: f64) -> Result<Vec<(String, WealthTrajectory)>, CliError> {
    let mut out = vec![("corn_mixture".to_string(), run.mixture.clone())];
    out.extend(run.experts.iter().map(|e| (e.params.label(), e.trajectory.clone())));
    let uniform = run_strategy(seq, backtest::crp(Portfolio::uniform(seq.dim()))).map_err(data_err)?;
    let bcrp = backtest::bcrp_oracle(seq, tol).map_err(data_err)?;
    let bcrp = run_strategy(seq, backtest::crp(bcrp)).map_err(data_err)?;
    let best = run_strategy(seq, backtest::best_asset(seq)).map_err(data_err)?;
    out.push(("uniform_crp".into(), uniform));
    out.push(("bcrp".into(), bcrp));
    out.push(("best_asset".into(), best));
    Ok(out)
}

fn summary_csv(result: &BacktestResult) -> String {
    let mut s = String::from("strategy,final_wealth,final_log_wealth,final_growth,bound\n");
    for (name, traj) in &result.strategies {
        let bound = if name == "corn_mixture" {
            result.mixture_bound.to_string()
        } else {
            String::new()
        };
        let _ = writeln!(
            s,
            "{name},{},{},{},{bound}",
            traj.final_wealth(),
            traj.final_log_wealth(),
            traj.final_growth()
        );
    }
    s
}

/// Runs the pool and the baselines on every market and writes
/// `trajectories/<strategy>.csv` and `summary.csv` per market.
pub fn backtest(config: &RunConfig) -> Result<Vec<BacktestResult>, CliError> {
    let markets = markets(config)?;
    let results = with_jobs(config.jobs, || {
        markets
            .par_iter()
            .map(|(seed, seq)| {
                let run = corn::corn_run(seq, &config.pool, config.tol).map_err(data_err)?;
                Ok(BacktestResult {
                    seed: *seed,
                    strategies: strategies(seq, &run, config.tol)?,
                    mixture_bound: run.lower_bound_at(seq.len()),
                })
            })
            .collect::<Result<Vec<_>, CliError>>()
    })??;
    for result in &results {
        let dir = seed_dir(&config.out, result.seed);
        for (name, traj) in &result.strategies {
            write_file(&dir.join("trajectories").join(format!("{name}.csv")), |w| {
                traj.write_csv(w)
            })?;
        }
        let summary = summary_csv(result);
        write_file(&dir.join("summary.csv"), |w| w.write_all(summary.as_bytes()))?;
        print_summary(config, result);
    }
    Ok(results)
}

fn print_summary(config: &RunConfig, result: &BacktestResult) {
    let n = result.strategies[0].1.len();
    match result.seed {
        Some(s) => println!("seed {s}, n = {n}"),
        None => println!("n = {n}"),
    }
    println!("  {:<20} {:>16} {:>20}", "strategy", "final wealth", "growth/period");
    for (name, traj) in &result.strategies {
        println!(
            "  {:<20} {:>16.6e} {:>20}",
            name,
            traj.final_wealth(),
            rate(config, traj.final_growth())
        );
    }
    println!("  mixture bound {}", rate(config, result.mixture_bound));
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass {
        worst_gap: f64,
    },
    Fail {
        worst_gap: f64,
    },
    /// Horizon below [`MIN_VERDICT_N`].
    NoClaim,
}

impl Verdict {
    pub fn failed(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }

    fn line(&self, threshold: f64, n: usize, seeds: usize) -> String {
        match self {
            Verdict::Pass { worst_gap } => {
                format!("PASS max |gap| {worst_gap} <= threshold {threshold} over {seeds} seeds at n = {n}")
            }
            Verdict::Fail { worst_gap } => {
                format!("FAIL max |gap| {worst_gap} > threshold {threshold} over {seeds} seeds at n = {n}")
            }
            Verdict::NoClaim => format!("NO CLAIM n = {n} is below the minimum {MIN_VERDICT_N} for a verdict"),
        }
    }
}

/// Largest `W_t - w_star` over checkpoints with `t >= BURN_IN`.
pub fn max_excess_after_burn_in(report: &ConvergenceReport) -> Option<f64> {
    report
        .checkpoints
        .iter()
        .filter(|c| c.t >= BURN_IN)
        .map(|c| -c.gap)
        .reduce(f64::max)
}

/// Runs the convergence experiment per seed, writes `seed_<s>/gap.csv`,
/// `consistency.csv` and `verdict.txt`.
pub fn consistency(config: &RunConfig) -> Result<Verdict, CliError> {
    let Input::Synthetic(spec) = &config.input else {
        return Err(CliError::Config(
            "consistency needs synthetic input; the optimal growth rate of recorded data is unknown".into(),
        ));
    };
    let n = config.n.expect("validated");
    let reports = with_jobs(config.jobs, || {
        config
            .seeds
            .par_iter()
            .map(|&s| consistency::convergence_experiment(&spec.with_seed(s), &config.pool, n, config.tol))
            .collect::<Result<Vec<_>, _>>()
    })?
    .map_err(|e| match e {
        ConsistencyError::HorizonTooShort(_)
        | ConsistencyError::InvalidSpec(_)
        | ConsistencyError::NonIdentifiableRegimes(..) => CliError::Config(e.to_string()),
        other => data_err(other),
    })?;

    let mut table = String::from(
        "seed,n,w_star,final_growth,final_gap,mixture_bound,max_excess_after_burn_in,early_median_gap,late_median_gap\n",
    );
    for r in &reports {
        write_file(&seed_dir(&config.out, Some(r.seed)).join("gap.csv"), |w| r.write_csv(w))?;
        let (early, late) = r.early_late_median_gaps();
        let excess = max_excess_after_burn_in(r).map_or(String::new(), |v| v.to_string());
        let _ = writeln!(
            table,
            "{},{},{},{},{},{},{excess},{early},{late}",
            r.seed,
            r.n,
            r.w_star,
            r.final_growth,
            r.final_gap(),
            r.mixture_bound
        );
        println!(
            "seed {}: W_n {}  w_star {}  gap {:+.6}",
            r.seed,
            rate(config, r.final_growth),
            rate(config, r.w_star),
            r.final_gap()
        );
    }
    write_file(&config.out.join("consistency.csv"), |w| w.write_all(table.as_bytes()))?;

    let worst_gap = reports.iter().map(|r| r.final_gap().abs()).fold(0.0, f64::max);
    let verdict = if n < MIN_VERDICT_N {
        Verdict::NoClaim
    } else if worst_gap <= config.threshold {
        Verdict::Pass { worst_gap }
    } else {
        Verdict::Fail { worst_gap }
    };
    let line = verdict.line(config.threshold, n, reports.len());
    println!("{line}");
    write_file(&config.out.join("verdict.txt"), |w| writeln!(w, "{line}"))?;
    Ok(verdict)
}
