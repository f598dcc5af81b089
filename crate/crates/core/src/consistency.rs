//! Optimal growth rates of synthetic markets and the experiment that
//! measures how fast the CORN mixture approaches them.
//!
//! For an i.i.d. market the best achievable growth is the log-optimal value
//! of the outcome distribution. For a regime market whose regimes emit
//! disjoint outcome sets, the previous outcome reveals the previous regime,
//! so conditioning on the whole past reduces to conditioning on that regime:
//! the optimum plays, after regime `a`, the log-optimal portfolio of
//! `sum_r P(a -> r) * outcomes(r)`, and its growth rate averages those
//! conditional optima over the stationary law of the chain.

use serde::Serialize;
use thiserror::Error;

use crate::corn::{self, CornError, ExpertParams, PoolSpec};
use crate::logopt::{self, DiscreteMeasure, LogOptError, Portfolio};
use crate::market::{self, MarketError, MarketKind, MarketVector, SyntheticMarketSpec};

/// Smallest horizon for a convergence experiment.
pub const MIN_EXPERIMENT_N: usize = 100;
/// First checkpoint; later ones double until the horizon.
pub const FIRST_CHECKPOINT: usize = 100;

#[derive(Debug, Error)]
pub enum ConsistencyError {
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error(transparent)]
    LogOpt(#[from] LogOptError),
    #[error(transparent)]
    Corn(#[from] CornError),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("regimes {0} and {1} share an outcome, so the last outcome does not identify the regime")]
    NonIdentifiableRegimes(usize, usize),
    #[error("experiment horizon {0} is below the minimum of {MIN_EXPERIMENT_N}")]
    HorizonTooShort(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRateOracle {
    /// Maximal growth rate in nats per period.
    pub w_star: f64,
    /// Optimal portfolio per conditioning state, with the state's
    /// stationary probability and conditional optimal log growth.
    pub conditional: Vec<ConditionalOptimum>,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalOptimum {
    pub state: String,
    pub probability: f64,
    pub portfolio: Portfolio,
    pub log_growth: f64,
}

fn outcome_measure(weighted: impl IntoIterator<Item = (MarketVector, f64)>) -> Result<DiscreteMeasure, LogOptError> {
    let atoms: Vec<_> = weighted.into_iter().filter(|(_, p)| *p > 0.0).collect();
    let total: f64 = atoms.iter().map(|(_, p)| p).sum();
    // renormalize away rounding in products of probabilities
    DiscreteMeasure::new(atoms.into_iter().map(|(x, p)| (x, p / total)).collect())
}

fn optimum(m: &DiscreteMeasure, tol: f64) -> Result<(Portfolio, f64), LogOptError> {
    let b = logopt::solve(m, tol)?;
    let value = logopt::log_wealth(m, &b)?;
    Ok((b, value))
}

/// Growth-optimal rate of an i.i.d. discrete market.
pub fn w_star_iid(spec: &SyntheticMarketSpec, tol: f64) -> Result<GrowthRateOracle, ConsistencyError> {
    spec.validate()?;
    if spec.kind != MarketKind::IidDiscrete {
        return Err(ConsistencyError::InvalidSpec(
            "w_star_iid needs an iid_discrete spec".into(),
        ));
    }
    let m = outcome_measure(spec.regimes[0].iter().map(|o| (o.vector.clone(), o.prob)))?;
    let (portfolio, value) = optimum(&m, tol)?;
    Ok(GrowthRateOracle {
        w_star: value,
        conditional: vec![ConditionalOptimum {
            state: "any".into(),
            probability: 1.0,
            portfolio,
            log_growth: value,
        }],
        description: "i.i.d. outcomes: log-optimal portfolio of the outcome distribution".into(),
    })
}

fn check_identifiable(spec: &SyntheticMarketSpec) -> Result<(), ConsistencyError> {
    for a in 0..spec.regimes.len() {
        for b in a + 1..spec.regimes.len() {
            let shared = spec.regimes[a].iter().filter(|o| o.prob > 0.0).any(|oa| {
                spec.regimes[b]
                    .iter()
                    .filter(|o| o.prob > 0.0)
                    .any(|ob| ob.vector == oa.vector)
            });
            if shared {
                return Err(ConsistencyError::NonIdentifiableRegimes(a, b));
            }
        }
    }
    Ok(())
}

/// Growth-optimal rate of a regime-identifiable Markov market.
pub fn w_star_markov(spec: &SyntheticMarketSpec, tol: f64) -> Result<GrowthRateOracle, ConsistencyError> {
    spec.validate()?;
    if spec.kind != MarketKind::MarkovRegime {
        return Err(ConsistencyError::InvalidSpec(
            "w_star_markov needs a markov_regime spec".into(),
        ));
    }
    check_identifiable(spec)?;
    let transition = spec.transition_matrix();
    let pi = market::stationary_distribution(&transition);
    let mut conditional = Vec::with_capacity(spec.regimes.len());
    let mut w_star = 0.0;
    for (a, row) in transition.iter().enumerate() {
        let next = row
            .iter()
            .enumerate()
            .flat_map(|(r, p)| spec.regimes[r].iter().map(move |o| (o.vector.clone(), p * o.prob)));
        let (portfolio, value) = optimum(&outcome_measure(next)?, tol)?;
        w_star += pi[a] * value;
        conditional.push(ConditionalOptimum {
            state: format!("after_regime_{a}"),
            probability: pi[a],
            portfolio,
            log_growth: value,
        });
    }
    Ok(GrowthRateOracle {
        w_star,
        conditional,
        description: "regime-identifiable Markov market: stationary average of one-step conditional optima".into(),
    })
}

/// Dispatches on the spec kind.
pub fn w_star(spec: &SyntheticMarketSpec, tol: f64) -> Result<GrowthRateOracle, ConsistencyError> {
    match spec.kind {
        MarketKind::IidDiscrete => w_star_iid(spec, tol),
        MarketKind::MarkovRegime => w_star_markov(spec, tol),
    }
}

/// Best growth rate available to a strategy that ignores the past: the
/// log-optimal value of the stationary one-period marginal.
pub fn marginal_w_star(spec: &SyntheticMarketSpec, tol: f64) -> Result<GrowthRateOracle, ConsistencyError> {
    spec.validate()?;
    let pi = market::stationary_distribution(&spec.transition_matrix());
    let atoms = spec
        .regimes
        .iter()
        .zip(&pi)
        .flat_map(|(outcomes, p)| outcomes.iter().map(move |o| (o.vector.clone(), p * o.prob)));
    let (portfolio, value) = optimum(&outcome_measure(atoms)?, tol)?;
    Ok(GrowthRateOracle {
        w_star: value,
        conditional: vec![ConditionalOptimum {
            state: "marginal".into(),
            probability: 1.0,
            portfolio,
            log_growth: value,
        }],
        description: "log-optimal portfolio of the stationary marginal".into(),
    })
}

/// `100, 200, 400, ...` below `n`, then `n` itself.
pub fn checkpoints(n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut t = FIRST_CHECKPOINT;
    while t < n {
        out.push(t);
        t *= 2;
    }
    out.push(n);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checkpoint {
    pub t: usize,
    pub growth: f64,
    pub w_star: f64,
    /// `w_star - growth`.
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub seed: u64,
    pub n: usize,
    pub w_star: f64,
    pub checkpoints: Vec<Checkpoint>,
    pub final_growth: f64,
    /// Final `W_n` per expert.
    pub expert_growth: Vec<(ExpertParams, f64)>,
    /// `max_k [W_n(expert_k) + log(q_k) / n]`.
    pub mixture_bound: f64,
}

impl ConvergenceReport {
    pub fn final_gap(&self) -> f64 {
        self.w_star - self.final_growth
    }

    /// CSV with columns `checkpoint,W_t,w_star,gap`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "checkpoint,W_t,w_star,gap")?;
        for c in &self.checkpoints {
            writeln!(out, "{},{},{},{}", c.t, c.growth, c.w_star, c.gap)?;
        }
        Ok(())
    }

    /// Median `|gap|` over checkpoints in the first factor-ten span of
    /// time and over the last one.
    pub fn early_late_median_gaps(&self) -> (f64, f64) {
        let first = self.checkpoints.first().map_or(0, |c| c.t);
        let early: Vec<f64> = self
            .checkpoints
            .iter()
            .filter(|c| c.t < first * 10)
            .map(|c| c.gap.abs())
            .collect();
        let late: Vec<f64> = self
            .checkpoints
            .iter()
            .filter(|c| c.t * 10 > self.n)
            .map(|c| c.gap.abs())
            .collect();
        (median(early), median(late))
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Generates `n` periods from `spec`, runs the pool on them and records
/// `W_t(B)` against the optimal rate at log-spaced checkpoints.
pub fn convergence_experiment(
    spec: &SyntheticMarketSpec,
    pool: &PoolSpec,
    n: usize,
    tol: f64,
) -> Result<ConvergenceReport, ConsistencyError> {
    if n < MIN_EXPERIMENT_N {
        return Err(ConsistencyError::HorizonTooShort(n));
    }
    let oracle = w_star(spec, tol)?;
    let seq = market::generate(spec, n)?;
    let run = corn::corn_run(&seq, pool, tol)?;
    let checkpoints = checkpoints(n)
        .into_iter()
        .map(|t| {
            let growth = run.mixture.growth_at(t);
            Checkpoint {
                t,
                growth,
                w_star: oracle.w_star,
                gap: oracle.w_star - growth,
            }
        })
        .collect();
    Ok(ConvergenceReport {
        seed: spec.seed,
        n,
        w_star: oracle.w_star,
        checkpoints,
        final_growth: run.mixture.final_growth(),
        expert_growth: run
            .experts
            .iter()
            .map(|e| (e.params, e.trajectory.final_growth()))
            .collect(),
        mixture_bound: run.lower_bound_at(n),
    })
}
