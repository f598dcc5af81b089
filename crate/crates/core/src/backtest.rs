//! Wealth accounting for causal strategies and the hindsight baselines.

use std::io::Write;

use thiserror::Error;

use crate::logopt::{self, DiscreteMeasure, LogOptError, Portfolio};
use crate::market::{MarketSequence, MarketVector};

#[derive(Debug, Error)]
pub enum BacktestError {
    #[error("strategy returned an invalid portfolio at period {t}: {reason}")]
    InvalidPortfolio { t: usize, reason: String },
    #[error(transparent)]
    LogOpt(#[from] LogOptError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Wealth path `S_1..S_n` with `S_0 = 1`, kept as cumulative log wealth.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WealthTrajectory {
    log_wealth: Vec<f64>,
}

impl WealthTrajectory {
    pub fn from_log_wealth(log_wealth: Vec<f64>) -> Self {
        Self { log_wealth }
    }

    /// Accumulates per-period growth factors `<b_t, x_t>`.
    pub fn from_factors(factors: impl IntoIterator<Item = f64>) -> Self {
        let mut acc = 0.0;
        let log_wealth = factors
            .into_iter()
            .map(|f| {
                acc += f.ln();
                acc
            })
            .collect();
        Self { log_wealth }
    }

    pub fn len(&self) -> usize {
        self.log_wealth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_wealth.is_empty()
    }

    pub fn log_wealth(&self) -> &[f64] {
        &self.log_wealth
    }

    /// `S_t` for `t = 1..n`.
    pub fn wealth(&self) -> Vec<f64> {
        self.log_wealth.iter().map(|l| l.exp()).collect()
    }

    /// `W_t = log(S_t) / t` in nats per period.
    pub fn growth(&self) -> Vec<f64> {
        self.log_wealth
            .iter()
            .enumerate()
            .map(|(k, l)| l / (k + 1) as f64)
            .collect()
    }

    /// Log wealth after `t` periods; `t = 0` gives 0.
    pub fn log_wealth_at(&self, t: usize) -> f64 {
        if t == 0 {
            0.0
        } else {
            self.log_wealth[t - 1]
        }
    }

    pub fn growth_at(&self, t: usize) -> f64 {
        self.log_wealth_at(t) / t as f64
    }

    pub fn final_log_wealth(&self) -> f64 {
        self.log_wealth.last().copied().unwrap_or(0.0)
    }

    pub fn final_wealth(&self) -> f64 {
        self.final_log_wealth().exp()
    }

    pub fn final_growth(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.final_log_wealth() / self.len() as f64
        }
    }

    /// CSV with columns `t,wealth,log_wealth,growth`. Wealth overflows to
    /// `inf` on long profitable runs; the log column does not.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,wealth,log_wealth,growth")?;
        for (k, l) in self.log_wealth.iter().enumerate() {
            let t = k + 1;
            writeln!(out, "{t},{},{l},{}", l.exp(), l / t as f64)?;
        }
        Ok(())
    }
}

/// Runs a causal strategy. `decide(history, t)` sees only periods `1..t-1`
/// and returns the weights to hold during period `t`.
pub fn run_strategy<F>(seq: &MarketSequence, mut decide: F) -> Result<WealthTrajectory, BacktestError>
where
    F: FnMut(&[MarketVector], usize) -> Vec<f64>,
{
    let mut factors = Vec::with_capacity(seq.len());
    for t in 1..=seq.len() {
        let weights = decide(&seq.periods()[..t - 1], t);
        if weights.len() != seq.dim() {
            return Err(BacktestError::InvalidPortfolio {
                t,
                reason: format!("{} weights for {} assets", weights.len(), seq.dim()),
            });
        }
        let b = Portfolio::new(weights).map_err(|e| BacktestError::InvalidPortfolio {
            t,
            reason: e.to_string(),
        })?;
        factors.push(b.growth_factor(seq.period(t)));
    }
    Ok(WealthTrajectory::from_factors(factors))
}

/// Constant rebalanced portfolio.
pub fn crp(b: Portfolio) -> impl FnMut(&[MarketVector], usize) -> Vec<f64> {
    move |_, _| b.weights().to_vec()
}

/// Best constant rebalanced portfolio in hindsight: the log-optimal
/// portfolio of the uniform measure over all periods.
pub fn bcrp_oracle(seq: &MarketSequence, tol: f64) -> Result<Portfolio, BacktestError> {
    let m = DiscreteMeasure::empirical(seq.periods())?;
    Ok(logopt::solve(&m, tol)?)
}

/// Index (0-based) of the asset with the largest hindsight log return;
/// ties go to the lowest index.
pub fn best_asset_index(seq: &MarketSequence) -> usize {
    let totals = (0..seq.dim()).map(|j| seq.periods().iter().map(|x| x[j].ln()).sum::<f64>());
    let mut best = (0, f64::NEG_INFINITY);
    for (j, total) in totals.enumerate() {
        if total > best.1 {
            best = (j, total);
        }
    }
    best.0
}

/// Hindsight best single asset as a constant vertex portfolio.
pub fn best_asset(seq: &MarketSequence) -> impl FnMut(&[MarketVector], usize) -> Vec<f64> {
    crp(Portfolio::vertex(seq.dim(), best_asset_index(seq)))
}
