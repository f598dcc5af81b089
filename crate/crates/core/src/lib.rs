//! Correlation-driven nonparametric portfolio selection.
//!
//! A pool of experts, each indexed by a window length and a correlation
//! threshold, plays the log-optimal portfolio of the periods that followed
//! history windows resembling the current one. The pool is combined into a
//! single strategy by fixed initial weights. Around it sit a backtest
//! engine, hindsight baselines and a harness that compares the achieved
//! growth rate with the optimum of synthetic markets where that optimum can
//! be computed exactly.

pub mod backtest;
pub mod consistency;
pub mod corn;
pub mod logopt;
pub mod market;
pub mod similarity;

pub use backtest::{run_strategy, WealthTrajectory};
pub use corn::{corn_run, ExpertParams, PoolSpec};
pub use logopt::{DiscreteMeasure, Portfolio};
pub use market::{MarketSequence, MarketVector, SyntheticMarketSpec};
