//! Correlation-matched experts and their fixed-weight wealth mixture.
//!
//! Expert `(omega, rho)` decides period `t` by collecting every earlier
//! period `i` whose preceding `omega`-window correlates with the current one
//! at level `rho` or above, and playing the log-optimal portfolio of the
//! empirical measure on those `x_i`. The strategy splits initial wealth over
//! the pool by fixed weights `q` and never rebalances between experts, so
//! its wealth is `sum q S_n(expert)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backtest::WealthTrajectory;
use crate::logopt::{self, DiscreteMeasure, LogOptError, Portfolio};
use crate::market::{MarketSequence, MarketVector};
use crate::similarity::{self, SimilarityError, WindowClasses};

#[derive(Debug, Error)]
pub enum CornError {
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
    #[error(transparent)]
    LogOpt(#[from] LogOptError),
    #[error("invalid pool: {0}")]
    InvalidPool(String),
    #[error("period {t} outside 1..={max}")]
    PeriodOutOfRange { t: usize, max: usize },
    #[error("empty market sequence")]
    EmptySequence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpertParams {
    pub omega: usize,
    pub rho: f64,
    pub q: f64,
}

impl ExpertParams {
    pub fn label(&self) -> String {
        format!("expert_w{}_r{}", self.omega, self.rho)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    Uniform,
}

/// Grid of experts: `omega in 1..=max_omega`, `rho in {0, 1/P, .., (P-1)/P}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolSpec {
    pub max_omega: usize,
    pub rho_levels: usize,
    #[serde(default = "uniform_weighting")]
    pub weighting: Weighting,
}

fn uniform_weighting() -> Weighting {
    Weighting::Uniform
}

impl Default for PoolSpec {
    fn default() -> Self {
        Self::new(5, 10)
    }
}

impl PoolSpec {
    pub fn new(max_omega: usize, rho_levels: usize) -> Self {
        Self {
            max_omega,
            rho_levels,
            weighting: Weighting::Uniform,
        }
    }

    pub fn validate(&self) -> Result<(), CornError> {
        if self.max_omega == 0 || self.rho_levels == 0 {
            return Err(CornError::InvalidPool(format!(
                "need max_omega >= 1 and rho_levels >= 1, got {}x{}",
                self.max_omega, self.rho_levels
            )));
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.max_omega * self.rho_levels
    }

    pub fn rho_grid(&self) -> Vec<f64> {
        (0..self.rho_levels)
            .map(|k| k as f64 / self.rho_levels as f64)
            .collect()
    }

    /// Experts ordered by `omega`, then by `rho`.
    pub fn experts(&self) -> Vec<ExpertParams> {
        let q = 1.0 / self.size() as f64;
        (1..=self.max_omega)
            .flat_map(|omega| {
                self.rho_grid()
                    .into_iter()
                    .map(move |rho| ExpertParams { omega, rho, q })
            })
            .collect()
    }
}

/// Portfolio of expert `params` for period `t`, rebuilt from the full
/// history `1..t-1`. This is the reference path.
pub fn expert_decide(seq: &MarketSequence, t: usize, params: &ExpertParams, tol: f64) -> Result<Portfolio, CornError> {
    if t == 0 || t > seq.len() + 1 {
        return Err(CornError::PeriodOutOfRange { t, max: seq.len() + 1 });
    }
    if t <= params.omega {
        return Ok(logopt::solve(&DiscreteMeasure::unit(seq.dim()), tol)?);
    }
    let ms = similarity::match_set(seq, t, params.omega, params.rho)?;
    let measure = if ms.is_empty() {
        DiscreteMeasure::unit(seq.dim())
    } else {
        DiscreteMeasure::empirical(ms.indices.iter().map(|&i| seq.period(i)))?
    };
    Ok(logopt::solve(&measure, tol)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpertState {
    pub params: ExpertParams,
    pub log_wealth: f64,
    pub last_portfolio: Portfolio,
}

impl ExpertState {
    pub fn new(params: ExpertParams, dim: usize) -> Self {
        Self {
            params,
            log_wealth: 0.0,
            last_portfolio: Portfolio::uniform(dim),
        }
    }

    pub fn wealth(&self) -> f64 {
        self.log_wealth.exp()
    }
}

/// Applies period `x` to the portfolio chosen for it.
pub fn step_expert(state: &ExpertState, x: &MarketVector) -> ExpertState {
    ExpertState {
        log_wealth: state.log_wealth + state.last_portfolio.growth_factor(x).ln(),
        ..state.clone()
    }
}

/// `log sum_k exp(terms_k)`, stable for large magnitudes.
pub fn log_sum_exp(terms: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = terms.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.into_iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// `log sum_k q_k S(expert_k)`.
pub fn mixture_log_wealth(pool: &[ExpertState]) -> f64 {
    log_sum_exp(pool.iter().map(|s| s.params.q.ln() + s.log_wealth))
}

/// `sum_k q_k S(expert_k)`.
pub fn mixture_wealth(pool: &[ExpertState]) -> f64 {
    mixture_log_wealth(pool).exp()
}

/// `max_k [W_n(expert_k) + log(q_k) / n]`, the lower bound the mixture
/// growth rate always meets.
pub fn mixture_lower_bound(pool: &[ExpertState], n: usize) -> f64 {
    pool.iter()
        .map(|s| (s.log_wealth + s.params.q.ln()) / n as f64)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone)]
pub struct ExpertRun {
    pub params: ExpertParams,
    /// `decisions[t - 1]` is the portfolio held in period `t`.
    pub decisions: Vec<Portfolio>,
    pub trajectory: WealthTrajectory,
}

#[derive(Debug, Clone)]
pub struct CornRun {
    pub experts: Vec<ExpertRun>,
    pub mixture: WealthTrajectory,
}

impl CornRun {
    fn assemble(experts: Vec<ExpertRun>) -> Self {
        let n = experts.first().map_or(0, |e| e.trajectory.len());
        let mixture = (1..=n)
            .map(|t| log_sum_exp(experts.iter().map(|e| e.params.q.ln() + e.trajectory.log_wealth_at(t))))
            .collect();
        Self {
            experts,
            mixture: WealthTrajectory::from_log_wealth(mixture),
        }
    }

    pub fn len(&self) -> usize {
        self.mixture.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mixture.is_empty()
    }

    /// Expert states after `t` periods.
    pub fn states_at(&self, t: usize) -> Vec<ExpertState> {
        self.experts
            .iter()
            .map(|e| ExpertState {
                params: e.params,
                log_wealth: e.trajectory.log_wealth_at(t),
                last_portfolio: e.decisions[t.saturating_sub(1).min(e.decisions.len() - 1)].clone(),
            })
            .collect()
    }

    /// `max_k [W_t(expert_k) + log(q_k) / t]` after `t` periods.
    pub fn lower_bound_at(&self, t: usize) -> f64 {
        mixture_lower_bound(&self.states_at(t), t)
    }

    /// The single portfolio equivalent to the mixture in period `t`:
    /// expert decisions weighted by `q_k S_{t-1}(expert_k)`.
    pub fn mixture_decision(&self, t: usize) -> Vec<f64> {
        let logs: Vec<f64> = self
            .experts
            .iter()
            .map(|e| e.params.q.ln() + e.trajectory.log_wealth_at(t - 1))
            .collect();
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let scales: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = scales.iter().sum();
        let dim = self.experts[0].decisions[t - 1].dim();
        let mut b = vec![0.0; dim];
        for (e, s) in self.experts.iter().zip(&scales) {
            for (bj, ej) in b.iter_mut().zip(e.decisions[t - 1].weights()) {
                *bj += s / total * ej;
            }
        }
        b
    }
}

fn trajectory_for(seq: &MarketSequence, decisions: &[Portfolio]) -> WealthTrajectory {
    WealthTrajectory::from_factors(decisions.iter().zip(seq.periods()).map(|(b, x)| b.growth_factor(x)))
}

fn check_run_args(seq: &MarketSequence, pool: &PoolSpec) -> Result<(), CornError> {
    pool.validate()?;
    if seq.is_empty() {
        return Err(CornError::EmptySequence);
    }
    Ok(())
}

/// Runs every expert of the pool with [`expert_decide`], recomputing each
/// decision from scratch. Quadratic in `n` per period; meant for
/// cross-checking [`corn_run`].
pub fn corn_run_reference(seq: &MarketSequence, pool: &PoolSpec, tol: f64) -> Result<CornRun, CornError> {
    check_run_args(seq, pool)?;
    let experts = pool
        .experts()
        .into_iter()
        .map(|params| {
            let decisions = (1..=seq.len())
                .map(|t| expert_decide(seq, t, &params, tol))
                .collect::<Result<Vec<_>, _>>()?;
            let trajectory = trajectory_for(seq, &decisions);
            Ok(ExpertRun {
                params,
                decisions,
                trajectory,
            })
        })
        .collect::<Result<Vec<_>, CornError>>()?;
    Ok(CornRun::assemble(experts))
}

/// Identifies equal period vectors. Ids follow the lexicographic order of
/// the vectors, which is the atom order of [`DiscreteMeasure::from_counts`].
struct OutcomeIndex {
    ids: Vec<usize>,
    representatives: Vec<MarketVector>,
}

impl OutcomeIndex {
    fn new(seq: &MarketSequence) -> Self {
        let mut order: Vec<usize> = (0..seq.len()).collect();
        let key = |k: usize| seq.periods()[k].as_slice();
        order.sort_by(|&a, &b| {
            key(a)
                .iter()
                .zip(key(b))
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut ids = vec![0; seq.len()];
        let mut representatives: Vec<MarketVector> = Vec::new();
        for k in order {
            let x = &seq.periods()[k];
            if representatives.last() != Some(x) {
                representatives.push(x.clone());
            }
            ids[k] = representatives.len() - 1;
        }
        Self { ids, representatives }
    }
}

/// Decisions of every expert sharing one window length. Past periods are
/// grouped by the class of their preceding window, so each period needs one
/// correlation per distinct window seen so far rather than one per period.
fn run_window_group(
    seq: &MarketSequence,
    outcomes: &OutcomeIndex,
    params: &[ExpertParams],
    tol: f64,
) -> Result<Vec<ExpertRun>, CornError> {
    let omega = params[0].omega;
    let dim = seq.dim();
    let classes = WindowClasses::new(seq, omega)?;
    let fallback = logopt::solve(&DiscreteMeasure::unit(dim), tol)?;

    // per window class: (outcome id, multiplicity) of the periods it preceded
    let mut history: Vec<Vec<(usize, usize)>> = vec![Vec::new(); classes.class_count()];
    let mut active: Vec<usize> = Vec::new();
    let mut counts = vec![vec![0usize; outcomes.representatives.len()]; params.len()];
    let mut touched: Vec<Vec<usize>> = vec![Vec::new(); params.len()];
    let mut decisions: Vec<Vec<Portfolio>> = vec![Vec::with_capacity(seq.len()); params.len()];

    for t in 1..=seq.len() {
        // period t - 1 becomes a candidate match once its window exists
        if t > omega + 1 {
            let i = t - 1;
            let class = classes.class_at(i);
            let id = outcomes.ids[i - 1];
            if history[class].is_empty() {
                active.push(class);
            }
            match history[class].iter_mut().find(|(o, _)| *o == id) {
                Some((_, c)) => *c += 1,
                None => history[class].push((id, 1)),
            }
        }
        if t > omega {
            let current = classes.class_at(t);
            for &class in &active {
                let Some(c) = classes.correlation(class, current) else {
                    continue;
                };
                for (k, p) in params.iter().enumerate() {
                    if c >= p.rho {
                        for &(id, m) in &history[class] {
                            if counts[k][id] == 0 {
                                touched[k].push(id);
                            }
                            counts[k][id] += m;
                        }
                    }
                }
            }
        }
        for k in 0..params.len() {
            let b = if touched[k].is_empty() {
                fallback.clone()
            } else {
                touched[k].sort_unstable();
                let counted = touched[k]
                    .iter()
                    .map(|&id| (outcomes.representatives[id].clone(), counts[k][id]))
                    .collect();
                logopt::solve(&DiscreteMeasure::from_counts(counted)?, tol)?
            };
            decisions[k].push(b);
            for &id in &touched[k] {
                counts[k][id] = 0;
            }
            touched[k].clear();
        }
    }

    Ok(params
        .iter()
        .zip(decisions)
        .map(|(p, decisions)| ExpertRun {
            params: *p,
            trajectory: trajectory_for(seq, &decisions),
            decisions,
        })
        .collect())
}

/// Runs the whole pool over `seq`: for each period every expert decides,
/// then all wealths are updated with `x_t`. Expert groups sharing a window
/// length run in parallel on the current rayon pool; results do not depend
/// on the thread count. Decisions are bit-identical to
/// [`corn_run_reference`].
pub fn corn_run(seq: &MarketSequence, pool: &PoolSpec, tol: f64) -> Result<CornRun, CornError> {
    check_run_args(seq, pool)?;
    let outcomes = OutcomeIndex::new(seq);
    let all = pool.experts();
    let groups: Vec<&[ExpertParams]> = all.chunks(pool.rho_levels).collect();
    let runs = groups
        .par_iter()
        .map(|group| run_window_group(seq, &outcomes, group, tol))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CornRun::assemble(runs.into_iter().flatten().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alternating(n: usize) -> MarketSequence {
        let rows: Vec<&[f64]> = (0..n)
            .map(|k| if k % 2 == 0 { &[2.0, 0.5][..] } else { &[0.5, 2.0][..] })
            .collect();
        MarketSequence::from_rows(&rows).unwrap()
    }

    #[test]
    fn pool_grid() {
        let pool = PoolSpec::new(2, 5);
        let experts = pool.experts();
        assert_eq!(experts.len(), 10);
        assert_eq!(pool.rho_grid(), vec![0.0, 0.2, 0.4, 0.6, 0.8]);
        assert!((experts.iter().map(|e| e.q).sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(experts[5].omega, 2);
        assert_eq!(experts[5].rho, 0.0);
        assert!(PoolSpec::new(0, 3).validate().is_err());
    }

    #[test]
    fn first_period_is_uniform() {
        let seq = alternating(4);
        let p = ExpertParams {
            omega: 1,
            rho: 0.0,
            q: 1.0,
        };
        assert_eq!(expert_decide(&seq, 1, &p, 1e-8).unwrap(), Portfolio::uniform(2));
        assert!(expert_decide(&seq, 0, &p, 1e-8).is_err());
        assert!(expert_decide(&seq, 6, &p, 1e-8).is_err());
    }

    #[test]
    fn alternating_market_by_hand() {
        // x1=(2,.5) x2=(.5,2) ... omega=1, rho=0.
        // t=2: no i in 2..2 -> uniform. t=3: window x2; i=2 has window x1, corr -1 -> uniform.
        // t>=4: matches are i with x_{i-1} = x_{t-1}; their x_i all equal x_t's phase,
        // so the measure is a single atom and the portfolio is the vertex on the asset that doubles.
        let seq = alternating(8);
        let p = ExpertParams {
            omega: 1,
            rho: 0.0,
            q: 0.5,
        };
        for t in 1..=3 {
            assert_eq!(expert_decide(&seq, t, &p, 1e-8).unwrap(), Portfolio::uniform(2));
        }
        for t in 4..=9 {
            let b = expert_decide(&seq, t, &p, 1e-8).unwrap();
            let winner = if t % 2 == 1 { 0 } else { 1 };
            assert!((b.weights()[winner] - 1.0).abs() < 1e-8, "t={t}: {b:?}");
        }
    }

    #[test]
    fn step_expert_examples() {
        let p = ExpertParams {
            omega: 1,
            rho: 0.0,
            q: 1.0,
        };
        let s = ExpertState {
            params: p,
            log_wealth: 0.0,
            last_portfolio: Portfolio::vertex(2, 0),
        };
        let x = MarketVector::new(vec![2.0, 0.5]).unwrap();
        assert!((step_expert(&s, &x).wealth() - 2.0).abs() < 1e-15);
        let s = ExpertState::new(p, 3);
        assert_eq!(step_expert(&s, &MarketVector::ones(3)).wealth(), 1.0);

        // three periods with fixed portfolios: 1.5 * 0.9 * 1.3 = 1.755
        let rows = [[2.0, 1.0], [0.8, 1.0], [1.0, 1.6]];
        let bs = [vec![0.5, 0.5], vec![0.5, 0.5], vec![0.5, 0.5]];
        let mut s = ExpertState::new(p, 2);
        for (x, b) in rows.iter().zip(&bs) {
            s.last_portfolio = Portfolio::new(b.clone()).unwrap();
            s = step_expert(&s, &MarketVector::new(x.to_vec()).unwrap());
        }
        assert!((s.wealth() - 1.755).abs() < 1e-12);
    }

    #[test]
    fn mixture_wealth_examples() {
        let mk = |q: f64, w: f64| ExpertState {
            params: ExpertParams { omega: 1, rho: 0.0, q },
            log_wealth: w.ln(),
            last_portfolio: Portfolio::uniform(2),
        };
        assert!((mixture_wealth(&[mk(1.0, 3.5)]) - 3.5).abs() < 1e-14);
        assert!((mixture_wealth(&[mk(0.5, 2.0), mk(0.5, 4.0)]) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn single_period_run_is_uniform() {
        let seq = MarketSequence::from_rows(&[&[1.5, 0.9]]).unwrap();
        let run = corn_run(&seq, &PoolSpec::new(2, 3), 1e-8).unwrap();
        assert!((run.mixture.final_wealth() - 1.2).abs() < 1e-14);
        assert!(run.experts.iter().all(|e| e.decisions[0] == Portfolio::uniform(2)));
    }

    #[test]
    fn flat_market_keeps_mixture_at_one() {
        let seq = MarketSequence::from_rows(&[&[1.0, 1.0, 1.0][..]; 30]).unwrap();
        let run = corn_run(&seq, &PoolSpec::new(3, 4), 1e-8).unwrap();
        assert!(run.mixture.wealth().iter().all(|w| (w - 1.0).abs() < 1e-15));
    }

    #[test]
    fn alternating_pool_trajectory_by_hand() {
        // W=1, P=2 (rho 0 and 0.5). Both experts: uniform for t=1..3 (factor 1.25 each),
        // then the doubling vertex for t=4..8 (factor 2 each).
        let seq = alternating(8);
        let run = corn_run(&seq, &PoolSpec::new(1, 2), 1e-8).unwrap();
        let expected: Vec<f64> = (1..=8)
            .map(|t: usize| 1.25f64.powi(t.min(3) as i32) * 2f64.powi(t.saturating_sub(3) as i32))
            .collect();
        for e in &run.experts {
            for (a, b) in e.trajectory.wealth().iter().zip(&expected) {
                assert!((a / b - 1.0).abs() < 1e-8, "{a} vs {b}");
            }
        }
        for (a, b) in run.mixture.wealth().iter().zip(&expected) {
            assert!((a / b - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn fast_path_is_bitwise_reference() {
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|k| {
                let k = k as f64;
                vec![
                    1.0 + 0.03 * (k * 0.9).sin(),
                    1.0 + 0.02 * (k * 0.4).cos(),
                    1.0 - 0.01 * (k * 1.7).sin(),
                ]
            })
            .collect();
        let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        let seq = MarketSequence::from_rows(&refs).unwrap();
        let pool = PoolSpec::new(3, 4);
        let fast = corn_run(&seq, &pool, 1e-9).unwrap();
        let slow = corn_run_reference(&seq, &pool, 1e-9).unwrap();
        for (f, s) in fast.experts.iter().zip(&slow.experts) {
            assert_eq!(f.params, s.params);
            assert_eq!(f.decisions, s.decisions);
            assert_eq!(f.trajectory, s.trajectory);
        }
        assert_eq!(fast.mixture, slow.mixture);
    }

    #[test]
    fn log_sum_exp_handles_extremes() {
        assert!((log_sum_exp([0.0, 0.0]) - 2f64.ln()).abs() < 1e-15);
        assert!((log_sum_exp([1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp([-1e5, 0.0]), 0.0);
    }
}
