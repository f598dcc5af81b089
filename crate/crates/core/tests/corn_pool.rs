mod common;

use common::*;
use corn_core::backtest::run_strategy;
use corn_core::corn::{corn_run, corn_run_reference, expert_decide, ExpertParams, PoolSpec};
use corn_core::logopt::{solve, DiscreteMeasure, Portfolio};
use corn_core::market::{generate, MarketSequence, MarketVector};

const TOL: f64 = 1e-8;

#[test]
fn fast_path_equals_reference_on_discrete_markets() {
    for (spec, n) in [(kelly_spec(1), 150), (sticky_spec(2), 150), (alternating_spec(3), 60)] {
        let seq = generate(&spec, n).unwrap();
        let pool = PoolSpec::new(3, 4);
        let fast = corn_run(&seq, &pool, TOL).unwrap();
        let slow = corn_run_reference(&seq, &pool, TOL).unwrap();
        for (a, b) in fast.experts.iter().zip(&slow.experts) {
            assert_eq!(a.params, b.params);
            assert_eq!(a.decisions, b.decisions);
            assert_eq!(a.trajectory, b.trajectory);
        }
        assert_eq!(fast.mixture, slow.mixture);
    }
}

#[test]
fn fast_path_equals_reference_on_continuous_prices() {
    let mut r = rng(77);
    use rand::Rng;
    let rows: Vec<Vec<f64>> = (0..80)
        .map(|_| (0..3).map(|_| r.random_range(0.9..1.1)).collect())
        .collect();
    let refs: Vec<&[f64]> = rows.iter().map(|v| v.as_slice()).collect();
    let seq = MarketSequence::from_rows(&refs).unwrap();
    let pool = PoolSpec::new(2, 3);
    let fast = corn_run(&seq, &pool, TOL).unwrap();
    let slow = corn_run_reference(&seq, &pool, TOL).unwrap();
    assert_eq!(fast.mixture, slow.mixture);
}

#[test]
fn decisions_ignore_the_future() {
    let seq = generate(&sticky_spec(12), 120).unwrap();
    let mut altered: Vec<MarketVector> = seq.periods().to_vec();
    for x in &mut altered[80..] {
        *x = mv(&[3.0, 0.2]);
    }
    let altered = MarketSequence::from_vectors(altered).unwrap();
    let pool = PoolSpec::new(2, 3);
    let a = corn_run(&seq, &pool, TOL).unwrap();
    let b = corn_run(&altered, &pool, TOL).unwrap();
    for (ea, eb) in a.experts.iter().zip(&b.experts) {
        // the decision for period 81 uses periods 1..80 only
        assert_eq!(ea.decisions[..81], eb.decisions[..81]);
    }
    assert_eq!(a.mixture.log_wealth()[..80], b.mixture.log_wealth()[..80]);
}

#[test]
fn mixture_equals_wealth_weighted_portfolio_strategy() {
    let seq = generate(&sticky_spec(21), 300).unwrap();
    let run = corn_run(&seq, &PoolSpec::new(2, 5), TOL).unwrap();
    let traj = run_strategy(&seq, |_, t| run.mixture_decision(t)).unwrap();
    for (a, b) in traj.log_wealth().iter().zip(run.mixture.log_wealth()) {
        assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn mixture_lies_between_worst_and_best_expert() {
    let seq = generate(&kelly_spec(8), 400).unwrap();
    let run = corn_run(&seq, &PoolSpec::new(3, 4), TOL).unwrap();
    for t in [1, 10, 100, 400] {
        let logs: Vec<f64> = run.experts.iter().map(|e| e.trajectory.log_wealth_at(t)).collect();
        let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let m = run.mixture.log_wealth_at(t);
        assert!(m >= lo - 1e-12 && m <= hi + 1e-12);
        assert!(m / t as f64 >= run.lower_bound_at(t) - 1e-12);
    }
}

#[test]
fn single_unthresholded_expert_approaches_the_empirical_optimum() {
    let n = 5000;
    let seq = generate(&double_or_half_spec(6), n).unwrap();
    let params = ExpertParams {
        omega: 1,
        rho: 0.0,
        q: 1.0,
    };
    let b = expert_decide(&seq, n + 1, &params, TOL).unwrap();
    let target = solve(&DiscreteMeasure::empirical(seq.periods()).unwrap(), TOL).unwrap();
    assert!(
        b.max_abs_diff(&target) < 0.05,
        "{:?} vs {:?}",
        b.weights(),
        target.weights()
    );
}

#[test]
fn unmatched_expert_holds_uniform() {
    // constant windows have no correlation, so nothing ever matches
    let seq = MarketSequence::from_rows(&[&[1.0, 1.0][..]; 10]).unwrap();
    let run = corn_run(&seq, &PoolSpec::new(2, 2), TOL).unwrap();
    for e in &run.experts {
        assert!(e.decisions.iter().all(|b| *b == Portfolio::uniform(2)));
    }
    assert!(run.mixture.log_wealth().iter().all(|l| l.abs() < 1e-15));
}
