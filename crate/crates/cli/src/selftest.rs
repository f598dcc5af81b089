//! Built-in consistency checks of the numerical core.

use std::time::Instant;

use corn_core::logopt::{certify, log_wealth, oracle_solve, solve, DiscreteMeasure};
use corn_core::market::{MarketSequence, MarketVector};
use corn_core::similarity::{mean_squared_difference, pearson, window_at};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SOLVER_CASES: usize = 50;
pub const GRID_STEP: f64 = 1e-3;
pub const CERT_TOL: f64 = 1e-8;
pub const WINDOW_PAIRS: usize = 1000;

pub struct Suite {
    pub name: &'static str,
    pub check: fn(u64) -> Result<String, String>,
}

pub fn suites() -> Vec<Suite> {
    vec![
        Suite {
            name: "solver_vs_grid_oracle",
            check: solver_vs_oracle,
        },
        Suite {
            name: "distance_rule_equivalence",
            check: distance_rule_equivalence,
        },
    ]
}

fn injected(_: u64) -> Result<String, String> {
    Err("injected failure".into())
}

/// Runs every suite, printing one status line each. Returns true when all
/// pass.
pub fn run(seed: u64, inject_failure: bool) -> bool {
    let mut all = suites();
    if inject_failure {
        all.push(Suite {
            name: "injected_failure",
            check: injected,
        });
    }
    let mut ok = true;
    for suite in all {
        let start = Instant::now();
        let result = (suite.check)(seed);
        let ms = start.elapsed().as_secs_f64() * 1e3;
        match result {
            Ok(detail) => println!("ok    {:<28} {detail} ({ms:.1} ms)", suite.name),
            Err(detail) => {
                ok = false;
                println!("FAIL  {:<28} {detail} ({ms:.1} ms)", suite.name);
            }
        }
    }
    println!("{}", if ok { "selftest passed" } else { "selftest FAILED" });
    ok
}

/// Random measure with up to 6 atoms and components in [0.5, 2].
pub fn random_measure(rng: &mut ChaCha8Rng, dim: usize) -> DiscreteMeasure {
    let atoms = rng.random_range(1..=6);
    let raw: Vec<f64> = (0..atoms).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let head: f64 = weights[..atoms - 1].iter().sum();
    weights[atoms - 1] = 1.0 - head;
    let atoms = weights
        .into_iter()
        .map(|w| {
            let v = (0..dim).map(|_| rng.random_range(0.5..2.0)).collect();
            (MarketVector::new(v).expect("positive"), w)
        })
        .collect();
    DiscreteMeasure::new(atoms).expect("normalized")
}

pub fn solver_vs_oracle(seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for case in 0..SOLVER_CASES {
        let dim = 2 + case % 2;
        let m = random_measure(&mut rng, dim);
        let b = solve(&m, CERT_TOL).map_err(|e| format!("case {case}: {e}"))?;
        let o = oracle_solve(&m, GRID_STEP).map_err(|e| format!("case {case}: {e}"))?;
        let diff = (log_wealth(&m, &b).unwrap() - log_wealth(&m, &o).unwrap()).abs();
        worst = worst.max(diff);
        if diff > 10.0 * GRID_STEP {
            return Err(format!("case {case}: objective differs by {diff}"));
        }
        let cert = certify(&m, &b, CERT_TOL);
        if !cert.optimal {
            return Err(format!("case {case}: certificate gap {}", cert.max_violation));
        }
    }
    Ok(format!("{SOLVER_CASES} measures, worst objective gap {worst:.2e}"))
}

/// Shifts and scales `v` to mean 1 and population variance 0.01.
pub fn normalize(v: &[f64]) -> Vec<f64> {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt();
    v.iter().map(|x| 1.0 + 0.1 * (x - m) / sd).collect()
}

/// Window pairs with equal entry mean and variance: correlation at least
/// `rho` exactly when the mean squared difference is at most
/// `2 var (1 - rho)`.
pub fn distance_rule_equivalence(seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut decisions = 0;
    for pair in 0..WINDOW_PAIRS {
        let dim = rng.random_range(2..=3);
        let omega = rng.random_range(1..=4);
        let len = dim * omega;
        let mut draw = || normalize(&(0..len).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>());
        let (a, b) = (draw(), draw());
        let rows: Vec<MarketVector> = a
            .chunks(dim)
            .chain(b.chunks(dim))
            .map(|r| MarketVector::new(r.to_vec()).expect("positive"))
            .collect();
        let seq = MarketSequence::from_vectors(rows).map_err(|e| e.to_string())?;
        let wa = window_at(&seq, omega + 1, omega).map_err(|e| e.to_string())?;
        let wb = window_at(&seq, 2 * omega + 1, omega).map_err(|e| e.to_string())?;
        let corr = pearson(&wa, &wb).map_err(|e| e.to_string())?.ok_or("constant window")?;
        let dist = mean_squared_difference(&wa, &wb);
        let var = wb.population_variance();
        for k in 0..10 {
            let rho = k as f64 / 10.0;
            decisions += 1;
            if (corr >= rho) != (dist <= 2.0 * var * (1.0 - rho)) {
                return Err(format!("pair {pair}, rho {rho}: correlation {corr}, distance {dist}"));
            }
        }
    }
    Ok(format!("{WINDOW_PAIRS} pairs, {decisions} membership decisions agree"))
}
