//! Independent reference computations for the integration tests. Nothing
//! here calls the solver or the match-set code.

#![allow(dead_code)]

use corn_core::logopt::DiscreteMeasure;
use corn_core::market::{MarketVector, Outcome, SyntheticMarketSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn outcome(v: &[f64], p: f64) -> Outcome {
    Outcome::new(v, p).unwrap()
}

pub fn mv(v: &[f64]) -> MarketVector {
    MarketVector::new(v.to_vec()).unwrap()
}

/// Maximizer of a unimodal function on `[lo, hi]`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        }
    }
    0.5 * (lo + hi)
}

/// Expected log growth of a two-asset measure when holding `f` in asset 0.
pub fn two_asset_objective(atoms: &[([f64; 2], f64)], f: f64) -> f64 {
    atoms.iter().map(|(x, w)| w * (f * x[0] + (1.0 - f) * x[1]).ln()).sum()
}

/// Closed-form Kelly fraction for cash plus one risky asset paying relative
/// price `up` with probability `p` and `down` otherwise, clipped to [0, 1].
pub fn kelly_fraction(p: f64, up: f64, down: f64) -> f64 {
    let q = 1.0 - p;
    let f = -(p * (up - 1.0) + q * (down - 1.0)) / ((up - 1.0) * (down - 1.0));
    f.clamp(0.0, 1.0)
}

pub fn kelly_growth(p: f64, up: f64, down: f64) -> f64 {
    let f = kelly_fraction(p, up, down);
    p * (1.0 + f * (up - 1.0)).ln() + (1.0 - p) * (1.0 + f * (down - 1.0)).ln()
}

/// Cash plus a risky asset moving +-20% with p = 0.6.
pub fn kelly_spec(seed: u64) -> SyntheticMarketSpec {
    SyntheticMarketSpec::iid(vec![outcome(&[1.0, 1.2], 0.6), outcome(&[1.0, 0.8], 0.4)], seed)
}

/// Cash plus a double-or-half risky asset with p = 0.6.
pub fn double_or_half_spec(seed: u64) -> SyntheticMarketSpec {
    SyntheticMarketSpec::iid(vec![outcome(&[1.0, 2.0], 0.6), outcome(&[1.0, 0.5], 0.4)], seed)
}

pub fn alternating_spec(seed: u64) -> SyntheticMarketSpec {
    SyntheticMarketSpec::markov(
        vec![vec![outcome(&[2.0, 0.5], 1.0)], vec![outcome(&[0.5, 2.0], 1.0)]],
        vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        seed,
    )
}

/// Sticky two-regime market: regime A favours asset 0, regime B asset 1.
pub fn sticky_spec(seed: u64) -> SyntheticMarketSpec {
    SyntheticMarketSpec::markov(
        vec![
            vec![outcome(&[1.2, 0.9], 0.6), outcome(&[1.1, 1.0], 0.4)],
            vec![outcome(&[0.9, 1.15], 0.7), outcome(&[0.95, 1.05], 0.3)],
        ],
        vec![vec![0.9, 0.1], vec![0.1, 0.9]],
        seed,
    )
}

/// The sticky market scaled to moves of a few tenths of a percent to two
/// percent, the magnitude real daily relative prices show.
pub fn calibrated_spec(seed: u64) -> SyntheticMarketSpec {
    SyntheticMarketSpec::markov(
        vec![
            vec![outcome(&[1.02, 0.99], 0.6), outcome(&[1.01, 1.0], 0.4)],
            vec![outcome(&[0.99, 1.015], 0.7), outcome(&[0.995, 1.005], 0.3)],
        ],
        vec![vec![0.9, 0.1], vec![0.1, 0.9]],
        seed,
    )
}

/// Random measure with 1..=6 atoms whose components lie in [0.5, 2].
pub fn random_measure(rng: &mut ChaCha8Rng, dim: usize) -> DiscreteMeasure {
    let atoms = rng.random_range(1..=6);
    let raw: Vec<f64> = (0..atoms).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    // force exact normalization on the last atom
    let head: f64 = weights[..atoms - 1].iter().sum();
    weights[atoms - 1] = 1.0 - head;
    DiscreteMeasure::new(
        weights
            .into_iter()
            .map(|w| {
                let v = (0..dim).map(|_| rng.random_range(0.5..2.0)).collect();
                (MarketVector::new(v).unwrap(), w)
            })
            .collect(),
    )
    .unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two-pass Pearson correlation, `None` for a constant input.
pub fn reference_pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        return None;
    }
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    Some(cov / (va.sqrt() * vb.sqrt()))
}

/// Rescales `v` to mean `mean` and population variance `var`.
pub fn normalize(v: &[f64], mean: f64, var: f64) -> Vec<f64> {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let s = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt();
    v.iter().map(|x| mean + (x - m) / s * var.sqrt()).collect()
}
