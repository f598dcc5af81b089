//! Log-optimal portfolios for finitely supported measures.
//!
//! [`solve`] maximizes `sum_k w_k log<b, x_k>` over the simplex with an
//! active-set Newton method and stops only once the first-order certificate
//! `max_j sum_k w_k x_kj / <b, x_k> <= 1 + tol` holds. [`oracle_solve`] is an
//! independent exhaustive grid search used as ground truth in tests.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::market::MarketVector;

/// Default certificate tolerance on the KKT gap.
pub const DEFAULT_TOL: f64 = 1e-8;

const MAX_NEWTON_ITERS: usize = 500;

#[derive(Debug, Error, PartialEq)]
pub enum LogOptError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid portfolio: {0}")]
    InvalidPortfolio(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("portfolio has non-positive wealth {wealth} on atom {atom}")]
    NonPositiveWealth { atom: usize, wealth: f64 },
    #[error("grid oracle supports at most 4 assets, got {0}")]
    DimensionTooLarge(usize),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("solver stalled with KKT gap {gap:e} above tolerance {tol:e}")]
    NotCertified { gap: f64, tol: f64 },
}

/// Allocation on the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct Portfolio(Vec<f64>);

impl Portfolio {
    pub fn new(weights: Vec<f64>) -> Result<Self, LogOptError> {
        if weights.is_empty() {
            return Err(LogOptError::InvalidPortfolio("no assets".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(LogOptError::InvalidPortfolio(format!(
                "negative or non-finite weight in {weights:?}"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(LogOptError::InvalidPortfolio(format!("weights sum to {total}")));
        }
        Ok(Self(weights))
    }

    pub fn uniform(dim: usize) -> Self {
        Self(vec![1.0 / dim as f64; dim])
    }

    /// All wealth on asset `j` (0-based).
    pub fn vertex(dim: usize, j: usize) -> Self {
        let mut w = vec![0.0; dim];
        w[j] = 1.0;
        Self(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Wealth factor `<b, x>` for one period.
    pub fn growth_factor(&self, x: &MarketVector) -> f64 {
        x.dot(&self.0)
    }

    /// Largest component-wise difference.
    pub fn max_abs_diff(&self, other: &Portfolio) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl From<Portfolio> for Vec<f64> {
    fn from(p: Portfolio) -> Self {
        p.0
    }
}

/// A probability measure with finitely many positive atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<(MarketVector, f64)>,
}

fn lexicographic(a: &MarketVector, b: &MarketVector) -> Ordering {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<(MarketVector, f64)>) -> Result<Self, LogOptError> {
        let Some(dim) = atoms.first().map(|(x, _)| x.dim()) else {
            return Err(LogOptError::InvalidMeasure("no atoms".into()));
        };
        if let Some((x, _)) = atoms.iter().find(|(x, _)| x.dim() != dim) {
            return Err(LogOptError::DimensionMismatch {
                expected: dim,
                found: x.dim(),
            });
        }
        if atoms.iter().any(|(_, w)| !(w.is_finite() && *w > 0.0)) {
            return Err(LogOptError::InvalidMeasure("atom weights must be positive".into()));
        }
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(LogOptError::InvalidMeasure(format!("weights sum to {total}")));
        }
        Ok(Self { atoms })
    }

    /// Unit mass on `(1, ..., 1)`; every portfolio is optimal for it.
    pub fn unit(dim: usize) -> Self {
        Self {
            atoms: vec![(MarketVector::ones(dim), 1.0)],
        }
    }

    /// Empirical measure from atoms with integer multiplicities. Atoms are
    /// put in lexicographic order and equal vectors merged, so any two
    /// callers holding the same multiset get a bit-identical measure.
    pub fn from_counts(mut counted: Vec<(MarketVector, usize)>) -> Result<Self, LogOptError> {
        counted.retain(|(_, c)| *c > 0);
        counted.sort_by(|a, b| lexicographic(&a.0, &b.0));
        let mut merged: Vec<(MarketVector, usize)> = Vec::with_capacity(counted.len());
        for (x, c) in counted {
            match merged.last_mut() {
                Some((last, total)) if *last == x => *total += c,
                _ => merged.push((x, c)),
            }
        }
        let n: usize = merged.iter().map(|(_, c)| c).sum();
        Self::new(merged.into_iter().map(|(x, c)| (x, c as f64 / n as f64)).collect())
    }

    /// Uniform empirical measure over a list of vectors (repeats allowed).
    pub fn empirical<'a>(vectors: impl IntoIterator<Item = &'a MarketVector>) -> Result<Self, LogOptError> {
        Self::from_counts(vectors.into_iter().map(|x| (x.clone(), 1)).collect())
    }

    pub fn atoms(&self) -> &[(MarketVector, f64)] {
        &self.atoms
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].0.dim()
    }

    /// Same measure with coordinates permuted: new coordinate `j` is old
    /// coordinate `perm[j]`.
    pub fn permute_assets(&self, perm: &[usize]) -> Self {
        let atoms = self
            .atoms
            .iter()
            .map(|(x, w)| {
                let v = perm.iter().map(|&j| x[j]).collect();
                (MarketVector::new(v).expect("permutation keeps positivity"), *w)
            })
            .collect();
        Self { atoms }
    }
}

fn check_dim(m: &DiscreteMeasure, b: &Portfolio) -> Result<(), LogOptError> {
    if m.dim() != b.dim() {
        return Err(LogOptError::DimensionMismatch {
            expected: m.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

fn objective(m: &DiscreteMeasure, b: &[f64]) -> f64 {
    m.atoms.iter().map(|(x, w)| w * x.dot(b).ln()).sum()
}

/// Expected log growth `sum_k w_k log<b, x_k>`.
pub fn log_wealth(m: &DiscreteMeasure, b: &Portfolio) -> Result<f64, LogOptError> {
    check_dim(m, b)?;
    let mut total = 0.0;
    for (k, (x, w)) in m.atoms.iter().enumerate() {
        let wealth = x.dot(b.weights());
        if wealth.is_nan() || wealth <= 0.0 {
            return Err(LogOptError::NonPositiveWealth { atom: k, wealth });
        }
        total += w * wealth.ln();
    }
    Ok(total)
}

/// `g_j = sum_k w_k x_kj / <b, x_k>`. Note `sum_j b_j g_j = 1` for every `b`.
fn kkt_sums(m: &DiscreteMeasure, b: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; b.len()];
    for (x, w) in &m.atoms {
        let scale = w / x.dot(b);
        for (gj, xj) in g.iter_mut().zip(x.as_slice()) {
            *gj += scale * xj;
        }
    }
    g
}

/// Result of a first-order optimality check.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub optimal: bool,
    /// `max_j g_j - 1`; non-positive at an exact optimum.
    pub max_violation: f64,
    /// Largest `|g_j - 1|` over coordinates held with positive weight.
    pub complementarity: f64,
    pub kkt_sums: Vec<f64>,
}

/// Checks that no vertex direction improves `b` by more than `tol`.
pub fn certify(m: &DiscreteMeasure, b: &Portfolio, tol: f64) -> Certificate {
    let g = kkt_sums(m, b.weights());
    let max_violation = g.iter().copied().fold(f64::NEG_INFINITY, f64::max) - 1.0;
    let complementarity = g
        .iter()
        .zip(b.weights())
        .filter(|(_, bj)| **bj > 0.0)
        .map(|(gj, _)| (gj - 1.0).abs())
        .fold(0.0, f64::max);
    Certificate {
        optimal: max_violation <= tol,
        max_violation,
        complementarity,
        kkt_sums: g,
    }
}

fn hessian_magnitude(m: &DiscreteMeasure, b: &[f64]) -> DMatrix<f64> {
    // -Hessian of the objective: sum_k w_k x_k x_k^T / <b,x_k>^2, PSD
    let d = b.len();
    let mut h = DMatrix::zeros(d, d);
    for (x, w) in &m.atoms {
        let r = x.dot(b);
        let scale = w / (r * r);
        let xs = x.as_slice();
        for i in 0..d {
            for j in i..d {
                h[(i, j)] += scale * xs[i] * xs[j];
            }
        }
    }
    for i in 0..d {
        for j in 0..i {
            h[(i, j)] = h[(j, i)];
        }
    }
    h
}

/// Newton direction restricted to `free` coordinates and the hyperplane
/// `sum delta = 0`.
fn newton_direction(h: &DMatrix<f64>, g: &[f64], free: &[usize]) -> Option<Vec<f64>> {
    let k = free.len();
    let scale = free.iter().map(|&i| h[(i, i)]).fold(0.0, f64::max);
    let ridge = 1e-10 * scale.max(1e-300);
    let mut kkt = DMatrix::zeros(k + 1, k + 1);
    let mut rhs = DVector::zeros(k + 1);
    for (a, &i) in free.iter().enumerate() {
        for (c, &j) in free.iter().enumerate() {
            kkt[(a, c)] = h[(i, j)];
        }
        kkt[(a, a)] += ridge;
        kkt[(a, k)] = 1.0;
        kkt[(k, a)] = 1.0;
        rhs[a] = g[i];
    }
    let sol = kkt.lu().solve(&rhs)?;
    let mut delta = vec![0.0; g.len()];
    for (a, &i) in free.iter().enumerate() {
        delta[i] = sol[a];
    }
    Some(delta)
}

fn renormalize(b: &mut [f64]) {
    for v in b.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let total: f64 = b.iter().sum();
    b.iter_mut().for_each(|v| *v /= total);
}

/// Log-optimal portfolio of `m`, certified to `tol` on the KKT gap.
///
/// Starts from the uniform portfolio, so a measure for which every
/// portfolio is optimal (such as the unit atom) returns uniform weights.
pub fn solve(m: &DiscreteMeasure, tol: f64) -> Result<Portfolio, LogOptError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(LogOptError::InvalidTolerance(tol));
    }
    let d = m.dim();
    let mut b = vec![1.0 / d as f64; d];
    let mut gap = f64::INFINITY;
    for _ in 0..MAX_NEWTON_ITERS {
        let g = kkt_sums(m, &b);
        gap = g.iter().copied().fold(f64::NEG_INFINITY, f64::max) - 1.0;
        if gap <= tol {
            return Ok(Portfolio(b));
        }
        let h = hessian_magnitude(m, &b);

        let mut free: Vec<usize> = (0..d).filter(|&j| b[j] > 0.0 || g[j] > 1.0).collect();
        let delta = loop {
            if free.len() < 2 {
                break None;
            }
            let Some(delta) = newton_direction(&h, &g, &free) else {
                break None;
            };
            let before = free.len();
            free.retain(|&j| !(b[j] == 0.0 && delta[j] < 0.0));
            if free.len() == before {
                break Some(delta);
            }
        };
        let Some(delta) = delta else {
            break;
        };

        let slope: f64 = g.iter().zip(&delta).map(|(a, c)| a * c).sum();
        if slope.is_nan() || slope <= 0.0 {
            break;
        }
        let mut max_step = 1.0;
        let mut blocking = None;
        for j in 0..d {
            if delta[j] < 0.0 {
                let limit = b[j] / -delta[j];
                if limit < max_step {
                    max_step = limit;
                    blocking = Some(j);
                }
            }
        }

        let f0 = objective(m, &b);
        let mut step = max_step;
        let mut accepted = None;
        while step > 1e-16 {
            let mut trial: Vec<f64> = b.iter().zip(&delta).map(|(bj, dj)| bj + step * dj).collect();
            if step == max_step {
                if let Some(j) = blocking {
                    trial[j] = 0.0;
                }
            }
            renormalize(&mut trial);
            let f = objective(m, &trial);
            if f >= f0 + 1e-4 * step * slope {
                accepted = Some(trial);
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some(next) => b = next,
            None => break,
        }
    }
    Err(LogOptError::NotCertified { gap, tol })
}

/// Exhaustive search over the simplex grid with spacing `grid_step`,
/// followed by a compass search along edge directions `e_i - e_j`.
/// Exponential in the number of assets; for tests only.
pub fn oracle_solve(m: &DiscreteMeasure, grid_step: f64) -> Result<Portfolio, LogOptError> {
    let d = m.dim();
    if d > 4 {
        return Err(LogOptError::DimensionTooLarge(d));
    }
    if !(grid_step > 0.0 && grid_step <= 1.0) {
        return Err(LogOptError::InvalidTolerance(grid_step));
    }
    let steps = (1.0 / grid_step).round().max(1.0) as usize;
    let mut best = vec![1.0 / d as f64; d];
    let mut best_value = objective(m, &best);
    let mut counts = vec![0usize; d];
    enumerate_compositions(&mut counts, 0, steps, &mut |c| {
        let b: Vec<f64> = c.iter().map(|&k| k as f64 / steps as f64).collect();
        let v = objective(m, &b);
        if v > best_value {
            best_value = v;
            best = b;
        }
    });

    let mut step = grid_step;
    while step > 1e-13 {
        let mut improved = false;
        for i in 0..d {
            for j in 0..d {
                if i == j || best[j] <= 0.0 {
                    continue;
                }
                let mv = step.min(best[j]);
                let mut trial = best.clone();
                trial[i] += mv;
                trial[j] -= mv;
                let v = objective(m, &trial);
                if v > best_value {
                    best_value = v;
                    best = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    renormalize(&mut best);
    Ok(Portfolio(best))
}

fn enumerate_compositions(counts: &mut [usize], pos: usize, remaining: usize, visit: &mut impl FnMut(&[usize])) {
    if pos == counts.len() - 1 {
        counts[pos] = remaining;
        visit(counts);
        return;
    }
    for k in 0..=remaining {
        counts[pos] = k;
        enumerate_compositions(counts, pos + 1, remaining - k, visit);
    }
}
