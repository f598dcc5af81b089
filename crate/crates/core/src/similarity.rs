//! Window extraction, correlation between windows, and the match sets that
//! carry each expert's empirical measure.
//!
//! Periods are 1-based. The window deciding period `t` holds periods
//! `t - omega ..= t - 1`, flattened oldest first, so it exists for
//! `omega < t <= n + 1`.

use std::collections::HashMap;

use thiserror::Error;

use crate::market::{MarketSequence, MarketVector};

#[derive(Debug, Error, PartialEq)]
pub enum SimilarityError {
    #[error("window of length {omega} needs t > {omega}, got t = {t}")]
    InsufficientHistory { t: usize, omega: usize },
    #[error("period {t} is past the end of a {n}-period sequence")]
    OutOfRange { t: usize, n: usize },
    #[error("window shapes differ: {left} vs {right} entries")]
    DimensionMismatch { left: usize, right: usize },
    #[error("window length must be at least 1")]
    ZeroOmega,
    #[error("correlation threshold {0} outside [0, 1)")]
    InvalidRho(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    entries: Vec<f64>,
    omega: usize,
}

impl Window {
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn omega(&self) -> usize {
        self.omega
    }

    fn mean(&self) -> f64 {
        self.entries.iter().sum::<f64>() / self.entries.len() as f64
    }

    /// Variance of the entries with `1/(d*omega)` normalization.
    pub fn population_variance(&self) -> f64 {
        let mean = self.mean();
        self.entries.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / self.entries.len() as f64
    }
}

/// The window used to decide period `t`.
pub fn window_at(seq: &MarketSequence, t: usize, omega: usize) -> Result<Window, SimilarityError> {
    if omega == 0 {
        return Err(SimilarityError::ZeroOmega);
    }
    if t <= omega {
        return Err(SimilarityError::InsufficientHistory { t, omega });
    }
    if t > seq.len() + 1 {
        return Err(SimilarityError::OutOfRange { t, n: seq.len() });
    }
    let entries = seq.periods()[t - 1 - omega..t - 1]
        .iter()
        .flat_map(|x| x.as_slice().iter().copied())
        .collect();
    Ok(Window { entries, omega })
}

/// A window with its mean removed and the root of its centered sum of
/// squares, ready for repeated correlation. `None` marks a constant window.
#[derive(Debug, Clone)]
struct Centered {
    values: Vec<f64>,
    norm: f64,
}

fn center(entries: &[f64]) -> Option<Centered> {
    let first = *entries.first()?;
    if entries.iter().all(|&v| v == first) {
        return None;
    }
    let mean = entries.iter().sum::<f64>() / entries.len() as f64;
    let values: Vec<f64> = entries.iter().map(|v| v - mean).collect();
    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    Some(Centered { values, norm })
}

fn correlate(a: &Centered, b: &Centered) -> f64 {
    let dot: f64 = a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum();
    (dot / (a.norm * b.norm)).clamp(-1.0, 1.0)
}

/// Sample Pearson correlation of the flattened entries. `Ok(None)` when
/// either window is constant.
pub fn pearson(a: &Window, b: &Window) -> Result<Option<f64>, SimilarityError> {
    if a.entries.len() != b.entries.len() || a.omega != b.omega {
        return Err(SimilarityError::DimensionMismatch {
            left: a.entries.len(),
            right: b.entries.len(),
        });
    }
    Ok(match (center(&a.entries), center(&b.entries)) {
        (Some(ca), Some(cb)) => Some(correlate(&ca, &cb)),
        _ => None,
    })
}

/// Sorted 1-based period indices whose preceding window matched.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchSet {
    pub indices: Vec<usize>,
    pub rho: f64,
    pub omega: usize,
}

impl MatchSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn is_subset_of(&self, other: &MatchSet) -> bool {
        // both sorted
        let mut it = other.indices.iter().peekable();
        self.indices.iter().all(|i| {
            while it.peek().is_some_and(|j| *j < i) {
                it.next();
            }
            it.peek() == Some(&i)
        })
    }

    /// `|A xor B| / |A or B|`, zero when both are empty.
    pub fn disagreement(&self, other: &MatchSet) -> f64 {
        let a: std::collections::BTreeSet<_> = self.indices.iter().collect();
        let b: std::collections::BTreeSet<_> = other.indices.iter().collect();
        let union = a.union(&b).count();
        if union == 0 {
            return 0.0;
        }
        a.symmetric_difference(&b).count() as f64 / union as f64
    }
}

fn check_match_args(seq: &MarketSequence, t: usize, omega: usize, rho: f64) -> Result<(), SimilarityError> {
    if !(0.0..1.0).contains(&rho) {
        return Err(SimilarityError::InvalidRho(rho));
    }
    window_at(seq, t, omega).map(|_| ())
}

/// Periods `i` in `omega < i < t` whose window correlates with the window
/// of `t` at level `rho` or above. Constant windows never match.
pub fn match_set(seq: &MarketSequence, t: usize, omega: usize, rho: f64) -> Result<MatchSet, SimilarityError> {
    check_match_args(seq, t, omega, rho)?;
    let current = window_at(seq, t, omega)?;
    let mut indices = Vec::new();
    for i in omega + 1..t {
        let past = window_at(seq, i, omega)?;
        if pearson(&past, &current)?.is_some_and(|c| c >= rho) {
            indices.push(i);
        }
    }
    Ok(MatchSet { indices, rho, omega })
}

/// Squared-distance form of the correlation rule: `i` matches when the
/// mean squared entry difference to the current window is at most
/// `2 * var(s) * (1 - rho)`, with population variance of the current
/// window `s`.
pub fn distance_match_set(seq: &MarketSequence, t: usize, omega: usize, rho: f64) -> Result<MatchSet, SimilarityError> {
    check_match_args(seq, t, omega, rho)?;
    let current = window_at(seq, t, omega)?;
    let threshold = 2.0 * current.population_variance() * (1.0 - rho);
    let mut indices = Vec::new();
    for i in omega + 1..t {
        let past = window_at(seq, i, omega)?;
        if mean_squared_difference(&past, &current) <= threshold {
            indices.push(i);
        }
    }
    Ok(MatchSet { indices, rho, omega })
}

pub fn mean_squared_difference(a: &Window, b: &Window) -> f64 {
    a.entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / a.entries.len() as f64
}

/// Uniform weights over the matched next-period vectors, or a unit atom on
/// `(1, ..., 1)` when nothing matched.
pub fn empirical_measure_weights(ms: &MatchSet, seq: &MarketSequence) -> Vec<(MarketVector, f64)> {
    if ms.is_empty() {
        return vec![(MarketVector::ones(seq.dim()), 1.0)];
    }
    let w = 1.0 / ms.len() as f64;
    ms.indices.iter().map(|&i| (seq.period(i).clone(), w)).collect()
}

/// Every window of one length over a sequence, grouped into classes of
/// bitwise-equal windows and centered once per class. Correlations read
/// from the classes are bit-identical to [`pearson`] on the same pair.
#[derive(Debug, Clone)]
pub struct WindowClasses {
    omega: usize,
    // slot k holds the class of the window deciding period omega + 1 + k
    class_of: Vec<usize>,
    centered: Vec<Option<Centered>>,
}

impl WindowClasses {
    /// Windows for periods `omega + 1 ..= n + 1`.
    pub fn new(seq: &MarketSequence, omega: usize) -> Result<Self, SimilarityError> {
        if omega == 0 {
            return Err(SimilarityError::ZeroOmega);
        }
        let mut ids: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut class_of = Vec::with_capacity((seq.len() + 1).saturating_sub(omega));
        let mut centered = Vec::new();
        for t in omega + 1..=seq.len() + 1 {
            let w = window_at(seq, t, omega)?;
            let key: Vec<u64> = w.entries.iter().map(|v| v.to_bits()).collect();
            let next = centered.len();
            let id = *ids.entry(key).or_insert(next);
            if id == next {
                centered.push(center(&w.entries));
            }
            class_of.push(id);
        }
        Ok(Self {
            omega,
            class_of,
            centered,
        })
    }

    pub fn omega(&self) -> usize {
        self.omega
    }

    pub fn class_count(&self) -> usize {
        self.centered.len()
    }

    /// Class of the window deciding period `t`, for `omega < t <= n + 1`.
    pub fn class_at(&self, t: usize) -> usize {
        self.class_of[t - self.omega - 1]
    }

    /// Correlation between two classes; `None` if either is constant.
    pub fn correlation(&self, a: usize, b: usize) -> Option<f64> {
        match (&self.centered[a], &self.centered[b]) {
            (Some(ca), Some(cb)) => Some(correlate(ca, cb)),
            _ => None,
        }
    }
}
