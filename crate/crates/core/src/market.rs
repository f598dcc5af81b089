//! Market data: relative-price vectors, CSV ingestion and synthetic
//! stationary ergodic generators.
//!
//! Synthetic markets are drawn with ChaCha8 (`rand_chacha::ChaCha8Rng`)
//! seeded through `SeedableRng::seed_from_u64`. Every categorical draw takes
//! one uniform `f64` in `[0, 1)` (53 random mantissa bits, the `rand`
//! `StandardUniform` conversion) and scans the cumulative probabilities in
//! declaration order, picking the first index whose cumulative mass exceeds
//! the draw. A Markov run draws the initial regime from the stationary
//! distribution, then for every period draws the outcome from the current
//! regime followed by the next regime from the transition row.

use std::fmt;
use std::io::Read;
use std::ops::Index;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on probability vectors and transition rows.
pub const PROB_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MarketError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("non-positive price at line {line}, column {column}")]
    NonPositivePrice { line: u64, column: usize },
    #[error("file contains no data rows")]
    EmptyFile,
    #[error("invalid market vector: {0}")]
    InvalidVector(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid synthetic market spec: {0}")]
    InvalidSpec(String),
}

/// One period's relative prices: today's price over yesterday's, per asset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MarketVector(Vec<f64>);

impl MarketVector {
    pub fn new(values: Vec<f64>) -> Result<Self, MarketError> {
        if values.len() < 2 {
            return Err(MarketError::InvalidVector(format!(
                "need at least 2 assets, got {}",
                values.len()
            )));
        }
        if let Some((j, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(MarketError::InvalidVector(format!(
                "component {} is {v}, must be positive and finite",
                j + 1
            )));
        }
        Ok(Self(values))
    }

    /// The all-ones vector: every asset keeps its price.
    pub fn ones(dim: usize) -> Self {
        Self(vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Inner product with a weight vector of the same dimension.
    pub fn dot(&self, weights: &[f64]) -> f64 {
        debug_assert_eq!(weights.len(), self.0.len());
        self.0.iter().zip(weights).map(|(x, b)| x * b).sum()
    }

    /// Component-wise equality within `tol`.
    pub fn approx_eq(&self, other: &MarketVector, tol: f64) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| (a - b).abs() <= tol)
    }
}

impl TryFrom<Vec<f64>> for MarketVector {
    type Error = MarketError;

    fn try_from(values: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(values)
    }
}

impl From<MarketVector> for Vec<f64> {
    fn from(v: MarketVector) -> Self {
        v.0
    }
}

impl Index<usize> for MarketVector {
    type Output = f64;

    fn index(&self, j: usize) -> &f64 {
        &self.0[j]
    }
}

impl fmt::Display for MarketVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, v) in self.0.iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// An immutable sequence of market vectors sharing one dimension.
///
/// Periods are numbered from 1 in the public API: `period(1)` is the first
/// row. Internally the storage is zero-based.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketSequence {
    periods: Vec<MarketVector>,
    asset_names: Vec<String>,
}

impl MarketSequence {
    pub fn new(periods: Vec<MarketVector>, asset_names: Vec<String>) -> Result<Self, MarketError> {
        let dim = asset_names.len();
        if dim < 2 {
            return Err(MarketError::InvalidVector(format!("need at least 2 assets, got {dim}")));
        }
        if let Some(bad) = periods.iter().find(|p| p.dim() != dim) {
            return Err(MarketError::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self { periods, asset_names })
    }

    /// Builds a sequence with generic asset labels `asset_1..asset_d`.
    pub fn from_vectors(periods: Vec<MarketVector>) -> Result<Self, MarketError> {
        let dim = periods.first().map(MarketVector::dim).ok_or(MarketError::EmptyFile)?;
        Self::new(periods, default_asset_names(dim))
    }

    /// Convenience for tests and literals: validates every row.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self, MarketError> {
        let periods = rows
            .iter()
            .map(|r| MarketVector::new(r.to_vec()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_vectors(periods)
    }

    /// Converts raw prices into relative prices (ratio of consecutive rows).
    /// `n` price rows produce `n - 1` periods.
    pub fn from_prices(prices: &[Vec<f64>], asset_names: Vec<String>) -> Result<Self, MarketError> {
        let periods = prices
            .windows(2)
            .map(|w| {
                if w[0].len() != w[1].len() {
                    return Err(MarketError::DimensionMismatch {
                        expected: w[0].len(),
                        found: w[1].len(),
                    });
                }
                MarketVector::new(w[1].iter().zip(&w[0]).map(|(now, prev)| now / prev).collect())
            })
            .collect::<Result<Vec<_>, _>>()?;
        if periods.is_empty() {
            return Err(MarketError::EmptyFile);
        }
        Self::new(periods, asset_names)
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.asset_names.len()
    }

    pub fn asset_names(&self) -> &[String] {
        &self.asset_names
    }

    /// Period `t`, 1-based.
    pub fn period(&self, t: usize) -> &MarketVector {
        assert!(t >= 1 && t <= self.len(), "period {t} out of range 1..={}", self.len());
        &self.periods[t - 1]
    }

    pub fn periods(&self) -> &[MarketVector] {
        &self.periods
    }

    /// The first `n` periods.
    pub fn prefix(&self, n: usize) -> MarketSequence {
        MarketSequence {
            periods: self.periods[..n.min(self.len())].to_vec(),
            asset_names: self.asset_names.clone(),
        }
    }
}

fn default_asset_names(dim: usize) -> Vec<String> {
    (1..=dim).map(|j| format!("asset_{j}")).collect()
}

/// Loads a relative-price CSV: a header of asset names followed by rows of
/// positive decimals.
pub fn load_csv(path: impl AsRef<Path>) -> Result<MarketSequence, MarketError> {
    let file = std::fs::File::open(path)?;
    read_csv(file, false)
}

/// Loads a raw price CSV and converts it to relative prices.
pub fn load_price_csv(path: impl AsRef<Path>) -> Result<MarketSequence, MarketError> {
    let file = std::fs::File::open(path)?;
    read_csv(file, true)
}

/// Parses CSV content from any reader. With `prices_to_relatives`, rows are
/// raw prices and consecutive ratios become the periods.
pub fn read_csv<R: Read>(reader: R, prices_to_relatives: bool) -> Result<MarketSequence, MarketError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| MarketError::MalformedRow {
        line: 1,
        reason: e.to_string(),
    })?;
    let asset_names: Vec<String> = headers.iter().map(str::to_string).collect();
    let dim = asset_names.len();
    if dim < 2 {
        return Err(MarketError::MalformedRow {
            line: 1,
            reason: format!("header names {dim} asset(s), need at least 2"),
        });
    }

    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| MarketError::MalformedRow {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != dim {
            return Err(MarketError::MalformedRow {
                line,
                reason: format!("expected {dim} fields, found {}", record.len()),
            });
        }
        let mut row = Vec::with_capacity(dim);
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| MarketError::MalformedRow {
                line,
                reason: format!("column {} is not a number: {field:?}", j + 1),
            })?;
            if !v.is_finite() {
                return Err(MarketError::MalformedRow {
                    line,
                    reason: format!("column {} is not finite", j + 1),
                });
            }
            if v <= 0.0 {
                return Err(MarketError::NonPositivePrice { line, column: j + 1 });
            }
            row.push(v);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(MarketError::EmptyFile);
    }
    if prices_to_relatives {
        return MarketSequence::from_prices(&rows, asset_names);
    }
    let periods = rows.into_iter().map(MarketVector::new).collect::<Result<Vec<_>, _>>()?;
    MarketSequence::new(periods, asset_names)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarketKind {
    IidDiscrete,
    MarkovRegime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub vector: MarketVector,
    pub prob: f64,
}

impl Outcome {
    pub fn new(values: &[f64], prob: f64) -> Result<Self, MarketError> {
        Ok(Self {
            vector: MarketVector::new(values.to_vec())?,
            prob,
        })
    }
}

/// A finitely supported synthetic market. `iid_discrete` has exactly one
/// regime; `markov_regime` switches regimes along a row-stochastic matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticMarketSpec {
    pub kind: MarketKind,
    pub regimes: Vec<Vec<Outcome>>,
    #[serde(default)]
    pub transition: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub seed: u64,
}

impl SyntheticMarketSpec {
    pub fn iid(outcomes: Vec<Outcome>, seed: u64) -> Self {
        Self {
            kind: MarketKind::IidDiscrete,
            regimes: vec![outcomes],
            transition: None,
            seed,
        }
    }

    pub fn markov(regimes: Vec<Vec<Outcome>>, transition: Vec<Vec<f64>>, seed: u64) -> Self {
        Self {
            kind: MarketKind::MarkovRegime,
            regimes,
            transition: Some(transition),
            seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn dim(&self) -> usize {
        self.regimes
            .first()
            .and_then(|r| r.first())
            .map_or(0, |o| o.vector.dim())
    }

    pub fn validate(&self) -> Result<(), MarketError> {
        let invalid = |msg: String| Err(MarketError::InvalidSpec(msg));
        if self.regimes.is_empty() {
            return invalid("no regimes".into());
        }
        let dim = self.dim();
        for (r, outcomes) in self.regimes.iter().enumerate() {
            if outcomes.is_empty() {
                return invalid(format!("regime {r} has no outcomes"));
            }
            if let Some(o) = outcomes.iter().find(|o| o.vector.dim() != dim) {
                return invalid(format!(
                    "regime {r}: outcome {} has dimension {}, expected {dim}",
                    o.vector,
                    o.vector.dim()
                ));
            }
            if outcomes.iter().any(|o| !(o.prob.is_finite() && o.prob >= 0.0)) {
                return invalid(format!("regime {r}: probabilities must be non-negative"));
            }
            let total: f64 = outcomes.iter().map(|o| o.prob).sum();
            if (total - 1.0).abs() > PROB_TOL {
                return invalid(format!("regime {r}: probabilities sum to {total}"));
            }
        }
        match (self.kind, &self.transition) {
            (MarketKind::IidDiscrete, _) if self.regimes.len() != 1 => invalid(format!(
                "iid_discrete needs exactly one regime, got {}",
                self.regimes.len()
            )),
            (MarketKind::IidDiscrete, Some(_)) => invalid("iid_discrete takes no transition matrix".into()),
            (MarketKind::IidDiscrete, None) => Ok(()),
            (MarketKind::MarkovRegime, None) => invalid("markov_regime needs a transition matrix".into()),
            (MarketKind::MarkovRegime, Some(rows)) => validate_transition(rows, self.regimes.len()),
        }
    }

    /// Transition matrix, with the trivial 1x1 matrix for i.i.d. specs.
    pub fn transition_matrix(&self) -> Vec<Vec<f64>> {
        self.transition.clone().unwrap_or_else(|| vec![vec![1.0]])
    }
}

fn validate_transition(rows: &[Vec<f64>], regimes: usize) -> Result<(), MarketError> {
    if rows.len() != regimes {
        return Err(MarketError::InvalidSpec(format!(
            "transition has {} rows for {regimes} regimes",
            rows.len()
        )));
    }
    for (r, row) in rows.iter().enumerate() {
        if row.len() != regimes {
            return Err(MarketError::InvalidSpec(format!(
                "transition row {r} has {} entries for {regimes} regimes",
                row.len()
            )));
        }
        if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(MarketError::InvalidSpec(format!(
                "transition row {r} has a negative entry"
            )));
        }
        let total: f64 = row.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(MarketError::InvalidSpec(format!("transition row {r} sums to {total}")));
        }
    }
    Ok(())
}

/// Stationary distribution of a row-stochastic matrix by power iteration
/// on the lazy chain `(I + P) / 2`, which shares the stationary law of `P`
/// but is aperiodic. Stops when successive iterates differ by less than
/// 1e-12 in L1.
pub fn stationary_distribution(transition: &[Vec<f64>]) -> Vec<f64> {
    let k = transition.len();
    let mut pi = vec![1.0 / k as f64; k];
    for _ in 0..10_000_000 {
        let mut next = vec![0.0; k];
        for (i, row) in transition.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                next[j] += pi[i] * p;
            }
        }
        for (n, p) in next.iter_mut().zip(&pi) {
            *n = 0.5 * (*n + p);
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= total);
        let change: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        pi = next;
        if change < 1e-12 {
            break;
        }
    }
    pi
}

fn draw_index<R: Rng>(rng: &mut R, probs: impl Iterator<Item = f64>) -> usize {
    let u: f64 = rng.random();
    let mut cumulative = 0.0;
    let mut last = 0;
    for (i, p) in probs.enumerate() {
        cumulative += p;
        last = i;
        if u < cumulative {
            return i;
        }
    }
    // u landed in the rounding sliver above the final cumulative sum
    last
}

/// Draws `n` periods from a synthetic spec. Pure function of `(spec, n)`.
pub fn generate(spec: &SyntheticMarketSpec, n: usize) -> Result<MarketSequence, MarketError> {
    spec.validate()?;
    if n == 0 {
        return Err(MarketError::InvalidSpec("period count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut periods = Vec::with_capacity(n);
    match spec.kind {
        MarketKind::IidDiscrete => {
            let outcomes = &spec.regimes[0];
            for _ in 0..n {
                let k = draw_index(&mut rng, outcomes.iter().map(|o| o.prob));
                periods.push(outcomes[k].vector.clone());
            }
        }
        MarketKind::MarkovRegime => {
            let transition = spec.transition_matrix();
            let pi = stationary_distribution(&transition);
            let mut regime = draw_index(&mut rng, pi.iter().copied());
            for _ in 0..n {
                let outcomes = &spec.regimes[regime];
                let k = draw_index(&mut rng, outcomes.iter().map(|o| o.prob));
                periods.push(outcomes[k].vector.clone());
                regime = draw_index(&mut rng, transition[regime].iter().copied());
            }
        }
    }
    MarketSequence::from_vectors(periods)
}

/// Fraction of periods equal to `outcome` within component-wise `tol`.
pub fn empirical_frequency(seq: &MarketSequence, outcome: &MarketVector, tol: f64) -> f64 {
    if seq.is_empty() {
        return 0.0;
    }
    let hits = seq.periods().iter().filter(|p| p.approx_eq(outcome, tol)).count();
    hits as f64 / seq.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv(text: &str) -> Result<MarketSequence, MarketError> {
        read_csv(text.as_bytes(), false)
    }

    #[test]
    fn loads_two_asset_file_in_order() {
        let seq = csv("a,b\n1.0,1.0\n2.0,0.5\n").unwrap();
        assert_eq!(seq.len(), 2);
        assert_eq!(seq.dim(), 2);
        assert_eq!(seq.asset_names(), ["a", "b"]);
        assert_eq!(seq.period(2).as_slice(), [2.0, 0.5]);
    }

    #[test]
    fn zero_price_is_rejected_with_position() {
        match csv("a,b\n1.0,1.0\n1.0,0.0\n") {
            Err(MarketError::NonPositivePrice { line, column }) => {
                assert_eq!(line, 3);
                assert_eq!(column, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(csv("a,b\n-1,1\n"), Err(MarketError::NonPositivePrice { .. })));
    }

    #[test]
    fn header_only_is_empty() {
        assert!(matches!(csv("a,b\n"), Err(MarketError::EmptyFile)));
        assert!(matches!(csv(""), Err(MarketError::MalformedRow { .. })));
    }

    #[test]
    fn malformed_rows() {
        assert!(matches!(
            csv("a,b\n1.0,x\n"),
            Err(MarketError::MalformedRow { line: 2, .. })
        ));
        assert!(matches!(
            csv("a,b\n1.0,1.0,1.0\n"),
            Err(MarketError::MalformedRow { .. })
        ));
        assert!(matches!(csv("a,b\n1.0,inf\n"), Err(MarketError::MalformedRow { .. })));
    }

    #[test]
    fn price_rows_become_ratios() {
        let seq = read_csv("a,b\n10,20\n20,10\n10,10\n".as_bytes(), true).unwrap();
        assert_eq!(seq.len(), 2);
        assert_eq!(seq.period(1).as_slice(), [2.0, 0.5]);
        assert_eq!(seq.period(2).as_slice(), [0.5, 1.0]);
        assert!(matches!(
            read_csv("a,b\n10,20\n".as_bytes(), true),
            Err(MarketError::EmptyFile)
        ));
    }

    #[test]
    fn vector_invariants() {
        assert!(MarketVector::new(vec![1.0]).is_err());
        assert!(MarketVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(MarketVector::new(vec![1.0, 0.0]).is_err());
        assert!(MarketVector::new(vec![1.0, 2.0]).is_ok());
        assert!(MarketSequence::from_rows(&[&[1.0, 1.0], &[1.0, 1.0, 1.0]]).is_err());
    }

    #[test]
    fn degenerate_iid_repeats_single_outcome() {
        let spec = SyntheticMarketSpec::iid(vec![Outcome::new(&[1.0, 1.0], 1.0).unwrap()], 3);
        let seq = generate(&spec, 5).unwrap();
        assert_eq!(seq.len(), 5);
        assert!(seq.periods().iter().all(|p| p.as_slice() == [1.0, 1.0]));
    }

    #[test]
    fn same_seed_same_sequence() {
        let spec = SyntheticMarketSpec::iid(
            vec![
                Outcome::new(&[2.0, 1.0], 0.6).unwrap(),
                Outcome::new(&[0.5, 1.0], 0.4).unwrap(),
            ],
            42,
        );
        assert_eq!(generate(&spec, 500).unwrap(), generate(&spec, 500).unwrap());
        assert_ne!(
            generate(&spec, 500).unwrap(),
            generate(&spec.with_seed(43), 500).unwrap()
        );
    }

    #[test]
    fn invalid_specs() {
        let bad_prob = SyntheticMarketSpec::iid(vec![Outcome::new(&[1.0, 1.0], 0.9).unwrap()], 0);
        assert!(matches!(generate(&bad_prob, 3), Err(MarketError::InvalidSpec(_))));

        let a = vec![Outcome::new(&[2.0, 0.5], 1.0).unwrap()];
        let b = vec![Outcome::new(&[0.5, 2.0], 1.0).unwrap()];
        let bad_row = SyntheticMarketSpec::markov(vec![a.clone(), b.clone()], vec![vec![0.5, 0.4], vec![0.0, 1.0]], 0);
        assert!(bad_row.validate().is_err());
        let missing = SyntheticMarketSpec {
            transition: None,
            ..SyntheticMarketSpec::markov(vec![a.clone(), b.clone()], vec![], 0)
        };
        assert!(missing.validate().is_err());
        let mixed_dim = SyntheticMarketSpec::iid(
            vec![
                Outcome::new(&[1.0, 1.0], 0.5).unwrap(),
                Outcome::new(&[1.0, 1.0, 1.0], 0.5).unwrap(),
            ],
            0,
        );
        assert!(mixed_dim.validate().is_err());
        let ok = SyntheticMarketSpec::markov(vec![a, b], vec![vec![0.0, 1.0], vec![1.0, 0.0]], 0);
        assert!(ok.validate().is_ok());
        assert!(generate(&ok, 0).is_err());
    }

    #[test]
    fn deterministic_alternation() {
        let spec = SyntheticMarketSpec::markov(
            vec![
                vec![Outcome::new(&[2.0, 0.5], 1.0).unwrap()],
                vec![Outcome::new(&[0.5, 2.0], 1.0).unwrap()],
            ],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            9,
        );
        let seq = generate(&spec, 50).unwrap();
        for t in 2..=50 {
            assert_ne!(seq.period(t), seq.period(t - 1));
        }
    }

    #[test]
    fn stationary_of_sticky_and_periodic_chains() {
        let pi = stationary_distribution(&[vec![0.9, 0.1], vec![0.1, 0.9]]);
        assert!((pi[0] - 0.5).abs() < 1e-12);
        let pi = stationary_distribution(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!((pi[0] - 0.5).abs() < 1e-12);
        // detailed balance: pi0 * 0.2 = pi1 * 0.1
        let pi = stationary_distribution(&[vec![0.8, 0.2], vec![0.1, 0.9]]);
        assert!((pi[0] - 1.0 / 3.0).abs() < 1e-10);
        assert!((pi[1] - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn empirical_frequency_examples() {
        let ones = MarketSequence::from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap();
        assert_eq!(empirical_frequency(&ones, &MarketVector::ones(2), 0.0), 1.0);
        let seq = MarketSequence::from_rows(&[&[2.0, 1.0], &[0.5, 1.0]]).unwrap();
        let x = MarketVector::new(vec![2.0, 1.0]).unwrap();
        assert_eq!(empirical_frequency(&seq, &x, 0.0), 0.5);
    }

    #[test]
    fn try_from_rejects_non_positive() {
        let bad: Result<MarketVector, _> = MarketVector::try_from(vec![1.0, -2.0]);
        assert!(bad.is_err());
    }
}
