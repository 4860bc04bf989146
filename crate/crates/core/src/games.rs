//! Cooperative games over features and their exact Shapley values.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explanations::{is_waxp, relevant_features, FeatureSet, Universe};
use crate::models::{Value, ValueKind};
use crate::rational::{int, serde_str, serde_vec, Rational};
use crate::similarity::{ExplanationProblem, SimilarityConfig};
use crate::MAX_EXACT_FEATURES;

/// Largest game handled by full permutation enumeration.
pub const MAX_PERMUTATION_FEATURES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameKind {
    /// ν_e(S) = E[π(x) | x_S = v_S].
    ExpectedValue,
    /// ν_a(S) = 1 if S is a WAXp, else 0.
    WaxpBased,
    Custom,
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GameKind::ExpectedValue => "expected",
            GameKind::WaxpBased => "waxp",
            GameKind::Custom => "custom",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Permutations,
    Cgt,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Permutations => "permutations",
            Method::Cgt => "cgt",
        })
    }
}

type CharFn<'a> = Box<dyn Fn(FeatureSet) -> Result<Rational> + Send + Sync + 'a>;

/// A game `(N, ν)` with `N = {1..m}`. Characteristic-function values are
/// memoised per coalition.
pub struct Game<'a> {
    players: usize,
    kind: GameKind,
    charfn: CharFn<'a>,
    memo: RwLock<HashMap<FeatureSet, Rational>>,
    marginal_range: Option<Rational>,
}

impl fmt::Debug for Game<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Game")
            .field("players", &self.players)
            .field("kind", &self.kind)
            .field("marginal_range", &self.marginal_range)
            .finish_non_exhaustive()
    }
}

impl<'a> Game<'a> {
    pub fn new<F>(players: usize, kind: GameKind, charfn: F) -> Self
    where
        F: Fn(FeatureSet) -> Result<Rational> + Send + Sync + 'a,
    {
        assert!((1..FeatureSet::CAPACITY).contains(&players));
        Game {
            players,
            kind,
            charfn: Box::new(charfn),
            memo: RwLock::new(HashMap::new()),
            marginal_range: None,
        }
    }

    /// Width of an interval known to contain every marginal contribution
    /// `ν(S ∪ {i}) − ν(S)`.
    pub fn with_marginal_range(mut self, width: Rational) -> Self {
        self.marginal_range = Some(width);
        self
    }

    /// The expected-value game ν_e. The marginal range is twice the model's
    /// output spread, since ν_e takes values between the output extrema.
    pub fn expected_value(problem: &'a ExplanationProblem) -> Result<Self> {
        let model = problem.model();
        if model.value_kind() != ValueKind::Numeric {
            return Err(Error::NumericRequired(
                "the expected-value game needs numeric outputs".into(),
            ));
        }
        let (lo, hi) = model.output_range()?;
        let v = problem.instance().point();
        let game = Game::new(problem.num_features(), GameKind::ExpectedValue, move |s| {
            model.conditional_expectation(v, s)
        });
        Ok(game.with_marginal_range(int(2) * (hi - lo)))
    }

    /// The WAXp indicator game ν_a. It is a simple game, so marginals lie
    /// in `{0, 1}`.
    pub fn waxp(problem: &'a ExplanationProblem, universe: &'a Universe) -> Self {
        Game::new(problem.num_features(), GameKind::WaxpBased, move |s| {
            Ok(cf_waxp(problem, universe, s))
        })
        .with_marginal_range(Rational::one())
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn kind(&self) -> GameKind {
        self.kind
    }

    pub fn marginal_range(&self) -> Option<&Rational> {
        self.marginal_range.as_ref()
    }

    pub fn value(&self, s: FeatureSet) -> Result<Rational> {
        if let Some(v) = self.memo.read().expect("memo lock").get(&s) {
            return Ok(v.clone());
        }
        let v = (self.charfn)(s)?;
        self.memo.write().expect("memo lock").insert(s, v.clone());
        Ok(v)
    }

    /// ν on every coalition, indexed by bitmask.
    fn table(&self) -> Result<Vec<Rational>> {
        (0..(1u64 << self.players))
            .into_par_iter()
            .map(|b| self.value(FeatureSet::from_bits(b)))
            .collect()
    }
}

/// ν_e(S).
pub fn cf_expected(problem: &ExplanationProblem, s: FeatureSet) -> Result<Rational> {
    problem
        .model()
        .conditional_expectation(problem.instance().point(), s)
}

/// ν_a(S) ∈ {0, 1}.
pub fn cf_waxp(problem: &ExplanationProblem, universe: &Universe, s: FeatureSet) -> Rational {
    if is_waxp(problem, universe, s) {
        Rational::one()
    } else {
        Rational::zero()
    }
}

/// Per-feature Shapley values; `scores[i]` belongs to feature `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreVector {
    #[serde(with = "serde_vec")]
    pub scores: Vec<Rational>,
    pub game: GameKind,
    pub method: Method,
}

impl ScoreVector {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Score of a 1-based feature id.
    pub fn score(&self, id: usize) -> &Rational {
        &self.scores[id - 1]
    }

    pub fn total(&self) -> Rational {
        self.scores.iter().sum()
    }

    /// Features with a non-zero score.
    pub fn support(&self) -> FeatureSet {
        self.scores
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.is_zero())
            .fold(FeatureSet::empty(), |acc, (i, _)| acc.with(i + 1))
    }
}

fn factorials(m: usize) -> Vec<BigInt> {
    let mut f = vec![BigInt::one()];
    for k in 1..=m {
        let next = &f[k - 1] * BigInt::from(k);
        f.push(next);
    }
    f
}

/// Exact Shapley values from the subset formula
/// `Sh(i) = Σ_{S ⊆ N∖{i}} |S|!(m−|S|−1)!/m! · (ν(S ∪ {i}) − ν(S))`.
pub fn shapley_exact(game: &Game<'_>) -> Result<ScoreVector> {
    let m = game.players();
    if m > MAX_EXACT_FEATURES {
        return Err(Error::TooLarge {
            what: "exact Shapley computation",
            limit: MAX_EXACT_FEATURES,
            got: m,
        });
    }
    let nu = game.table()?;
    let fact = factorials(m);
    let weights: Vec<Rational> = (0..m)
        .map(|k| Rational::new(&fact[k] * &fact[m - k - 1], fact[m].clone()))
        .collect();
    let scores = (0..m)
        .into_par_iter()
        .map(|i| {
            let bit = 1u64 << i;
            let mut acc = Rational::zero();
            for s in 0..(1u64 << m) {
                if s & bit != 0 {
                    continue;
                }
                let delta = &nu[(s | bit) as usize] - &nu[s as usize];
                if !delta.is_zero() {
                    acc += &weights[s.count_ones() as usize] * delta;
                }
            }
            acc
        })
        .collect();
    Ok(ScoreVector {
        scores,
        game: game.kind(),
        method: Method::Exact,
    })
}

/// Shapley values as the average marginal contribution over all `m!`
/// orderings of the players.
pub fn shapley_via_permutations(game: &Game<'_>) -> Result<ScoreVector> {
    let m = game.players();
    if m > MAX_PERMUTATION_FEATURES {
        return Err(Error::TooLarge {
            what: "permutation enumeration",
            limit: MAX_PERMUTATION_FEATURES,
            got: m,
        });
    }
    let mut sums = vec![Rational::zero(); m];
    let mut count: u64 = 0;
    let mut failure = None;
    for_each_permutation(m, |order| {
        if failure.is_some() {
            return;
        }
        let mut coalition = FeatureSet::empty();
        let mut before = match game.value(coalition) {
            Ok(v) => v,
            Err(e) => return failure = Some(e),
        };
        for &i in order {
            coalition = coalition.with(i + 1);
            let after = match game.value(coalition) {
                Ok(v) => v,
                Err(e) => return failure = Some(e),
            };
            sums[i] += &after - &before;
            before = after;
        }
        count += 1;
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let n = Rational::from_integer(count.into());
    Ok(ScoreVector {
        scores: sums.into_iter().map(|s| s / &n).collect(),
        game: game.kind(),
        method: Method::Permutations,
    })
}

/// Heap's algorithm over `0..m`.
fn for_each_permutation(m: usize, mut f: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (0..m).collect();
    let mut c = vec![0usize; m];
    f(&a);
    let mut i = 0;
    while i < m {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// Irrelevant feature with a non-zero score.
    IrrelevantNonzero,
    /// Relevant feature with a zero score.
    RelevantZero,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub feature: usize,
    pub kind: ViolationKind,
    #[serde(with = "serde_str")]
    pub score: Rational,
}

/// Result of checking `Irrelevant(i) ⇔ score(i) = 0` feature by feature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplianceReport {
    pub relevant: FeatureSet,
    pub violations: Vec<Violation>,
}

impl ComplianceReport {
    pub fn is_compliant(&self) -> bool {
        self.violations.is_empty()
    }

    /// Features whose score misrepresents their relevancy.
    pub fn misleading(&self) -> FeatureSet {
        self.violations
            .iter()
            .fold(FeatureSet::empty(), |acc, v| acc.with(v.feature))
    }
}

pub fn compliance_against(relevant: FeatureSet, scores: &ScoreVector) -> ComplianceReport {
    let violations = scores
        .scores
        .iter()
        .enumerate()
        .filter_map(|(i, s)| {
            let id = i + 1;
            let kind = match (relevant.contains(id), s.is_zero()) {
                (true, true) => ViolationKind::RelevantZero,
                (false, false) => ViolationKind::IrrelevantNonzero,
                _ => return None,
            };
            Some(Violation {
                feature: id,
                kind,
                score: s.clone(),
            })
        })
        .collect();
    ComplianceReport {
        relevant,
        violations,
    }
}

/// Compares scores against feature relevancy computed for the problem.
pub fn check_compliance(
    problem: &ExplanationProblem,
    universe: &Universe,
    scores: &ScoreVector,
) -> Result<ComplianceReport> {
    if scores.len() != problem.num_features() {
        return Err(Error::InvalidArgument(format!(
            "{} scores for {} features",
            scores.len(),
            problem.num_features()
        )));
    }
    let relevant = relevant_features(problem, universe)?;
    Ok(compliance_against(relevant, scores))
}

/// Applies an injective relabelling of the output values to the problem's
/// model. Every output value of the model must be mapped.
pub fn relabel_problem(
    problem: &ExplanationProblem,
    relabel: &BTreeMap<Value, Value>,
) -> Result<ExplanationProblem> {
    let images: BTreeSet<&Value> = relabel.values().collect();
    if images.len() != relabel.len() {
        return Err(Error::InvalidArgument(
            "relabelling is not injective".into(),
        ));
    }
    let kind = if relabel.values().all(|v| matches!(v, Value::Num(_))) {
        ValueKind::Numeric
    } else if relabel.values().all(|v| matches!(v, Value::Label(_))) {
        ValueKind::Categorical
    } else {
        return Err(Error::InvalidArgument(
            "relabelling mixes numbers and labels".into(),
        ));
    };
    let missing = std::sync::Mutex::new(None);
    let model = problem.model().map_values(kind, |v| match relabel.get(v) {
        Some(w) => w.clone(),
        None => {
            *missing.lock().unwrap() = Some(v.clone());
            v.clone()
        }
    });
    if let Some(v) = missing.into_inner().unwrap() {
        return Err(Error::InvalidArgument(format!(
            "relabelling does not map output {v}"
        )));
    }
    ExplanationProblem::new(
        model?,
        problem.instance().point().to_vec(),
        problem.similarity().clone(),
    )
}

/// Whether corrected (WAXp-game) scores are unchanged by relabelling the
/// model's outputs.
pub fn check_value_independence(
    problem: &ExplanationProblem,
    relabel: &BTreeMap<Value, Value>,
) -> Result<bool> {
    if *problem.similarity() != SimilarityConfig::ClassEquality {
        return Err(Error::Precondition(
            "value independence is defined for class-equality similarity".into(),
        ));
    }
    let relabelled = relabel_problem(problem, relabel)?;
    let universe = Universe::ModelAware;
    let before = shapley_exact(&Game::waxp(problem, &universe))?;
    let after = shapley_exact(&Game::waxp(&relabelled, &universe))?;
    Ok(before.scores == after.scores)
}
