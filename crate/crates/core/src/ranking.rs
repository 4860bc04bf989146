//! Feature rankings induced by score vectors, and their comparison by
//! rank-biased overlap (RBO).

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cgt::{cgt_estimate, CgtConfig, CgtDiagnostics};
use crate::error::{Error, Result};
use crate::explanations::Universe;
use crate::games::{shapley_exact, Game, GameKind, ScoreVector};
use crate::rational::{ratio, serde_str, Rational};
use crate::similarity::ExplanationProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMode {
    Signed,
    Absolute,
}

/// Feature ids from most to least important.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranking {
    pub order: Vec<usize>,
    pub mode: RankMode,
}

/// Sorts features by descending score (or |score|); ties go to the smaller
/// id first.
pub fn rank_features(scores: &ScoreVector, mode: RankMode) -> Ranking {
    let key = |r: &Rational| match mode {
        RankMode::Signed => r.clone(),
        RankMode::Absolute => r.abs(),
    };
    let mut order: Vec<usize> = (1..=scores.len()).collect();
    order.sort_by(|&a, &b| {
        key(scores.score(b))
            .cmp(&key(scores.score(a)))
            .then(a.cmp(&b))
    });
    Ranking { order, mode }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RboParams {
    #[serde(with = "serde_str")]
    pub persistence: Rational,
    pub depth: usize,
}

impl Default for RboParams {
    fn default() -> Self {
        RboParams {
            persistence: ratio(1, 2),
            depth: 5,
        }
    }
}

impl RboParams {
    pub fn validate(&self) -> Result<()> {
        if self.persistence <= Rational::zero() || self.persistence >= Rational::one() {
            return Err(Error::InvalidArgument(
                "persistence must lie in (0, 1)".into(),
            ));
        }
        if self.depth == 0 {
            return Err(Error::InvalidArgument("depth must be at least 1".into()));
        }
        Ok(())
    }

    /// `1 − p^k`, the value of identical rankings at effective depth `k`.
    pub fn ceiling(&self, features: usize) -> Rational {
        let k = self.depth.min(features);
        Rational::one() - num_traits::pow(self.persistence.clone(), k)
    }
}

/// Truncated RBO: `(1 − p) · Σ_{d=1..k} p^{d−1} · |top_d(a) ∩ top_d(b)| / d`,
/// with `k` clamped to the ranking length.
pub fn rbo(a: &Ranking, b: &Ranking, params: &RboParams) -> Result<Rational> {
    params.validate()?;
    let mut sa = a.order.clone();
    let mut sb = b.order.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb || sa.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument(
            "rankings are not over the same set of features".into(),
        ));
    }
    let k = params.depth.min(a.order.len());
    let p = &params.persistence;
    let mut seen_a = std::collections::HashSet::new();
    let mut seen_b = std::collections::HashSet::new();
    let mut overlap = 0usize;
    let mut weight = Rational::one();
    let mut sum = Rational::zero();
    for d in 1..=k {
        let (x, y) = (a.order[d - 1], b.order[d - 1]);
        if x == y {
            overlap += 1;
        } else {
            overlap += usize::from(seen_b.contains(&x)) + usize::from(seen_a.contains(&y));
        }
        seen_a.insert(x);
        seen_b.insert(y);
        sum += &weight * ratio(overlap as i64, d as i64);
        weight *= p;
    }
    Ok((Rational::one() - p) * sum)
}

/// How to obtain a score vector.
#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum ScoreMethod {
    Exact(GameKind),
    Cgt(GameKind, CgtConfig),
}

impl ScoreMethod {
    pub fn label(&self) -> String {
        match self {
            ScoreMethod::Exact(g) => format!("{g}/exact"),
            ScoreMethod::Cgt(g, _) => format!("{g}/cgt"),
        }
    }
}

/// Scores of one problem under one method, plus sampling diagnostics.
pub fn compute_scores(
    problem: &ExplanationProblem,
    universe: &Universe,
    method: &ScoreMethod,
) -> Result<(ScoreVector, Option<CgtDiagnostics>)> {
    let kind = match method {
        ScoreMethod::Exact(k) | ScoreMethod::Cgt(k, _) => *k,
    };
    let game = match kind {
        GameKind::ExpectedValue => Game::expected_value(problem)?,
        GameKind::WaxpBased => Game::waxp(problem, universe),
        GameKind::Custom => {
            return Err(Error::InvalidArgument(
                "custom games cannot be built from a problem".into(),
            ))
        }
    };
    match method {
        ScoreMethod::Exact(_) => Ok((shapley_exact(&game)?, None)),
        ScoreMethod::Cgt(_, cfg) => {
            let est = cgt_estimate(&game, cfg)?;
            Ok((est.scores, Some(est.diagnostics)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelledScores {
    pub label: String,
    pub scores: ScoreVector,
    pub signed: Ranking,
    pub absolute: Ranking,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRbo {
    pub a: String,
    pub b: String,
    #[serde(with = "serde_str")]
    pub signed: Rational,
    #[serde(with = "serde_str")]
    pub absolute: Rational,
}

/// Scores of every method on one instance and the RBO of every pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub params: RboParams,
    #[serde(with = "serde_str")]
    pub ceiling: Rational,
    pub methods: Vec<LabelledScores>,
    pub pairs: Vec<PairRbo>,
}

pub fn compare_scores(
    problem: &ExplanationProblem,
    universe: &Universe,
    methods: &[ScoreMethod],
    params: &RboParams,
) -> Result<Comparison> {
    params.validate()?;
    let methods = methods
        .iter()
        .map(|m| {
            let (scores, _) = compute_scores(problem, universe, m)?;
            Ok(LabelledScores {
                label: m.label(),
                signed: rank_features(&scores, RankMode::Signed),
                absolute: rank_features(&scores, RankMode::Absolute),
                scores,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    compare_vectors(methods, params, problem.num_features())
}

/// Pairwise RBO over already computed score vectors.
pub fn compare_vectors(
    methods: Vec<LabelledScores>,
    params: &RboParams,
    features: usize,
) -> Result<Comparison> {
    let mut pairs = Vec::new();
    for i in 0..methods.len() {
        for j in i + 1..methods.len() {
            let (a, b) = (&methods[i], &methods[j]);
            pairs.push(PairRbo {
                a: a.label.clone(),
                b: b.label.clone(),
                signed: rbo(&a.signed, &b.signed, params)?,
                absolute: rbo(&a.absolute, &b.absolute, params)?,
            });
        }
    }
    Ok(Comparison {
        params: params.clone(),
        ceiling: params.ceiling(features),
        methods,
        pairs,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    #[serde(with = "serde_str")]
    pub min: Rational,
    #[serde(with = "serde_str")]
    pub max: Rational,
    #[serde(with = "serde_str")]
    pub mean: Rational,
}

impl Stats {
    fn of(values: &[Rational]) -> Stats {
        let min = values.iter().min().cloned().unwrap_or_else(Rational::zero);
        let max = values.iter().max().cloned().unwrap_or_else(Rational::zero);
        let mean = if values.is_empty() {
            Rational::zero()
        } else {
            values.iter().sum::<Rational>() / Rational::from_integer(values.len().into())
        };
        Stats { min, max, mean }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSummary {
    pub a: String,
    pub b: String,
    pub signed: Stats,
    pub absolute: Stats,
}

/// Min/max/mean RBO per method pair over a batch of instances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub instances: usize,
    pub pairs: Vec<PairSummary>,
}

pub fn summarize_batch(comparisons: &[Comparison]) -> BatchSummary {
    let pairs = comparisons
        .first()
        .map(|c| {
            c.pairs
                .iter()
                .enumerate()
                .map(|(k, p)| {
                    let signed: Vec<Rational> = comparisons
                        .iter()
                        .map(|c| c.pairs[k].signed.clone())
                        .collect();
                    let absolute: Vec<Rational> = comparisons
                        .iter()
                        .map(|c| c.pairs[k].absolute.clone())
                        .collect();
                    PairSummary {
                        a: p.a.clone(),
                        b: p.b.clone(),
                        signed: Stats::of(&signed),
                        absolute: Stats::of(&absolute),
                    }
                })
                .collect()
        })
        .unwrap_or_default();
    BatchSummary {
        instances: comparisons.len(),
        pairs,
    }
}
