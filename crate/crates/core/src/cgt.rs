//! Permutation-sampling Shapley estimation with an (ε, α) guarantee.
//!
//! Each sampled permutation yields one marginal contribution per player.
//! With marginals confined to an interval of width `r`, Hoeffding's
//! inequality and a union bound over the `m` players give
//! `P(∀i: |est_i − Sh_i| ≤ ε) ≥ 1 − α` once
//! `T ≥ r² · ln(2m/α) / (2ε²)` permutations are drawn.
//!
//! Permutations come from a counter-based stream: block `c` of
//! [`BLOCK_SIZE`] permutations is produced by a ChaCha8 generator keyed by
//! the seed on stream `c`. Workers evaluate whole blocks and their integer
//! tallies are added, so the result does not depend on the thread count.

use std::collections::HashMap;

use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featureset::FeatureSet;
use crate::games::{Game, Method, ScoreVector};
use crate::rational::{serde_str, to_f64, Rational};

pub const BLOCK_SIZE: u64 = 1024;

/// Players at or below this count use dense per-coalition tallies.
const DENSE_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CgtConfig {
    /// Additive error bound.
    pub epsilon: Rational,
    /// Failure probability.
    pub alpha: Rational,
    pub seed: u64,
    /// Fixed number of permutations, bypassing the Hoeffding bound.
    pub samples: Option<u64>,
    /// Width of the marginal-contribution range, overriding the game's.
    pub value_range: Option<Rational>,
}

impl CgtConfig {
    pub fn new(epsilon: Rational, alpha: Rational, seed: u64) -> Result<Self> {
        let config = CgtConfig {
            epsilon,
            alpha,
            seed,
            samples: None,
            value_range: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon <= Rational::zero() {
            return Err(Error::InvalidArgument("epsilon must be positive".into()));
        }
        if self.alpha <= Rational::zero() || self.alpha >= Rational::from_integer(1.into()) {
            return Err(Error::InvalidArgument("alpha must lie in (0, 1)".into()));
        }
        if self.samples == Some(0) {
            return Err(Error::InvalidArgument(
                "sample count must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CgtDiagnostics {
    pub samples: u64,
    #[serde(with = "serde_str")]
    pub value_range: Rational,
    #[serde(with = "serde_str")]
    pub epsilon: Rational,
    #[serde(with = "serde_str")]
    pub alpha: Rational,
    pub seed: u64,
    /// Distinct coalitions whose value was needed.
    pub coalitions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CgtEstimate {
    pub scores: ScoreVector,
    pub diagnostics: CgtDiagnostics,
}

/// `⌈r² · ln(2m/α) / (2ε²)⌉`, at least 1.
pub fn required_samples(
    players: usize,
    range: &Rational,
    epsilon: &Rational,
    alpha: &Rational,
) -> u64 {
    let r = to_f64(range);
    let eps = to_f64(epsilon);
    let a = to_f64(alpha);
    let t = r * r * (2.0 * players as f64 / a).ln() / (2.0 * eps * eps);
    (t.ceil() as u64).max(1)
}

/// Reproducible stream of uniformly random permutations of `{1..m}`.
#[derive(Debug, Clone)]
pub struct PermutationStream {
    seed: u64,
    players: usize,
    block: u64,
    index_in_block: u64,
    rng: ChaCha8Rng,
}

impl PermutationStream {
    pub fn new(seed: u64, players: usize) -> Self {
        assert!(players >= 1, "permutations need at least one player");
        PermutationStream {
            seed,
            players,
            block: 0,
            index_in_block: 0,
            rng: block_rng(seed, 0),
        }
    }
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Fisher–Yates shuffle of the identity, 0-based.
fn draw(rng: &mut ChaCha8Rng, order: &mut [usize]) {
    for (k, slot) in order.iter_mut().enumerate() {
        *slot = k;
    }
    order.shuffle(rng);
}

impl Iterator for PermutationStream {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.index_in_block == BLOCK_SIZE {
            self.block += 1;
            self.index_in_block = 0;
            self.rng = block_rng(self.seed, self.block);
        }
        let mut order = vec![0; self.players];
        draw(&mut self.rng, &mut order);
        self.index_in_block += 1;
        Some(order.into_iter().map(|i| i + 1).collect())
    }
}

pub fn permutation_stream(seed: u64, players: usize) -> PermutationStream {
    PermutationStream::new(seed, players)
}

/// Net number of times each coalition value enters player `i`'s sum of
/// marginals: `+1` for `ν(P ∪ {i})`, `−1` for `ν(P)`.
#[derive(Debug, Clone)]
enum Tally {
    Dense(Vec<Vec<i64>>),
    Sparse(Vec<HashMap<u64, i64>>),
}

impl Tally {
    fn new(players: usize) -> Self {
        if players <= DENSE_LIMIT {
            Tally::Dense(vec![vec![0; 1 << players]; players])
        } else {
            Tally::Sparse(vec![HashMap::new(); players])
        }
    }

    fn add(&mut self, player: usize, coalition: u64, delta: i64) {
        match self {
            Tally::Dense(t) => t[player][coalition as usize] += delta,
            Tally::Sparse(t) => *t[player].entry(coalition).or_insert(0) += delta,
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        match (&mut self, other) {
            (Tally::Dense(a), Tally::Dense(b)) => {
                for (ra, rb) in a.iter_mut().zip(b) {
                    for (x, y) in ra.iter_mut().zip(rb) {
                        *x += y;
                    }
                }
            }
            (Tally::Sparse(a), Tally::Sparse(b)) => {
                for (ma, mb) in a.iter_mut().zip(b) {
                    for (k, v) in mb {
                        *ma.entry(k).or_insert(0) += v;
                    }
                }
            }
            _ => unreachable!("tallies of one estimate share a layout"),
        }
        self
    }

    /// Non-zero `(coalition, count)` pairs of one player, sorted.
    fn entries(&self, player: usize) -> Vec<(u64, i64)> {
        let mut e: Vec<(u64, i64)> = match self {
            Tally::Dense(t) => t[player]
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(s, &c)| (s as u64, c))
                .collect(),
            Tally::Sparse(t) => t[player]
                .iter()
                .filter(|(_, &c)| c != 0)
                .map(|(&s, &c)| (s, c))
                .collect(),
        };
        e.sort_unstable();
        e
    }
}

fn tally_block(seed: u64, block: u64, count: u64, players: usize) -> Tally {
    let mut rng = block_rng(seed, block);
    let mut tally = Tally::new(players);
    let mut order = vec![0usize; players];
    for _ in 0..count {
        draw(&mut rng, &mut order);
        let mut prefix = 0u64;
        for &i in &order {
            let next = prefix | (1u64 << i);
            tally.add(i, next, 1);
            tally.add(i, prefix, -1);
            prefix = next;
        }
    }
    tally
}

/// Mean marginal contribution of each player over `T` sampled
/// permutations.
pub fn cgt_estimate(game: &Game<'_>, config: &CgtConfig) -> Result<CgtEstimate> {
    config.validate()?;
    let m = game.players();
    let range = config
        .value_range
        .clone()
        .or_else(|| game.marginal_range().cloned());
    let (samples, range) = match (config.samples, range) {
        (Some(t), r) => (t, r.unwrap_or_else(Rational::zero)),
        (None, Some(r)) => (required_samples(m, &r, &config.epsilon, &config.alpha), r),
        (None, None) => {
            return Err(Error::InvalidArgument(
                "the game has no known marginal range; give a value range or a sample count".into(),
            ))
        }
    };
    let blocks = samples.div_ceil(BLOCK_SIZE);
    let tally = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = (samples - b * BLOCK_SIZE).min(BLOCK_SIZE);
            tally_block(config.seed, b, count, m)
        })
        .reduce_with(Tally::merge)
        .expect("at least one block");

    let per_player: Vec<Vec<(u64, i64)>> = (0..m).map(|i| tally.entries(i)).collect();
    let mut coalitions: Vec<u64> = per_player.iter().flatten().map(|&(s, _)| s).collect();
    coalitions.sort_unstable();
    coalitions.dedup();
    let values: HashMap<u64, Rational> = coalitions
        .par_iter()
        .map(|&s| game.value(FeatureSet::from_bits(s)).map(|v| (s, v)))
        .collect::<Result<_>>()?;

    let t = Rational::from_integer(samples.into());
    let scores = per_player
        .iter()
        .map(|entries| {
            let sum: Rational = entries
                .iter()
                .map(|(s, c)| &values[s] * Rational::from_integer((*c).into()))
                .sum();
            sum / &t
        })
        .collect();
    Ok(CgtEstimate {
        scores: ScoreVector {
            scores,
            game: game.kind(),
            method: Method::Cgt,
        },
        diagnostics: CgtDiagnostics {
            samples,
            value_range: range,
            epsilon: config.epsilon.clone(),
            alpha: config.alpha.clone(),
            seed: config.seed,
            coalitions: coalitions.len(),
        },
    })
}

/// Largest absolute deviation between two score vectors, as `f64`.
pub fn max_abs_error(a: &ScoreVector, b: &ScoreVector) -> f64 {
    a.scores
        .iter()
        .zip(&b.scores)
        .map(|(x, y)| (x - y).to_f64().unwrap_or(f64::INFINITY).abs())
        .fold(0.0, f64::max)
}
