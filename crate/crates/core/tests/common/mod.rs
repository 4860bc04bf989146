//! Brute-force oracles and random model generators shared by the
//! integration tests. Nothing here calls the library's game, explanation or
//! Shapley code; only model evaluation is trusted.

#![allow(dead_code)]

use std::collections::BTreeSet;

use featattr_core::io::parse_model;
use featattr_core::models::TabularModel;
use featattr_core::rational::{int, ratio};
use featattr_core::{
    Domain, ExplanationProblem, FeatureSet, FeatureSpace, Model, Point, Rational, SimilarityConfig,
    Value, ValueKind,
};
use num_traits::Zero;
use rand::Rng;

pub fn e1() -> Model {
    parse_model(include_str!("../../fixtures/e1.json"))
        .unwrap()
        .model
}

pub fn e2() -> Model {
    parse_model(include_str!("../../fixtures/e2.json"))
        .unwrap()
        .model
}

pub fn e3() -> Model {
    parse_model(include_str!("../../fixtures/e3.json"))
        .unwrap()
        .model
}

pub fn pt(xs: &[i64]) -> Point {
    xs.iter().map(|&x| int(x)).collect()
}

pub fn e1p() -> ExplanationProblem {
    ExplanationProblem::new(e1(), pt(&[1, 1, 2]), SimilarityConfig::ClassEquality).unwrap()
}

/// E2 is a regressor; any δ below 1/4 gives the same answers.
pub fn e2p() -> ExplanationProblem {
    ExplanationProblem::new(
        e2(),
        pt(&[1, 1]),
        SimilarityConfig::threshold(ratio(1, 5)).unwrap(),
    )
    .unwrap()
}

pub fn e3p() -> ExplanationProblem {
    ExplanationProblem::new(
        e3(),
        pt(&[1, 1]),
        SimilarityConfig::threshold(ratio(1, 5)).unwrap(),
    )
    .unwrap()
}

/// Every point of a discrete space, in no particular order.
pub fn all_points(space: &FeatureSpace) -> Vec<Point> {
    let mut points = vec![Vec::new()];
    for i in 0..space.len() {
        let Domain::Discrete(values) = space.domain(i) else {
            panic!("oracle needs discrete domains");
        };
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |x| {
                    let mut q = p.clone();
                    q.push(x.clone());
                    q
                })
            })
            .collect();
    }
    points
}

pub fn agrees(x: &[Rational], v: &[Rational], s: FeatureSet) -> bool {
    s.ids().all(|i| x[i - 1] == v[i - 1])
}

fn similar(problem: &ExplanationProblem, out: &Value) -> bool {
    let target = problem.instance().prediction();
    match problem.similarity() {
        SimilarityConfig::ClassEquality => out == target,
        SimilarityConfig::RegressionThreshold { delta } => {
            let (Value::Num(a), Value::Num(b)) = (out, target) else {
                panic!("numeric outputs")
            };
            let d = a - b;
            (if d < Rational::zero() { -d } else { d }) <= *delta
        }
    }
}

/// Oracle WAXp over a finite set of points.
pub fn waxp_over(problem: &ExplanationProblem, points: &[Point], s: FeatureSet) -> bool {
    let v = problem.instance().point();
    points
        .iter()
        .filter(|x| agrees(x, v, s))
        .all(|x| similar(problem, &problem.model().predict(x).unwrap()))
}

pub fn waxp(problem: &ExplanationProblem, s: FeatureSet) -> bool {
    waxp_over(problem, &all_points(problem.model().space()), s)
}

/// Oracle ν_e: mean prediction over the points agreeing with `v` on `s`.
pub fn nu_e(problem: &ExplanationProblem, s: FeatureSet) -> Rational {
    let v = problem.instance().point();
    let outs: Vec<Rational> = all_points(problem.model().space())
        .iter()
        .filter(|x| agrees(x, v, s))
        .map(|x| match problem.model().predict(x).unwrap() {
            Value::Num(r) => r,
            Value::Label(_) => panic!("numeric outputs"),
        })
        .collect();
    let n = outs.len() as i64;
    outs.into_iter().sum::<Rational>() / int(n)
}

pub fn nu_a(problem: &ExplanationProblem, s: FeatureSet) -> Rational {
    if waxp(problem, s) {
        int(1)
    } else {
        int(0)
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (k, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(k);
        for mut tail in permutations(&rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// Shapley values as the average marginal contribution over all orders.
pub fn shapley_by_orders(m: usize, nu: impl Fn(FeatureSet) -> Rational) -> Vec<Rational> {
    let table: Vec<Rational> = (0..1u64 << m)
        .map(|b| nu(FeatureSet::from_bits(b)))
        .collect();
    let ids: Vec<usize> = (1..=m).collect();
    let orders = permutations(&ids);
    let mut sums = vec![Rational::zero(); m];
    for order in &orders {
        let mut s = FeatureSet::empty();
        for &i in order {
            let t = s.with(i);
            sums[i - 1] += &table[t.bits() as usize] - &table[s.bits() as usize];
            s = t;
        }
    }
    sums.into_iter()
        .map(|x| x / int(orders.len() as i64))
        .collect()
}

pub fn subsets(m: usize) -> impl Iterator<Item = FeatureSet> {
    (0..1u64 << m).map(FeatureSet::from_bits)
}

pub fn minimal(family: Vec<FeatureSet>) -> Vec<FeatureSet> {
    let set: BTreeSet<FeatureSet> = family.iter().copied().collect();
    set.iter()
        .copied()
        .filter(|s| !set.iter().any(|t| t != s && t.is_subset(*s)))
        .collect()
}

pub fn axps(problem: &ExplanationProblem, points: &[Point]) -> Vec<FeatureSet> {
    let m = problem.num_features();
    minimal(
        subsets(m)
            .filter(|&s| waxp_over(problem, points, s))
            .collect(),
    )
}

/// CXps: minimal `y` whose freeing (fixing the complement) breaks WAXp.
pub fn cxps(problem: &ExplanationProblem, points: &[Point]) -> Vec<FeatureSet> {
    let m = problem.num_features();
    minimal(
        subsets(m)
            .filter(|&y| !waxp_over(problem, points, y.complement(m)))
            .collect(),
    )
}

pub fn hitting_sets(family: &[FeatureSet], m: usize) -> Vec<FeatureSet> {
    minimal(
        subsets(m)
            .filter(|h| family.iter().all(|f| f.intersects(*h)))
            .collect(),
    )
}

pub fn sorted(mut family: Vec<FeatureSet>) -> Vec<FeatureSet> {
    family.sort();
    family.dedup();
    family
}

/// A non-constant random table with `m ≤ 5` features of at most three
/// values each, and a random instance. Even `k` gives a classifier, odd `k`
/// a regressor with δ = 1.
pub fn random_problem(rng: &mut impl Rng, k: usize) -> ExplanationProblem {
    loop {
        let m = rng.gen_range(1..=5);
        let features: Vec<(String, Domain)> = (0..m)
            .map(|i| {
                let size = rng.gen_range(1..=3);
                (
                    format!("f{}", i + 1),
                    Domain::Discrete((0..size).map(int).collect()),
                )
            })
            .collect();
        let space = FeatureSpace::new(features).unwrap();
        let points = all_points(&space);
        let top = if k.is_multiple_of(2) { 2 } else { 4 };
        let entries: Vec<(Point, Value)> = points
            .iter()
            .map(|p| (p.clone(), Value::Num(int(rng.gen_range(0..=top)))))
            .collect();
        let distinct: BTreeSet<&Value> = entries.iter().map(|(_, v)| v).collect();
        if distinct.len() < 2 {
            continue;
        }
        let model =
            Model::Tabular(TabularModel::new(space, ValueKind::Numeric, entries, None).unwrap());
        let v = points[rng.gen_range(0..points.len())].clone();
        let similarity = if k.is_multiple_of(2) {
            SimilarityConfig::ClassEquality
        } else {
            SimilarityConfig::threshold(int(1)).unwrap()
        };
        return ExplanationProblem::new(model, v, similarity).unwrap();
    }
}
