//! Models with enumerable or analytically integrable semantics.

mod piecewise;
mod space;
mod tabular;
mod tree;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use piecewise::{BoxPiecewiseModel, Cell};
pub use space::{Domain, Feature, FeatureSpace};
pub use tabular::TabularModel;
pub use tree::{Branch, TreeModel, TreeNode};

use crate::error::{Error, Result};
use crate::featureset::FeatureSet;
use crate::rational::{format_rational, Rational};

/// A point of the feature space, one coordinate per feature in id order.
pub type Point = Vec<Rational>;

/// A model output.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Num(Rational),
    Label(String),
}

impl Value {
    pub fn as_num(&self) -> Option<&Rational> {
        match self {
            Value::Num(r) => Some(r),
            Value::Label(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(r) => f.write_str(&format_rational(r)),
            Value::Label(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueKind {
    Numeric,
    Categorical,
}

impl ValueKind {
    pub(crate) fn check(self, value: &Value) -> Result<()> {
        match (self, value) {
            (ValueKind::Numeric, Value::Num(_)) | (ValueKind::Categorical, Value::Label(_)) => {
                Ok(())
            }
            (kind, v) => Err(Error::Validation(format!(
                "value {v} does not match value kind {kind:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Tabular(TabularModel),
    Tree(TreeModel),
    BoxPiecewise(BoxPiecewiseModel),
}

impl Model {
    pub fn space(&self) -> &FeatureSpace {
        match self {
            Model::Tabular(t) => t.space(),
            Model::Tree(t) => t.space(),
            Model::BoxPiecewise(b) => b.space(),
        }
    }

    pub fn num_features(&self) -> usize {
        self.space().len()
    }

    pub fn value_kind(&self) -> ValueKind {
        match self {
            Model::Tabular(t) => t.value_kind(),
            Model::Tree(t) => t.value_kind(),
            Model::BoxPiecewise(_) => ValueKind::Numeric,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Model::Tabular(_) => "tabular",
            Model::Tree(_) => "tree",
            Model::BoxPiecewise(_) => "box_piecewise",
        }
    }

    /// π(x). Fails when `x` lies outside the feature space.
    pub fn predict(&self, x: &[Rational]) -> Result<Value> {
        self.space().check_point(x)?;
        match self {
            Model::BoxPiecewise(b) => b
                .locate(x)
                .map(|c| Value::Num(b.cells()[c].eval(x)))
                .ok_or_else(|| Error::Validation("point lies on no cell".into())),
            _ => Ok(self.eval(x)),
        }
    }

    /// π(x) for a point already known to be in the space.
    pub(crate) fn eval(&self, x: &[Rational]) -> Value {
        match self {
            Model::Tabular(t) => t.eval(x).clone(),
            Model::Tree(t) => t.eval(x).clone(),
            Model::BoxPiecewise(b) => Value::Num(b.eval(x)),
        }
    }

    /// Points of a discrete space matching a partial assignment, in
    /// lexicographic domain order (feature 1 varies slowest).
    pub fn enumerate_points(&self, constraint: &[Option<Rational>]) -> Result<PointIter> {
        PointIter::new(self.space(), constraint)
    }

    /// Υ(S): points that agree with `v` on `fixed`.
    pub fn points_matching(&self, v: &[Rational], fixed: FeatureSet) -> Result<PointIter> {
        let constraint = fixing(v, fixed);
        self.enumerate_points(&constraint)
    }

    /// E[π(x) | x_S = v_S] under the uniform product distribution on the
    /// free features.
    pub fn conditional_expectation(&self, v: &[Rational], fixed: FeatureSet) -> Result<Rational> {
        if self.value_kind() != ValueKind::Numeric {
            return Err(Error::NumericRequired(
                "expected values are undefined for categorical outputs".into(),
            ));
        }
        self.space().check_point(v)?;
        match self {
            Model::BoxPiecewise(b) => Ok(b.conditional_expectation(v, fixed)),
            _ => {
                let mut sum = Rational::from_integer(0.into());
                let mut count: u64 = 0;
                for x in self.points_matching(v, fixed)? {
                    match self.eval(&x) {
                        Value::Num(r) => sum += r,
                        Value::Label(_) => unreachable!("numeric model produced a label"),
                    }
                    count += 1;
                }
                Ok(sum / Rational::from_integer(count.into()))
            }
        }
    }

    /// Smallest and largest output over the whole space (numeric models).
    pub fn output_range(&self) -> Result<(Rational, Rational)> {
        let values: Vec<Rational> = match self {
            Model::BoxPiecewise(b) => return Ok(b.output_range()),
            Model::Tabular(t) => t
                .values()
                .iter()
                .filter_map(|v| v.as_num().cloned())
                .collect(),
            Model::Tree(t) => t
                .leaf_values()
                .filter_map(|v| v.as_num().cloned())
                .collect(),
        };
        if values.is_empty() || self.value_kind() != ValueKind::Numeric {
            return Err(Error::NumericRequired(
                "output range of a categorical model".into(),
            ));
        }
        let min = values.iter().min().cloned().unwrap();
        let max = values.iter().max().cloned().unwrap();
        Ok((min, max))
    }

    /// Applies `f` to every output. Only discrete-output models support it.
    pub fn map_values(&self, kind: ValueKind, f: impl Fn(&Value) -> Value) -> Result<Model> {
        match self {
            Model::Tabular(t) => Ok(Model::Tabular(t.map_values(kind, f)?)),
            Model::Tree(t) => Ok(Model::Tree(t.map_values(kind, f)?)),
            Model::BoxPiecewise(_) => Err(Error::Unsupported(
                "relabelling outputs of a piecewise-affine model".into(),
            )),
        }
    }
}

pub(crate) fn fixing(v: &[Rational], fixed: FeatureSet) -> Vec<Option<Rational>> {
    v.iter()
        .enumerate()
        .map(|(i, x)| fixed.contains_index(i).then(|| x.clone()))
        .collect()
}

/// A target instance `(v, π(v))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    point: Point,
    prediction: Value,
}

impl Instance {
    /// The prediction is always computed, never supplied.
    pub fn new(model: &Model, point: Point) -> Result<Self> {
        let prediction = model.predict(&point)?;
        Ok(Instance { point, prediction })
    }

    pub fn point(&self) -> &[Rational] {
        &self.point
    }

    pub fn prediction(&self) -> &Value {
        &self.prediction
    }
}

/// Odometer over the points of a discrete space matching a constraint.
#[derive(Debug, Clone)]
pub struct PointIter {
    choices: Vec<Vec<Rational>>,
    counters: Vec<usize>,
    done: bool,
}

impl PointIter {
    fn new(space: &FeatureSpace, constraint: &[Option<Rational>]) -> Result<Self> {
        if !space.is_discrete() {
            return Err(Error::Unsupported(
                "point enumeration over interval domains".into(),
            ));
        }
        if constraint.len() != space.len() {
            return Err(Error::InvalidArgument(format!(
                "constraint has {} entries, feature space has {}",
                constraint.len(),
                space.len()
            )));
        }
        let choices = space
            .features()
            .iter()
            .zip(constraint)
            .map(|(f, c)| match (&f.domain, c) {
                (Domain::Discrete(values), None) => Ok(values.clone()),
                (dom, Some(x)) if dom.contains(x) => Ok(vec![x.clone()]),
                (_, Some(x)) => Err(Error::Domain(format!(
                    "constraint value {} outside the domain of feature {}",
                    format_rational(x),
                    f.id
                ))),
                (Domain::Interval { .. }, None) => unreachable!(),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PointIter {
            counters: vec![0; choices.len()],
            choices,
            done: false,
        })
    }
}

impl Iterator for PointIter {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        if self.done {
            return None;
        }
        let point = self
            .choices
            .iter()
            .zip(&self.counters)
            .map(|(c, &k)| c[k].clone())
            .collect();
        let mut i = self.counters.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.counters[i] += 1;
            if self.counters[i] < self.choices[i].len() {
                break;
            }
            self.counters[i] = 0;
        }
        Some(point)
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn e3_predictions() {
        let m = e3();
        assert_eq!(m.predict(&pt("1,1")).unwrap(), Value::Num(int(1)));
        assert_eq!(m.predict(&pt("0,0")).unwrap(), Value::Num(int(-2)));
        assert_eq!(m.predict(&pt("0,1")).unwrap(), Value::Num(int(2)));
        // boundary convention: 1/2 belongs to the upper cell
        assert_eq!(m.predict(&pt("1/2,0")).unwrap(), Value::Num(ratio(1, 2)));
        assert_eq!(m.predict(&pt("3/2,3/2")).unwrap(), Value::Num(ratio(3, 2)));
        assert_eq!(m.predict(&pt("0,3/2")).unwrap(), Value::Num(ratio(5, 2)));
        assert!(matches!(m.predict(&pt("2,0")), Err(Error::Domain(_))));
    }

    #[test]
    fn enumeration_orders_and_counts() {
        let e2 = e2();
        let pts: Vec<_> = e2
            .enumerate_points(&[Some(int(1)), None])
            .unwrap()
            .collect();
        assert_eq!(pts, vec![pt("1,0"), pt("1,1")]);

        let e1 = e1();
        assert_eq!(
            e1.enumerate_points(&[None, None, None]).unwrap().count(),
            12
        );
        let all: Vec<_> = e1.enumerate_points(&[None, None, None]).unwrap().collect();
        assert_eq!(all[0], pt("0,0,0"));
        assert_eq!(all[1], pt("0,0,1"));
        assert_eq!(all[11], pt("1,1,2"));
        let fixed: Vec<_> = e1
            .enumerate_points(&[Some(int(1)), Some(int(1)), Some(int(2))])
            .unwrap()
            .collect();
        assert_eq!(fixed, vec![pt("1,1,2")]);
    }

    #[test]
    fn enumeration_rejects_intervals_and_bad_constraints() {
        assert!(matches!(
            e3().enumerate_points(&[None, None]),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            e2().enumerate_points(&[Some(int(5)), None]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn e3_expectations() {
        let m = e3();
        let v = pt("1,1");
        let ids = |x: &[usize]| FeatureSet::from_ids(x.iter().copied(), 2).unwrap();
        assert_eq!(
            m.conditional_expectation(&v, ids(&[])).unwrap(),
            ratio(1, 2)
        );
        assert_eq!(m.conditional_expectation(&v, ids(&[1])).unwrap(), int(1));
        assert_eq!(
            m.conditional_expectation(&v, ids(&[2])).unwrap(),
            ratio(3, 2)
        );
        assert_eq!(m.conditional_expectation(&v, ids(&[1, 2])).unwrap(), int(1));
    }

    #[test]
    fn categorical_expectation_is_rejected() {
        let m = e1()
            .map_values(ValueKind::Categorical, |v| Value::Label(format!("c{v}")))
            .unwrap();
        let r = m.conditional_expectation(&pt("1,1,2"), FeatureSet::empty());
        assert!(matches!(r, Err(Error::NumericRequired(_))));
    }

    #[test]
    fn tree_matches_its_tabulation() {
        let tree = e1();
        let table = e1_tabular();
        for x in table.enumerate_points(&[None, None, None]).unwrap() {
            assert_eq!(
                tree.predict(&x).unwrap(),
                table.predict(&x).unwrap(),
                "at {x:?}"
            );
        }
        if let Model::Tree(t) = &tree {
            assert_eq!(Model::Tabular(t.to_tabular()), table);
        }
    }

    #[test]
    fn full_fixing_gives_prediction() {
        for (m, v) in [(e1(), pt("1,1,2")), (e2(), pt("1,1")), (e3(), pt("1,1"))] {
            let full = FeatureSet::full(m.num_features());
            let e = m.conditional_expectation(&v, full).unwrap();
            assert_eq!(Value::Num(e), m.predict(&v).unwrap());
        }
    }
}
