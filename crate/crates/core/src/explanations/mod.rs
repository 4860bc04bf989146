//! Weak and minimal abductive/contrastive explanations.
//!
//! A set `S` is a weak abductive explanation (WAXp) when fixing the
//! features in `S` to the instance values forces a similar output
//! everywhere in the universe; a set `Y` is a weak contrastive explanation
//! (WCXp) when freeing the features in `Y` allows a dissimilar output.
//! `WCXp(Y) ⇔ ¬WAXp(F \ Y)`, and both predicates are monotone.
//!
//! The universe is either the whole feature space (model-aware) or a finite
//! sample of model behaviour (model-agnostic).

mod enumerate;
mod mhs;

pub use enumerate::{
    enumerate_axps, enumerate_cxps, extract_axp, extract_cxp, relevant_features, CxpEnumeration,
};
pub use mhs::{axps_from_cxps, minimal_hitting_sets};

pub use crate::featureset::FeatureSet;

use crate::error::{Error, Result};
use crate::models::{fixing, BoxPiecewiseModel, Model, Point, Value};
use crate::rational::{ratio, Rational};
use crate::similarity::ExplanationProblem;

/// Rows of the feature space paired with the model's outputs on them.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    rows: Vec<Point>,
    predictions: Vec<Value>,
}

impl Sample {
    /// Validates rows against the model's space. Missing predictions are
    /// computed; given predictions must agree with the model.
    pub fn new(model: &Model, rows: Vec<Point>, predictions: Option<Vec<Value>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Validation("sample has no rows".into()));
        }
        if let Some(p) = &predictions {
            if p.len() != rows.len() {
                return Err(Error::Validation(format!(
                    "sample has {} rows but {} predictions",
                    rows.len(),
                    p.len()
                )));
            }
        }
        let mut computed = Vec::with_capacity(rows.len());
        for (j, row) in rows.iter().enumerate() {
            let out = model
                .predict(row)
                .map_err(|e| Error::Validation(format!("sample row {}: {e}", j + 1)))?;
            if let Some(given) = predictions.as_ref().map(|p| &p[j]) {
                if *given != out {
                    return Err(Error::Validation(format!(
                        "sample row {}: prediction {given} disagrees with the model ({out})",
                        j + 1
                    )));
                }
            }
            computed.push(out);
        }
        Ok(Sample {
            rows,
            predictions: computed,
        })
    }

    /// Every point of a discrete model's feature space.
    pub fn full_enumeration(model: &Model) -> Result<Self> {
        let rows: Vec<Point> = model
            .enumerate_points(&vec![None; model.num_features()])?
            .collect();
        Sample::new(model, rows, None)
    }

    pub fn rows(&self) -> &[Point] {
        &self.rows
    }

    pub fn predictions(&self) -> &[Value] {
        &self.predictions
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn matching<'a>(
        &'a self,
        v: &'a [Rational],
        fixed: FeatureSet,
    ) -> impl Iterator<Item = usize> + 'a {
        self.rows
            .iter()
            .enumerate()
            .filter(move |(_, row)| fixed.indices().all(|i| row[i] == v[i]))
            .map(|(j, _)| j)
    }
}

/// Where quantification ranges.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Universe {
    /// The whole feature space of the model.
    #[default]
    ModelAware,
    /// Only the rows of a sample.
    ModelAgnostic(Sample),
}

/// Outcome of a WAXp test. `vacuous` marks a model-agnostic check where no
/// sample row matched the fixed features.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WaxpCheck {
    pub holds: bool,
    pub vacuous: bool,
}

pub fn check_waxp(
    problem: &ExplanationProblem,
    universe: &Universe,
    fixed: FeatureSet,
) -> WaxpCheck {
    match universe {
        Universe::ModelAgnostic(sample) => {
            let v = problem.instance().point();
            let mut any = false;
            for j in sample.matching(v, fixed) {
                any = true;
                if !problem.similar_value(&sample.predictions[j]) {
                    return WaxpCheck {
                        holds: false,
                        vacuous: false,
                    };
                }
            }
            WaxpCheck {
                holds: true,
                vacuous: !any,
            }
        }
        Universe::ModelAware => WaxpCheck {
            holds: model_aware_witness(problem, fixed).is_none(),
            vacuous: false,
        },
    }
}

/// WAXp(S): every universe point agreeing with `v` on `S` is similar.
pub fn is_waxp(problem: &ExplanationProblem, universe: &Universe, s: FeatureSet) -> bool {
    check_waxp(problem, universe, s).holds
}

/// WCXp(Y): some universe point agreeing with `v` outside `Y` is dissimilar.
pub fn is_wcxp(problem: &ExplanationProblem, universe: &Universe, y: FeatureSet) -> bool {
    find_witness(problem, universe, y).is_some()
}

/// A dissimilar universe point differing from `v` only on features in `y`.
pub fn find_witness(
    problem: &ExplanationProblem,
    universe: &Universe,
    y: FeatureSet,
) -> Option<Point> {
    let fixed = y.complement(problem.num_features());
    match universe {
        Universe::ModelAgnostic(sample) => {
            let v = problem.instance().point();
            sample
                .matching(v, fixed)
                .find(|&j| !problem.similar_value(&sample.predictions[j]))
                .map(|j| sample.rows[j].clone())
        }
        Universe::ModelAware => model_aware_witness(problem, fixed),
    }
}

/// A point of Υ(fixed) that is not similar, searched over the whole space.
fn model_aware_witness(problem: &ExplanationProblem, fixed: FeatureSet) -> Option<Point> {
    let model = problem.model();
    let v = problem.instance().point();
    match model {
        Model::Tabular(_) => model
            .points_matching(v, fixed)
            .expect("discrete model with in-domain instance")
            .find(|x| !problem.similar_value(&model.eval(x))),
        Model::Tree(tree) => {
            tree.find_leaf(&fixing(v, fixed), v, &|out| !problem.similar_value(out))
        }
        Model::BoxPiecewise(b) => box_witness(problem, b, fixed),
    }
}

/// For an affine piece on a box with non-empty free sides, a closed-box
/// corner violating the (closed) similarity band implies nearby interior
/// points violate it too, so corners decide the predicate exactly.
fn box_witness(
    problem: &ExplanationProblem,
    model: &BoxPiecewiseModel,
    fixed: FeatureSet,
) -> Option<Point> {
    let v = problem.instance().point();
    let target = problem.instance().prediction().as_num()?.clone();
    let tol = problem.tolerance();
    for cell in model.cells() {
        let Some((lo, hi)) = model.slice_range(cell, v, fixed) else {
            continue;
        };
        let towards_max = if &hi - &target > tol {
            true
        } else if &target - &lo > tol {
            false
        } else {
            continue;
        };
        let corner: Point = (0..v.len())
            .map(|i| {
                if fixed.contains_index(i) {
                    return v[i].clone();
                }
                let (blo, bhi) = &cell.bounds[i];
                let up = (cell.coefficients[i] >= Rational::from_integer(0.into())) == towards_max;
                if up {
                    bhi.clone()
                } else {
                    blo.clone()
                }
            })
            .collect();
        let center: Point = (0..v.len())
            .map(|i| {
                if fixed.contains_index(i) {
                    v[i].clone()
                } else {
                    let (blo, bhi) = &cell.bounds[i];
                    (blo + bhi) * ratio(1, 2)
                }
            })
            .collect();
        let inside = |x: &Point| {
            x.iter()
                .enumerate()
                .all(|(i, xi)| model.side_contains(cell, i, xi))
        };
        let violates = |x: &Point| {
            let d = cell.eval(x) - &target;
            d > tol || -d > tol
        };
        let mut t = ratio(1, 2);
        let mut x = corner.clone();
        for _ in 0..256 {
            if inside(&x) && violates(&x) {
                return Some(x);
            }
            x = corner
                .iter()
                .zip(&center)
                .map(|(c, m)| c + (m - c) * &t)
                .collect();
            t *= ratio(1, 2);
        }
    }
    None
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;
    use crate::models::fixtures::*;
    use crate::similarity::SimilarityConfig;

    pub(crate) fn e1p() -> ExplanationProblem {
        ExplanationProblem::new(e1(), pt("1,1,2"), SimilarityConfig::ClassEquality).unwrap()
    }
    pub(crate) fn e2p() -> ExplanationProblem {
        ExplanationProblem::new(e2(), pt("1,1"), SimilarityConfig::ClassEquality).unwrap()
    }
    pub(crate) fn e3p() -> ExplanationProblem {
        ExplanationProblem::new(
            e3(),
            pt("1,1"),
            SimilarityConfig::threshold(ratio(1, 5)).unwrap(),
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::tests_support::*;
    use super::*;
    use crate::models::fixtures::*;
    use crate::similarity::SimilarityConfig;

    fn fs(ids: &[usize], m: usize) -> FeatureSet {
        FeatureSet::from_ids(ids.iter().copied(), m).unwrap()
    }

    #[test]
    fn e1_waxp_examples() {
        let p = e1p();
        let u = Universe::ModelAware;
        assert!(is_waxp(&p, &u, fs(&[1], 3)));
        assert!(is_waxp(&p, &u, fs(&[1, 2, 3], 3)));
        assert!(!is_waxp(&p, &u, fs(&[2, 3], 3)));
        assert!(!is_waxp(&p, &u, FeatureSet::empty()));
    }

    #[test]
    fn wcxp_examples() {
        let u = Universe::ModelAware;
        assert!(is_wcxp(&e1p(), &u, fs(&[1], 3)));
        assert!(!is_wcxp(&e1p(), &u, FeatureSet::empty()));
        assert!(!is_wcxp(&e2p(), &u, fs(&[2], 2)));
        assert!(is_wcxp(&e2p(), &u, fs(&[1], 2)));
    }

    #[test]
    fn e1_tree_and_table_agree() {
        let tree = e1p();
        let table =
            ExplanationProblem::new(e1_tabular(), pt("1,1,2"), SimilarityConfig::ClassEquality)
                .unwrap();
        for s in FeatureSet::all_subsets(3) {
            assert_eq!(
                is_waxp(&tree, &Universe::ModelAware, s),
                is_waxp(&table, &Universe::ModelAware, s),
                "WAXp({s})"
            );
            assert_eq!(
                is_wcxp(&tree, &Universe::ModelAware, s),
                is_wcxp(&table, &Universe::ModelAware, s),
                "WCXp({s})"
            );
        }
    }

    #[test]
    fn e3_region_analysis() {
        let p = e3p();
        let u = Universe::ModelAware;
        assert!(is_waxp(&p, &u, fs(&[1], 2)));
        assert!(!is_waxp(&p, &u, fs(&[2], 2)));
        assert!(!is_waxp(&p, &u, FeatureSet::empty()));
        assert!(is_wcxp(&p, &u, fs(&[1], 2)));
        assert!(!is_wcxp(&p, &u, fs(&[2], 2)));
        let w = find_witness(&p, &u, fs(&[1], 2)).unwrap();
        assert_eq!(w[1], pt("1")[0]);
        assert!(!p.similar(&w).unwrap());
    }

    #[test]
    fn box_witness_nudges_off_open_corners() {
        // The extreme corner (1/2, 1) of the lower-left cells belongs to the
        // upper cell; the witness has to be pulled inside.
        let p = ExplanationProblem::new(
            e3(),
            pt("1,1"),
            SimilarityConfig::threshold(ratio(1, 5)).unwrap(),
        )
        .unwrap();
        let w = find_witness(&p, &Universe::ModelAware, fs(&[1], 2)).unwrap();
        assert!(!p.similar(&w).unwrap());
    }

    #[test]
    fn agnostic_vacuous_and_sample_checks() {
        let p = e1p();
        let only_target = Sample::new(p.model(), vec![pt("1,1,2")], None).unwrap();
        let u = Universe::ModelAgnostic(only_target);
        let c = check_waxp(&p, &u, FeatureSet::empty());
        assert!(c.holds && !c.vacuous);
        let other = Sample::new(p.model(), vec![pt("0,0,0")], None).unwrap();
        let u = Universe::ModelAgnostic(other);
        let c = check_waxp(&p, &u, fs(&[1], 3));
        assert!(c.holds && c.vacuous);
        assert!(!is_waxp(&p, &u, FeatureSet::empty()));
    }

    #[test]
    fn sample_validation() {
        let m = e2();
        assert!(Sample::new(&m, vec![], None).is_err());
        assert!(Sample::new(&m, vec![pt("2,0")], None).is_err());
        let bad = Sample::new(&m, vec![pt("1,1")], Some(vec![Value::Num(ratio(3, 2))]));
        assert!(bad.unwrap_err().to_string().contains("disagrees"));
        assert_eq!(Sample::full_enumeration(&m).unwrap().len(), 4);
    }
}
