//! Indistinguishability of model outputs.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::models::{Instance, Model, Point, Value, ValueKind};
use crate::rational::{format_rational, Rational};

/// How the output at `x` is compared with the output at the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimilarityConfig {
    /// Similar iff the predicted class is unchanged.
    ClassEquality,
    /// Similar iff `|π(x) − π(v)| ≤ delta`.
    RegressionThreshold { delta: Rational },
}

impl SimilarityConfig {
    pub fn threshold(delta: Rational) -> Result<Self> {
        if delta.is_negative() {
            return Err(Error::InvalidArgument(format!(
                "delta must be non-negative, got {}",
                format_rational(&delta)
            )));
        }
        Ok(SimilarityConfig::RegressionThreshold { delta })
    }

    pub fn delta(&self) -> Option<&Rational> {
        match self {
            SimilarityConfig::ClassEquality => None,
            SimilarityConfig::RegressionThreshold { delta } => Some(delta),
        }
    }
}

/// A model, a target instance and a similarity predicate.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplanationProblem {
    model: Model,
    instance: Instance,
    similarity: SimilarityConfig,
}

impl ExplanationProblem {
    pub fn new(model: Model, point: Point, similarity: SimilarityConfig) -> Result<Self> {
        if let SimilarityConfig::RegressionThreshold { delta } = &similarity {
            if delta.is_negative() {
                return Err(Error::InvalidArgument("delta must be non-negative".into()));
            }
            if model.value_kind() != ValueKind::Numeric {
                return Err(Error::Validation(
                    "a regression threshold needs numeric model outputs".into(),
                ));
            }
        }
        let instance = Instance::new(&model, point)?;
        Ok(ExplanationProblem {
            model,
            instance,
            similarity,
        })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn similarity(&self) -> &SimilarityConfig {
        &self.similarity
    }

    pub fn num_features(&self) -> usize {
        self.model.num_features()
    }

    /// σ(x): whether the output at `x` is indistinguishable from π(v).
    pub fn similar(&self, x: &[Rational]) -> Result<bool> {
        let out = self.model.predict(x)?;
        Ok(self.similar_value(&out))
    }

    /// σ applied to an already computed output.
    pub fn similar_value(&self, out: &Value) -> bool {
        let target = self.instance.prediction();
        match &self.similarity {
            SimilarityConfig::ClassEquality => out == target,
            SimilarityConfig::RegressionThreshold { delta } => match (out, target) {
                (Value::Num(a), Value::Num(b)) => (a - b).abs() <= *delta,
                _ => false,
            },
        }
    }

    /// Numeric tolerance around π(v): `delta` for thresholds, zero for class
    /// equality on numeric outputs.
    pub(crate) fn tolerance(&self) -> Rational {
        self.similarity
            .delta()
            .cloned()
            .unwrap_or_else(Rational::zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::fixtures::*;
    use crate::rational::{int, ratio};

    fn e3_at(delta: Rational) -> ExplanationProblem {
        ExplanationProblem::new(e3(), pt("1,1"), SimilarityConfig::threshold(delta).unwrap())
            .unwrap()
    }

    #[test]
    fn identity_is_similar() {
        let p =
            ExplanationProblem::new(e1(), pt("1,1,2"), SimilarityConfig::ClassEquality).unwrap();
        assert!(p.similar(&pt("1,1,2")).unwrap());
        assert!(e3_at(ratio(1, 5)).similar(&pt("1,1")).unwrap());
    }

    #[test]
    fn e3_threshold_examples() {
        let p = e3_at(ratio(1, 5));
        assert!(!p.similar(&pt("0,0")).unwrap());
        assert!(p.similar(&pt("9/10,1")).unwrap());
        assert!(!p.similar(&pt("1/2,1")).unwrap());
    }

    #[test]
    fn monotone_in_delta() {
        let x = pt("13/10,0");
        assert!(!e3_at(ratio(1, 5)).similar(&x).unwrap());
        assert!(e3_at(ratio(3, 10)).similar(&x).unwrap());
        assert!(e3_at(int(1)).similar(&x).unwrap());
    }

    #[test]
    fn rejects_bad_configurations() {
        assert!(SimilarityConfig::threshold(int(-1)).is_err());
        let cat = e1()
            .map_values(ValueKind::Categorical, |v| Value::Label(v.to_string()))
            .unwrap();
        let r = ExplanationProblem::new(
            cat,
            pt("1,1,2"),
            SimilarityConfig::threshold(int(0)).unwrap(),
        );
        assert!(matches!(r, Err(Error::Validation(_))));
        let r = ExplanationProblem::new(e1(), pt("1,1,3"), SimilarityConfig::ClassEquality);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn class_equality_survives_relabelling() {
        let p =
            ExplanationProblem::new(e1(), pt("1,1,2"), SimilarityConfig::ClassEquality).unwrap();
        let relabelled = e1()
            .map_values(ValueKind::Categorical, |v| {
                Value::Label(format!("class-{v}"))
            })
            .unwrap();
        let q = ExplanationProblem::new(relabelled, pt("1,1,2"), SimilarityConfig::ClassEquality)
            .unwrap();
        for x in e1().enumerate_points(&[None, None, None]).unwrap() {
            assert_eq!(p.similar(&x).unwrap(), q.similar(&x).unwrap());
        }
    }
}
