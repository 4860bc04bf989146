use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

/// Values a single feature may take.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domain {
    /// Finite, ordered, duplicate-free list of values.
    Discrete(Vec<Rational>),
    /// Closed real interval `[lo, hi]` with `lo < hi`.
    Interval { lo: Rational, hi: Rational },
}

impl Domain {
    pub fn contains(&self, x: &Rational) -> bool {
        match self {
            Domain::Discrete(values) => values.contains(x),
            Domain::Interval { lo, hi } => lo <= x && x <= hi,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, Domain::Discrete(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Feature {
    /// 1-based.
    pub id: usize,
    pub name: String,
    pub domain: Domain,
}

/// Ordered product of feature domains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSpace {
    features: Vec<Feature>,
}

impl FeatureSpace {
    /// Assigns ids `1..=m` in the given order and validates every domain.
    pub fn new(features: Vec<(String, Domain)>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Validation(
                "feature space needs at least one feature".into(),
            ));
        }
        if features.len() > crate::FeatureSet::CAPACITY {
            return Err(Error::TooLarge {
                what: "feature space",
                limit: crate::FeatureSet::CAPACITY,
                got: features.len(),
            });
        }
        let features = features
            .into_iter()
            .enumerate()
            .map(|(i, (name, domain))| {
                validate_domain(&name, &domain)?;
                Ok(Feature {
                    id: i + 1,
                    name,
                    domain,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FeatureSpace { features })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    /// Feature by 1-based id.
    pub fn feature(&self, id: usize) -> Option<&Feature> {
        id.checked_sub(1).and_then(|i| self.features.get(i))
    }

    pub fn domain(&self, index: usize) -> &Domain {
        &self.features[index].domain
    }

    pub fn is_discrete(&self) -> bool {
        self.features.iter().all(|f| f.domain.is_discrete())
    }

    pub fn is_interval(&self) -> bool {
        self.features.iter().all(|f| !f.domain.is_discrete())
    }

    /// Number of points of a fully discrete space, `None` otherwise or on
    /// overflow.
    pub fn cardinality(&self) -> Option<usize> {
        self.features
            .iter()
            .try_fold(1usize, |acc, f| match &f.domain {
                Domain::Discrete(v) => acc.checked_mul(v.len()),
                Domain::Interval { .. } => None,
            })
    }

    /// Position of `x` in the domain of the feature at 0-based `index`.
    pub fn position(&self, index: usize, x: &Rational) -> Option<usize> {
        match &self.features[index].domain {
            Domain::Discrete(values) => values.iter().position(|v| v == x),
            Domain::Interval { .. } => None,
        }
    }

    pub fn check_point(&self, x: &[Rational]) -> Result<()> {
        if x.len() != self.len() {
            return Err(Error::Domain(format!(
                "point has {} coordinates, feature space has {}",
                x.len(),
                self.len()
            )));
        }
        for (f, xi) in self.features.iter().zip(x) {
            if !f.domain.contains(xi) {
                return Err(Error::Domain(format!(
                    "value {} outside the domain of feature {} ({})",
                    format_rational(xi),
                    f.id,
                    f.name
                )));
            }
        }
        Ok(())
    }
}

fn validate_domain(name: &str, domain: &Domain) -> Result<()> {
    match domain {
        Domain::Discrete(values) => {
            if values.is_empty() {
                return Err(Error::Validation(format!("feature {name}: empty domain")));
            }
            for (i, v) in values.iter().enumerate() {
                if values[..i].contains(v) {
                    return Err(Error::Validation(format!(
                        "feature {name}: duplicate domain value {}",
                        format_rational(v)
                    )));
                }
            }
        }
        Domain::Interval { lo, hi } => {
            if lo >= hi {
                return Err(Error::Validation(format!(
                    "feature {name}: interval needs lo < hi"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn bools(n: usize) -> Vec<(String, Domain)> {
        (0..n)
            .map(|i| {
                (
                    format!("x{}", i + 1),
                    Domain::Discrete(vec![int(0), int(1)]),
                )
            })
            .collect()
    }

    #[test]
    fn ids_are_one_based() {
        let space = FeatureSpace::new(bools(3)).unwrap();
        assert_eq!(space.feature(1).unwrap().name, "x1");
        assert_eq!(space.feature(3).unwrap().id, 3);
        assert!(space.feature(0).is_none());
        assert_eq!(space.cardinality(), Some(8));
    }

    #[test]
    fn rejects_bad_domains() {
        assert!(FeatureSpace::new(vec![]).is_err());
        assert!(FeatureSpace::new(vec![("a".into(), Domain::Discrete(vec![]))]).is_err());
        assert!(
            FeatureSpace::new(vec![("a".into(), Domain::Discrete(vec![int(1), int(1)]))]).is_err()
        );
        assert!(FeatureSpace::new(vec![(
            "a".into(),
            Domain::Interval {
                lo: int(1),
                hi: int(1)
            }
        )])
        .is_err());
    }

    #[test]
    fn point_checks() {
        let space = FeatureSpace::new(bools(2)).unwrap();
        assert!(space.check_point(&[int(0), int(1)]).is_ok());
        assert!(matches!(
            space.check_point(&[int(0), int(2)]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            space.check_point(&[int(0)]),
            Err(Error::Domain(_))
        ));
    }
}
