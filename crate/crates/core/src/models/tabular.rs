use std::collections::BTreeSet;

use super::{FeatureSpace, Point, PointIter, Value, ValueKind};
use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

/// Explicit table of outputs over a fully discrete feature space.
///
/// Rows are stored in lexicographic domain order, feature 1 most
/// significant.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularModel {
    space: FeatureSpace,
    kind: ValueKind,
    values: Vec<Value>,
}

impl TabularModel {
    /// Builds the table from explicit entries, filling every other point with
    /// `default` when given.
    pub fn new<I>(
        space: FeatureSpace,
        kind: ValueKind,
        entries: I,
        default: Option<Value>,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (Point, Value)>,
    {
        if !space.is_discrete() {
            return Err(Error::Validation(
                "tabular models need discrete domains".into(),
            ));
        }
        let size = space
            .cardinality()
            .ok_or_else(|| Error::Validation("feature space too large to tabulate".into()))?;
        if let Some(d) = &default {
            kind.check(d)?;
        }
        let mut slots: Vec<Option<Value>> = vec![default; size];
        let mut seen = vec![false; size];
        for (k, (point, value)) in entries.into_iter().enumerate() {
            space
                .check_point(&point)
                .map_err(|e| Error::Validation(format!("entries[{k}]: {e}")))?;
            kind.check(&value)
                .map_err(|e| Error::Validation(format!("entries[{k}]: {e}")))?;
            let idx = index_of(&space, &point);
            if seen[idx] {
                return Err(Error::Validation(format!(
                    "entries[{k}]: duplicate entry for point {}",
                    show_point(&point)
                )));
            }
            seen[idx] = true;
            slots[idx] = Some(value);
        }
        let mut values = Vec::with_capacity(size);
        let points = PointIter::new(&space, &vec![None; space.len()])?;
        for (slot, point) in slots.into_iter().zip(points) {
            match slot {
                Some(v) => values.push(v),
                None => {
                    return Err(Error::Validation(format!(
                        "table is not total: no value for point {} and no default",
                        show_point(&point)
                    )))
                }
            }
        }
        let model = TabularModel {
            space,
            kind,
            values,
        };
        model.check_non_constant()?;
        Ok(model)
    }

    /// Tabulates an arbitrary function over the space.
    pub fn from_fn(
        space: FeatureSpace,
        kind: ValueKind,
        f: impl Fn(&[Rational]) -> Value,
    ) -> Result<Self> {
        let points: Vec<Point> = PointIter::new(&space, &vec![None; space.len()])?.collect();
        let entries: Vec<(Point, Value)> = points
            .into_iter()
            .map(|p| {
                let v = f(&p);
                (p, v)
            })
            .collect();
        TabularModel::new(space, kind, entries, None)
    }

    fn check_non_constant(&self) -> Result<()> {
        let distinct: BTreeSet<&Value> = self.values.iter().collect();
        if distinct.len() < 2 {
            return Err(Error::Validation(
                "model is constant; a non-constant prediction function is required".into(),
            ));
        }
        Ok(())
    }

    pub fn space(&self) -> &FeatureSpace {
        &self.space
    }

    pub fn value_kind(&self) -> ValueKind {
        self.kind
    }

    /// Outputs in lexicographic point order.
    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub(crate) fn eval(&self, x: &[Rational]) -> &Value {
        &self.values[index_of(&self.space, x)]
    }

    pub(crate) fn map_values(&self, kind: ValueKind, f: impl Fn(&Value) -> Value) -> Result<Self> {
        let values: Vec<Value> = self.values.iter().map(f).collect();
        for v in &values {
            kind.check(v)?;
        }
        let model = TabularModel {
            space: self.space.clone(),
            kind,
            values,
        };
        model.check_non_constant()?;
        Ok(model)
    }
}

fn index_of(space: &FeatureSpace, x: &[Rational]) -> usize {
    let mut idx = 0;
    for (i, xi) in x.iter().enumerate() {
        let radix = match space.domain(i) {
            super::Domain::Discrete(v) => v.len(),
            super::Domain::Interval { .. } => unreachable!(),
        };
        let pos = space
            .position(i, xi)
            .expect("point checked against the space");
        idx = idx * radix + pos;
    }
    idx
}

pub(crate) fn show_point(x: &[Rational]) -> String {
    let parts: Vec<String> = x.iter().map(format_rational).collect();
    format!("({})", parts.join(","))
}
