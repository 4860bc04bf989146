use num_traits::Zero;

use super::{Domain, FeatureSpace};
use crate::error::{Error, Result};
use crate::featureset::FeatureSet;
use crate::rational::{ratio, Rational};

/// Axis-aligned box carrying an affine output `intercept + Σ a_i·x_i`.
///
/// Each side is half-open `[lo, hi)`, except that `hi` is included when it
/// coincides with the upper end of the feature's domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub bounds: Vec<(Rational, Rational)>,
    pub intercept: Rational,
    pub coefficients: Vec<Rational>,
}

impl Cell {
    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.coefficients
            .iter()
            .zip(x)
            .fold(self.intercept.clone(), |acc, (a, xi)| acc + a * xi)
    }
}

/// Piecewise-affine regressor over interval domains. The cells partition
/// the feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxPiecewiseModel {
    space: FeatureSpace,
    cells: Vec<Cell>,
    upper: Vec<Rational>,
}

impl BoxPiecewiseModel {
    pub fn new(space: FeatureSpace, cells: Vec<Cell>) -> Result<Self> {
        if !space.is_interval() {
            return Err(Error::Validation(
                "piecewise-affine models need interval domains".into(),
            ));
        }
        let m = space.len();
        let domains: Vec<(Rational, Rational)> = (0..m)
            .map(|i| match space.domain(i) {
                Domain::Interval { lo, hi } => (lo.clone(), hi.clone()),
                Domain::Discrete(_) => unreachable!(),
            })
            .collect();
        if cells.is_empty() {
            return Err(Error::Validation("no cells".into()));
        }
        for (c, cell) in cells.iter().enumerate() {
            if cell.bounds.len() != m || cell.coefficients.len() != m {
                return Err(Error::Validation(format!(
                    "cells[{c}]: expected {m} bounds and {m} coefficients"
                )));
            }
            for (i, ((lo, hi), (dlo, dhi))) in cell.bounds.iter().zip(&domains).enumerate() {
                if lo >= hi {
                    return Err(Error::Validation(format!(
                        "cells[{c}]: side {} is empty (needs lo < hi)",
                        i + 1
                    )));
                }
                if lo < dlo || hi > dhi {
                    return Err(Error::Validation(format!(
                        "cells[{c}]: side {} leaves the domain of feature {}",
                        i + 1,
                        i + 1
                    )));
                }
            }
        }
        for a in 0..cells.len() {
            for b in a + 1..cells.len() {
                let overlap = cells[a]
                    .bounds
                    .iter()
                    .zip(&cells[b].bounds)
                    .all(|((alo, ahi), (blo, bhi))| alo < bhi && blo < ahi);
                if overlap {
                    return Err(Error::Validation(format!(
                        "cells[{a}] and cells[{b}] overlap"
                    )));
                }
            }
        }
        // Disjoint half-open boxes whose volumes add up to the domain's
        // volume cover it completely.
        let volume =
            |b: &[(Rational, Rational)]| -> Rational { b.iter().map(|(lo, hi)| hi - lo).product() };
        let covered: Rational = cells.iter().map(|c| volume(&c.bounds)).sum();
        if covered != volume(&domains) {
            return Err(Error::Validation(
                "cells do not cover the feature space".into(),
            ));
        }
        let constant = cells
            .iter()
            .all(|c| c.coefficients.iter().all(Zero::is_zero) && c.intercept == cells[0].intercept);
        if constant {
            return Err(Error::Validation(
                "model is constant; a non-constant prediction function is required".into(),
            ));
        }
        let upper = domains.into_iter().map(|(_, hi)| hi).collect();
        Ok(BoxPiecewiseModel {
            space,
            cells,
            upper,
        })
    }

    pub fn space(&self) -> &FeatureSpace {
        &self.space
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub(crate) fn side_contains(&self, cell: &Cell, i: usize, x: &Rational) -> bool {
        let (lo, hi) = &cell.bounds[i];
        lo <= x && (x < hi || (x == hi && *hi == self.upper[i]))
    }

    /// Index of the cell containing `x`.
    pub fn locate(&self, x: &[Rational]) -> Option<usize> {
        self.cells.iter().position(|c| {
            x.iter()
                .enumerate()
                .all(|(i, xi)| self.side_contains(c, i, xi))
        })
    }

    pub(crate) fn eval(&self, x: &[Rational]) -> Rational {
        let c = self.locate(x).expect("validated cells cover the space");
        self.cells[c].eval(x)
    }

    /// Whether `cell` meets the slice where features in `fixed` equal `v`.
    pub(crate) fn meets_slice(&self, cell: &Cell, v: &[Rational], fixed: FeatureSet) -> bool {
        fixed.indices().all(|i| self.side_contains(cell, i, &v[i]))
    }

    /// Infimum and supremum of the cell's affine output over the slice
    /// `x_S = v_S`, or `None` when the cell misses the slice. Both are
    /// attained at corners of the closed box.
    pub(crate) fn slice_range(
        &self,
        cell: &Cell,
        v: &[Rational],
        fixed: FeatureSet,
    ) -> Option<(Rational, Rational)> {
        if !self.meets_slice(cell, v, fixed) {
            return None;
        }
        let mut lo = cell.intercept.clone();
        let mut hi = cell.intercept.clone();
        for (i, a) in cell.coefficients.iter().enumerate() {
            if fixed.contains_index(i) {
                let t = a * &v[i];
                lo += &t;
                hi += t;
            } else {
                let (blo, bhi) = &cell.bounds[i];
                let (p, q) = (a * blo, a * bhi);
                if p <= q {
                    lo += p;
                    hi += q;
                } else {
                    lo += q;
                    hi += p;
                }
            }
        }
        Some((lo, hi))
    }

    /// Exact E[π(x) | x_S = v_S] under the uniform distribution on the free
    /// sides: each cell meeting the slice contributes its free volume times
    /// the affine value at the centre of its free sides.
    pub(crate) fn conditional_expectation(&self, v: &[Rational], fixed: FeatureSet) -> Rational {
        let half = ratio(1, 2);
        let mut total = Rational::zero();
        for cell in &self.cells {
            if !self.meets_slice(cell, v, fixed) {
                continue;
            }
            let mut weight = Rational::from_integer(1.into());
            let mut mean = cell.intercept.clone();
            for (i, a) in cell.coefficients.iter().enumerate() {
                if fixed.contains_index(i) {
                    mean += a * &v[i];
                } else {
                    let (lo, hi) = &cell.bounds[i];
                    weight *= hi - lo;
                    mean += a * (lo + hi) * &half;
                }
            }
            total += weight * mean;
        }
        let free_volume: Rational = (0..self.space.len())
            .filter(|&i| !fixed.contains_index(i))
            .map(|i| match self.space.domain(i) {
                Domain::Interval { lo, hi } => hi - lo,
                Domain::Discrete(_) => unreachable!(),
            })
            .product();
        total / free_volume
    }

    pub(crate) fn output_range(&self) -> (Rational, Rational) {
        let v: Vec<Rational> = self.upper.clone();
        let mut ranges = self
            .cells
            .iter()
            .filter_map(|c| self.slice_range(c, &v, FeatureSet::empty()));
        let (mut lo, mut hi) = ranges.next().expect("at least one cell");
        for (l, h) in ranges {
            if l < lo {
                lo = l;
            }
            if h > hi {
                hi = h;
            }
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn unit_space() -> FeatureSpace {
        FeatureSpace::new(vec![
            (
                "a".into(),
                Domain::Interval {
                    lo: int(0),
                    hi: int(2),
                },
            ),
            (
                "b".into(),
                Domain::Interval {
                    lo: int(0),
                    hi: int(2),
                },
            ),
        ])
        .unwrap()
    }

    fn cell(b: [(i64, i64); 2], c0: i64, a: [i64; 2]) -> Cell {
        Cell {
            bounds: b.iter().map(|&(l, h)| (int(l), int(h))).collect(),
            intercept: int(c0),
            coefficients: a.iter().map(|&x| int(x)).collect(),
        }
    }

    #[test]
    fn partition_checks() {
        let ok = vec![
            cell([(0, 1), (0, 2)], 0, [1, 0]),
            cell([(1, 2), (0, 2)], 3, [0, 0]),
        ];
        let m = BoxPiecewiseModel::new(unit_space(), ok).unwrap();
        assert_eq!(m.locate(&[int(1), int(2)]), Some(1));
        assert_eq!(m.locate(&[int(2), int(2)]), Some(1));

        let gap = vec![cell([(0, 1), (0, 2)], 0, [1, 0])];
        assert!(BoxPiecewiseModel::new(unit_space(), gap).is_err());
        let overlap = vec![
            cell([(0, 2), (0, 2)], 0, [1, 0]),
            cell([(1, 2), (0, 1)], 0, [1, 0]),
        ];
        assert!(BoxPiecewiseModel::new(unit_space(), overlap).is_err());
        let outside = vec![cell([(0, 3), (0, 2)], 0, [1, 0])];
        assert!(BoxPiecewiseModel::new(unit_space(), outside).is_err());
        let constant = vec![
            cell([(0, 1), (0, 2)], 4, [0, 0]),
            cell([(1, 2), (0, 2)], 4, [0, 0]),
        ];
        assert!(BoxPiecewiseModel::new(unit_space(), constant).is_err());
    }

    #[test]
    fn expectation_of_linear_function() {
        let m =
            BoxPiecewiseModel::new(unit_space(), vec![cell([(0, 2), (0, 2)], 1, [1, 2])]).unwrap();
        // E[1 + x + 2y] over [0,2]^2 = 1 + 1 + 2
        assert_eq!(
            m.conditional_expectation(&[int(0), int(0)], FeatureSet::empty()),
            int(4)
        );
        assert_eq!(
            m.conditional_expectation(&[int(2), int(0)], FeatureSet::singleton(1)),
            int(5)
        );
        assert_eq!(m.output_range(), (int(1), int(7)));
    }
}
