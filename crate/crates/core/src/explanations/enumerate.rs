use rayon::prelude::*;

use super::{axps_from_cxps, is_waxp, is_wcxp, FeatureSet, Universe};
use crate::error::{Error, Result};
use crate::featureset::canonicalize;
use crate::similarity::ExplanationProblem;
use crate::MAX_EXACT_FEATURES;

/// Deletion-based AXp extraction. Features are dropped in ascending id
/// order whenever the remainder is still a WAXp.
pub fn extract_axp(
    problem: &ExplanationProblem,
    universe: &Universe,
    seed: FeatureSet,
) -> Result<FeatureSet> {
    check_subset(problem, seed)?;
    if !is_waxp(problem, universe, seed) {
        return Err(Error::Precondition(format!("seed {seed} is not a WAXp")));
    }
    let mut x = seed;
    for id in seed.ids() {
        if is_waxp(problem, universe, x.without(id)) {
            x = x.without(id);
        }
    }
    Ok(x)
}

/// Deletion-based CXp extraction, dual to [`extract_axp`].
pub fn extract_cxp(
    problem: &ExplanationProblem,
    universe: &Universe,
    seed: FeatureSet,
) -> Result<FeatureSet> {
    check_subset(problem, seed)?;
    if !is_wcxp(problem, universe, seed) {
        return Err(Error::Precondition(format!("seed {seed} is not a WCXp")));
    }
    let mut y = seed;
    for id in seed.ids() {
        if is_wcxp(problem, universe, y.without(id)) {
            y = y.without(id);
        }
    }
    Ok(y)
}

fn check_subset(problem: &ExplanationProblem, s: FeatureSet) -> Result<()> {
    if !s.is_subset(FeatureSet::full(problem.num_features())) {
        return Err(Error::InvalidArgument(format!(
            "{s} is not a subset of the {} features",
            problem.num_features()
        )));
    }
    Ok(())
}

/// All CXps of a problem. `constant` is set when no universe point is
/// dissimilar, in which case `cxps` is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CxpEnumeration {
    pub cxps: Vec<FeatureSet>,
    pub constant: bool,
}

/// Level-wise search of the subset lattice. A WCXp at level `k` that
/// contains no CXp from lower levels is minimal, since any smaller WCXp
/// inside it would contain a CXp already found.
pub fn enumerate_cxps(problem: &ExplanationProblem, universe: &Universe) -> Result<CxpEnumeration> {
    let m = problem.num_features();
    if m > MAX_EXACT_FEATURES {
        return Err(Error::TooLarge {
            what: "explanation enumeration",
            limit: MAX_EXACT_FEATURES,
            got: m,
        });
    }
    if !is_wcxp(problem, universe, FeatureSet::full(m)) {
        return Ok(CxpEnumeration {
            cxps: Vec::new(),
            constant: true,
        });
    }
    let mut found: Vec<FeatureSet> = Vec::new();
    for k in 1..=m {
        let candidates: Vec<FeatureSet> = subsets_of_size(m, k)
            .filter(|y| !found.iter().any(|c| c.is_subset(*y)))
            .collect();
        let mut level: Vec<FeatureSet> = candidates
            .into_par_iter()
            .filter(|&y| is_wcxp(problem, universe, y))
            .collect();
        found.append(&mut level);
    }
    canonicalize(&mut found);
    Ok(CxpEnumeration {
        cxps: found,
        constant: false,
    })
}

/// All AXps, obtained as the minimal hitting sets of the CXps. When the
/// model is constant on the universe the empty set is the only AXp.
pub fn enumerate_axps(
    problem: &ExplanationProblem,
    universe: &Universe,
) -> Result<Vec<FeatureSet>> {
    let cxps = enumerate_cxps(problem, universe)?;
    if cxps.constant {
        return Ok(vec![FeatureSet::empty()]);
    }
    axps_from_cxps(&cxps.cxps)
}

/// Features occurring in some CXp, equivalently in some AXp.
pub fn relevant_features(problem: &ExplanationProblem, universe: &Universe) -> Result<FeatureSet> {
    let cxps = enumerate_cxps(problem, universe)?;
    Ok(cxps
        .cxps
        .iter()
        .fold(FeatureSet::empty(), |acc, c| acc.union(*c)))
}

/// k-subsets of `{1..m}` in increasing bitmask order (Gosper's hack).
pub(crate) fn subsets_of_size(m: usize, k: usize) -> impl Iterator<Item = FeatureSet> {
    let limit = 1u64 << m;
    let mut next = if k == 0 {
        Some(0u64)
    } else if k <= m {
        Some((1u64 << k) - 1)
    } else {
        None
    };
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let n = (((r ^ cur) >> 2) / c) | r;
            (n < limit).then_some(n)
        };
        Some(FeatureSet::from_bits(cur))
    })
}
