use super::FeatureSet;
use crate::error::{Error, Result};
use crate::featureset::canonicalize;

/// All subset-minimal hitting sets of `family`, in canonical order.
///
/// Branches on the elements of the first set not yet hit, pruning any
/// partial set that already contains a hitting set found earlier. Every
/// minimal hitting set is reached; non-minimal ones are filtered at the end.
pub fn minimal_hitting_sets(family: &[FeatureSet]) -> Result<Vec<FeatureSet>> {
    if family.is_empty() {
        return Err(Error::InvalidArgument(
            "hitting sets of an empty family".into(),
        ));
    }
    if family.iter().any(|s| s.is_empty()) {
        return Err(Error::InvalidArgument(
            "family contains the empty set".into(),
        ));
    }
    let mut found = Vec::new();
    search(family, FeatureSet::empty(), &mut found);
    let mut minimal: Vec<FeatureSet> = found
        .iter()
        .copied()
        .filter(|h| !found.iter().any(|g| g != h && g.is_subset(*h)))
        .collect();
    canonicalize(&mut minimal);
    Ok(minimal)
}

fn search(family: &[FeatureSet], current: FeatureSet, found: &mut Vec<FeatureSet>) {
    if found.iter().any(|h| h.is_subset(current)) {
        return;
    }
    match family.iter().find(|s| !s.intersects(current)) {
        None => found.push(current),
        Some(unhit) => {
            for id in unhit.ids() {
                search(family, current.with(id), found);
            }
        }
    }
}

/// AXps as the minimal hitting sets of the CXps.
pub fn axps_from_cxps(cxps: &[FeatureSet]) -> Result<Vec<FeatureSet>> {
    minimal_hitting_sets(cxps)
}
