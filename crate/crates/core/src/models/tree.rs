use std::collections::BTreeSet;

use super::{Domain, FeatureSpace, Point, TabularModel, Value, ValueKind};
use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

/// Outgoing edge of an internal node: the child taken when the tested
/// feature takes any of `values`.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub values: Vec<Rational>,
    pub child: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Internal {
        feature: usize,
        branches: Vec<Branch>,
    },
    Leaf(Value),
}

/// Decision or regression tree over discrete features. Nodes are addressed
/// by their index in `nodes`.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeModel {
    space: FeatureSpace,
    kind: ValueKind,
    nodes: Vec<TreeNode>,
    root: usize,
}

impl TreeModel {
    pub fn new(
        space: FeatureSpace,
        kind: ValueKind,
        nodes: Vec<TreeNode>,
        root: usize,
    ) -> Result<Self> {
        if !space.is_discrete() {
            return Err(Error::Validation("trees need discrete domains".into()));
        }
        if root >= nodes.len() {
            return Err(Error::Validation(format!("root {root} is not a node")));
        }
        let tree = TreeModel {
            space,
            kind,
            nodes,
            root,
        };
        let mut reached = vec![false; tree.nodes.len()];
        let mut leaves = BTreeSet::new();
        tree.validate_from(root, 0, &mut reached, &mut leaves)?;
        if let Some(k) = reached.iter().position(|r| !r) {
            return Err(Error::Validation(format!(
                "nodes[{k}] is unreachable from the root"
            )));
        }
        if leaves.len() < 2 {
            return Err(Error::Validation(
                "model is constant; a non-constant prediction function is required".into(),
            ));
        }
        Ok(tree)
    }

    fn validate_from<'a>(
        &'a self,
        node: usize,
        tested: u64,
        reached: &mut [bool],
        leaves: &mut BTreeSet<&'a Value>,
    ) -> Result<()> {
        reached[node] = true;
        match &self.nodes[node] {
            TreeNode::Leaf(v) => {
                self.kind
                    .check(v)
                    .map_err(|e| Error::Validation(format!("nodes[{node}]: {e}")))?;
                leaves.insert(v);
            }
            TreeNode::Internal { feature, branches } => {
                let f = self.space.feature(*feature).ok_or_else(|| {
                    Error::Validation(format!("nodes[{node}]: unknown feature {feature}"))
                })?;
                let bit = 1u64 << (feature - 1);
                if tested & bit != 0 {
                    return Err(Error::Validation(format!(
                        "nodes[{node}]: feature {feature} tested twice on one path"
                    )));
                }
                let Domain::Discrete(domain) = &f.domain else {
                    unreachable!()
                };
                let mut covered = vec![0usize; domain.len()];
                for (b, branch) in branches.iter().enumerate() {
                    if branch.values.is_empty() {
                        return Err(Error::Validation(format!(
                            "nodes[{node}].branches[{b}]: no values"
                        )));
                    }
                    for x in &branch.values {
                        let pos = domain.iter().position(|d| d == x).ok_or_else(|| {
                            Error::Validation(format!(
                                "nodes[{node}].branches[{b}]: value {} outside the domain of feature {feature}",
                                format_rational(x)
                            ))
                        })?;
                        covered[pos] += 1;
                    }
                    if branch.child >= self.nodes.len() {
                        return Err(Error::Validation(format!(
                            "nodes[{node}].branches[{b}]: child {} is not a node",
                            branch.child
                        )));
                    }
                }
                if let Some(pos) = covered.iter().position(|&c| c != 1) {
                    return Err(Error::Validation(format!(
                        "nodes[{node}]: domain value {} of feature {feature} is covered {} times",
                        format_rational(&domain[pos]),
                        covered[pos]
                    )));
                }
                for branch in branches {
                    self.validate_from(branch.child, tested | bit, reached, leaves)?;
                }
            }
        }
        Ok(())
    }

    pub fn space(&self) -> &FeatureSpace {
        &self.space
    }

    pub fn value_kind(&self) -> ValueKind {
        self.kind
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub(crate) fn eval(&self, x: &[Rational]) -> &Value {
        let mut node = self.root;
        loop {
            match &self.nodes[node] {
                TreeNode::Leaf(v) => return v,
                TreeNode::Internal { feature, branches } => {
                    let xi = &x[feature - 1];
                    node = branches
                        .iter()
                        .find(|b| b.values.contains(xi))
                        .expect("validated tree covers every domain value")
                        .child;
                }
            }
        }
    }

    pub(crate) fn leaf_values(&self) -> impl Iterator<Item = &Value> {
        self.nodes.iter().filter_map(|n| match n {
            TreeNode::Leaf(v) => Some(v),
            TreeNode::Internal { .. } => None,
        })
    }

    /// Searches for a leaf satisfying `accept` among the leaves consistent
    /// with `constraint`, returning a point that reaches it. Free features
    /// not tested on the path keep their value from `v`; tested free
    /// features prefer `v`'s value when the branch allows it.
    pub(crate) fn find_leaf(
        &self,
        constraint: &[Option<Rational>],
        v: &[Rational],
        accept: &dyn Fn(&Value) -> bool,
    ) -> Option<Point> {
        let mut point: Point = v.to_vec();
        self.find_from(self.root, constraint, &mut point, accept)
            .then_some(point)
    }

    fn find_from(
        &self,
        node: usize,
        constraint: &[Option<Rational>],
        point: &mut Point,
        accept: &dyn Fn(&Value) -> bool,
    ) -> bool {
        match &self.nodes[node] {
            TreeNode::Leaf(value) => accept(value),
            TreeNode::Internal { feature, branches } => {
                let i = feature - 1;
                if let Some(x) = &constraint[i] {
                    let branch = branches.iter().find(|b| b.values.contains(x)).unwrap();
                    return self.find_from(branch.child, constraint, point, accept);
                }
                let original = point[i].clone();
                for branch in branches {
                    point[i] = if branch.values.contains(&original) {
                        original.clone()
                    } else {
                        branch.values[0].clone()
                    };
                    if self.find_from(branch.child, constraint, point, accept) {
                        return true;
                    }
                }
                point[i] = original;
                false
            }
        }
    }

    /// The same function as an explicit table.
    pub fn to_tabular(&self) -> TabularModel {
        TabularModel::from_fn(self.space.clone(), self.kind, |x| self.eval(x).clone())
            .expect("a validated tree tabulates to a valid table")
    }

    pub(crate) fn map_values(&self, kind: ValueKind, f: impl Fn(&Value) -> Value) -> Result<Self> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| match n {
                TreeNode::Leaf(v) => TreeNode::Leaf(f(v)),
                other => other.clone(),
            })
            .collect();
        TreeModel::new(self.space.clone(), kind, nodes, self.root)
    }
}
