//! Versioned JSON model schema.
//!
//! ```json
//! {
//!   "version": 1,
//!   "kind": "tabular" | "tree" | "box_piecewise",
//!   "task": "classification" | "regression",
//!   "value_kind": "numeric" | "categorical",
//!   "features": [ { "name": "x1", "values": ["0", "1"] },
//!                 { "name": "x2", "interval": ["-1/2", "3/2"] } ],
//!   ...kind-specific payload...
//! }
//! ```
//!
//! Rationals are written as `"p/q"` strings, decimal strings, or JSON
//! numbers. See `docs/model-format.md` for the payloads.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{
    BoxPiecewiseModel, Branch, Cell, Domain, FeatureSpace, Model, TabularModel, TreeModel,
    TreeNode, Value, ValueKind,
};
use crate::rational::{Rational, RationalLiteral};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Classification,
    Regression,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub task: Task,
    pub value_kind: ValueKind,
    pub features: Vec<FeatureDecl>,
    #[serde(flatten)]
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureDecl {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<RationalLiteral>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[RationalLiteral; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Tabular {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        default: Option<serde_json::Value>,
        #[serde(default)]
        entries: Vec<EntryDecl>,
    },
    Tree {
        root: usize,
        nodes: Vec<NodeDecl>,
    },
    BoxPiecewise {
        cells: Vec<CellDecl>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryDecl {
    pub point: Vec<RationalLiteral>,
    pub value: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDecl {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub branches: Vec<BranchDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchDecl {
    pub values: Vec<RationalLiteral>,
    pub child: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellDecl {
    pub bounds: Vec<[RationalLiteral; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intercept: Option<RationalLiteral>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<RationalLiteral>>,
}

/// A validated model together with its file metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedModel {
    pub model: Model,
    pub task: Task,
    pub name: Option<String>,
}

pub fn load_model(path: impl AsRef<Path>) -> Result<LoadedModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
    parse_model(&text)
}

pub fn parse_model(text: &str) -> Result<LoadedModel> {
    let file: ModelFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("model file: {e}")))?;
    file.into_model()
}

fn rationals(lits: &[RationalLiteral], at: &str) -> Result<Vec<Rational>> {
    lits.iter()
        .enumerate()
        .map(|(k, l)| {
            l.to_rational()
                .map_err(|e| Error::Validation(format!("{at}[{k}]: {e}")))
        })
        .collect()
}

/// Reads an output value according to the declared value kind.
pub fn output_value(kind: ValueKind, raw: &serde_json::Value, at: &str) -> Result<Value> {
    match (kind, raw) {
        (ValueKind::Numeric, serde_json::Value::String(s)) => crate::rational::parse_rational(s)
            .map(Value::Num)
            .map_err(|e| Error::Validation(format!("{at}: {e}"))),
        (ValueKind::Numeric, serde_json::Value::Number(n)) => {
            crate::rational::parse_rational(&n.to_string())
                .map(Value::Num)
                .map_err(|e| Error::Validation(format!("{at}: {e}")))
        }
        (ValueKind::Categorical, serde_json::Value::String(s)) => Ok(Value::Label(s.clone())),
        (ValueKind::Categorical, serde_json::Value::Number(n)) => Ok(Value::Label(n.to_string())),
        (_, other) => Err(Error::Validation(format!(
            "{at}: unsupported output literal {other}"
        ))),
    }
}

impl ModelFile {
    pub fn into_model(self) -> Result<LoadedModel> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Validation(format!(
                "unsupported model format version {} (expected {FORMAT_VERSION})",
                self.version
            )));
        }
        let features = self
            .features
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let at = format!("features[{i}]");
                let domain = match (&f.values, &f.interval) {
                    (Some(values), None) => {
                        Domain::Discrete(rationals(values, &format!("{at}.values"))?)
                    }
                    (None, Some([lo, hi])) => Domain::Interval {
                        lo: lo
                            .to_rational()
                            .map_err(|e| Error::Validation(format!("{at}.interval: {e}")))?,
                        hi: hi
                            .to_rational()
                            .map_err(|e| Error::Validation(format!("{at}.interval: {e}")))?,
                    },
                    _ => {
                        return Err(Error::Validation(format!(
                            "{at}: give exactly one of \"values\" or \"interval\""
                        )))
                    }
                };
                Ok((f.name.clone(), domain))
            })
            .collect::<Result<Vec<_>>>()?;
        let space = FeatureSpace::new(features)?;
        let kind = self.value_kind;
        let model = match self.payload {
            Payload::Tabular { default, entries } => {
                let default = default
                    .as_ref()
                    .map(|d| output_value(kind, d, "default"))
                    .transpose()?;
                let entries = entries
                    .iter()
                    .enumerate()
                    .map(|(k, e)| {
                        let at = format!("entries[{k}]");
                        Ok((
                            rationals(&e.point, &format!("{at}.point"))?,
                            output_value(kind, &e.value, &format!("{at}.value"))?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Model::Tabular(TabularModel::new(space, kind, entries, default)?)
            }
            Payload::Tree { root, nodes } => {
                let mut index = HashMap::new();
                for (k, n) in nodes.iter().enumerate() {
                    if index.insert(n.id, k).is_some() {
                        return Err(Error::Validation(format!(
                            "nodes[{k}]: duplicate id {}",
                            n.id
                        )));
                    }
                }
                let lookup = |id: usize, at: &str| {
                    index
                        .get(&id)
                        .copied()
                        .ok_or_else(|| Error::Validation(format!("{at}: no node with id {id}")))
                };
                let built = nodes
                    .iter()
                    .enumerate()
                    .map(|(k, n)| {
                        let at = format!("nodes[{k}]");
                        match (&n.feature, &n.leaf) {
                            (Some(feature), None) => {
                                let branches = n
                                    .branches
                                    .iter()
                                    .enumerate()
                                    .map(|(b, br)| {
                                        let bat = format!("{at}.branches[{b}]");
                                        Ok(Branch {
                                            values: rationals(
                                                &br.values,
                                                &format!("{bat}.values"),
                                            )?,
                                            child: lookup(br.child, &bat)?,
                                        })
                                    })
                                    .collect::<Result<Vec<_>>>()?;
                                Ok(TreeNode::Internal {
                                    feature: *feature,
                                    branches,
                                })
                            }
                            (None, Some(leaf)) if n.branches.is_empty() => Ok(TreeNode::Leaf(
                                output_value(kind, leaf, &format!("{at}.leaf"))?,
                            )),
                            _ => Err(Error::Validation(format!(
                                "{at}: a node is either {{feature, branches}} or {{leaf}}"
                            ))),
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                let root = lookup(root, "root")?;
                Model::Tree(TreeModel::new(space, kind, built, root)?)
            }
            Payload::BoxPiecewise { cells } => {
                if kind != ValueKind::Numeric {
                    return Err(Error::Validation("box_piecewise models are numeric".into()));
                }
                let m = space.len();
                let cells = cells
                    .iter()
                    .enumerate()
                    .map(|(k, c)| {
                        let at = format!("cells[{k}]");
                        let bounds = c
                            .bounds
                            .iter()
                            .map(|[lo, hi]| {
                                Ok((
                                    lo.to_rational().map_err(|e| {
                                        Error::Validation(format!("{at}.bounds: {e}"))
                                    })?,
                                    hi.to_rational().map_err(|e| {
                                        Error::Validation(format!("{at}.bounds: {e}"))
                                    })?,
                                ))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        let intercept = match &c.intercept {
                            Some(l) => l
                                .to_rational()
                                .map_err(|e| Error::Validation(format!("{at}.intercept: {e}")))?,
                            None => Rational::from_integer(0.into()),
                        };
                        let coefficients = match &c.coefficients {
                            Some(ls) => rationals(ls, &format!("{at}.coefficients"))?,
                            None => vec![Rational::from_integer(0.into()); m],
                        };
                        Ok(Cell {
                            bounds,
                            intercept,
                            coefficients,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Model::BoxPiecewise(BoxPiecewiseModel::new(space, cells)?)
            }
        };
        Ok(LoadedModel {
            model,
            task: self.task,
            name: self.name,
        })
    }
}
