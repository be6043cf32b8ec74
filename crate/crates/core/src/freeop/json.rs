//! Tree serialization: `{"g": label, "children": [...]}`, leaves are integers,
//! the arity-zero point is `null`. A tree vector is a list of
//! `{"coef": "p/q", "tree": ...}` in canonical tree order.

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::{FreeStage, Tree, TreeVector};
use crate::error::{Error, Result};
use crate::exactla::{format_scalar, parse_scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeSpec {
    Point,
    Leaf(u32),
    Node { g: String, children: Vec<TreeSpec> },
}

impl TreeSpec {
    pub(crate) fn leaves(&self, out: &mut Vec<u32>) {
        match self {
            TreeSpec::Point => {}
            TreeSpec::Leaf(l) => out.push(*l),
            TreeSpec::Node { children, .. } => children.iter().for_each(|c| c.leaves(out)),
        }
    }

    pub(crate) fn decoration_labels(&self) -> Vec<&str> {
        let mut out = Vec::new();
        fn rec<'a>(s: &'a TreeSpec, out: &mut Vec<&'a str>) {
            if let TreeSpec::Node { g, children } = s {
                out.push(g);
                children.iter().for_each(|c| rec(c, out));
            }
        }
        rec(self, &mut out);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coef: String,
    pub tree: TreeSpec,
}

impl FreeStage {
    pub fn tree_to_spec(&self, t: &Tree) -> TreeSpec {
        match t {
            Tree::Point => TreeSpec::Point,
            Tree::Leaf(l) => TreeSpec::Leaf(*l),
            Tree::Node(g, ch) => TreeSpec::Node {
                g: self.label(*g).to_string(),
                children: ch.iter().map(|c| self.tree_to_spec(c)).collect(),
            },
        }
    }

    pub fn vector_to_json(&self, v: &TreeVector) -> Vec<TermJson> {
        v.terms().map(|(t, c)| TermJson { coef: format_scalar(c), tree: self.tree_to_spec(t) }).collect()
    }

    /// Reads a tree vector of known arity and degree; trees are canonicalised.
    pub fn vector_from_json(&self, terms: &[TermJson], arity: usize, degree: i32) -> Result<TreeVector> {
        let mut out = TreeVector::zero(arity, degree);
        for term in terms {
            let c = parse_scalar(&term.coef)?;
            let t = self.canonicalize(&term.tree)?;
            if t.arity() != arity {
                return Err(Error::MalformedTree(format!("tree of arity {} where arity {arity} was expected", t.arity())));
            }
            if !t.is_zero() && t.degree() != degree {
                return Err(Error::MalformedTree(format!(
                    "tree of degree {} where degree {degree} was expected",
                    t.degree()
                )));
            }
            out.add_scaled(&c, &t);
        }
        Ok(out.with_degree(degree))
    }

    /// Compact prefix notation, e.g. `e2.0(1,e2.0(2,3))`.
    pub fn format_tree(&self, t: &Tree) -> String {
        match t {
            Tree::Point => "pt".to_string(),
            Tree::Leaf(l) => l.to_string(),
            Tree::Node(g, ch) => {
                let inner: Vec<String> = ch.iter().map(|c| self.format_tree(c)).collect();
                format!("{}({})", self.label(*g), inner.join(","))
            }
        }
    }

    pub fn format_vector(&self, v: &TreeVector) -> String {
        if v.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (t, c)) in v.terms().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            let sep = match (k, neg) {
                (0, false) => "",
                (0, true) => "-",
                (_, false) => " + ",
                (_, true) => " - ",
            };
            out.push_str(sep);
            if !abs.is_one() {
                out.push_str(&format_scalar(&abs));
                out.push(' ');
            }
            out.push_str(&self.format_tree(t));
        }
        out
    }
}
