//! Decorated trees, tree vectors, and the canonical form.
//!
//! A canonical tree has the children of every vertex ordered by the smallest
//! leaf beneath them. Its value is the composite of its decorations taken in
//! depth-first preorder, so preorder is the order in which Koszul signs are
//! counted.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::exactla::Scalar;

/// Index of a generator inside a stage. Stable under extension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenId(pub u32);

/// A canonical decorated tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tree {
    /// The arity-zero unit.
    Point,
    /// A leaf, labelled `1..=n`. A bare `Leaf(1)` is the identity.
    Leaf(u32),
    Node(GenId, Vec<Tree>),
}

impl Tree {
    pub fn identity() -> Tree {
        Tree::Leaf(1)
    }

    pub fn arity(&self) -> usize {
        match self {
            Tree::Point => 0,
            Tree::Leaf(_) => 1,
            Tree::Node(_, ch) => ch.iter().map(Tree::arity).sum(),
        }
    }

    pub fn min_leaf(&self) -> u32 {
        match self {
            Tree::Point => u32::MAX,
            Tree::Leaf(l) => *l,
            Tree::Node(_, ch) => ch.iter().map(Tree::min_leaf).min().unwrap_or(u32::MAX),
        }
    }

    /// Decorations in preorder.
    pub fn decorations(&self) -> Vec<GenId> {
        let mut out = Vec::new();
        self.collect_decorations(&mut out);
        out
    }

    fn collect_decorations(&self, out: &mut Vec<GenId>) {
        if let Tree::Node(g, ch) = self {
            out.push(*g);
            for c in ch {
                c.collect_decorations(out);
            }
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            Tree::Node(_, ch) => 1 + ch.iter().map(Tree::vertex_count).sum::<usize>(),
            _ => 0,
        }
    }

    /// Leaf labels in planar order.
    pub fn leaves(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<u32>) {
        match self {
            Tree::Leaf(l) => out.push(*l),
            Tree::Node(_, ch) => ch.iter().for_each(|c| c.collect_leaves(out)),
            Tree::Point => {}
        }
    }

    pub fn map_leaves(&self, f: &impl Fn(u32) -> u32) -> Tree {
        match self {
            Tree::Point => Tree::Point,
            Tree::Leaf(l) => Tree::Leaf(f(*l)),
            Tree::Node(g, ch) => Tree::Node(*g, ch.iter().map(|c| c.map_leaves(f)).collect()),
        }
    }

    /// True when the children of every vertex are sorted by minimal leaf.
    pub fn is_canonical(&self) -> bool {
        match self {
            Tree::Point | Tree::Leaf(_) => true,
            Tree::Node(_, ch) => {
                ch.windows(2).all(|w| w[0].min_leaf() < w[1].min_leaf()) && ch.iter().all(Tree::is_canonical)
            }
        }
    }
}

/// Rank in the natural tensor order of the decorations of a pending result.
pub(crate) type Rank = (u32, u32);

/// A tree whose vertices remember where their decoration sits in the
/// intended tensor order, before canonicalisation.
#[derive(Clone, Debug)]
pub(crate) enum Raw {
    Point,
    Leaf(u32),
    Node { g: GenId, rank: Rank, children: Vec<Raw> },
}

impl Raw {
    /// Converts a canonical tree, tagging its decorations `(major, preorder index)`.
    pub(crate) fn from_tree(t: &Tree, major: u32) -> Raw {
        let mut counter = 0;
        Self::from_tree_with(t, &mut |_| (major, post_inc(&mut counter)))
    }

    pub(crate) fn from_tree_with(t: &Tree, rank: &mut impl FnMut(GenId) -> Rank) -> Raw {
        match t {
            Tree::Point => Raw::Point,
            Tree::Leaf(l) => Raw::Leaf(*l),
            Tree::Node(g, ch) => {
                let r = rank(*g);
                let children = ch.iter().map(|c| Self::from_tree_with(c, rank)).collect();
                Raw::Node { g: *g, rank: r, children }
            }
        }
    }

    pub(crate) fn min_leaf(&self) -> u32 {
        match self {
            Raw::Point => u32::MAX,
            Raw::Leaf(l) => *l,
            Raw::Node { children, .. } => children.iter().map(Raw::min_leaf).min().unwrap_or(u32::MAX),
        }
    }

    pub(crate) fn map_leaves(self, f: &impl Fn(u32) -> u32) -> Raw {
        match self {
            Raw::Point => Raw::Point,
            Raw::Leaf(l) => Raw::Leaf(f(l)),
            Raw::Node { g, rank, children } => {
                Raw::Node { g, rank, children: children.into_iter().map(|c| c.map_leaves(f)).collect() }
            }
        }
    }

    fn preorder(&self, out: &mut Vec<(GenId, Rank)>) {
        if let Raw::Node { g, rank, children } = self {
            out.push((*g, *rank));
            for c in children {
                c.preorder(out);
            }
        }
    }

    /// Drops ranks, returning the Koszul sign of moving the decorations from
    /// rank order into preorder.
    pub(crate) fn finish(&self, degree_of: &impl Fn(GenId) -> i32) -> (Tree, bool) {
        let mut seq = Vec::new();
        self.preorder(&mut seq);
        let odd: Vec<(Rank, bool)> = seq.iter().map(|(g, r)| (*r, degree_of(*g).rem_euclid(2) == 1)).collect();
        let mut negative = false;
        for a in 0..odd.len() {
            if !odd[a].1 {
                continue;
            }
            for b in a + 1..odd.len() {
                if odd[b].1 && odd[a].0 > odd[b].0 {
                    negative = !negative;
                }
            }
        }
        (self.strip(), negative)
    }

    fn strip(&self) -> Tree {
        match self {
            Raw::Point => Tree::Point,
            Raw::Leaf(l) => Tree::Leaf(*l),
            Raw::Node { g, children, .. } => Tree::Node(*g, children.iter().map(Raw::strip).collect()),
        }
    }
}

fn post_inc(c: &mut u32) -> u32 {
    let v = *c;
    *c += 1;
    v
}

/// Formal linear combination of canonical trees of one arity and degree.
#[derive(Clone, PartialEq, Eq)]
pub struct TreeVector {
    arity: usize,
    degree: i32,
    terms: BTreeMap<Tree, Scalar>,
}

impl fmt::Debug for TreeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TreeVector(arity {}, degree {}) {{", self.arity, self.degree)?;
        for (t, c) in &self.terms {
            write!(f, " {c}·{t:?}")?;
        }
        write!(f, " }}")
    }
}

impl TreeVector {
    pub fn zero(arity: usize, degree: i32) -> Self {
        TreeVector { arity, degree, terms: BTreeMap::new() }
    }

    /// `1·id` in arity one.
    pub fn identity() -> Self {
        let mut v = Self::zero(1, 0);
        v.add_term(Tree::identity(), Scalar::one());
        v
    }

    /// `1·pt` in arity zero.
    pub fn point() -> Self {
        let mut v = Self::zero(0, 0);
        v.add_term(Tree::Point, Scalar::one());
        v
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Tree, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, t: &Tree) -> Scalar {
        self.terms.get(t).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, t: Tree, c: Scalar) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(t.arity(), self.arity, "tree arity differs from vector arity");
        match self.terms.entry(t) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += c · other`
    pub fn add_scaled(&mut self, c: &Scalar, other: &TreeVector) {
        assert_eq!(self.arity, other.arity, "adding tree vectors of different arity");
        if other.is_zero() || c.is_zero() {
            return;
        }
        if self.is_zero() {
            self.degree = other.degree;
        }
        assert_eq!(self.degree, other.degree, "adding tree vectors of different degree");
        for (t, x) in &other.terms {
            self.add_term(t.clone(), c * x);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> TreeVector {
        let mut out = TreeVector::zero(self.arity, self.degree);
        out.add_scaled(c, self);
        out
    }

    pub fn sub(&self, other: &TreeVector) -> TreeVector {
        let mut out = self.clone();
        out.add_scaled(&-Scalar::one(), other);
        out
    }

    pub fn add(&self, other: &TreeVector) -> TreeVector {
        let mut out = self.clone();
        out.add_scaled(&Scalar::one(), other);
        out
    }

    pub(crate) fn with_degree(mut self, degree: i32) -> TreeVector {
        self.degree = degree;
        self
    }
}
