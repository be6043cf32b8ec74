//! Free graded operads on decorated trees.
//!
//! A [`FreeStage`] is `Γ(M)` for a generator Σ-module `M` concentrated in
//! arities `≥ 2`, together with the differential of each generator and, in
//! unitary stages, the restriction values `δ_i(e)`. Every operation builds a
//! [`Raw`](tree::Raw) tree whose decorations carry their position in the
//! intended tensor order, then canonicalises it; the Koszul sign of moving
//! decorations from that order into preorder is computed in exactly one
//! place ([`tree::Raw::finish`]).
//!
//! Sign conventions:
//! - `a ∘_i b` carries the tensor order `a ⊗ b`;
//! - `∂` at the `p`-th vertex in preorder carries `(-1)^{|g_0| + … + |g_{p-1}|}`;
//! - substituting a tree for a vertex inserts its decorations as one block at
//!   the vertex's position.

pub mod complex;
mod extension;
pub mod json;
pub mod tree;

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactla::{unit_vector, Scalar};
use crate::perm::Perm;
use crate::symmod::SigmaModule;

pub use complex::ArityComplex;
pub use extension::AttachedGenerators;
pub use json::TreeSpec;
use tree::Raw;
pub use tree::{GenId, Tree, TreeVector};

/// One generator of a stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub label: String,
    pub arity: usize,
    pub degree: i32,
    /// Index inside its `(arity, degree)` block of the generator module.
    pub position: usize,
    pub differential: TreeVector,
    /// `δ_1(e), …, δ_n(e)`; empty in non-unitary stages.
    pub restrictions: Vec<TreeVector>,
}

#[derive(Debug)]
struct ArityModule {
    module: SigmaModule,
    ids: BTreeMap<i32, Vec<GenId>>,
}

type ActionCache = Mutex<HashMap<(GenId, Perm), Arc<Vec<(GenId, Scalar)>>>>;

/// A free graded operad `Γ(M)` with its differential, and optionally its Λ-structure.
#[derive(Clone)]
pub struct FreeStage {
    unitary: bool,
    gens: Vec<Arc<Generator>>,
    by_label: HashMap<String, GenId>,
    modules: BTreeMap<usize, Arc<ArityModule>>,
    cache: Arc<ActionCache>,
}

impl std::fmt::Debug for FreeStage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FreeStage")
            .field("unitary", &self.unitary)
            .field("generators", &self.gens.iter().map(|g| g.label.as_str()).collect::<Vec<_>>())
            .finish()
    }
}

impl FreeStage {
    /// `Γ(0)`: only the identity (and the point, if unitary).
    pub fn trivial(unitary: bool) -> Self {
        FreeStage {
            unitary,
            gens: Vec::new(),
            by_label: HashMap::new(),
            modules: BTreeMap::new(),
            cache: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn generators(&self) -> impl Iterator<Item = (GenId, &Generator)> {
        self.gens.iter().enumerate().map(|(i, g)| (GenId(i as u32), g.as_ref()))
    }

    pub fn generator(&self, id: GenId) -> &Generator {
        &self.gens[id.0 as usize]
    }

    pub fn id_of(&self, label: &str) -> Option<GenId> {
        self.by_label.get(label).copied()
    }

    pub fn label(&self, id: GenId) -> &str {
        &self.generator(id).label
    }

    pub fn degree(&self, id: GenId) -> i32 {
        self.generator(id).degree
    }

    pub fn generator_arities(&self) -> impl Iterator<Item = usize> + '_ {
        self.modules.keys().copied()
    }

    pub fn max_generator_arity(&self) -> usize {
        self.modules.keys().next_back().copied().unwrap_or(0)
    }

    pub fn module(&self, arity: usize) -> Option<&SigmaModule> {
        self.modules.get(&arity).map(|m| &m.module)
    }

    /// Generator ids of one arity, ascending degree then position.
    pub fn ids_of_arity(&self, arity: usize) -> Vec<GenId> {
        self.modules.get(&arity).map_or_else(Vec::new, |m| m.ids.values().flatten().copied().collect())
    }

    pub fn ids_of(&self, arity: usize, degree: i32) -> &[GenId] {
        self.modules.get(&arity).and_then(|m| m.ids.get(&degree)).map_or(&[], |v| v.as_slice())
    }

    pub fn tree_degree(&self, t: &Tree) -> i32 {
        t.decorations().iter().map(|g| self.degree(*g)).sum()
    }

    /// The corolla `e(1, …, k)`.
    pub fn corolla(&self, id: GenId) -> TreeVector {
        let g = self.generator(id);
        let t = Tree::Node(id, (1..=g.arity as u32).map(Tree::Leaf).collect());
        self.vector_of(t, Scalar::one())
    }

    pub fn vector_of(&self, t: Tree, c: Scalar) -> TreeVector {
        let mut v = TreeVector::zero(t.arity(), self.tree_degree(&t));
        v.add_term(t, c);
        v
    }

    /// `σ·g` for a generator, as a combination of generators of the same arity and degree.
    pub fn act_generator(&self, id: GenId, sigma: &Perm) -> Arc<Vec<(GenId, Scalar)>> {
        if sigma.is_identity() {
            return Arc::new(vec![(id, Scalar::one())]);
        }
        let key = (id, sigma.clone());
        if let Some(hit) = self.cache.lock().expect("action cache poisoned").get(&key) {
            return hit.clone();
        }
        let g = self.generator(id);
        let m = &self.modules[&g.arity];
        let dim = m.module.basis.dim(g.degree);
        let v = m
            .module
            .act_permutation(sigma, &unit_vector(dim, g.position), g.degree)
            .expect("generator module is well formed");
        let ids = &m.ids[&g.degree];
        let out: Vec<(GenId, Scalar)> =
            v.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (ids[i], c)).collect();
        let out = Arc::new(out);
        self.cache.lock().expect("action cache poisoned").insert(key, out.clone());
        out
    }

    /// Sorts children by minimal leaf everywhere, acting on decorations.
    fn canon(&self, raw: Raw) -> Vec<(Scalar, Raw)> {
        match raw {
            Raw::Point | Raw::Leaf(_) => vec![(Scalar::one(), raw)],
            Raw::Node { g, rank, children } => {
                let alts: Vec<Vec<(Scalar, Raw)>> = children.into_iter().map(|c| self.canon(c)).collect();
                if alts.iter().any(Vec::is_empty) {
                    return Vec::new();
                }
                let mins: Vec<u32> = alts.iter().map(|a| a[0].1.min_leaf()).collect();
                let mut order: Vec<usize> = (0..alts.len()).collect();
                order.sort_by_key(|&j| mins[j]);
                let tau = Perm::from_images(order.clone()).expect("sorting yields a permutation");
                let decorations = self.act_generator(g, &tau.inverse());
                let mut alts: Vec<Option<Vec<(Scalar, Raw)>>> = alts.into_iter().map(Some).collect();
                let mut partial: Vec<(Scalar, Vec<Raw>)> = vec![(Scalar::one(), Vec::new())];
                for &j in &order {
                    let choices = alts[j].take().expect("each child used once");
                    let mut next = Vec::with_capacity(partial.len() * choices.len());
                    for (c, prefix) in &partial {
                        for (d, r) in &choices {
                            let mut p = prefix.clone();
                            p.push(r.clone());
                            next.push((c * d, p));
                        }
                    }
                    partial = next;
                }
                let mut out = Vec::new();
                for (g2, a) in decorations.iter() {
                    for (c, ch) in &partial {
                        out.push((a * c, Raw::Node { g: *g2, rank, children: ch.clone() }));
                    }
                }
                out
            }
        }
    }

    /// Canonicalises a ranked raw tree into `out`, scaled by `coef`.
    fn push_raw(&self, out: &mut TreeVector, raw: Raw, coef: &Scalar) {
        for (c, r) in self.canon(raw) {
            let (t, negative) = r.finish(&|g| self.degree(g));
            let c = if negative { -(c * coef) } else { c * coef };
            out.add_term(t, c);
        }
    }

    /// Canonical form of an arbitrary tree given by labels, with its sign.
    pub fn canonicalize(&self, spec: &TreeSpec) -> Result<TreeVector> {
        let (raw, arity) = self.raw_from_spec(spec)?;
        let mut leaves = Vec::new();
        spec.leaves(&mut leaves);
        leaves.sort_unstable();
        if leaves.iter().enumerate().any(|(i, &l)| l != i as u32 + 1) {
            return Err(Error::MalformedTree(format!("leaf labels {leaves:?} are not 1..{arity}")));
        }
        let degree = spec.decoration_labels().iter().map(|l| self.degree(self.by_label[*l])).sum();
        let mut out = TreeVector::zero(arity, degree);
        self.push_raw(&mut out, raw, &Scalar::one());
        Ok(out)
    }

    fn raw_from_spec(&self, spec: &TreeSpec) -> Result<(Raw, usize)> {
        let mut counter = 0u32;
        fn rec(stage: &FreeStage, s: &TreeSpec, counter: &mut u32, root: bool) -> Result<(Raw, usize)> {
            match s {
                TreeSpec::Point if root => Ok((Raw::Point, 0)),
                TreeSpec::Point => Err(Error::MalformedTree("the point cannot appear inside a tree".into())),
                TreeSpec::Leaf(l) => Ok((Raw::Leaf(*l), 1)),
                TreeSpec::Node { g, children } => {
                    let id = stage.id_of(g).ok_or_else(|| Error::UnknownGenerator(g.clone()))?;
                    let gen = stage.generator(id);
                    if gen.arity != children.len() {
                        return Err(Error::MalformedTree(format!(
                            "generator `{g}` has arity {} but {} children",
                            gen.arity,
                            children.len()
                        )));
                    }
                    let rank = (0, *counter);
                    *counter += 1;
                    let mut raws = Vec::new();
                    let mut arity = 0;
                    for c in children {
                        let (r, a) = rec(stage, c, counter, false)?;
                        raws.push(r);
                        arity += a;
                    }
                    Ok((Raw::Node { g: id, rank, children: raws }, arity))
                }
            }
        }
        if let TreeSpec::Point = spec {
            if !self.unitary {
                return Err(Error::NotUnitary("the point exists only in unitary stages".into()));
            }
        }
        rec(self, spec, &mut counter, true)
    }

    /// `a ∘_i b` with `i` 1-based.
    pub fn partial_compose(&self, a: &TreeVector, i: usize, b: &TreeVector) -> Result<TreeVector> {
        let m = a.arity();
        if i == 0 || i > m {
            return Err(Error::Dimension(format!("slot {i} out of range for arity {m}")));
        }
        if b.arity() == 0 {
            let c = b.coefficient(&Tree::Point);
            return Ok(self.restriction(i, a)?.scaled(&c));
        }
        let n = b.arity() as u32;
        let i = i as u32;
        let mut out = TreeVector::zero(m + b.arity() - 1, a.degree() + b.degree());
        for (tb, cb) in b.terms() {
            let rb = Raw::from_tree(tb, 1).map_leaves(&|l| l + i - 1);
            for (ta, ca) in a.terms() {
                let ra = Raw::from_tree(ta, 0);
                let raw = graft(ra, i, &rb, n);
                self.push_raw(&mut out, raw, &(ca * cb));
            }
        }
        Ok(out)
    }

    /// Relabels leaves by `σ` (leaf `l` becomes `σ(l)`) and canonicalises.
    pub fn act(&self, sigma: &Perm, v: &TreeVector) -> Result<TreeVector> {
        if sigma.len() != v.arity() {
            return Err(Error::Dimension(format!("permutation of {} acting in arity {}", sigma.len(), v.arity())));
        }
        let mut out = TreeVector::zero(v.arity(), v.degree());
        for (t, c) in v.terms() {
            let raw = Raw::from_tree(t, 0).map_leaves(&|l| sigma.apply(l as usize - 1) as u32 + 1);
            self.push_raw(&mut out, raw, c);
        }
        Ok(out)
    }

    /// The derivation `∂` extending the generator differentials.
    pub fn differential(&self, v: &TreeVector) -> TreeVector {
        let mut out = TreeVector::zero(v.arity(), v.degree() + 1);
        for (t, c) in v.terms() {
            let decs = t.decorations();
            let mut before = 0i32;
            for (p, g) in decs.iter().enumerate() {
                let dg = &self.generator(*g).differential;
                let sign_negative = before.rem_euclid(2) == 1;
                before += self.degree(*g);
                if dg.is_zero() {
                    continue;
                }
                for (tau, ct) in dg.terms() {
                    let mut counter = 0u32;
                    let raw = rebuild(t, p as u32, &mut counter, &mut |_, children, idx| substitute(tau, idx, children));
                    let coef = if sign_negative { -(c * ct) } else { c * ct };
                    self.push_raw(&mut out, raw, &coef);
                }
            }
        }
        out
    }

    /// `δ_i(v) = v ∘_i 1`, with `i` 1-based.
    pub fn restriction(&self, i: usize, v: &TreeVector) -> Result<TreeVector> {
        if !self.unitary {
            return Err(Error::NotUnitary("restriction operations need a unitary stage".into()));
        }
        let n = v.arity();
        if i == 0 || i > n {
            return Err(Error::Dimension(format!("restriction slot {i} out of range for arity {n}")));
        }
        let mut out = TreeVector::zero(n - 1, v.degree());
        let leaf = i as u32;
        for (t, c) in v.terms() {
            match t {
                Tree::Leaf(_) => out.add_term(Tree::Point, c.clone()),
                Tree::Point => unreachable!("arity 0 has no slots"),
                Tree::Node(..) => {
                    let (vertex, slot) = parent_of_leaf(t, leaf).expect("every leaf of a node tree has a parent");
                    let g = t.decorations()[vertex as usize];
                    let values = &self.generator(g).restrictions;
                    let value = values.get(slot).ok_or_else(|| {
                        Error::Internal(format!("generator `{}` has no restriction for slot {}", self.label(g), slot + 1))
                    })?;
                    for (tau, ct) in value.terms() {
                        let mut counter = 0u32;
                        let raw = rebuild(t, vertex, &mut counter, &mut |_, mut children, idx| {
                            children.remove(slot);
                            substitute(tau, idx, children)
                        });
                        let raw = raw.map_leaves(&|l| if l > leaf { l - 1 } else { l });
                        self.push_raw(&mut out, raw, &(c * ct));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Canonical basis trees of one arity, grouped by degree.
    pub fn basis(&self, arity: usize) -> BTreeMap<i32, Vec<Tree>> {
        let mut memo: HashMap<usize, Vec<Tree>> = HashMap::new();
        let trees = self.trees_on(arity, &mut memo);
        let mut out: BTreeMap<i32, Vec<Tree>> = BTreeMap::new();
        for t in trees {
            out.entry(self.tree_degree(&t)).or_default().push(t);
        }
        for v in out.values_mut() {
            v.sort();
        }
        out
    }

    fn trees_on(&self, m: usize, memo: &mut HashMap<usize, Vec<Tree>>) -> Vec<Tree> {
        if let Some(v) = memo.get(&m) {
            return v.clone();
        }
        let out = match m {
            0 if self.unitary => vec![Tree::Point],
            0 => Vec::new(),
            1 => vec![Tree::Leaf(1)],
            _ => {
                let mut out = Vec::new();
                for (&k, module) in self.modules.range(2..=m) {
                    let ids: Vec<GenId> = module.ids.values().flatten().copied().collect();
                    for blocks in set_partitions(m, k) {
                        let sub: Vec<Vec<Tree>> = blocks
                            .iter()
                            .map(|b| {
                                let shapes = self.trees_on(b.len(), memo);
                                shapes.iter().map(|t| t.map_leaves(&|l| b[l as usize - 1] as u32 + 1)).collect()
                            })
                            .collect();
                        for combo in cartesian(&sub) {
                            for &g in &ids {
                                out.push(Tree::Node(g, combo.clone()));
                            }
                        }
                    }
                }
                out
            }
        };
        memo.insert(m, out.clone());
        out
    }
}

/// Replaces leaf `i` of `a` by `b` (whose leaves are already shifted), shifting the later leaves of `a`.
fn graft(a: Raw, i: u32, b: &Raw, n: u32) -> Raw {
    match a {
        Raw::Leaf(l) if l == i => b.clone(),
        Raw::Leaf(l) if l > i => Raw::Leaf(l + n - 1),
        Raw::Leaf(l) => Raw::Leaf(l),
        Raw::Point => Raw::Point,
        Raw::Node { g, rank, children } => {
            Raw::Node { g, rank, children: children.into_iter().map(|c| graft(c, i, b, n)).collect() }
        }
    }
}

/// Rebuilds `t` with preorder ranks `(index, 0)`, handing the vertex with
/// preorder index `target` to `f` together with its already-built children.
fn rebuild(t: &Tree, target: u32, counter: &mut u32, f: &mut dyn FnMut(GenId, Vec<Raw>, u32) -> Raw) -> Raw {
    match t {
        Tree::Point => Raw::Point,
        Tree::Leaf(l) => Raw::Leaf(*l),
        Tree::Node(g, ch) => {
            let idx = *counter;
            *counter += 1;
            let children: Vec<Raw> = ch.iter().map(|c| rebuild(c, target, counter, f)).collect();
            if idx == target {
                f(*g, children, idx)
            } else {
                Raw::Node { g: *g, rank: (idx, 0), children }
            }
        }
    }
}

/// Plugs `children` into the leaves of `tau`; the decorations of `tau` are ranked as a block at `idx`.
fn substitute(tau: &Tree, idx: u32, children: Vec<Raw>) -> Raw {
    let mut k = 0u32;
    let shape = Raw::from_tree_with(tau, &mut |_| {
        let r = (idx, k);
        k += 1;
        r
    });
    fn plug(r: Raw, children: &[Raw]) -> Raw {
        match r {
            Raw::Leaf(l) => children[l as usize - 1].clone(),
            Raw::Point => Raw::Point,
            Raw::Node { g, rank, children: ch } => {
                Raw::Node { g, rank, children: ch.into_iter().map(|c| plug(c, children)).collect() }
            }
        }
    }
    plug(shape, &children)
}

/// Preorder index of the vertex directly above leaf `leaf`, and the slot of the leaf in it.
fn parent_of_leaf(t: &Tree, leaf: u32) -> Option<(u32, usize)> {
    fn rec(t: &Tree, leaf: u32, counter: &mut u32) -> Option<(u32, usize)> {
        let Tree::Node(_, ch) = t else { return None };
        let idx = *counter;
        *counter += 1;
        if let Some(slot) = ch.iter().position(|c| *c == Tree::Leaf(leaf)) {
            return Some((idx, slot));
        }
        ch.iter().find_map(|c| rec(c, leaf, counter))
    }
    rec(t, leaf, &mut 0)
}

/// Partitions of `0..m` into exactly `k` blocks, blocks ordered by minimum.
pub(crate) fn set_partitions(m: usize, k: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(x: usize, m: usize, k: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if x == m {
            if blocks.len() == k {
                out.push(blocks.clone());
            }
            return;
        }
        if blocks.len() + (m - x) < k {
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(x);
            rec(x + 1, m, k, blocks, out);
            blocks[b].pop();
        }
        if blocks.len() < k {
            blocks.push(vec![x]);
            rec(x + 1, m, k, blocks, out);
            blocks.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

fn cartesian(choices: &[Vec<Tree>]) -> Vec<Vec<Tree>> {
    let mut acc: Vec<Vec<Tree>> = vec![Vec::new()];
    for c in choices {
        let mut next = Vec::with_capacity(acc.len() * c.len());
        for prefix in &acc {
            for t in c {
                let mut p = prefix.clone();
                p.push(t.clone());
                next.push(p);
            }
        }
        acc = next;
    }
    acc
}

#[cfg(test)]
mod tests;
