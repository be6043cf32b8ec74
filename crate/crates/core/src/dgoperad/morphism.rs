use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactla::{CohomologyPresentation, Matrix, Scalar, Vector};
use crate::freeop::{ArityComplex, FreeStage, GenId, Tree, TreeVector};
use crate::perm::Perm;
use crate::report::Report;

use super::FiniteDgOperad;

/// An operad map `Γ(M) → P`, given by the value of each generator.
#[derive(Clone, Debug)]
pub struct StageMorphism {
    source: FreeStage,
    target: Arc<FiniteDgOperad>,
    values: Vec<Vector>,
}

/// `H(ρ)` in one arity and degree.
#[derive(Clone, Debug)]
pub struct InducedMap {
    pub source: CohomologyPresentation,
    pub target: CohomologyPresentation,
    /// `dim H(target) × dim H(source)`, in class coordinates.
    pub matrix: Matrix,
    pub rank: usize,
}

impl InducedMap {
    pub fn is_iso(&self) -> bool {
        self.source.dim() == self.target.dim() && self.rank == self.source.dim()
    }
}

impl StageMorphism {
    /// `values[g]` is the image of generator `g`, in the flattened basis of its arity.
    pub fn new(source: FreeStage, target: Arc<FiniteDgOperad>, values: Vec<Vector>) -> Result<Self> {
        if values.len() != source.generators().count() {
            return Err(Error::Dimension(format!(
                "{} values for {} generators",
                values.len(),
                source.generators().count()
            )));
        }
        if source.is_unitary() && !target.has_unit_point() {
            return Err(Error::NotUnitary("unitary stage mapped into a target without unit point".into()));
        }
        for (id, g) in source.generators() {
            let v = &values[id.0 as usize];
            if g.arity > target.max_arity() || v.len() != target.dim(g.arity) {
                return Err(Error::Dimension(format!("value of `{}` has the wrong length", g.label)));
            }
            if let Some(d) = target.degree_of(g.arity, v)? {
                if d != g.degree {
                    return Err(Error::Dimension(format!("value of `{}` has degree {d}, expected {}", g.label, g.degree)));
                }
            }
        }
        Ok(StageMorphism { source, target, values })
    }

    pub fn source(&self) -> &FreeStage {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteDgOperad> {
        &self.target
    }

    pub fn value(&self, id: GenId) -> &Vector {
        &self.values[id.0 as usize]
    }

    pub fn values(&self) -> &[Vector] {
        &self.values
    }

    /// The same map on the planar tree, before relabelling its leaves.
    fn planar_value(&self, t: &Tree) -> Result<(Vector, usize)> {
        match t {
            Tree::Point => Ok((self.target.point()?, 0)),
            Tree::Leaf(_) => Ok((self.target.identity(), 1)),
            Tree::Node(g, children) => {
                let mut acc = self.value(*g).clone();
                let mut arity = children.len();
                let mut offset = 0;
                for c in children {
                    if let Tree::Leaf(_) = c {
                        offset += 1;
                        continue;
                    }
                    let (cv, ca) = self.planar_value(c)?;
                    acc = self.target.partial_compose(&acc, arity, offset + 1, &cv, ca)?;
                    arity += ca - 1;
                    offset += ca;
                }
                Ok((acc, arity))
            }
        }
    }

    pub fn evaluate_tree(&self, t: &Tree) -> Result<Vector> {
        let (v, n) = self.planar_value(t)?;
        let leaves = t.leaves();
        if leaves.iter().enumerate().all(|(p, &l)| l as usize == p + 1) {
            return Ok(v);
        }
        let sigma = Perm::from_images(leaves.iter().map(|&l| l as usize - 1).collect())?;
        self.target.act(&sigma, n, &v)
    }

    pub fn evaluate(&self, v: &TreeVector) -> Result<Vector> {
        let n = v.arity();
        if n > self.target.max_arity() {
            return Err(Error::Dimension(format!("arity {n} beyond the target truncation")));
        }
        let mut out = vec![Scalar::zero(); self.target.dim(n)];
        for (t, c) in v.terms() {
            for (o, x) in out.iter_mut().zip(self.evaluate_tree(t)?) {
                *o += c * x;
            }
        }
        Ok(out)
    }

    /// `ρ` restricted to degree `k` of `complex`, as a matrix into the degree-`k` block of the target.
    pub fn matrix(&self, complex: &ArityComplex, k: i32) -> Result<Matrix> {
        let n = complex.arity;
        let cols = complex
            .basis
            .get(&k)
            .map_or(&[][..], |v| v.as_slice())
            .iter()
            .map(|t| Ok(self.target.block(n, k, &self.evaluate_tree(t)?)))
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_columns(&cols, self.target.basis(n).dim(k))
    }

    /// `H(ρ)(n)` in every degree where either side is nonzero.
    pub fn induced_maps(&self, complex: &ArityComplex) -> Result<BTreeMap<i32, InducedMap>> {
        let n = complex.arity;
        let mut degrees: Vec<i32> = complex.degrees().chain(self.target.degrees(n)).collect();
        degrees.sort_unstable();
        degrees.dedup();
        let mut out = BTreeMap::new();
        for k in degrees {
            let source = complex.cohomology(k)?;
            let target = crate::exactla::cohomology_at_degree(
                &self.target.differential_block(n, k - 1),
                &self.target.differential_block(n, k),
            )?;
            let m = self.matrix(complex, k)?;
            let matrix = target.projection.mul(&m)?.mul(&source.section)?;
            let rank = matrix.rank();
            out.insert(k, InducedMap { source, target, matrix, rank });
        }
        Ok(out)
    }

    /// Checks that `H(ρ)(k)` is invertible in every degree for the arities
    /// the stage models: `1..=n`, and `0` too for unitary stages.
    pub fn is_quasi_iso_upto(&self, n: usize) -> Report {
        let mut r = Report::new();
        r.pass("quasi_iso");
        let start = if self.source.is_unitary() { 0 } else { 1 };
        for k in start..=n.min(self.target.max_arity()) {
            let complex = ArityComplex::new(&self.source, k);
            match self.induced_maps(&complex) {
                Ok(maps) => {
                    for (deg, h) in maps {
                        r.check("quasi_iso", h.is_iso(), || {
                            format!(
                                "arity {k}, degree {deg}: H(source) = {}, H(target) = {}, rank {}",
                                h.source.dim(),
                                h.target.dim(),
                                h.rank
                            )
                        });
                    }
                }
                Err(e) => r.fail("quasi_iso", format!("arity {k}: {e}")),
            }
        }
        r
    }

    /// `ρ(∂e) = d ρ(e)` on every generator.
    pub fn check_chain_map(&self) -> Report {
        let mut r = Report::new();
        r.pass("chain_map");
        for (id, g) in self.source.generators() {
            let lhs = self.evaluate(&g.differential);
            let rhs = self.target.differential(g.arity, self.value(id));
            match (lhs, rhs) {
                (Ok(l), Ok(rv)) => r.check("chain_map", l == rv, || format!("ρ(∂{0}) ≠ dρ({0})", g.label)),
                (Err(e), _) | (_, Err(e)) => r.fail("chain_map", format!("{}: {e}", g.label)),
            }
        }
        r
    }

    /// `ρ(δ_i e) = δ_i ρ(e)` on every generator of a unitary stage.
    pub fn check_restrictions(&self) -> Report {
        let mut r = Report::new();
        r.pass("restriction_compat");
        if !self.source.is_unitary() {
            return r;
        }
        for (id, g) in self.source.generators() {
            for (i, x) in g.restrictions.iter().enumerate() {
                let lhs = self.evaluate(x);
                let rhs = self.target.restriction(i + 1, g.arity, self.value(id));
                match (lhs, rhs) {
                    (Ok(l), Ok(rv)) => {
                        r.check("restriction_compat", l == rv, || format!("ρ(δ_{0}{1}) ≠ δ_{0}ρ({1})", i + 1, g.label))
                    }
                    (Err(e), _) | (_, Err(e)) => r.fail("restriction_compat", format!("{}: {e}", g.label)),
                }
            }
        }
        r
    }

    /// `ρ(s·e) = s·ρ(e)` for adjacent transpositions on every generator.
    pub fn check_equivariance(&self) -> Report {
        let mut r = Report::new();
        r.pass("equivariance");
        for (id, g) in self.source.generators() {
            for p in 0..g.arity - 1 {
                let s = Perm::adjacent(g.arity, p);
                let mut lhs = vec![Scalar::zero(); self.target.dim(g.arity)];
                for (h, c) in self.source.act_generator(id, &s).iter() {
                    for (o, x) in lhs.iter_mut().zip(self.value(*h)) {
                        *o += c * x;
                    }
                }
                match self.target.act(&s, g.arity, self.value(id)) {
                    Ok(rhs) => r.check("equivariance", lhs == rhs, || format!("ρ(s_{}·{}) ≠ s_{0}·ρ({1})", p + 1, g.label)),
                    Err(e) => r.fail("equivariance", format!("{}: {e}", g.label)),
                }
            }
        }
        r
    }
}
