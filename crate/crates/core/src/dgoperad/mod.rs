//! Finite-dimensional dg operads given by structure constants.
//!
//! Vectors of arity `n` are stored in the flattened basis of `P(n)`
//! (ascending degree, then position). The structure constant of
//! `e_x ∘_i e_y` already contains whatever Koszul sign the operad carries.

mod builtin;
pub mod json;
mod morphism;
mod validate;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactla::{unit_vector, zero_vector, CohomologyPresentation, Matrix, Scalar, Vector};
use crate::freeop::{FreeStage, Tree, TreeVector};
use crate::perm::Perm;
use crate::symmod::{GradedBasis, SigmaAction, SigmaModule};

pub use builtin::Builtin;
pub use morphism::{InducedMap, StageMorphism};

/// One arity of a target operad.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArityComponent {
    pub module: SigmaModule,
    /// `d` from each degree `k` to `k + 1`, shaped `dim(k+1) × dim(k)`; missing blocks are zero.
    pub differential: BTreeMap<i32, Matrix>,
}

impl ArityComponent {
    pub fn empty(arity: usize) -> Self {
        ArityComponent { module: SigmaModule::empty(arity), differential: BTreeMap::new() }
    }
}

/// Sparse table of `∘_i : P(m) ⊗ P(n) → P(m+n-1)`; column `x·dim P(n) + y` lists the
/// nonzero coordinates of `e_x ∘_i e_y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionTable {
    rows: usize,
    right_dim: usize,
    columns: Vec<Vec<(usize, Scalar)>>,
}

impl CompositionTable {
    pub fn new(rows: usize, left_dim: usize, right_dim: usize) -> Self {
        CompositionTable { rows, right_dim, columns: vec![Vec::new(); left_dim * right_dim] }
    }

    pub fn from_dense(m: &Matrix, left_dim: usize, right_dim: usize) -> Result<Self> {
        if m.cols() != left_dim * right_dim {
            return Err(Error::Dimension(format!(
                "composition matrix has {} columns, expected {}",
                m.cols(),
                left_dim * right_dim
            )));
        }
        let mut t = CompositionTable::new(m.rows(), left_dim, right_dim);
        for c in 0..m.cols() {
            for r in 0..m.rows() {
                if !m.get(r, c).is_zero() {
                    t.columns[c].push((r, m.get(r, c).clone()));
                }
            }
        }
        Ok(t)
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.columns.len());
        for (c, col) in self.columns.iter().enumerate() {
            for (r, x) in col {
                m.set(*r, c, x.clone());
            }
        }
        m
    }

    pub fn set(&mut self, x: usize, y: usize, value: &[Scalar]) {
        self.columns[x * self.right_dim + y] =
            value.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(r, c)| (r, c.clone())).collect();
    }

    pub fn entry(&self, x: usize, y: usize) -> &[(usize, Scalar)] {
        &self.columns[x * self.right_dim + y]
    }
}

/// A dg operad truncated at `max_arity`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteDgOperad {
    max_arity: usize,
    arities: Vec<ArityComponent>,
    flat_degrees: Vec<Vec<i32>>,
    compositions: BTreeMap<(usize, usize, usize), CompositionTable>,
    unit1: String,
    unit0: Option<String>,
    m2: Option<String>,
}

impl FiniteDgOperad {
    /// Assembles an operad, checking shapes only; call
    /// [`validate_operad_axioms`](Self::validate_operad_axioms) for the axioms.
    ///
    /// `arities[n]` is arity `n`; `compositions` must contain every `(m, i, n)`
    /// with `1 ≤ i ≤ m` and `m, n, m+n-1 ≤ max_arity` whose operands are nonzero.
    pub fn new(
        arities: Vec<ArityComponent>,
        compositions: BTreeMap<(usize, usize, usize), CompositionTable>,
        unit1: String,
        unit0: Option<String>,
        m2: Option<String>,
    ) -> Result<Self> {
        if arities.len() < 3 {
            return Err(Error::Dimension("a target needs arities up to at least 2".into()));
        }
        let max_arity = arities.len() - 1;
        for (n, a) in arities.iter().enumerate() {
            if a.module.arity() != n {
                return Err(Error::Dimension(format!("component {n} has arity {}", a.module.arity())));
            }
            for (&k, d) in &a.differential {
                let (r, c) = (a.module.basis.dim(k + 1), a.module.basis.dim(k));
                if d.rows() != r || d.cols() != c {
                    return Err(Error::Dimension(format!(
                        "arity {n}: differential from degree {k} is {}x{}, expected {r}x{c}",
                        d.rows(),
                        d.cols()
                    )));
                }
            }
        }
        let flat_degrees: Vec<Vec<i32>> = arities
            .iter()
            .map(|a| a.module.basis.by_degree().iter().flat_map(|(&d, v)| std::iter::repeat_n(d, v.len())).collect())
            .collect();
        let dims: Vec<usize> = flat_degrees.iter().map(Vec::len).collect();
        for m in 1..=max_arity {
            for n in 0..=max_arity {
                if m + n - 1 > max_arity || dims[m] == 0 || dims[n] == 0 {
                    continue;
                }
                for i in 1..=m {
                    let t = compositions
                        .get(&(m, i, n))
                        .ok_or_else(|| Error::Dimension(format!("composition ({m},{i},{n}) is missing")))?;
                    if t.rows != dims[m + n - 1] || t.columns.len() != dims[m] * dims[n] || t.right_dim != dims[n] {
                        return Err(Error::Dimension(format!("composition ({m},{i},{n}) has the wrong shape")));
                    }
                }
            }
        }
        let find = |n: usize, label: &str| -> Result<()> {
            match arities[n].module.basis.position(label) {
                Some((0, _)) => Ok(()),
                Some((d, _)) => Err(Error::Dimension(format!("`{label}` sits in degree {d}, expected 0"))),
                None => Err(Error::Parse(format!("no basis element `{label}` in arity {n}"))),
            }
        };
        find(1, &unit1)?;
        if let Some(u) = &unit0 {
            find(0, u)?;
        }
        if let Some(m) = &m2 {
            find(2, m)?;
        }
        Ok(FiniteDgOperad { max_arity, arities, flat_degrees, compositions, unit1, unit0, m2 })
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    pub fn component(&self, n: usize) -> &ArityComponent {
        &self.arities[n]
    }

    pub fn basis(&self, n: usize) -> &GradedBasis {
        &self.arities[n].module.basis
    }

    pub fn module(&self, n: usize) -> &SigmaModule {
        &self.arities[n].module
    }

    pub fn dim(&self, n: usize) -> usize {
        self.flat_degrees[n].len()
    }

    pub fn degree_of_index(&self, n: usize, idx: usize) -> i32 {
        self.flat_degrees[n][idx]
    }

    pub fn compositions(&self) -> &BTreeMap<(usize, usize, usize), CompositionTable> {
        &self.compositions
    }

    pub fn unit1_label(&self) -> &str {
        &self.unit1
    }

    pub fn unit0_label(&self) -> Option<&str> {
        self.unit0.as_deref()
    }

    pub fn m2_label(&self) -> Option<&str> {
        self.m2.as_deref()
    }

    pub fn has_unit_point(&self) -> bool {
        self.unit0.is_some()
    }

    pub fn basis_vector(&self, n: usize, label: &str) -> Option<Vector> {
        self.basis(n).flat_index(label).map(|i| unit_vector(self.dim(n), i))
    }

    pub fn identity(&self) -> Vector {
        self.basis_vector(1, &self.unit1).expect("unit checked at construction")
    }

    pub fn point(&self) -> Result<Vector> {
        let u = self.unit0.as_ref().ok_or_else(|| Error::NotUnitary("target has no unit point".into()))?;
        Ok(self.basis_vector(0, u).expect("unit point checked at construction"))
    }

    pub fn m2(&self) -> Result<Vector> {
        let m = self.m2.as_ref().ok_or_else(|| Error::NotUnitary("unitary multiplication missing".into()))?;
        Ok(self.basis_vector(2, m).expect("m2 checked at construction"))
    }

    /// Degree of a homogeneous vector; `None` for zero.
    pub fn degree_of(&self, n: usize, v: &[Scalar]) -> Result<Option<i32>> {
        let mut deg = None;
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = self.flat_degrees[n][i];
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => {
                    return Err(Error::Dimension(format!("vector of arity {n} mixes degrees {e} and {d}")))
                }
                _ => {}
            }
        }
        Ok(deg)
    }

    fn check_len(&self, n: usize, v: &[Scalar]) -> Result<()> {
        if n > self.max_arity || v.len() != self.dim(n) {
            return Err(Error::Dimension(format!("vector of length {} is not in arity {n}", v.len())));
        }
        Ok(())
    }

    /// `a ∘_i b` for `a ∈ P(m)`, `b ∈ P(n)`, `i` 1-based.
    pub fn partial_compose(&self, a: &[Scalar], m: usize, i: usize, b: &[Scalar], n: usize) -> Result<Vector> {
        self.check_len(m, a)?;
        self.check_len(n, b)?;
        if i == 0 || i > m {
            return Err(Error::Dimension(format!("slot {i} out of range for arity {m}")));
        }
        if m + n - 1 > self.max_arity {
            return Err(Error::Dimension(format!("composite arity {} exceeds {}", m + n - 1, self.max_arity)));
        }
        let mut out = zero_vector(self.dim(m + n - 1));
        let Some(table) = self.compositions.get(&(m, i, n)) else {
            return Ok(out);
        };
        for (x, ax) in a.iter().enumerate() {
            if ax.is_zero() {
                continue;
            }
            for (y, by) in b.iter().enumerate() {
                if by.is_zero() {
                    continue;
                }
                let c = ax * by;
                for (r, t) in table.entry(x, y) {
                    out[*r] += &c * t;
                }
            }
        }
        Ok(out)
    }

    /// `σ·v`.
    pub fn act(&self, sigma: &Perm, n: usize, v: &[Scalar]) -> Result<Vector> {
        self.check_len(n, v)?;
        if sigma.len() != n {
            return Err(Error::Dimension(format!("permutation of {} letters acting in arity {n}", sigma.len())));
        }
        let module = &self.arities[n].module;
        let mut out = zero_vector(v.len());
        for (d, labels) in module.basis.by_degree() {
            let off = module.basis.offset(*d);
            let block = &v[off..off + labels.len()];
            if block.iter().all(Zero::is_zero) {
                continue;
            }
            let w = module.act_permutation(sigma, block, *d)?;
            out[off..off + labels.len()].clone_from_slice(&w);
        }
        Ok(out)
    }

    /// `d v`.
    pub fn differential(&self, n: usize, v: &[Scalar]) -> Result<Vector> {
        self.check_len(n, v)?;
        let a = &self.arities[n];
        let mut out = zero_vector(v.len());
        for (&k, d) in &a.differential {
            let src = a.module.basis.offset(k);
            let dst = a.module.basis.offset(k + 1);
            let w = d.mul_vec(&v[src..src + d.cols()])?;
            for (r, x) in w.into_iter().enumerate() {
                out[dst + r] += x;
            }
        }
        Ok(out)
    }

    /// `δ_i v = v ∘_i 1`.
    pub fn restriction(&self, i: usize, n: usize, v: &[Scalar]) -> Result<Vector> {
        let p = self.point()?;
        self.partial_compose(v, n, i, &p, 0)
    }

    /// `s_i v = v ∘_i m₂`.
    pub fn degeneracy(&self, i: usize, n: usize, v: &[Scalar]) -> Result<Vector> {
        let m = self.m2()?;
        self.partial_compose(v, n, i, &m, 2)
    }

    /// Coordinates of the degree-`k` block of `v`.
    pub fn block(&self, n: usize, k: i32, v: &[Scalar]) -> Vector {
        let b = self.basis(n);
        let off = b.offset(k);
        v[off..off + b.dim(k)].to_vec()
    }

    /// Embeds degree-`k` coordinates into the flattened basis.
    pub fn unblock(&self, n: usize, k: i32, coords: &[Scalar]) -> Vector {
        let b = self.basis(n);
        let mut out = zero_vector(self.dim(n));
        let off = b.offset(k);
        out[off..off + coords.len()].clone_from_slice(coords);
        out
    }

    /// `d: P(n)^k → P(n)^{k+1}` as a matrix, zero when unset.
    pub fn differential_block(&self, n: usize, k: i32) -> Matrix {
        let a = &self.arities[n];
        a.differential
            .get(&k)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(a.module.basis.dim(k + 1), a.module.basis.dim(k)))
    }

    /// Degrees occurring in `P(n)`.
    pub fn degrees(&self, n: usize) -> Vec<i32> {
        self.basis(n).degrees().collect()
    }

    /// `H(P(n))` per degree.
    pub fn arity_cohomology(&self, n: usize) -> Result<BTreeMap<i32, CohomologyPresentation>> {
        if n > self.max_arity {
            return Err(Error::Dimension(format!("arity {n} beyond the truncation {}", self.max_arity)));
        }
        let mut out = BTreeMap::new();
        for k in self.degrees(n) {
            let h = crate::exactla::cohomology_at_degree(&self.differential_block(n, k - 1), &self.differential_block(n, k))?;
            out.insert(k, h);
        }
        Ok(out)
    }

    /// Cohomology dimensions of `P(n)` per degree, zero entries omitted.
    pub fn cohomology_dims(&self, n: usize) -> Result<BTreeMap<i32, usize>> {
        Ok(self.arity_cohomology(n)?.into_iter().map(|(k, h)| (k, h.dim())).filter(|(_, d)| *d > 0).collect())
    }

    /// The truncation `P(0..=max_arity)` of a free stage, with basis trees as
    /// labels (prefix notation) and `m2` the given binary tree. Used to test
    /// the machinery against targets that carry signs and differentials.
    pub fn from_stage(stage: &FreeStage, max_arity: usize, m2: Option<&Tree>) -> Result<Self> {
        let mut arities = Vec::new();
        let mut bases: Vec<Vec<Tree>> = Vec::new();
        for n in 0..=max_arity {
            let trees = stage.basis(n);
            let mut degrees = BTreeMap::new();
            let mut flat = Vec::new();
            for (&k, ts) in &trees {
                degrees.insert(k, ts.iter().map(|t| stage.format_tree(t)).collect::<Vec<_>>());
                flat.extend(ts.iter().cloned());
            }
            let basis = GradedBasis::new(n, degrees)?;
            let index: std::collections::HashMap<&Tree, usize> = flat.iter().enumerate().map(|(i, t)| (t, i)).collect();
            let coords = |v: &TreeVector| -> Vector {
                let mut out = zero_vector(flat.len());
                for (t, c) in v.terms() {
                    out[index[t]] = c.clone();
                }
                out
            };
            let mut transpositions = BTreeMap::new();
            let mut differential = BTreeMap::new();
            for (&k, ts) in &trees {
                let off = basis.offset(k);
                let mut mats = Vec::new();
                for p in 0..n.saturating_sub(1) {
                    let s = Perm::adjacent(n, p);
                    let cols: Vec<Vector> = ts
                        .iter()
                        .map(|t| {
                            let w = stage.act(&s, &stage.vector_of(t.clone(), Scalar::one()))?;
                            Ok(coords(&w)[off..off + ts.len()].to_vec())
                        })
                        .collect::<Result<_>>()?;
                    mats.push(Matrix::from_columns(&cols, ts.len())?);
                }
                transpositions.insert(k, mats);
                if let Some(up) = trees.get(&(k + 1)) {
                    let up_off = basis.offset(k + 1);
                    let cols: Vec<Vector> = ts
                        .iter()
                        .map(|t| coords(&stage.differential(&stage.vector_of(t.clone(), Scalar::one())))[up_off..up_off + up.len()].to_vec())
                        .collect();
                    let d = Matrix::from_columns(&cols, up.len())?;
                    if !d.is_zero() {
                        differential.insert(k, d);
                    }
                }
            }
            let module = SigmaModule::new(basis, SigmaAction { transpositions })?;
            arities.push(ArityComponent { module, differential });
            bases.push(flat);
        }
        let mut compositions = BTreeMap::new();
        for m in 1..=max_arity {
            for n in 0..=max_arity {
                if m + n - 1 > max_arity || bases[m].is_empty() || bases[n].is_empty() {
                    continue;
                }
                let target = &bases[m + n - 1];
                let index: std::collections::HashMap<&Tree, usize> = target.iter().enumerate().map(|(i, t)| (t, i)).collect();
                for i in 1..=m {
                    let mut table = CompositionTable::new(target.len(), bases[m].len(), bases[n].len());
                    for (x, a) in bases[m].iter().enumerate() {
                        let va = stage.vector_of(a.clone(), Scalar::one());
                        for (y, b) in bases[n].iter().enumerate() {
                            let vb = stage.vector_of(b.clone(), Scalar::one());
                            let w = stage.partial_compose(&va, i, &vb)?;
                            let mut col = zero_vector(target.len());
                            for (t, c) in w.terms() {
                                col[index[t]] = c.clone();
                            }
                            table.set(x, y, &col);
                        }
                    }
                    compositions.insert((m, i, n), table);
                }
            }
        }
        let unit0 = stage.is_unitary().then(|| stage.format_tree(&Tree::Point));
        let m2 = m2.map(|t| stage.format_tree(t));
        FiniteDgOperad::new(arities, compositions, stage.format_tree(&Tree::identity()), unit0, m2)
    }
}

/// Shared handle used by morphisms and models.
pub type SharedOperad = Arc<FiniteDgOperad>;
