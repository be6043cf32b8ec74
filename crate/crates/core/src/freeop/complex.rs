//! The cochain complex `(P_n(k), ∂)` of a stage in one arity.

use std::collections::{BTreeMap, HashMap};

use num_traits::One;

use super::{FreeStage, Tree, TreeVector};
use crate::error::Result;
use crate::exactla::{cohomology_at_degree, zero_vector, CohomologyPresentation, Matrix, Scalar, Vector};

#[derive(Clone, Debug)]
pub struct ArityComplex {
    pub arity: usize,
    pub basis: BTreeMap<i32, Vec<Tree>>,
    index: HashMap<Tree, usize>,
    /// `∂` from degree `k` to `k + 1`, shaped `dim(k+1) × dim(k)`.
    pub differential: BTreeMap<i32, Matrix>,
}

impl ArityComplex {
    pub fn new(stage: &FreeStage, arity: usize) -> Self {
        let basis = stage.basis(arity);
        let index: HashMap<Tree, usize> =
            basis.values().flat_map(|ts| ts.iter().enumerate().map(|(i, t)| (t.clone(), i))).collect();
        let mut out = ArityComplex { arity, basis, index, differential: BTreeMap::new() };
        let mut differential = BTreeMap::new();
        for (&k, ts) in &out.basis {
            let rows = out.dim(k + 1);
            let cols: Vec<Vector> = ts
                .iter()
                .map(|t| out.coordinates(&stage.differential(&stage.vector_of(t.clone(), Scalar::one()))))
                .collect();
            differential.insert(k, Matrix::from_columns(&cols, rows).expect("column length is the target dimension"));
        }
        out.differential = differential;
        out
    }

    pub fn dim(&self, k: i32) -> usize {
        self.basis.get(&k).map_or(0, Vec::len)
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.basis.keys().copied()
    }

    pub fn differential_block(&self, k: i32) -> Matrix {
        self.differential.get(&k).cloned().unwrap_or_else(|| Matrix::zeros(self.dim(k + 1), self.dim(k)))
    }

    /// Coordinates of a homogeneous vector in its degree's tree basis.
    pub fn coordinates(&self, v: &TreeVector) -> Vector {
        let mut out = zero_vector(self.dim(v.degree()));
        for (t, c) in v.terms() {
            out[self.index[t]] = c.clone();
        }
        out
    }

    pub fn vector(&self, k: i32, coords: &[Scalar]) -> TreeVector {
        let mut v = TreeVector::zero(self.arity, k);
        if let Some(ts) = self.basis.get(&k) {
            for (t, c) in ts.iter().zip(coords) {
                v.add_term(t.clone(), c.clone());
            }
        }
        v
    }

    pub fn cohomology(&self, k: i32) -> Result<CohomologyPresentation> {
        cohomology_at_degree(&self.differential_block(k - 1), &self.differential_block(k))
    }
}
