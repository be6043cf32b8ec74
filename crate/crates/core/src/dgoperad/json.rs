//! Operad files. Matrices are arrays of rows of `"p/q"` strings; the
//! composition `∘_i : P(m) ⊗ P(n) → P(m+n-1)` is stored under key `"m,i,n"`
//! in the entry of arity `m`, its column `x·dim P(n) + y` being `e_x ∘_i e_y`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{format_scalar, parse_scalar, Matrix};
use crate::symmod::{GradedBasis, SigmaAction, SigmaModule};

use super::{ArityComponent, CompositionTable, FiniteDgOperad};

pub type MatrixJson = Vec<Vec<String>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperadJson {
    pub max_arity: usize,
    pub arities: Vec<ArityJson>,
    pub unit1: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit0: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m2: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArityJson {
    pub n: usize,
    pub degrees: BTreeMap<i32, Vec<String>>,
    #[serde(default)]
    pub transpositions: BTreeMap<i32, Vec<MatrixJson>>,
    #[serde(default)]
    pub differential: BTreeMap<i32, MatrixJson>,
    #[serde(default)]
    pub compositions: BTreeMap<String, MatrixJson>,
}

pub fn matrix_to_json(m: &Matrix) -> MatrixJson {
    (0..m.rows()).map(|r| m.row(r).iter().map(format_scalar).collect()).collect()
}

pub fn matrix_from_json(rows: &MatrixJson, n_rows: usize, n_cols: usize, what: &str) -> Result<Matrix> {
    if rows.len() != n_rows {
        return Err(Error::Parse(format!("{what}: {} rows, expected {n_rows}", rows.len())));
    }
    let parsed = rows
        .iter()
        .map(|r| {
            if r.len() != n_cols {
                return Err(Error::Parse(format!("{what}: row of length {}, expected {n_cols}", r.len())));
            }
            r.iter().map(|s| parse_scalar(s)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(parsed, n_cols)
}

fn parse_key(key: &str) -> Result<(usize, usize, usize)> {
    let parts: Vec<&str> = key.split(',').collect();
    let bad = || Error::Parse(format!("composition key `{key}` is not `m,i,n`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let p = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    Ok((p(parts[0])?, p(parts[1])?, p(parts[2])?))
}

impl FiniteDgOperad {
    pub fn to_json(&self) -> OperadJson {
        let mut arities: Vec<ArityJson> = (0..=self.max_arity())
            .map(|n| {
                let c = self.component(n);
                ArityJson {
                    n,
                    degrees: c.module.basis.by_degree().clone(),
                    transpositions: c
                        .module
                        .action
                        .transpositions
                        .iter()
                        .map(|(k, ms)| (*k, ms.iter().map(matrix_to_json).collect()))
                        .collect(),
                    differential: c.differential.iter().map(|(k, m)| (*k, matrix_to_json(m))).collect(),
                    compositions: BTreeMap::new(),
                }
            })
            .collect();
        for (&(m, i, n), t) in self.compositions() {
            arities[m].compositions.insert(format!("{m},{i},{n}"), matrix_to_json(&t.to_dense()));
        }
        OperadJson {
            max_arity: self.max_arity(),
            arities,
            unit1: self.unit1_label().to_string(),
            unit0: self.unit0_label().map(String::from),
            m2: self.m2_label().map(String::from),
        }
    }

    pub fn from_json(j: &OperadJson) -> Result<Self> {
        if j.arities.len() != j.max_arity + 1 {
            return Err(Error::Parse(format!("{} arity entries for max_arity {}", j.arities.len(), j.max_arity)));
        }
        let mut components = Vec::new();
        for (n, a) in j.arities.iter().enumerate() {
            if a.n != n {
                return Err(Error::Parse(format!("arity entry {n} is labelled {}", a.n)));
            }
            let basis = GradedBasis::new(n, a.degrees.clone())?;
            let mut transpositions = BTreeMap::new();
            for (k, ms) in &a.transpositions {
                let d = basis.dim(*k);
                let mats = ms
                    .iter()
                    .map(|m| matrix_from_json(m, d, d, &format!("arity {n} transposition in degree {k}")))
                    .collect::<Result<Vec<_>>>()?;
                transpositions.insert(*k, mats);
            }
            let module = SigmaModule::new(basis, SigmaAction { transpositions })?;
            let mut differential = BTreeMap::new();
            for (k, m) in &a.differential {
                let (r, c) = (module.basis.dim(k + 1), module.basis.dim(*k));
                differential.insert(*k, matrix_from_json(m, r, c, &format!("arity {n} differential from degree {k}"))?);
            }
            components.push(ArityComponent { module, differential });
        }
        let dims: Vec<usize> = components.iter().map(|c| c.module.basis.total_dim()).collect();
        let mut compositions = BTreeMap::new();
        for (m, a) in j.arities.iter().enumerate() {
            for (key, mat) in &a.compositions {
                let (km, i, n) = parse_key(key)?;
                if km != m || n >= dims.len() || m + n == 0 || m + n > dims.len() || i == 0 || i > m {
                    return Err(Error::Parse(format!("composition `{key}` does not fit arity entry {m}")));
                }
                let dense = matrix_from_json(mat, dims[m + n - 1], dims[m] * dims[n], &format!("composition {key}"))?;
                compositions.insert((m, i, n), CompositionTable::from_dense(&dense, dims[m], dims[n])?);
            }
        }
        FiniteDgOperad::new(components, compositions, j.unit1.clone(), j.unit0.clone(), j.m2.clone())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("operad json serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: OperadJson = serde_json::from_str(s)?;
        Self::from_json(&j)
    }
}
