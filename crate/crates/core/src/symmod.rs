//! Graded Σ-modules and Λ-structures.
//!
//! A Σ-module component stores one matrix per adjacent transposition and
//! degree; arbitrary permutations act through a reduced word. Λ-structures
//! are the restriction maps `δ_i` between consecutive arities.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::exactla::{scalar, Matrix, Vector};
use crate::perm::Perm;
use crate::report::Report;

/// Labelled basis of one arity, split by cohomological degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedBasis {
    arity: usize,
    degrees: BTreeMap<i32, Vec<String>>,
    index: HashMap<String, (i32, usize)>,
}

impl GradedBasis {
    pub fn new(arity: usize, degrees: BTreeMap<i32, Vec<String>>) -> Result<Self> {
        let mut index = HashMap::new();
        let degrees: BTreeMap<i32, Vec<String>> = degrees.into_iter().filter(|(_, v)| !v.is_empty()).collect();
        for (&d, labels) in &degrees {
            for (i, l) in labels.iter().enumerate() {
                if index.insert(l.clone(), (d, i)).is_some() {
                    return Err(Error::Parse(format!("label `{l}` repeated in arity {arity}")));
                }
            }
        }
        Ok(GradedBasis { arity, degrees, index })
    }

    pub fn empty(arity: usize) -> Self {
        GradedBasis { arity, degrees: BTreeMap::new(), index: HashMap::new() }
    }

    pub fn single_degree(arity: usize, degree: i32, labels: Vec<String>) -> Result<Self> {
        Self::new(arity, BTreeMap::from([(degree, labels)]))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.degrees.keys().copied()
    }

    pub fn labels(&self, degree: i32) -> &[String] {
        self.degrees.get(&degree).map_or(&[], |v| v.as_slice())
    }

    pub fn by_degree(&self) -> &BTreeMap<i32, Vec<String>> {
        &self.degrees
    }

    pub fn dim(&self, degree: i32) -> usize {
        self.labels(degree).len()
    }

    pub fn total_dim(&self) -> usize {
        self.degrees.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn position(&self, label: &str) -> Option<(i32, usize)> {
        self.index.get(label).copied()
    }

    /// Offset of a degree block inside the flattened basis (ascending degrees).
    pub fn offset(&self, degree: i32) -> usize {
        self.degrees.range(..degree).map(|(_, v)| v.len()).sum()
    }

    pub fn flat_index(&self, label: &str) -> Option<usize> {
        self.position(label).map(|(d, i)| self.offset(d) + i)
    }

    /// Flattened labels in ascending degree order.
    pub fn flat_labels(&self) -> Vec<&str> {
        self.degrees.values().flatten().map(String::as_str).collect()
    }

    pub fn degree_of_flat(&self, flat: usize) -> Option<i32> {
        let mut acc = 0;
        for (&d, v) in &self.degrees {
            if flat < acc + v.len() {
                return Some(d);
            }
            acc += v.len();
        }
        None
    }
}

/// Adjacent-transposition matrices for each degree.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SigmaAction {
    pub transpositions: BTreeMap<i32, Vec<Matrix>>,
}

/// A graded Σ_n-module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaModule {
    pub basis: GradedBasis,
    pub action: SigmaAction,
}

impl SigmaModule {
    pub fn new(basis: GradedBasis, action: SigmaAction) -> Result<Self> {
        let n = basis.arity();
        for d in basis.degrees() {
            let dim = basis.dim(d);
            let mats = action.transpositions.get(&d).map_or(&[][..], |v| v.as_slice());
            let expected = n.saturating_sub(1);
            if mats.len() != expected {
                return Err(Error::Dimension(format!(
                    "degree {d} of arity {n} needs {expected} transposition matrices, got {}",
                    mats.len()
                )));
            }
            for m in mats {
                if m.rows() != dim || m.cols() != dim {
                    return Err(Error::Dimension(format!(
                        "transposition matrix of degree {d} is {}x{} but the degree has dimension {dim}",
                        m.rows(),
                        m.cols()
                    )));
                }
            }
        }
        Ok(SigmaModule { basis, action })
    }

    pub fn empty(arity: usize) -> Self {
        SigmaModule { basis: GradedBasis::empty(arity), action: SigmaAction::default() }
    }

    /// Every permutation acts as the identity.
    pub fn trivial(arity: usize, degree: i32, labels: Vec<String>) -> Result<Self> {
        let dim = labels.len();
        let basis = GradedBasis::single_degree(arity, degree, labels)?;
        let mats = vec![Matrix::identity(dim); arity.saturating_sub(1)];
        Self::new(basis, SigmaAction { transpositions: BTreeMap::from([(degree, mats)]) })
    }

    /// Transpositions act by `-1` on a one-dimensional space.
    pub fn sign(arity: usize, degree: i32, label: String) -> Result<Self> {
        let basis = GradedBasis::single_degree(arity, degree, vec![label])?;
        let mats = vec![Matrix::from_i64(&[&[-1]]); arity.saturating_sub(1)];
        Self::new(basis, SigmaAction { transpositions: BTreeMap::from([(degree, mats)]) })
    }

    /// Regular representation; basis element `w` is labelled by its one-line
    /// notation and `σ·w = σ∘w`.
    pub fn regular(arity: usize, degree: i32) -> Result<Self> {
        let perms = Perm::all(arity);
        let labels: Vec<String> = perms.iter().map(word_label).collect();
        let pos: HashMap<&Perm, usize> = perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut mats = Vec::new();
        for p in 0..arity.saturating_sub(1) {
            let s = Perm::adjacent(arity, p);
            let mut m = Matrix::zeros(perms.len(), perms.len());
            for (c, w) in perms.iter().enumerate() {
                m.set(pos[&s.compose(w)], c, scalar(1));
            }
            mats.push(m);
        }
        let basis = GradedBasis::single_degree(arity, degree, labels)?;
        Self::new(basis, SigmaAction { transpositions: BTreeMap::from([(degree, mats)]) })
    }

    pub fn arity(&self) -> usize {
        self.basis.arity()
    }

    pub fn transposition(&self, degree: i32, p: usize) -> Option<&Matrix> {
        self.action.transpositions.get(&degree).and_then(|v| v.get(p))
    }

    /// `σ·v` for `v` in the given degree component.
    pub fn act_permutation(&self, sigma: &Perm, v: &[crate::exactla::Scalar], degree: i32) -> Result<Vector> {
        act_by_transpositions(self.arity(), sigma, v, |p| self.transposition(degree, p), self.basis.dim(degree))
    }

    /// The matrix of `σ` on one degree.
    pub fn permutation_matrix(&self, sigma: &Perm, degree: i32) -> Result<Matrix> {
        let dim = self.basis.dim(degree);
        let cols = (0..dim)
            .map(|c| self.act_permutation(sigma, &crate::exactla::unit_vector(dim, c), degree))
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_columns(&cols, dim)
    }
}

/// Acts on `v` through the reduced word of `sigma`.
pub fn act_by_transpositions<'a>(
    arity: usize,
    sigma: &Perm,
    v: &[crate::exactla::Scalar],
    transposition: impl Fn(usize) -> Option<&'a Matrix>,
    dim: usize,
) -> Result<Vector> {
    if sigma.len() != arity {
        return Err(Error::Dimension(format!("permutation of {} letters acting in arity {arity}", sigma.len())));
    }
    if v.len() != dim {
        return Err(Error::Dimension(format!("vector of length {} in a component of dimension {dim}", v.len())));
    }
    let mut out = v.to_vec();
    if dim == 0 {
        return Ok(out);
    }
    for p in sigma.reduced_word() {
        let m = transposition(p).ok_or_else(|| Error::Dimension(format!("missing transposition matrix s_{}", p + 1)))?;
        out = m.mul_vec(&out)?;
    }
    Ok(out)
}

pub fn word_label(p: &Perm) -> String {
    let parts: Vec<String> = p.images().iter().map(|x| (x + 1).to_string()).collect();
    if p.len() < 10 {
        parts.concat()
    } else {
        parts.join(",")
    }
}

/// Checks involution and braid relations in every degree.
pub fn validate_sigma_module(module: &SigmaModule) -> Report {
    let mut report = Report::new();
    let n = module.arity();
    for d in module.basis.degrees() {
        let dim = module.basis.dim(d);
        let id = Matrix::identity(dim);
        let Some(mats) = module.action.transpositions.get(&d) else {
            report.fail("shape", format!("degree {d}: no transposition matrices"));
            continue;
        };
        if mats.len() != n.saturating_sub(1) {
            report.fail("shape", format!("degree {d}: {} matrices for arity {n}", mats.len()));
            continue;
        }
        report.pass("shape");
        for (p, m) in mats.iter().enumerate() {
            let sq = m.mul(m).expect("square matrices");
            report.check("involution", sq == id, || format!("degree {d}: s_{} does not square to the identity", p + 1));
        }
        for p in 0..mats.len().saturating_sub(1) {
            let (a, b) = (&mats[p], &mats[p + 1]);
            let aba = a.mul(b).and_then(|x| x.mul(a)).expect("square");
            let bab = b.mul(a).and_then(|x| x.mul(b)).expect("square");
            report.check("braid", aba == bab, || format!("degree {d}: s_{0} s_{1} s_{0} ≠ s_{1} s_{0} s_{1}", p + 1, p + 2));
        }
        for p in 0..mats.len() {
            for q in p + 2..mats.len() {
                let ab = mats[p].mul(&mats[q]).expect("square");
                let ba = mats[q].mul(&mats[p]).expect("square");
                report.check("commutation", ab == ba, || format!("degree {d}: s_{} and s_{} do not commute", p + 1, q + 1));
            }
        }
    }
    if report.checks.is_empty() {
        report.pass("shape");
    }
    report
}

/// Restriction maps: `maps[n][i-1][degree]` is `δ_i : arity n → arity n-1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LambdaMaps {
    pub maps: BTreeMap<usize, Vec<BTreeMap<i32, Matrix>>>,
}

impl LambdaMaps {
    pub fn get(&self, arity: usize, i: usize, degree: i32) -> Option<&Matrix> {
        self.maps.get(&arity)?.get(i.checked_sub(1)?)?.get(&degree)
    }
}

/// Checks `δ_i δ_j = δ_{j-1} δ_i` for `i < j` wherever both sides are defined.
pub fn validate_lambda_structure(maps: &LambdaMaps) -> Report {
    let mut report = Report::new();
    report.pass("lambda_coherence");
    for (&n, slots) in &maps.maps {
        if n < 2 || !maps.maps.contains_key(&(n - 1)) {
            continue;
        }
        for j in 2..=slots.len() {
            for i in 1..j {
                for (&d, dj) in &slots[j - 1] {
                    let (Some(di_low), Some(di), Some(dj1_low)) =
                        (maps.get(n - 1, i, d), maps.get(n, i, d), maps.get(n - 1, j - 1, d))
                    else {
                        report.fail("lambda_coherence", format!("arity {n}, degree {d}: missing maps for i={i}, j={j}"));
                        continue;
                    };
                    let lhs = di_low.mul(dj);
                    let rhs = dj1_low.mul(di);
                    match (lhs, rhs) {
                        (Ok(l), Ok(r)) if l == r => {}
                        (Ok(_), Ok(_)) => report.fail(
                            "lambda_coherence",
                            format!("arity {n}, degree {d}: δ_{i}δ_{j} ≠ δ_{}δ_{i}", j - 1),
                        ),
                        _ => report.fail("lambda_coherence", format!("arity {n}, degree {d}: incompatible shapes")),
                    }
                }
            }
        }
    }
    report
}
