//! Exact linear algebra over the rationals.
//!
//! Everything downstream (cohomology of operad components, lifting problems,
//! Kan fillers, restriction assignments) is phrased as a question about a
//! dense [`Matrix`] of [`Scalar`]s and answered here. All results are
//! canonical: row reduction always picks the topmost available pivot and
//! free variables are set to zero, so equal inputs give equal outputs.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// An exact rational number, always in lowest terms with positive denominator.
pub type Scalar = BigRational;

/// A coordinate vector.
pub type Vector = Vec<Scalar>;

pub fn scalar(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"` or `"p/q"`.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(BigRational::from_integer).map_err(|_| bad()),
        Some((p, q)) => {
            let p: BigInt = p.parse().map_err(|_| bad())?;
            let q: BigInt = q.parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
    }
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_scalar(x: &Scalar) -> String {
    x.to_string()
}

pub fn zero_vector(n: usize) -> Vector {
    vec![Scalar::zero(); n]
}

pub fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = zero_vector(n);
    v[i] = Scalar::one();
    v
}

pub fn is_zero_vector(v: &[Scalar]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// `acc += c * v`
pub fn add_scaled(acc: &mut [Scalar], c: &Scalar, v: &[Scalar]) {
    assert_eq!(acc.len(), v.len(), "add_scaled length mismatch");
    if c.is_zero() {
        return;
    }
    for (a, b) in acc.iter_mut().zip(v) {
        if !b.is_zero() {
            *a += c * b;
        }
    }
}

pub fn sub_vectors(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_vector(c: &Scalar, v: &[Scalar]) -> Vector {
    v.iter().map(|x| c * x).collect()
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(format_scalar).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed to describe matrices with no rows.
    pub fn from_rows(rows: Vec<Vector>, cols: usize) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Dimension(format!("row {i} has length {} but expected {cols}", r.len())));
            }
            data.extend(r);
        }
        Ok(Matrix { rows: n, cols, data })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows.iter().map(|r| r.iter().map(|&x| scalar(x)).collect()).collect();
        Matrix::from_rows(rows, cols).expect("ragged integer matrix")
    }

    /// Matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(columns: &[Vector], rows: usize) -> Result<Self> {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::Dimension(format!("column {j} has length {} but expected {rows}", c.len())));
            }
            for (i, x) in c.iter().enumerate() {
                if !x.is_zero() {
                    m.set(i, j, x.clone());
                }
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: Scalar) {
        self.data[r * self.cols + c] = x;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vector {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vector> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let x = self.get(r, c);
                if !x.is_zero() {
                    t.set(c, r, x.clone());
                }
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let idx = r * out.cols + c;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vector> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = zero_vector(self.rows);
        for (c, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (r, o) in out.iter_mut().enumerate() {
                let a = self.get(r, c);
                if !a.is_zero() {
                    *o += a * x;
                }
            }
        }
        Ok(out)
    }

    /// Stacks `self` above `other`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension(format!("vstack of {} and {} columns", self.cols, other.cols)));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix { rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::Dimension(format!("hstack of {} and {} rows", self.rows, other.rows)));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend(self.row(r).iter().cloned());
            data.extend(other.row(r).iter().cloned());
        }
        Ok(Matrix { rows: self.rows, cols, data })
    }

    pub fn rank(&self) -> usize {
        rref(self).pivots.len()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let r = rref(self);
        (r.pivots.len() == self.rows).then_some(r.transform)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, f: &Scalar) {
        for x in &mut self.data[r * self.cols..(r + 1) * self.cols] {
            if !x.is_zero() {
                *x *= f;
            }
        }
    }

    /// `row[target] -= f * row[source]`
    fn eliminate(&mut self, target: usize, source: usize, f: &Scalar) {
        for c in 0..self.cols {
            let s = &self.data[source * self.cols + c];
            if s.is_zero() {
                continue;
            }
            let delta = f * s;
            self.data[target * self.cols + c] -= delta;
        }
    }
}

/// Result of [`rref`].
#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
    /// Invertible matrix with `transform · m = reduced`.
    pub transform: Matrix,
}

/// Reduced row echelon form with the row operations that produce it.
pub fn rref(m: &Matrix) -> Rref {
    let mut a = m.clone();
    let mut t = Matrix::identity(m.rows);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&r| !a.get(r, col).is_zero()) else {
            continue;
        };
        a.swap_rows(row, p);
        t.swap_rows(row, p);
        let inv = a.get(row, col).recip();
        a.scale_row(row, &inv);
        t.scale_row(row, &inv);
        for r in 0..a.rows {
            if r != row {
                let f = a.get(r, col).clone();
                if !f.is_zero() {
                    a.eliminate(r, row, &f);
                    t.eliminate(r, row, &f);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    Rref { reduced: a, pivots, transform: t }
}

/// Row reduction without the transform, for rank and span questions.
fn rref_rows(rows: Vec<Vector>, cols: usize) -> (Vec<Vector>, Vec<usize>) {
    let mut a = Matrix::from_rows(rows, cols).expect("rows of equal length");
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&r| !a.get(r, col).is_zero()) else {
            continue;
        };
        a.swap_rows(row, p);
        let inv = a.get(row, col).recip();
        a.scale_row(row, &inv);
        for r in 0..a.rows {
            if r != row {
                let f = a.get(r, col).clone();
                if !f.is_zero() {
                    a.eliminate(r, row, &f);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let rows = (0..pivots.len()).map(|r| a.row(r).to_vec()).collect();
    (rows, pivots)
}

/// Solves `a · x = b` exactly. Free variables are set to zero.
pub fn solve_linear(a: &Matrix, b: &[Scalar]) -> Result<Option<Vector>> {
    if b.len() != a.rows {
        return Err(Error::Dimension(format!("rhs has length {} but matrix has {} rows", b.len(), a.rows)));
    }
    let rhs = Matrix::from_columns(&[b.to_vec()], a.rows)?;
    let aug = a.hstack(&rhs)?;
    let (rows, pivots) = rref_rows(aug.to_rows(), a.cols + 1);
    if pivots.last() == Some(&a.cols) {
        return Ok(None);
    }
    let mut x = zero_vector(a.cols);
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = rows[r][a.cols].clone();
    }
    Ok(Some(x))
}

/// A linear subspace stored by its reduced echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    vectors: Vec<Vector>,
    pivots: Vec<usize>,
}

impl SubspaceBasis {
    pub fn zero(ambient_dim: usize) -> Self {
        SubspaceBasis { ambient_dim, vectors: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self::span(ambient_dim, (0..ambient_dim).map(|i| unit_vector(ambient_dim, i)).collect())
    }

    /// The span of arbitrary vectors, normalised to reduced echelon form.
    pub fn span(ambient_dim: usize, vectors: Vec<Vector>) -> Self {
        let vectors: Vec<Vector> = vectors.into_iter().filter(|v| !is_zero_vector(v)).collect();
        if vectors.is_empty() {
            return Self::zero(ambient_dim);
        }
        let (vectors, pivots) = rref_rows(vectors, ambient_dim);
        SubspaceBasis { ambient_dim, vectors, pivots }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    /// Coordinates of `v` with respect to the echelon basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vector> {
        assert_eq!(v.len(), self.ambient_dim, "vector outside ambient space");
        let coords: Vector = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut residual = v.to_vec();
        for (c, b) in coords.iter().zip(&self.vectors) {
            add_scaled(&mut residual, &-c, b);
        }
        is_zero_vector(&residual).then_some(coords)
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_subspace(&self, other: &SubspaceBasis) -> bool {
        other.vectors.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &SubspaceBasis) -> SubspaceBasis {
        let mut all = self.vectors.clone();
        all.extend(other.vectors.iter().cloned());
        Self::span(self.ambient_dim, all)
    }

    pub fn intersect(&self, other: &SubspaceBasis) -> SubspaceBasis {
        // x = A u = B w  ⇔  [A | -B] (u, w) = 0
        let n = self.ambient_dim;
        let mut cols: Vec<Vector> = self.vectors.clone();
        cols.extend(other.vectors.iter().map(|v| v.iter().map(|x| -x).collect()));
        if cols.is_empty() {
            return Self::zero(n);
        }
        let m = Matrix::from_columns(&cols, n).expect("consistent ambient dimension");
        let (ker, _) = kernel_and_image(&m);
        let out = ker
            .vectors
            .iter()
            .map(|k| {
                let mut v = zero_vector(n);
                for (c, b) in k.iter().zip(&self.vectors) {
                    add_scaled(&mut v, c, b);
                }
                v
            })
            .collect();
        Self::span(n, out)
    }

    /// Matrix whose columns are the basis vectors.
    pub fn as_columns(&self) -> Matrix {
        Matrix::from_columns(&self.vectors, self.ambient_dim).expect("consistent ambient dimension")
    }
}

/// Null space (in the domain) and column space (in the codomain).
pub fn kernel_and_image(m: &Matrix) -> (SubspaceBasis, SubspaceBasis) {
    let (rows, pivots) = rref_rows(m.to_rows(), m.cols);
    let mut kernel = Vec::new();
    let mut pivot_iter = pivots.iter().peekable();
    for free in 0..m.cols {
        if pivot_iter.peek() == Some(&&free) {
            pivot_iter.next();
            continue;
        }
        let mut v = zero_vector(m.cols);
        v[free] = Scalar::one();
        for (r, &p) in pivots.iter().enumerate() {
            if p < free {
                v[p] = -rows[r][free].clone();
            }
        }
        kernel.push(v);
    }
    let image = SubspaceBasis::span(m.rows, m.transpose().to_rows());
    (SubspaceBasis::span(m.cols, kernel), image)
}

/// Cohomology of `C^{k-1} --d_in--> C^k --d_out--> C^{k+1}` at `C^k`.
#[derive(Clone, Debug)]
pub struct CohomologyPresentation {
    pub cocycles: SubspaceBasis,
    pub coboundaries: SubspaceBasis,
    /// One cocycle per basis class.
    pub class_reps: Vec<Vector>,
    /// `h × N`; on cocycles, returns class coordinates.
    pub projection: Matrix,
    /// `N × h`; columns are `class_reps`.
    pub section: Matrix,
}

impl CohomologyPresentation {
    pub fn dim(&self) -> usize {
        self.class_reps.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.cocycles.ambient_dim()
    }

    /// Class coordinates of a cocycle; `None` if `v` is not closed.
    pub fn class_of(&self, v: &[Scalar]) -> Option<Vector> {
        if !self.cocycles.contains(v) {
            return None;
        }
        Some(self.projection.mul_vec(v).expect("ambient dimension"))
    }

    /// A cocycle representing the class with the given coordinates.
    pub fn representative(&self, class: &[Scalar]) -> Vector {
        self.section.mul_vec(class).expect("class dimension")
    }
}

/// Presentation of cohomology at a single spot of a complex.
pub fn cohomology_at_degree(d_in: &Matrix, d_out: &Matrix) -> Result<CohomologyPresentation> {
    let n = d_out.cols;
    if d_in.rows != n {
        return Err(Error::Dimension(format!(
            "incoming differential lands in dimension {} but the middle term has dimension {n}",
            d_in.rows
        )));
    }
    if !d_out.mul(d_in)?.is_zero() {
        return Err(Error::MalformedComplex("d_out · d_in ≠ 0".into()));
    }
    let (cocycles, _) = kernel_and_image(d_out);
    let (_, coboundaries) = kernel_and_image(d_in);

    let mut span = coboundaries.clone();
    let mut class_reps = Vec::new();
    for z in cocycles.vectors() {
        if !span.contains(z) {
            class_reps.push(z.clone());
            span = span.sum(&SubspaceBasis::span(n, vec![z.clone()]));
        }
    }
    // Basis of the ambient space: class reps, then coboundaries, then a complement of the cocycles.
    let mut basis: Vec<Vector> = class_reps.clone();
    basis.extend(coboundaries.vectors().iter().cloned());
    let mut span = SubspaceBasis::span(n, basis.clone());
    for i in 0..n {
        if span.dim() == n {
            break;
        }
        let e = unit_vector(n, i);
        if !span.contains(&e) {
            basis.push(e.clone());
            span = span.sum(&SubspaceBasis::span(n, vec![e]));
        }
    }
    let change = Matrix::from_columns(&basis, n)?;
    let inv = change
        .inverse()
        .ok_or_else(|| Error::Internal("cohomology basis change is singular".into()))?;
    let h = class_reps.len();
    let projection = Matrix::from_rows((0..h).map(|r| inv.row(r).to_vec()).collect(), n)?;
    let section = Matrix::from_columns(&class_reps, n)?;
    Ok(CohomologyPresentation { cocycles, coboundaries, class_reps, projection, section })
}
