//! Face families `ω_1, …, ω_n` with `δ_i ω_j = δ_{j-1} ω_i` (`i < j`) and
//! elements whose faces they are.
//!
//! Carrier elements are coordinate vectors in one (arity, degree) block.

use num_traits::{One, Zero};

use crate::dgoperad::FiniteDgOperad;
use crate::error::{Error, Result};
use crate::exactla::{
    add_scaled, kernel_and_image, scale_vector, solve_linear, sub_vectors, unit_vector, zero_vector, Matrix, Scalar,
    SubspaceBasis, Vector,
};
use crate::perm::Perm;

/// An operad-like carrier with faces, degeneracies and a Σ-action.
pub trait KanCarrier {
    fn block_dim(&self, n: usize, k: i32) -> usize;
    /// `δ_i : C(n)^k → C(n-1)^k`.
    fn face(&self, i: usize, n: usize, k: i32, v: &[Scalar]) -> Result<Vector>;
    /// `s_i : C(n)^k → C(n+1)^k`, `v ↦ v ∘_i m₂`.
    fn degeneracy(&self, i: usize, n: usize, k: i32, v: &[Scalar]) -> Result<Vector>;
    /// `v ↦ m₂ ∘_2 v`, from arity `n` to `n + 1`.
    fn multiply_left(&self, n: usize, k: i32, v: &[Scalar]) -> Result<Vector>;
    fn act(&self, sigma: &Perm, n: usize, k: i32, v: &[Scalar]) -> Result<Vector>;
    /// `d : C(n)^k → C(n)^{k+1}`.
    fn differential_matrix(&self, n: usize, k: i32) -> Matrix;
}

impl KanCarrier for FiniteDgOperad {
    fn block_dim(&self, n: usize, k: i32) -> usize {
        if n > self.max_arity() {
            0
        } else {
            self.basis(n).dim(k)
        }
    }

    fn face(&self, i: usize, n: usize, k: i32, v: &[Scalar]) -> Result<Vector> {
        Ok(self.block(n - 1, k, &self.restriction(i, n, &self.unblock(n, k, v))?))
    }

    fn degeneracy(&self, i: usize, n: usize, k: i32, v: &[Scalar]) -> Result<Vector> {
        Ok(self.block(n + 1, k, &FiniteDgOperad::degeneracy(self, i, n, &self.unblock(n, k, v))?))
    }

    fn multiply_left(&self, n: usize, k: i32, v: &[Scalar]) -> Result<Vector> {
        let m2 = self.m2()?;
        Ok(self.block(n + 1, k, &self.partial_compose(&m2, 2, 2, &self.unblock(n, k, v), n)?))
    }

    fn act(&self, sigma: &Perm, n: usize, k: i32, v: &[Scalar]) -> Result<Vector> {
        Ok(self.block(n, k, &FiniteDgOperad::act(self, sigma, n, &self.unblock(n, k, v))?))
    }

    fn differential_matrix(&self, n: usize, k: i32) -> Matrix {
        self.differential_block(n, k)
    }
}

/// `ω_1, …, ω_n` in `C(n-1)^degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceFamily {
    pub n: usize,
    pub degree: i32,
    pub members: Vec<Vector>,
}

impl FaceFamily {
    pub fn zero(carrier: &impl KanCarrier, n: usize, degree: i32) -> Self {
        FaceFamily { n, degree, members: vec![zero_vector(carrier.block_dim(n - 1, degree)); n] }
    }

    /// The faces `δ_1 ω, …, δ_n ω` of an element of `C(n)^degree`.
    pub fn of(carrier: &impl KanCarrier, n: usize, degree: i32, omega: &[Scalar]) -> Result<Self> {
        let members = (1..=n).map(|i| carrier.face(i, n, degree, omega)).collect::<Result<_>>()?;
        Ok(FaceFamily { n, degree, members })
    }

    fn check_shape(&self, carrier: &impl KanCarrier) -> Result<()> {
        if self.n == 0 || self.members.len() != self.n {
            return Err(Error::Dimension(format!("{} members for a family of arity {}", self.members.len(), self.n)));
        }
        let d = carrier.block_dim(self.n - 1, self.degree);
        if let Some(m) = self.members.iter().find(|m| m.len() != d) {
            return Err(Error::Dimension(format!("member of length {} in a component of dimension {d}", m.len())));
        }
        Ok(())
    }
}

/// Requested properties of a filler.
#[derive(Clone, Copy, Debug)]
pub enum Flag<'a> {
    Cocycle,
    Coboundary,
    /// `φ ω = 0`; the matrix has one column per coordinate of `C(n)^degree`.
    InKernel(&'a Matrix),
    /// `ω = φ y`; the matrix has one row per coordinate of `C(n)^degree`.
    InImage(&'a Matrix),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filler {
    pub element: Vector,
    /// `y` with `d y = element`, for the coboundary flag.
    pub coboundary_witness: Option<Vector>,
    /// `y` with `φ y = element`, for the image flag.
    pub image_witness: Option<Vector>,
}

/// `Ok(None)` for a valid family, otherwise the first failing pair `(i, j)`, 1-based.
pub fn is_kan_family(carrier: &impl KanCarrier, family: &FaceFamily) -> Result<Option<(usize, usize)>> {
    family.check_shape(carrier)?;
    let n = family.n;
    for j in 2..=n {
        for i in 1..j {
            let lhs = carrier.face(i, n - 1, family.degree, &family.members[j - 1])?;
            let rhs = carrier.face(j - 1, n - 1, family.degree, &family.members[i - 1])?;
            if lhs != rhs {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

/// `[δ_1; …; δ_n]` on `C(n)^k`.
fn stacked_faces(carrier: &impl KanCarrier, n: usize, k: i32) -> Result<Matrix> {
    let dim = carrier.block_dim(n, k);
    let low = carrier.block_dim(n - 1, k);
    let cols = (0..dim)
        .map(|c| {
            let e = unit_vector(dim, c);
            let mut col = Vec::with_capacity(n * low);
            for i in 1..=n {
                col.extend(carrier.face(i, n, k, &e)?);
            }
            Ok(col)
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_columns(&cols, n * low)
}

fn verify(carrier: &impl KanCarrier, family: &FaceFamily, omega: &[Scalar]) -> Result<()> {
    for (i, target) in family.members.iter().enumerate() {
        if &carrier.face(i + 1, family.n, family.degree, omega)? != target {
            return Err(Error::Internal(format!("filler face δ_{} does not match", i + 1)));
        }
    }
    Ok(())
}

fn require_valid(carrier: &impl KanCarrier, family: &FaceFamily) -> Result<()> {
    if let Some((i, j)) = is_kan_family(carrier, family)? {
        return Err(Error::Infeasible(format!("not a Kan family: δ_{i}ω_{j} ≠ δ_{}ω_{i}", j - 1)));
    }
    Ok(())
}

/// `ω` with `δ_i ω = ω_i`, by one exact solve with free variables set to zero.
pub fn fill(carrier: &impl KanCarrier, family: &FaceFamily) -> Result<Vector> {
    Ok(fill_refined(carrier, family, &[])?.element)
}

/// The degeneracy construction: `w ← w + s_{i-1}(ω_i − δ_i w)` for
/// `i = n, …, 2`, then `w ← w + m₂ ∘_2 (ω_1 − δ_1 w)`.
pub fn fill_constructive(carrier: &impl KanCarrier, family: &FaceFamily) -> Result<Vector> {
    require_valid(carrier, family)?;
    let (n, k) = (family.n, family.degree);
    let mut w = zero_vector(carrier.block_dim(n, k));
    for i in (2..=n).rev() {
        let gap = sub_vectors(&family.members[i - 1], &carrier.face(i, n, k, &w)?);
        add_scaled(&mut w, &Scalar::one(), &carrier.degeneracy(i - 1, n - 1, k, &gap)?);
    }
    let gap = sub_vectors(&family.members[0], &carrier.face(1, n, k, &w)?);
    add_scaled(&mut w, &Scalar::one(), &carrier.multiply_left(n - 1, k, &gap)?);
    verify(carrier, family, &w)?;
    Ok(w)
}

/// A filler lying in every flagged subspace.
pub fn fill_refined(carrier: &impl KanCarrier, family: &FaceFamily, flags: &[Flag<'_>]) -> Result<Filler> {
    require_valid(carrier, family)?;
    let (n, k) = (family.n, family.degree);
    let dim = carrier.block_dim(n, k);
    let low = carrier.block_dim(n - 1, k);
    let d_here = carrier.differential_matrix(n, k);
    let d_below = carrier.differential_matrix(n - 1, k);
    let d_prev = carrier.differential_matrix(n, k - 1);
    let d_prev_low = carrier.differential_matrix(n - 1, k - 1);

    let mut allowed = SubspaceBasis::full(dim);
    for flag in flags {
        let (sub, consistent) = match flag {
            Flag::Cocycle => {
                let ok = family.members.iter().all(|m| d_below.mul_vec(m).is_ok_and(|x| x.iter().all(Zero::is_zero)));
                (kernel_and_image(&d_here).0, ok)
            }
            Flag::Coboundary => {
                let ok = family.members.iter().all(|m| kernel_and_image(&d_prev_low).1.contains(m));
                (kernel_and_image(&d_prev).1, ok)
            }
            Flag::InKernel(phi) => {
                if phi.cols() != dim {
                    return Err(Error::Dimension("kernel flag matrix does not act on the filler".into()));
                }
                (kernel_and_image(phi).0, true)
            }
            Flag::InImage(phi) => {
                if phi.rows() != dim {
                    return Err(Error::Dimension("image flag matrix does not land in the filler's component".into()));
                }
                (kernel_and_image(phi).1, true)
            }
        };
        if !consistent {
            return Err(Error::Infeasible(format!("family is inconsistent with the {flag:?} flag")));
        }
        allowed = allowed.intersect(&sub);
    }
    let basis = allowed.as_columns();
    let faces = stacked_faces(carrier, n, k)?;
    let rhs: Vector = family.members.iter().flatten().cloned().collect();
    debug_assert_eq!(rhs.len(), n * low);
    let coeffs = solve_linear(&faces.mul(&basis)?, &rhs)?
        .ok_or_else(|| Error::Infeasible(format!("no filler in arity {n}, degree {k} with the requested flags")))?;
    let element = basis.mul_vec(&coeffs)?;
    verify(carrier, family, &element)?;
    let mut out = Filler { element, coboundary_witness: None, image_witness: None };
    for flag in flags {
        match flag {
            Flag::Coboundary => {
                let y = solve_linear(&d_prev, &out.element)?.ok_or_else(|| Error::Internal("coboundary witness".into()))?;
                out.coboundary_witness = Some(y);
            }
            Flag::InImage(phi) => {
                let y = solve_linear(phi, &out.element)?.ok_or_else(|| Error::Internal("image witness".into()))?;
                out.image_witness = Some(y);
            }
            _ => {}
        }
    }
    Ok(out)
}

/// `(1/n!) Σ_σ σ·f(σ⁻¹·e_b)` for each basis vector `e_b` of the source, where
/// `f(e_a) = columns[a]` and `act_in`, `act_out` are the two actions.
pub fn average_equivariant(
    n: usize,
    columns: &[Vector],
    act_in: impl Fn(&Perm, &[Scalar]) -> Result<Vector>,
    act_out: impl Fn(&Perm, &[Scalar]) -> Result<Vector>,
) -> Result<Vec<Vector>> {
    let dim_in = columns.len();
    let Some(out_len) = columns.first().map(Vec::len) else {
        return Ok(Vec::new());
    };
    let perms = Perm::all(n);
    let scale = Scalar::new(1.into(), (perms.len() as i64).into());
    let mut out = vec![zero_vector(out_len); dim_in];
    for sigma in &perms {
        let inv = sigma.inverse();
        for (b, acc) in out.iter_mut().enumerate() {
            let pre = act_in(&inv, &unit_vector(dim_in, b))?;
            let mut image = zero_vector(out_len);
            for (a, c) in pre.iter().enumerate() {
                if !c.is_zero() {
                    add_scaled(&mut image, c, &columns[a]);
                }
            }
            add_scaled(acc, &Scalar::one(), &act_out(sigma, &image)?);
        }
    }
    Ok(out.iter().map(|v| scale_vector(&scale, v)).collect())
}

/// A filler `L(e)` for each basis vector `e` of a Σ_n-module `E`, with
/// `δ_i L(e) = ω_i(e)` and `L(σ·e) = σ·L(e)`: a refined fill of each family
/// followed by averaging.
///
/// `act_e(σ, coords)` is the action on `E`; `families[b]` belongs to the
/// `b`-th basis vector.
pub fn fill_equivariant(
    carrier: &impl KanCarrier,
    n: usize,
    degree: i32,
    families: &[FaceFamily],
    act_e: impl Fn(&Perm, &[Scalar]) -> Result<Vector>,
    flags: &[Flag<'_>],
) -> Result<Vec<Vector>> {
    let raw = families.iter().map(|f| Ok(fill_refined(carrier, f, flags)?.element)).collect::<Result<Vec<_>>>()?;
    if raw.is_empty() {
        return Ok(raw);
    }
    let out = average_equivariant(n, &raw, &act_e, |s, v| carrier.act(s, n, degree, v))?;
    for (f, l) in families.iter().zip(&out) {
        verify(carrier, f, l).map_err(|_| {
            Error::Internal("averaged filler lost its faces: the families are not equivariant".into())
        })?;
    }
    for p in 0..n.saturating_sub(1) {
        let s = Perm::adjacent(n, p);
        for b in 0..out.len() {
            let se = act_e(&s, &unit_vector(out.len(), b))?;
            let mut lhs = zero_vector(out[0].len());
            for (a, c) in se.iter().enumerate() {
                add_scaled(&mut lhs, c, &out[a]);
            }
            if lhs != carrier.act(&s, n, degree, &out[b])? {
                return Err(Error::Internal(format!("averaged filler is not equivariant under s_{}", p + 1)));
            }
        }
    }
    Ok(out)
}
