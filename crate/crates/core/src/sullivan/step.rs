//! One arity of the construction: new generators, their differential,
//! their values in the target and (in unitary mode) their restrictions.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use super::{Mode, StagedModel};
use crate::dgoperad::{FiniteDgOperad, StageMorphism};
use crate::error::{Error, Result};
use crate::exactla::{
    add_scaled, is_zero_vector, kernel_and_image, sub_vectors, unit_vector, zero_vector, Matrix, Scalar,
    SubspaceBasis, Vector,
};
use crate::freeop::{ArityComplex, FreeStage, TreeVector};
use crate::kan::{average_equivariant, fill_equivariant, FaceFamily, Flag, KanCarrier};
use crate::perm::Perm;
use crate::symmod::{act_by_transpositions, GradedBasis, SigmaAction, SigmaModule};

/// What a new generator is for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum GeneratorKind {
    /// `d e = 0`, hitting a class missing from the image of `H(ρ)`.
    Cocycle,
    /// `d e` represents a class in the kernel of `H(ρ)`.
    KernelKilling,
}

/// New generators of one kind in one degree, forming a Σ_n-submodule.
#[derive(Clone, Debug)]
pub struct GeneratorBlock {
    pub arity: usize,
    pub degree: i32,
    pub kind: GeneratorKind,
    /// `s_1, …, s_{n-1}` on the block.
    pub transpositions: Vec<Matrix>,
    pub differential: Vec<TreeVector>,
    /// Values in the degree block of the target's arity `n`.
    pub values: Vec<Vector>,
}

impl GeneratorBlock {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    fn act(&self, sigma: &Perm, v: &[Scalar]) -> Result<Vector> {
        act_by_transpositions(self.arity, sigma, v, |p| self.transpositions.get(p), self.dim())
    }
}

fn act_matrices(n: usize, dim: usize, act: impl Fn(&Perm, &[Scalar]) -> Result<Vector>) -> Result<Vec<Matrix>> {
    (0..n.saturating_sub(1))
        .map(|p| {
            let s = Perm::adjacent(n, p);
            let cols = (0..dim).map(|c| act(&s, &unit_vector(dim, c))).collect::<Result<Vec<_>>>()?;
            Matrix::from_columns(&cols, dim)
        })
        .collect()
}

fn combine(columns: &[Vector], coords: &[Scalar], len: usize) -> Vector {
    let mut out = zero_vector(len);
    for (c, v) in coords.iter().zip(columns) {
        if !c.is_zero() {
            add_scaled(&mut out, c, v);
        }
    }
    out
}

fn stage_act(stage: &FreeStage, complex: &ArityComplex, k: i32, sigma: &Perm, coords: &[Scalar]) -> Result<Vector> {
    Ok(complex.coordinates(&stage.act(sigma, &complex.vector(k, coords))?))
}

/// A projection onto `sub` along a complement spanned by unit vectors.
fn projection_onto(sub: &SubspaceBasis) -> Result<Matrix> {
    let h = sub.ambient_dim();
    let r = sub.dim();
    let mut cols = sub.vectors().to_vec();
    let mut span = sub.clone();
    for i in 0..h {
        if cols.len() == h {
            break;
        }
        let e = unit_vector(h, i);
        if !span.contains(&e) {
            span = span.sum(&SubspaceBasis::span(h, vec![e.clone()]));
            cols.push(e);
        }
    }
    let inv = Matrix::from_columns(&cols, h)?
        .inverse()
        .ok_or_else(|| Error::Internal("completed basis is singular".into()))?;
    let out: Vec<Vector> = (0..h)
        .map(|c| {
            let coords: Vector = (0..r).map(|a| inv.get(a, c).clone()).collect();
            combine(&cols[..r], &coords, h)
        })
        .collect();
    Matrix::from_columns(&out, h)
}

/// Computes `H(ρ)(n)` and the generators killing its kernel and cokernel.
pub fn new_generator_blocks(rho: &StageMorphism, n: usize) -> Result<Vec<GeneratorBlock>> {
    let stage = rho.source();
    let target = rho.target().as_ref();
    let complex = ArityComplex::new(stage, n);
    let mut blocks = Vec::new();
    for (k, h) in rho.induced_maps(&complex)? {
        let ht = h.target.dim();
        let big = target.basis(n).dim(k);
        let act_t = |s: &Perm, class: &[Scalar]| -> Result<Vector> {
            let rep = h.target.representative(class);
            h.target.projection.mul_vec(&KanCarrier::act(target, s, n, k, &rep)?)
        };
        let image = SubspaceBasis::span(ht, h.matrix.transpose().to_rows());
        if image.dim() < ht {
            let p0 = projection_onto(&image)?;
            let columns: Vec<Vector> = (0..ht).map(|c| p0.column(c)).collect();
            let averaged = average_equivariant(n, &columns, act_t, act_t)?;
            let pi = Matrix::from_columns(&averaged, ht)?;
            let complement = kernel_and_image(&pi).0;
            let q = complement.vectors();
            let act_q = |s: &Perm, c: &[Scalar]| -> Result<Vector> {
                let moved = act_t(s, &combine(q, c, ht))?;
                complement.coordinates(&moved).ok_or_else(|| Error::Internal("complement is not Σ-stable".into()))
            };
            let transpositions = act_matrices(n, q.len(), act_q)?;
            let reps: Vec<Vector> = q.iter().map(|c| h.target.representative(c)).collect();
            let act_e = |s: &Perm, v: &[Scalar]| act_by_transpositions(n, s, v, |p| transpositions.get(p), q.len());
            let values = average_equivariant(n, &reps, act_e, |s, v| KanCarrier::act(target, s, n, k, v))?;
            blocks.push(GeneratorBlock {
                arity: n,
                degree: k,
                kind: GeneratorKind::Cocycle,
                differential: vec![TreeVector::zero(n, k + 1); q.len()],
                transpositions,
                values,
            });
        }
        let kernel = kernel_and_image(&h.matrix).0;
        if kernel.dim() == 0 {
            continue;
        }
        let hs = h.source.dim();
        let act_s = |s: &Perm, class: &[Scalar]| -> Result<Vector> {
            let rep = h.source.representative(class);
            h.source.projection.mul_vec(&stage_act(stage, &complex, k, s, &rep)?)
        };
        let kv = kernel.vectors();
        let act_k = |s: &Perm, c: &[Scalar]| -> Result<Vector> {
            kernel.coordinates(&act_s(s, &combine(kv, c, hs))?).ok_or_else(|| Error::Internal("kernel is not Σ-stable".into()))
        };
        let transpositions = act_matrices(n, kv.len(), act_k)?;
        let act_e = |s: &Perm, v: &[Scalar]| act_by_transpositions(n, s, v, |p| transpositions.get(p), kv.len());
        let reps: Vec<Vector> = kv.iter().map(|c| h.source.representative(c)).collect();
        let cocycles = average_equivariant(n, &reps, act_e, |s, v| stage_act(stage, &complex, k, s, v))?;
        let differential: Vec<TreeVector> = cocycles.iter().map(|c| complex.vector(k, c)).collect();
        let d_prev = target.differential_block(n, k - 1);
        let lifts = differential
            .iter()
            .map(|z| {
                let image = target.block(n, k, &rho.evaluate(z)?);
                solve(&d_prev, &image).ok_or_else(|| {
                    Error::Internal(format!("ρ of a kernel class in arity {n}, degree {k} is not a coboundary"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let values = average_equivariant(n, &lifts, act_e, |s, v| KanCarrier::act(target, s, n, k - 1, v))?;
        debug_assert_eq!(big, h.target.ambient_dim());
        blocks.push(GeneratorBlock { arity: n, degree: k - 1, kind: GeneratorKind::KernelKilling, transpositions, differential, values });
    }
    blocks.sort_by_key(|b| (b.degree, b.kind));
    Ok(blocks)
}

fn solve(a: &Matrix, b: &[Scalar]) -> Option<Vector> {
    crate::exactla::solve_linear(a, b).ok().flatten()
}

/// Linear data shared by every generator of a block.
struct RestrictionSystem {
    n: usize,
    /// Candidate dimension per slot: `dim P_{n-1}(n-1)^k`.
    s: usize,
    c1: ArityComplex,
    chain: Matrix,
    coherence: Matrix,
    rho: Matrix,
    /// `Δ_i` on the target, `P(n)^k → P(n-1)^k`.
    faces: Vec<Matrix>,
}

impl RestrictionSystem {
    fn new(rho: &StageMorphism, n: usize, k: i32, extra: &Matrix) -> Result<Self> {
        let stage = rho.source();
        let target = rho.target().as_ref();
        let c1 = ArityComplex::new(stage, n - 1);
        let c2 = ArityComplex::new(stage, n - 2);
        let s = c1.dim(k);
        let t = extra.cols();
        let unknowns = n * s + t;
        let d1 = c1.differential_block(k);
        let mut chain = Matrix::zeros(n * d1.rows(), unknowns);
        for i in 0..n {
            place(&mut chain, i * d1.rows(), i * s, &d1, false);
        }
        let restrict: Vec<Matrix> = (1..n)
            .map(|i| {
                let cols = c1
                    .basis
                    .get(&k)
                    .map_or(&[][..], |v| v.as_slice())
                    .iter()
                    .map(|tr| Ok(c2.coordinates(&stage.restriction(i, &stage.vector_of(tr.clone(), Scalar::from_integer(1.into())))?)))
                    .collect::<Result<Vec<_>>>()?;
                Matrix::from_columns(&cols, c2.dim(k))
            })
            .collect::<Result<_>>()?;
        let pairs: Vec<(usize, usize)> = (2..=n).flat_map(|j| (1..j).map(move |i| (i, j))).collect();
        let low = c2.dim(k);
        let mut coherence = Matrix::zeros(pairs.len() * low, unknowns);
        for (r, &(i, j)) in pairs.iter().enumerate() {
            // δ_i x_j − δ_{j-1} x_i
            place(&mut coherence, r * low, (j - 1) * s, &restrict[i - 1], false);
            place(&mut coherence, r * low, (i - 1) * s, &restrict[j - 2], true);
        }
        let m = rho.matrix(&c1, k)?;
        let dim = target.basis(n).dim(k);
        let faces: Vec<Matrix> = (1..=n)
            .map(|i| {
                let cols = (0..dim).map(|c| target.face(i, n, k, &unit_vector(dim, c))).collect::<Result<Vec<_>>>()?;
                Matrix::from_columns(&cols, m.rows())
            })
            .collect::<Result<_>>()?;
        let mut rho_rows = Matrix::zeros(n * m.rows(), unknowns);
        for i in 0..n {
            place(&mut rho_rows, i * m.rows(), i * s, &m, false);
            place(&mut rho_rows, i * m.rows(), n * s, &faces[i].mul(extra)?, true);
        }
        Ok(RestrictionSystem { n, s, c1, chain, coherence, rho: rho_rows, faces })
    }

    fn rhs(&self, stage: &FreeStage, d: &TreeVector, value: &[Scalar]) -> Result<(Vector, Vector, Vector)> {
        let mut chain = Vec::new();
        for i in 1..=self.n {
            chain.extend(self.c1.coordinates(&stage.restriction(i, d)?));
        }
        let mut rho = Vec::new();
        for f in &self.faces {
            rho.extend(f.mul_vec(value)?);
        }
        Ok((chain, zero_vector(self.coherence.rows()), rho))
    }
}

fn place(m: &mut Matrix, row: usize, col: usize, block: &Matrix, negate: bool) {
    for r in 0..block.rows() {
        for c in 0..block.cols() {
            let x = block.get(r, c);
            if !x.is_zero() {
                let cur = m.get(row + r, col + c).clone();
                m.set(row + r, col + c, if negate { cur - x } else { cur + x });
            }
        }
    }
}

fn flag_for(kind: GeneratorKind) -> Flag<'static> {
    match kind {
        GeneratorKind::Cocycle => Flag::Coboundary,
        GeneratorKind::KernelKilling => Flag::Cocycle,
    }
}

/// Restrictions `δ_i e` for every generator of a block, solving the chain,
/// coherence and `ρ` equations jointly per generator and averaging over Σ_n.
///
/// The `ρ` equation is solved up to `δ_i c`, with `c` a coboundary (cocycle
/// generators) or a cocycle (kernel-killing ones) of the target; the
/// remaining discrepancy is removed by [`unitary_section_correction`].
pub fn assign_generator_restrictions(rho: &StageMorphism, block: &GeneratorBlock) -> Result<Vec<Vec<TreeVector>>> {
    let (n, k) = (block.arity, block.degree);
    let stage = rho.source();
    let target = rho.target().as_ref();
    let extra = match block.kind {
        GeneratorKind::Cocycle => kernel_and_image(&target.differential_block(n, k - 1)).1.as_columns(),
        GeneratorKind::KernelKilling => kernel_and_image(&target.differential_block(n, k)).0.as_columns(),
    };
    let sys = RestrictionSystem::new(rho, n, k, &extra)?;
    let full = sys.chain.vstack(&sys.coherence)?.vstack(&sys.rho)?;
    let s = sys.s;
    let mut raw = Vec::with_capacity(block.dim());
    for (b, (d, value)) in block.differential.iter().zip(&block.values).enumerate() {
        let (rc, rh, rr) = sys.rhs(stage, d, value)?;
        let rhs: Vector = rc.iter().chain(&rh).chain(&rr).cloned().collect();
        let Some(x) = solve(&full, &rhs) else {
            let group = if solve(&sys.chain, &rc).is_none() {
                "chain"
            } else if solve(&sys.chain.vstack(&sys.coherence)?, &rc.iter().chain(&rh).cloned().collect::<Vec<_>>()).is_none() {
                "coherence"
            } else {
                "ρ-compatibility"
            };
            return Err(Error::Infeasible(format!(
                "restrictions of generator {b} in arity {n}, degree {k}: the {group} equations have no solution"
            )));
        };
        raw.push(x[..n * s].to_vec());
    }
    let c1 = &sys.c1;
    let tuple_act = |sigma: &Perm, xs: &[Scalar]| -> Result<Vector> {
        let mut out = Vec::with_capacity(xs.len());
        for i in 0..n {
            let (j, f) = sigma.face(i);
            out.extend(stage_act(stage, c1, k, &f, &xs[j * s..(j + 1) * s])?);
        }
        Ok(out)
    };
    let averaged = if raw.is_empty() || s == 0 {
        raw
    } else {
        average_equivariant(n, &raw, |p, v| block.act(p, v), tuple_act)?
    };
    let constraints = sys.chain.vstack(&sys.coherence)?;
    let cols = constraints.cols();
    let mut out = Vec::with_capacity(averaged.len());
    for (d, x) in block.differential.iter().zip(&averaged) {
        let (rc, rh, _) = sys.rhs(stage, d, &zero_vector(target.basis(n).dim(k)))?;
        let mut padded = x.clone();
        padded.resize(cols, Scalar::zero());
        let lhs = constraints.mul_vec(&padded)?;
        let want: Vector = rc.into_iter().chain(rh).collect();
        if lhs != want {
            return Err(Error::Internal(format!("averaged restrictions in arity {n} break the chain or coherence equations")));
        }
        out.push((0..n).map(|i| c1.vector(k, &x[i * s..(i + 1) * s])).collect());
    }
    Ok(out)
}

/// Replaces the values `ρ(e)` of a block by `ρ(e) − L(e)`, where `L` is an
/// equivariant filler of the differences `δ_i ρ(e) − ρ(δ_i e)`; afterwards
/// `δ_i ρ(e) = ρ(δ_i e)` for every generator and slot.
///
/// The filler is a coboundary for cocycle generators, so the classes they
/// represent do not move, and a cocycle for kernel-killing generators, so
/// `d ρ(e) = ρ(d e)` survives.
pub fn unitary_section_correction(
    rho: &StageMorphism,
    block: &GeneratorBlock,
    restrictions: &[Vec<TreeVector>],
) -> Result<Vec<Vector>> {
    let (n, k) = (block.arity, block.degree);
    let target = rho.target().as_ref();
    let lower = |x: &TreeVector| -> Result<Vector> { Ok(target.block(n - 1, k, &rho.evaluate(x)?)) };
    let mut families = Vec::with_capacity(block.dim());
    let mut wanted = Vec::with_capacity(block.dim());
    for (value, xs) in block.values.iter().zip(restrictions) {
        let images = xs.iter().map(lower).collect::<Result<Vec<_>>>()?;
        let members = (0..n)
            .map(|i| Ok(sub_vectors(&target.face(i + 1, n, k, value)?, &images[i])))
            .collect::<Result<Vec<_>>>()?;
        families.push(FaceFamily { n, degree: k, members });
        wanted.push(images);
    }
    if families.iter().all(|f| f.members.iter().all(|m| is_zero_vector(m))) {
        return Ok(block.values.clone());

    }
    let fillers = fill_equivariant(target, n, k, &families, |p, v| block.act(p, v), &[flag_for(block.kind)])?;
    let mut out = Vec::with_capacity(block.dim());
    for ((value, l), images) in block.values.iter().zip(&fillers).zip(&wanted) {
        let corrected = sub_vectors(value, l);
        for (i, img) in images.iter().enumerate() {
            if &target.face(i + 1, n, k, &corrected)? != img {
                return Err(Error::Internal(format!("corrected value fails δ_{} in arity {n}", i + 1)));
            }
        }
        out.push(corrected);
    }
    Ok(out)
}

/// Labels `e{n}.{j}`, numbered in flattened order.
fn assemble_module(n: usize, blocks: &[GeneratorBlock]) -> Result<SigmaModule> {
    let mut degrees: BTreeMap<i32, Vec<String>> = BTreeMap::new();
    let mut transpositions: BTreeMap<i32, Vec<Matrix>> = BTreeMap::new();
    let mut j = 0;
    for b in blocks {
        let labels = degrees.entry(b.degree).or_default();
        let offset = labels.len();
        for _ in 0..b.dim() {
            labels.push(format!("e{n}.{j}"));
            j += 1;
        }
        let mats = transpositions.entry(b.degree).or_insert_with(|| vec![Matrix::zeros(0, 0); n - 1]);
        for (m, t) in mats.iter_mut().zip(&b.transpositions) {
            let size = offset + b.dim();
            let mut grown = Matrix::zeros(size, size);
            place(&mut grown, 0, 0, m, false);
            place(&mut grown, offset, offset, t, false);
            *m = grown;
        }
    }
    SigmaModule::new(GradedBasis::new(n, degrees)?, SigmaAction { transpositions })
}

/// Extends a model complete up to arity `n - 1` to arity `n`.
pub fn inductive_step(model: &StagedModel, n: usize) -> Result<StagedModel> {
    if model.completed_arity + 1 != n {
        return Err(Error::Dimension(format!("model is complete to arity {}, cannot step to {n}", model.completed_arity)));
    }
    let rho = &model.rho;
    let target: Arc<FiniteDgOperad> = rho.target().clone();
    if n > target.max_arity() {
        return Err(Error::Dimension(format!("target is truncated below arity {n}")));
    }
    let mut blocks = new_generator_blocks(rho, n)?;
    let mut restrictions = Vec::new();
    if model.mode == Mode::Unitary {
        for b in &mut blocks {
            let r = assign_generator_restrictions(rho, b)?;
            b.values = unitary_section_correction(rho, b, &r)?;
            restrictions.extend(r);
        }
    }
    let module = assemble_module(n, &blocks)?;
    let d: Vec<TreeVector> = blocks.iter().flat_map(|b| b.differential.iter().cloned()).collect();
    let stage = rho.source();
    let extended = if module.basis.is_empty() {
        stage.clone()
    } else if model.mode == Mode::Unitary {
        stage.make_unitary_principal_extension(n, module, d, restrictions)?
    } else {
        stage.make_principal_extension(n, module, d)?
    };
    let mut values = rho.values().to_vec();
    for b in &blocks {
        values.extend(b.values.iter().map(|v| target.unblock(n, b.degree, v)));
    }
    let next = StageMorphism::new(extended, target, values)?;
    let mut post = next.check_chain_map();
    post.merge(next.check_equivariance());
    post.merge(next.check_restrictions());
    let complex = ArityComplex::new(next.source(), n);
    for (k, h) in next.induced_maps(&complex)? {
        post.check("quasi_iso", h.is_iso(), || format!("arity {n}, degree {k} is still not an isomorphism"));
    }
    if let Some(c) = post.failed().next() {
        return Err(Error::Internal(format!("postcondition `{}` failed after arity {n}: {}", c.name, c.failures.join("; "))));
    }
    Ok(StagedModel { mode: model.mode, rho: next, completed_arity: n })
}
