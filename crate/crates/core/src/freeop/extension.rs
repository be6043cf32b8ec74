//! Principal extensions `P ⊔_d Γ(E)` and their unitary variant.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_traits::Zero;

use super::{ArityModule, FreeStage, GenId, Generator, TreeVector};
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::symmod::{validate_sigma_module, SigmaModule};

/// Generators attached in one arity, in flattened order (ascending degree, then position).
#[derive(Clone, Debug)]
pub struct AttachedGenerators {
    pub module: SigmaModule,
    pub differential: Vec<TreeVector>,
    pub restrictions: Option<Vec<Vec<TreeVector>>>,
}

impl FreeStage {
    /// `P ⊔_d Γ(E)`: checks that `d` lands in cocycles of degree `|e| + 1`
    /// and is Σ_n-equivariant.
    pub fn make_principal_extension(&self, n: usize, module: SigmaModule, d: Vec<TreeVector>) -> Result<FreeStage> {
        self.check_plain(n, &module, &d)?;
        self.attach(n, AttachedGenerators { module, differential: d, restrictions: None })
    }

    /// Unitary principal extension: additionally checks, for every generator
    /// `e` and slot `i`, that `∂(δ_i e) = δ_i(d e)`, that
    /// `δ_i δ_j e = δ_{j-1} δ_i e` for `i < j`, and that the restriction
    /// values transform correctly under Σ_n.
    pub fn make_unitary_principal_extension(
        &self,
        n: usize,
        module: SigmaModule,
        d: Vec<TreeVector>,
        restrictions: Vec<Vec<TreeVector>>,
    ) -> Result<FreeStage> {
        if !self.unitary {
            return Err(Error::NotUnitary("unitary extension of a non-unitary stage".into()));
        }
        self.check_plain(n, &module, &d)?;
        let labels: Vec<&str> = module.basis.flat_labels();
        if restrictions.len() != labels.len() {
            return Err(Error::InvalidExtension(format!(
                "{} restriction rows for {} generators",
                restrictions.len(),
                labels.len()
            )));
        }
        let degrees: Vec<i32> = (0..labels.len()).map(|k| module.basis.degree_of_flat(k).unwrap()).collect();
        for (k, row) in restrictions.iter().enumerate() {
            let label = labels[k];
            if row.len() != n {
                return Err(Error::InvalidExtension(format!("`{label}` needs {n} restriction values, got {}", row.len())));
            }
            for (i, x) in row.iter().enumerate() {
                if x.arity() != n - 1 || (!x.is_zero() && x.degree() != degrees[k]) {
                    return Err(Error::InvalidExtension(format!(
                        "δ_{}({label}) must have arity {} and degree {}",
                        i + 1,
                        n - 1,
                        degrees[k]
                    )));
                }
                self.check_known(x, label)?;
                let lhs = self.differential(x);
                let rhs = self.restriction(i + 1, &d[k])?;
                if !lhs.sub(&rhs).is_zero() {
                    return Err(Error::InvalidExtension(format!(
                        "chain compatibility ∂(δ_{0} e) = δ_{0}(d e) fails for ({label}, {0})",
                        i + 1
                    )));
                }
            }
            for j in 2..=n {
                for i in 1..j {
                    let lhs = self.restriction(i, &row[j - 1])?;
                    let rhs = self.restriction(j - 1, &row[i - 1])?;
                    if !lhs.sub(&rhs).is_zero() {
                        return Err(Error::InvalidExtension(format!(
                            "Λ-coherence δ_{i}δ_{j} = δ_{}δ_{i} fails for ({label}, {i}, {j})",
                            j - 1
                        )));
                    }
                }
            }
        }
        // δ_i(s·e) = s⁽ⁱ⁾·δ_{s⁻¹(i)}(e) for adjacent transpositions s
        for p in 0..n.saturating_sub(1) {
            let s = Perm::adjacent(n, p);
            for (k, label) in labels.iter().enumerate() {
                let deg = degrees[k];
                let pos = k - module.basis.offset(deg);
                let col = module.act_permutation(&s, &crate::exactla::unit_vector(module.basis.dim(deg), pos), deg)?;
                for i in 0..n {
                    let mut lhs = TreeVector::zero(n - 1, deg);
                    for (b, c) in col.iter().enumerate() {
                        if !c.is_zero() {
                            lhs.add_scaled(c, &restrictions[module.basis.offset(deg) + b][i]);
                        }
                    }
                    let (j, face) = s.face(i);
                    let rhs = self.act(&face, &restrictions[k][j])?;
                    if !lhs.sub(&rhs).is_zero() {
                        return Err(Error::InvalidExtension(format!(
                            "restriction δ_{} of `{label}` is not compatible with s_{}",
                            i + 1,
                            p + 1
                        )));
                    }
                }
            }
        }
        self.attach(n, AttachedGenerators { module, differential: d, restrictions: Some(restrictions) })
    }

    fn check_known(&self, v: &TreeVector, context: &str) -> Result<()> {
        for (t, _) in v.terms() {
            for g in t.decorations() {
                if g.0 as usize >= self.gens.len() {
                    return Err(Error::InvalidExtension(format!("value for `{context}` uses an unknown generator")));
                }
            }
        }
        Ok(())
    }

    fn check_plain(&self, n: usize, module: &SigmaModule, d: &[TreeVector]) -> Result<()> {
        if n < 2 {
            return Err(Error::InvalidExtension(format!("generators in arity {n} are forbidden")));
        }
        if module.arity() != n {
            return Err(Error::InvalidExtension(format!("module of arity {} attached in arity {n}", module.arity())));
        }
        if module.basis.is_empty() {
            return Ok(());
        }
        if self.max_generator_arity() >= n {
            return Err(Error::InvalidExtension(format!(
                "stage already has generators in arity {} ≥ {n}",
                self.max_generator_arity()
            )));
        }
        let report = validate_sigma_module(module);
        if !report.is_ok() {
            return Err(Error::InvalidExtension(format!("generator module is not a Σ_{n}-module: {:?}", report.checks)));
        }
        let labels = module.basis.flat_labels();
        for l in &labels {
            if self.by_label.contains_key(*l) {
                return Err(Error::InvalidExtension(format!("label `{l}` already in use")));
            }
        }
        if d.len() != labels.len() {
            return Err(Error::InvalidExtension(format!("{} differentials for {} generators", d.len(), labels.len())));
        }
        for (k, (label, de)) in labels.iter().zip(d).enumerate() {
            let deg = module.basis.degree_of_flat(k).unwrap();
            if de.arity() != n || (!de.is_zero() && de.degree() != deg + 1) {
                return Err(Error::InvalidExtension(format!(
                    "d({label}) must have arity {n} and degree {}",
                    deg + 1
                )));
            }
            self.check_known(de, label)?;
            if !self.differential(de).is_zero() {
                return Err(Error::InvalidExtension(format!("d({label}) is not a cocycle")));
            }
        }
        for p in 0..n - 1 {
            let s = Perm::adjacent(n, p);
            for (k, label) in labels.iter().enumerate() {
                let deg = module.basis.degree_of_flat(k).unwrap();
                let off = module.basis.offset(deg);
                let col =
                    module.act_permutation(&s, &crate::exactla::unit_vector(module.basis.dim(deg), k - off), deg)?;
                let mut lhs = TreeVector::zero(n, deg + 1);
                for (b, c) in col.iter().enumerate() {
                    if !c.is_zero() {
                        lhs.add_scaled(c, &d[off + b]);
                    }
                }
                let rhs = self.act(&s, &d[k])?;
                if !lhs.sub(&rhs).is_zero() {
                    return Err(Error::InvalidExtension(format!("d is not equivariant at `{label}` under s_{}", p + 1)));
                }
            }
        }
        Ok(())
    }

    fn attach(&self, n: usize, data: AttachedGenerators) -> Result<FreeStage> {
        if data.module.basis.is_empty() {
            return Ok(self.clone());
        }
        let mut out = FreeStage {
            unitary: self.unitary,
            gens: self.gens.clone(),
            by_label: self.by_label.clone(),
            modules: self.modules.clone(),
            cache: Arc::new(Mutex::new(Default::default())),
        };
        let mut ids: BTreeMap<i32, Vec<GenId>> = BTreeMap::new();
        let labels: Vec<String> = data.module.basis.flat_labels().into_iter().map(String::from).collect();
        for (k, label) in labels.into_iter().enumerate() {
            let degree = data.module.basis.degree_of_flat(k).unwrap();
            let position = k - data.module.basis.offset(degree);
            let id = GenId(out.gens.len() as u32);
            if out.by_label.insert(label.clone(), id).is_some() {
                return Err(Error::InvalidExtension(format!("label `{label}` already in use")));
            }
            ids.entry(degree).or_default().push(id);
            let restrictions = data.restrictions.as_ref().map(|r| r[k].clone()).unwrap_or_default();
            out.gens.push(Arc::new(Generator {
                label,
                arity: n,
                degree,
                position,
                differential: data.differential[k].clone(),
                restrictions,
            }));
        }
        out.modules.insert(n, Arc::new(ArityModule { module: data.module, ids }));
        Ok(out)
    }

    /// Rebuilds a stage from stored generator data without re-checking
    /// compatibility; used when loading models that are verified afterwards.
    pub fn from_parts(unitary: bool, parts: Vec<(usize, AttachedGenerators)>) -> Result<FreeStage> {
        let mut stage = FreeStage::trivial(unitary);
        for (n, data) in parts {
            if n < 2 || data.module.arity() != n {
                return Err(Error::InvalidExtension(format!("generators in arity {n} are forbidden")));
            }
            if data.differential.len() != data.module.basis.total_dim() {
                return Err(Error::InvalidExtension(format!("arity {n}: differential count mismatch")));
            }
            if unitary != data.restrictions.is_some() {
                return Err(Error::InvalidExtension(format!("arity {n}: restriction data does not match the mode")));
            }
            stage = stage.attach(n, data)?;
        }
        Ok(stage)
    }

    /// True when every tree of `v` has at least two vertices.
    pub fn is_decomposable(v: &TreeVector) -> bool {
        v.terms().all(|(t, _)| t.vertex_count() >= 2)
    }
}
