//! Minimal models built one arity at a time.
//!
//! Arity `n` receives cocycle generators for the classes of `H(P(n))` not yet
//! hit by `ρ`, and generators of one degree less whose differential kills the
//! classes `ρ` sends to zero. In unitary mode every new generator also gets
//! restrictions `δ_i e` in the stage, and `ρ(e)` is corrected by an
//! equivariant Kan filler so that `ρ` commutes with them.

pub mod json;
mod step;
mod verify;

#[cfg(test)]
mod tests;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dgoperad::{Builtin, FiniteDgOperad, StageMorphism};
use crate::error::{Error, Result};
use crate::freeop::{ArityComplex, FreeStage};

pub use step::{
    assign_generator_restrictions, inductive_step, new_generator_blocks, unitary_section_correction, GeneratorBlock,
    GeneratorKind,
};
pub use verify::verify_minimal_model;

/// Version of the sign and ordering conventions written into model files.
pub const CONVENTIONS: &str = "opminimal-conventions/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    NonUnitary,
    Unitary,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::NonUnitary => "non-unitary",
            Mode::Unitary => "unitary",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "non-unitary" | "non_unitary" | "nonunitary" => Ok(Mode::NonUnitary),
            "unitary" => Ok(Mode::Unitary),
            _ => Err(Error::Parse(format!("unknown mode `{s}` (expected `unitary` or `non-unitary`)"))),
        }
    }
}

/// Where a target operad came from; builtins are stored by name in model files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TargetSource {
    Builtin(Builtin),
    Inline,
}

#[derive(Clone, Debug)]
pub struct Target {
    pub operad: Arc<FiniteDgOperad>,
    pub source: TargetSource,
}

impl Target {
    pub fn builtin(b: Builtin, max_arity: usize) -> Result<Self> {
        Ok(Target { operad: Arc::new(b.build(max_arity)?), source: TargetSource::Builtin(b) })
    }

    pub fn inline(operad: FiniteDgOperad) -> Self {
        Target { operad: Arc::new(operad), source: TargetSource::Inline }
    }

    pub fn name(&self) -> String {
        match &self.source {
            TargetSource::Builtin(b) => b.name().to_string(),
            TargetSource::Inline => "inline".to_string(),
        }
    }
}

/// A stage `P_n` with its map to the target, complete up to `completed_arity`.
#[derive(Clone, Debug)]
pub struct StagedModel {
    pub mode: Mode,
    pub rho: StageMorphism,
    pub completed_arity: usize,
}

impl StagedModel {
    pub fn stage(&self) -> &FreeStage {
        self.rho.source()
    }

    pub fn target(&self) -> &Arc<FiniteDgOperad> {
        self.rho.target()
    }

    /// Generator counts per arity and degree.
    pub fn dimensions(&self) -> BTreeMap<usize, BTreeMap<i32, usize>> {
        let mut out: BTreeMap<usize, BTreeMap<i32, usize>> = BTreeMap::new();
        for (_, g) in self.stage().generators() {
            *out.entry(g.arity).or_default().entry(g.degree).or_default() += 1;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub target: String,
    pub conventions: String,
    pub dimensions: BTreeMap<usize, BTreeMap<i32, usize>>,
}

#[derive(Clone, Debug)]
pub struct MinimalModel {
    pub model: StagedModel,
    pub source: TargetSource,
    pub provenance: Provenance,
}

impl MinimalModel {
    fn new(model: StagedModel, source: TargetSource) -> Self {
        let target = match &source {
            TargetSource::Builtin(b) => b.name().to_string(),
            TargetSource::Inline => "inline".to_string(),
        };
        let provenance =
            Provenance { target, conventions: CONVENTIONS.to_string(), dimensions: model.dimensions() };
        MinimalModel { model, source, provenance }
    }

    pub fn stage(&self) -> &FreeStage {
        self.model.stage()
    }

    pub fn rho(&self) -> &StageMorphism {
        &self.model.rho
    }

    pub fn mode(&self) -> Mode {
        self.model.mode
    }

    pub fn max_arity(&self) -> usize {
        self.model.completed_arity
    }
}

fn dims_text(dims: &BTreeMap<i32, usize>) -> String {
    if dims.is_empty() {
        return "0".to_string();
    }
    dims.iter().map(|(k, d)| format!("{d} in degree {k}")).collect::<Vec<_>>().join(", ")
}

/// `H(P(1)) = 𝕜·id`, and `H(P(0)) = 𝕜·pt` together with `m₂` in unitary mode.
pub fn check_hypotheses(target: &FiniteDgOperad, mode: Mode) -> Result<()> {
    let h1 = target.cohomology_dims(1)?;
    let z1 = target.arity_cohomology(1)?;
    let id_class = z1.get(&0).and_then(|h| h.class_of(&target.block(1, 0, &target.identity())));
    if h1 != BTreeMap::from([(0, 1)]) || id_class.is_none_or(|c| c.iter().all(num_traits::Zero::is_zero)) {
        return Err(Error::Hypothesis(format!("H(P(1)) must be spanned by the identity; it is {}", dims_text(&h1))));
    }
    if mode == Mode::Unitary {
        let Ok(point) = target.point() else {
            return Err(Error::Hypothesis("unitary mode needs a unit point in P(0); H(P(0)) = 0".into()));
        };
        let h0 = target.cohomology_dims(0)?;
        let z0 = target.arity_cohomology(0)?;
        let pt_class = z0.get(&0).and_then(|h| h.class_of(&target.block(0, 0, &point)));
        if h0 != BTreeMap::from([(0, 1)]) || pt_class.is_none_or(|c| c.iter().all(num_traits::Zero::is_zero)) {
            return Err(Error::Hypothesis(format!("H(P(0)) must be spanned by the point; it is {}", dims_text(&h0))));
        }
        target.m2().map_err(|e| Error::Hypothesis(e.to_string()))?;
    }
    let axioms = target.validate_operad_axioms(mode == Mode::Unitary);
    let failure = axioms.failed().next().map(|c| format!("target fails `{}`: {}", c.name, c.failures.join("; ")));
    failure.map_or(Ok(()), |f| Err(Error::Hypothesis(f)))
}

/// `Γ(E(2))` with `E(2) = H(P(2))` and `ρ₂` an (equivariant, δ-compatible) section.
pub fn base_step(target: Arc<FiniteDgOperad>, mode: Mode) -> Result<StagedModel> {
    check_hypotheses(&target, mode)?;
    let trivial = FreeStage::trivial(mode == Mode::Unitary);
    let rho = StageMorphism::new(trivial, target, Vec::new())?;
    let below = rho.is_quasi_iso_upto(1);
    if let Some(c) = below.failed().next() {
        return Err(Error::Hypothesis(c.failures.join("; ")));
    }
    inductive_step(&StagedModel { mode, rho, completed_arity: 1 }, 2)
}

/// The minimal model up to `max_arity`.
pub fn minimal_model(target: &Target, max_arity: usize, mode: Mode) -> Result<MinimalModel> {
    if max_arity < 2 {
        return Err(Error::Dimension("max_arity must be at least 2".into()));
    }
    if max_arity > target.operad.max_arity() {
        return Err(Error::Dimension(format!(
            "target is only known up to arity {}, asked for {max_arity}",
            target.operad.max_arity()
        )));
    }
    let mut model = base_step(target.operad.clone(), mode)?;
    for n in 3..=max_arity {
        model = inductive_step(&model, n)?;
    }
    Ok(MinimalModel::new(model, target.source.clone()))
}

/// Cohomology of the stage in one arity, for summaries.
pub fn stage_cohomology_dims(stage: &FreeStage, n: usize) -> Result<BTreeMap<i32, usize>> {
    let c = ArityComplex::new(stage, n);
    let mut out = BTreeMap::new();
    for k in c.degrees().collect::<Vec<_>>() {
        let d = c.cohomology(k)?.dim();
        if d > 0 {
            out.insert(k, d);
        }
    }
    Ok(out)
}
