//! Model files. Generators are listed per arity and degree; each label maps
//! to its differential, its restrictions (unitary mode) and its value in the
//! target. Builtin targets are stored by name and rebuilt on load.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{MinimalModel, Mode, Provenance, StagedModel, Target, TargetSource};
use crate::dgoperad::json::{matrix_from_json, matrix_to_json, MatrixJson, OperadJson};
use crate::dgoperad::{Builtin, FiniteDgOperad, StageMorphism};
use crate::error::{Error, Result};
use crate::exactla::{format_scalar, parse_scalar};
use crate::freeop::json::TermJson;
use crate::freeop::{AttachedGenerators, FreeStage};
use crate::report::Report;
use crate::symmod::{GradedBasis, SigmaAction, SigmaModule};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetJson {
    Builtin(String),
    Inline(Box<OperadJson>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelJson {
    pub mode: Mode,
    pub target: TargetJson,
    pub max_arity: usize,
    pub generators: BTreeMap<usize, BTreeMap<i32, Vec<String>>>,
    /// Adjacent transpositions on each degree of each generator module.
    pub actions: BTreeMap<usize, BTreeMap<i32, Vec<MatrixJson>>>,
    pub differential: BTreeMap<String, Vec<TermJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restrictions: Option<BTreeMap<String, Vec<Vec<TermJson>>>>,
    pub rho: BTreeMap<String, Vec<String>>,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<Report>,
}

impl MinimalModel {
    pub fn to_json(&self, report: Option<&Report>) -> ModelJson {
        let stage = self.stage();
        let rho = self.rho();
        let target = match &self.source {
            TargetSource::Builtin(b) => TargetJson::Builtin(b.name().to_string()),
            TargetSource::Inline => TargetJson::Inline(Box::new(rho.target().to_json())),
        };
        let mut generators = BTreeMap::new();
        let mut actions = BTreeMap::new();
        for n in stage.generator_arities().collect::<Vec<_>>() {
            let m = stage.module(n).expect("arity with generators has a module");
            generators.insert(n, m.basis.by_degree().clone());
            actions.insert(
                n,
                m.action.transpositions.iter().map(|(k, ms)| (*k, ms.iter().map(matrix_to_json).collect())).collect(),
            );
        }
        let mut differential = BTreeMap::new();
        let mut restrictions = BTreeMap::new();
        let mut values = BTreeMap::new();
        for (id, g) in stage.generators() {
            differential.insert(g.label.clone(), stage.vector_to_json(&g.differential));
            if stage.is_unitary() {
                restrictions.insert(g.label.clone(), g.restrictions.iter().map(|x| stage.vector_to_json(x)).collect());
            }
            values.insert(g.label.clone(), rho.value(id).iter().map(format_scalar).collect());
        }
        ModelJson {
            mode: self.mode(),
            target,
            max_arity: self.max_arity(),
            generators,
            actions,
            differential,
            restrictions: stage.is_unitary().then_some(restrictions),
            rho: values,
            provenance: self.provenance.clone(),
            report: report.cloned(),
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json_string(&self, report: Option<&Report>) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json(report)).expect("model json serializes");
        s.push('\n');
        s
    }

    /// Rebuilds a model without checking it; run
    /// [`verify_minimal_model`](super::verify_minimal_model) afterwards.
    pub fn from_json(j: &ModelJson) -> Result<Self> {
        let (operad, source) = match &j.target {
            TargetJson::Builtin(name) => {
                let b: Builtin = name.parse()?;
                (b.build(j.max_arity.max(2))?, TargetSource::Builtin(b))
            }
            TargetJson::Inline(o) => (FiniteDgOperad::from_json(o)?, TargetSource::Inline),
        };
        let target = Target { operad: std::sync::Arc::new(operad), source };
        let unitary = j.mode == Mode::Unitary;
        if unitary != j.restrictions.is_some() {
            return Err(Error::Parse(format!("restriction data does not match mode {}", j.mode)));
        }
        let mut parts: Vec<(usize, AttachedGenerators)> = Vec::new();
        let mut stage = FreeStage::trivial(unitary);
        for (&n, degrees) in &j.generators {
            if n < 2 || n > j.max_arity {
                return Err(Error::Parse(format!("generators in arity {n} outside 2..={}", j.max_arity)));
            }
            let basis = GradedBasis::new(n, degrees.clone())?;
            let mut transpositions = BTreeMap::new();
            for (k, ms) in j.actions.get(&n).into_iter().flatten() {
                let d = basis.dim(*k);
                let mats = ms
                    .iter()
                    .map(|m| matrix_from_json(m, d, d, &format!("action of arity {n}, degree {k}")))
                    .collect::<Result<Vec<_>>>()?;
                transpositions.insert(*k, mats);
            }
            let module = SigmaModule::new(basis, SigmaAction { transpositions })?;
            let labels: Vec<String> = module.basis.flat_labels().into_iter().map(String::from).collect();
            let mut d = Vec::new();
            let mut rs = Vec::new();
            for label in &labels {
                let (k, _) = module.basis.position(label).expect("label from this basis");
                let terms = j.differential.get(label).ok_or_else(|| Error::Parse(format!("no differential for `{label}`")))?;
                d.push(stage.vector_from_json(terms, n, k + 1)?);
                if let Some(all) = &j.restrictions {
                    let row = all.get(label).ok_or_else(|| Error::Parse(format!("no restrictions for `{label}`")))?;
                    if row.len() != n {
                        return Err(Error::Parse(format!("`{label}` has {} restrictions, expected {n}", row.len())));
                    }
                    rs.push(row.iter().map(|t| stage.vector_from_json(t, n - 1, k)).collect::<Result<Vec<_>>>()?);
                }
            }
            parts.push((n, AttachedGenerators { module, differential: d, restrictions: unitary.then_some(rs) }));
            stage = FreeStage::from_parts(unitary, parts.clone())?;
        }
        let mut values = vec![Vec::new(); stage.generators().count()];
        for (id, g) in stage.generators() {
            let v = j.rho.get(&g.label).ok_or_else(|| Error::Parse(format!("no value for `{}`", g.label)))?;
            values[id.0 as usize] = v.iter().map(|s| parse_scalar(s)).collect::<Result<Vec<_>>>()?;
        }
        let extra: Vec<&String> = j.rho.keys().filter(|l| stage.id_of(l).is_none()).collect();
        if let Some(l) = extra.first() {
            return Err(Error::Parse(format!("value given for unknown generator `{l}`")));
        }
        let rho = StageMorphism::new(stage, target.operad.clone(), values)?;
        let model = StagedModel { mode: j.mode, rho, completed_arity: j.max_arity };
        let mut out = MinimalModel::new(model, target.source);
        out.provenance = j.provenance.clone();
        Ok(out)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: ModelJson = serde_json::from_str(s)?;
        Self::from_json(&j)
    }
}
