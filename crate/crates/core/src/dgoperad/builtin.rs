use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exactla::{scalar, unit_vector};
use crate::perm::Perm;
use crate::symmod::{word_label, SigmaModule};

use super::{ArityComponent, CompositionTable, FiniteDgOperad};

/// The built-in targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Builtin {
    Ass,
    AssPlus,
    Com,
    ComPlus,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [Builtin::Ass, Builtin::AssPlus, Builtin::Com, Builtin::ComPlus];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Ass => "ass",
            Builtin::AssPlus => "ass_plus",
            Builtin::Com => "com",
            Builtin::ComPlus => "com_plus",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Builtin::Ass => "associative operad: regular Σ_n-representation in each arity n ≥ 1, degree 0",
            Builtin::AssPlus => "unitary associative operad: ass with P(0) = k and δ_i deleting input i",
            Builtin::Com => "commutative operad: trivial representation in each arity n ≥ 1, degree 0",
            Builtin::ComPlus => "unitary commutative operad: com with P(0) = k",
        }
    }

    pub fn is_unitary(self) -> bool {
        matches!(self, Builtin::AssPlus | Builtin::ComPlus)
    }

    /// The operad truncated at `max_arity ≥ 2`.
    pub fn build(self, max_arity: usize) -> Result<FiniteDgOperad> {
        if max_arity < 2 {
            return Err(Error::Dimension(format!("max_arity must be at least 2, got {max_arity}")));
        }
        match self {
            Builtin::Ass | Builtin::AssPlus => ass(max_arity, self.is_unitary()),
            Builtin::Com | Builtin::ComPlus => com(max_arity, self.is_unitary()),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Builtin::ALL.into_iter().find(|b| b.name() == s).ok_or_else(|| Error::UnknownBuiltin(s.to_string()))
    }
}

fn ass(max_arity: usize, unitary: bool) -> Result<FiniteDgOperad> {
    let perms: Vec<Vec<Perm>> = (0..=max_arity).map(Perm::all).collect();
    let index: Vec<HashMap<&Perm, usize>> =
        perms.iter().map(|ps| ps.iter().enumerate().map(|(i, p)| (p, i)).collect()).collect();
    let mut arities = Vec::new();
    for n in 0..=max_arity {
        arities.push(match n {
            0 if !unitary => ArityComponent::empty(0),
            0 => ArityComponent {
                module: SigmaModule::trivial(0, 0, vec!["u".into()])?,
                differential: BTreeMap::new(),
            },
            _ => ArityComponent { module: SigmaModule::regular(n, 0)?, differential: BTreeMap::new() },
        });
    }
    let present = |n: usize| n > 0 || unitary;
    let mut compositions = BTreeMap::new();
    for m in 1..=max_arity {
        for n in (0..=max_arity).filter(|&n| present(n) && m + n - 1 <= max_arity) {
            let rows = perms[m + n - 1].len();
            for i in 1..=m {
                let mut t = CompositionTable::new(rows, perms[m].len(), perms[n].len());
                for (x, w) in perms[m].iter().enumerate() {
                    let pos = w.inverse().apply(i - 1);
                    for (y, u) in perms[n].iter().enumerate() {
                        let r = index[m + n - 1][&w.block(pos, u)];
                        t.set(x, y, &unit_vector(rows, r));
                    }
                }
                compositions.insert((m, i, n), t);
            }
        }
    }
    let m2 = word_label(&Perm::identity(2));
    let unit1 = word_label(&Perm::identity(1));
    FiniteDgOperad::new(arities, compositions, unit1, unitary.then(|| "u".to_string()), Some(m2))
}

fn com(max_arity: usize, unitary: bool) -> Result<FiniteDgOperad> {
    let mut arities = Vec::new();
    for n in 0..=max_arity {
        arities.push(if n == 0 && !unitary {
            ArityComponent::empty(0)
        } else {
            ArityComponent { module: SigmaModule::trivial(n, 0, vec![format!("c{n}")])?, differential: BTreeMap::new() }
        });
    }
    let mut compositions = BTreeMap::new();
    for m in 1..=max_arity {
        for n in (0..=max_arity).filter(|&n| (n > 0 || unitary) && m + n - 1 <= max_arity) {
            for i in 1..=m {
                let mut t = CompositionTable::new(1, 1, 1);
                t.set(0, 0, &[scalar(1)]);
                compositions.insert((m, i, n), t);
            }
        }
    }
    FiniteDgOperad::new(arities, compositions, "c1".into(), unitary.then(|| "c0".to_string()), Some("c2".into()))
}
