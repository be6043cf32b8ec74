use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{MinimalModel, Mode};
use crate::exactla::Scalar;
use crate::freeop::{ArityComplex, FreeStage, Tree, TreeVector};
use crate::perm::Perm;
use crate::report::Report;
use crate::symmod::validate_sigma_module;

const LEIBNIZ_SAMPLES: usize = 200;
const LEIBNIZ_SEED: u64 = 0x5eed_0f1e;

fn one() -> Scalar {
    Scalar::from_integer(1.into())
}

fn check_d_squared(stage: &FreeStage, max: usize, r: &mut Report) -> Vec<Vec<Tree>> {
    r.pass("d_squared");
    let mut bases = vec![Vec::new(); max + 1];
    for n in 1..=max {
        let c = ArityComplex::new(stage, n);
        for k in c.degrees().collect::<Vec<_>>() {
            let dd = c.differential_block(k + 1).mul(&c.differential_block(k)).expect("composable blocks");
            for col in 0..dd.cols() {
                if dd.column(col).iter().any(|x| !num_traits::Zero::is_zero(x)) {
                    let t = &c.basis[&k][col];
                    r.fail("d_squared", format!("∂∂ {} ≠ 0", stage.format_tree(t)));
                }
            }
        }
        bases[n] = c.basis.into_values().flatten().collect();
    }
    bases
}

fn check_leibniz(stage: &FreeStage, bases: &[Vec<Tree>], r: &mut Report) {
    r.pass("leibniz");
    let max = bases.len() - 1;
    let pairs: Vec<(usize, usize)> = (1..=max)
        .flat_map(|m| (1..=max).map(move |q| (m, q)))
        .filter(|&(m, q)| m + q - 1 <= max && !bases[m].is_empty() && !bases[q].is_empty())
        .collect();
    if pairs.is_empty() {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(LEIBNIZ_SEED);
    for _ in 0..LEIBNIZ_SAMPLES {
        let (m, q) = pairs[rng.gen_range(0..pairs.len())];
        let a = stage.vector_of(bases[m][rng.gen_range(0..bases[m].len())].clone(), one());
        let b = stage.vector_of(bases[q][rng.gen_range(0..bases[q].len())].clone(), one());
        let i = rng.gen_range(1..=m);
        let res = (|| -> crate::Result<bool> {
            let lhs = stage.differential(&stage.partial_compose(&a, i, &b)?);
            let sign = if a.degree() % 2 == 0 { one() } else { -one() };
            let mut rhs = stage.partial_compose(&stage.differential(&a), i, &b)?;
            rhs.add_scaled(&sign, &stage.partial_compose(&a, i, &stage.differential(&b))?);
            Ok(lhs == rhs || (lhs.is_zero() && rhs.is_zero()))
        })();
        match res {
            Ok(true) => {}
            Ok(false) => r.fail(
                "leibniz",
                format!("∂({} ∘_{i} {}) breaks the Leibniz rule", stage.format_vector(&a), stage.format_vector(&b)),
            ),
            Err(e) => r.fail("leibniz", e.to_string()),
        }
    }
}

fn check_minimality(stage: &FreeStage, r: &mut Report) {
    r.pass("minimality");
    for (_, g) in stage.generators() {
        r.check("minimality", FreeStage::is_decomposable(&g.differential), || {
            format!("∂{} has a linear part", g.label)
        });
    }
}

fn check_modules(stage: &FreeStage, r: &mut Report) {
    r.pass("equivariance");
    for n in stage.generator_arities().collect::<Vec<_>>() {
        if let Some(m) = stage.module(n) {
            for c in validate_sigma_module(m).failed() {
                r.fail("equivariance", format!("generators of arity {n}: {} {}", c.name, c.failures.join("; ")));
            }
        }
    }
    for (id, g) in stage.generators() {
        for p in 0..g.arity - 1 {
            let s = Perm::adjacent(g.arity, p);
            let mut lhs = TreeVector::zero(g.arity, g.degree + 1);
            for (h, c) in stage.act_generator(id, &s).iter() {
                lhs.add_scaled(c, &stage.generator(*h).differential);
            }
            match stage.act(&s, &g.differential) {
                Ok(rhs) => r.check("equivariance", lhs == rhs || (lhs.is_zero() && rhs.is_zero()), || {
                    format!("∂(s_{}·{}) ≠ s_{0}·∂{1}", p + 1, g.label)
                }),
                Err(e) => r.fail("equivariance", e.to_string()),
            }
        }
    }
}

fn check_restriction_data(stage: &FreeStage, r: &mut Report) {
    r.pass("restriction_chain");
    r.pass("lambda_coherence");
    for (id, g) in stage.generators() {
        let n = g.arity;
        if g.restrictions.len() != n {
            r.fail("restriction_chain", format!("{} has {} restrictions", g.label, g.restrictions.len()));
            continue;
        }
        for (i, x) in g.restrictions.iter().enumerate() {
            match stage.restriction(i + 1, &g.differential) {
                Ok(rhs) => {
                    let lhs = stage.differential(x);
                    r.check("restriction_chain", lhs == rhs || (lhs.is_zero() && rhs.is_zero()), || {
                        format!("∂δ_{}{} ≠ δ_{0}∂{1}", i + 1, g.label)
                    })
                }
                Err(e) => r.fail("restriction_chain", e.to_string()),
            }
        }
        if n >= 2 {
            for j in 2..=n {
                for i in 1..j {
                    let lhs = stage.restriction(i, &g.restrictions[j - 1]);
                    let rhs = stage.restriction(j - 1, &g.restrictions[i - 1]);
                    match (lhs, rhs) {
                        (Ok(l), Ok(rv)) => r.check("lambda_coherence", l == rv || (l.is_zero() && rv.is_zero()), || {
                            format!("δ_{i}δ_{j}{0} ≠ δ_{1}δ_{i}{0}", g.label, j - 1)
                        }),
                        (Err(e), _) | (_, Err(e)) => r.fail("lambda_coherence", e.to_string()),
                    }
                }
            }
        }
        for p in 0..n - 1 {
            let s = Perm::adjacent(n, p);
            let moved = stage.act_generator(id, &s);
            for i in 0..n {
                let mut lhs = TreeVector::zero(n - 1, g.degree);
                for (h, c) in moved.iter() {
                    lhs.add_scaled(c, &stage.generator(*h).restrictions[i]);
                }
                let (j, f) = s.face(i);
                match stage.act(&f, &g.restrictions[j]) {
                    Ok(rhs) => r.check("equivariance", lhs == rhs || (lhs.is_zero() && rhs.is_zero()), || {
                        format!("δ_{}(s_{}·{}) ≠ s⁽ⁱ⁾·δ_{}{2}", i + 1, p + 1, g.label, j + 1)
                    }),
                    Err(e) => r.fail("equivariance", e.to_string()),
                }
            }
        }
    }
}

/// Re-checks every invariant of a model. Never fails; failures are reported.
pub fn verify_minimal_model(model: &MinimalModel) -> Report {
    let stage = model.stage();
    let rho = model.rho();
    let max = model.max_arity();
    let mut r = Report::new();
    let bases = check_d_squared(stage, max, &mut r);
    check_leibniz(stage, &bases, &mut r);
    check_minimality(stage, &mut r);
    check_modules(stage, &mut r);
    r.merge(rho.check_chain_map());
    r.merge(rho.check_equivariance());
    if model.mode() == Mode::Unitary {
        check_restriction_data(stage, &mut r);
        r.merge(rho.check_restrictions());
    }
    r.merge(rho.is_quasi_iso_upto(max));
    r
}
