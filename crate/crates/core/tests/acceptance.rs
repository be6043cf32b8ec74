//! Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use opminimal_core::exactla::{add_scaled, kernel_and_image, scalar, unit_vector, zero_vector, Matrix, Scalar, Vector};
use opminimal_core::freeop::ArityComplex;
use opminimal_core::kan::{self, FaceFamily, Flag, KanCarrier};
use opminimal_core::sullivan::{json::ModelJson, Target};
use opminimal_core::{
    minimal_model, verify_minimal_model, Builtin, FiniteDgOperad, FreeStage, MinimalModel, Mode, Perm, Tree,
};

mod common;

use common::{egf_counts, Dims};
type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dims(pairs: &[(usize, i32, usize)]) -> Dims {
    let mut out = Dims::new();
    for &(n, k, d) in pairs {
        out.entry(n).or_default().insert(k, d);
    }
    out
}

fn run(b: Builtin, max: usize, mode: Mode) -> Result<MinimalModel, String> {
    run_into(b, max, max, mode)
}

/// A model up to `max` of a target kept up to `truncation`, so oracles can look one arity ahead.
fn run_into(b: Builtin, truncation: usize, max: usize, mode: Mode) -> Result<MinimalModel, String> {
    let t = Target::builtin(b, truncation).map_err(|e| e.to_string())?;
    minimal_model(&t, max, mode).map_err(|e| format!("{b} up to {max}: {e}"))
}

/// `dim H^k` from ranks alone: `dim C^k − rank d_k − rank d_{k-1}`.
fn betti(c: &ArityComplex) -> BTreeMap<i32, usize> {
    let mut out = BTreeMap::new();
    for k in c.degrees().collect::<Vec<_>>() {
        let h = c.dim(k) - c.differential_block(k).rank() - c.differential_block(k - 1).rank();
        if h > 0 {
            out.insert(k, h);
        }
    }
    out
}

fn tree_counts(stage: &FreeStage, max: usize) -> Dims {
    let mut out = Dims::new();
    for n in 1..=max {
        for (k, ts) in stage.basis(n) {
            out.entry(n).or_default().insert(k, ts.len());
        }
    }
    out
}

/// Generator dimension of arity `n` from the kernel of `H(ρ)` computed by plain ranks,
/// for targets concentrated in degree 0 with zero differential.
fn kernel_oracle(model: &MinimalModel, n: usize) -> Result<BTreeMap<i32, usize>, String> {
    let stage = model.stage();
    let rho = model.rho();
    let c = ArityComplex::new(stage, n);
    let h = betti(&c);
    let mut out = BTreeMap::new();
    for (&k, &dim) in &h {
        let kernel = if k == 0 {
            // ρ on degree-0 cocycles; coboundaries map to zero
            let z = kernel_and_image(&c.differential_block(0)).0;
            let m = rho.matrix(&c, 0).map_err(|e| e.to_string())?.mul(&z.as_columns()).map_err(|e| e.to_string())?;
            dim - m.rank()
        } else {
            dim
        };
        if kernel > 0 {
            out.insert(k - 1, kernel);
        }
    }
    Ok(out)
}

fn criterion_1() -> Outcome {
    let model = run(Builtin::Ass, 4, Mode::NonUnitary)?;
    let got = model.model.dimensions();
    let want = dims(&[(2, 0, 2), (3, -1, 6), (4, -2, 24)]);
    ensure(got == want, || format!("dimensions {got:?}"))?;
    let m2 = run_into(Builtin::Ass, 4, 2, Mode::NonUnitary)?;
    let c3 = ArityComplex::new(m2.stage(), 3);
    let m = m2.rho().matrix(&c3, 0).map_err(|e| e.to_string())?;
    ensure((m.rows(), m.cols(), m.rank()) == (6, 12, 6), || format!("evaluation matrix {}x{} rank {}", m.rows(), m.cols(), m.rank()))?;
    let oracle3 = kernel_oracle(&m2, 3)?;
    ensure(oracle3 == want[&3], || format!("rank oracle at arity 3: {oracle3:?}"))?;
    let m3 = run_into(Builtin::Ass, 4, 3, Mode::NonUnitary)?;
    let oracle4 = kernel_oracle(&m3, 4)?;
    ensure(oracle4 == want[&4], || format!("rank oracle at arity 4: {oracle4:?}"))?;
    let trees = tree_counts(m3.stage(), 4);
    let egf = egf_counts(&m3.model.dimensions(), 4);
    ensure(trees == egf, || format!("tree counts {trees:?} vs generating function {egf:?}"))?;
    ensure(trees[&4] == BTreeMap::from([(-1, 120), (0, 120)]), || format!("P3(4) = {:?}", trees[&4]))?;
    Ok("dims 2/6/24 in degrees 0/-1/-2; rank 6 of 6x12; kernel oracle and tree counts agree".into())
}

fn criterion_2() -> Outcome {
    let model = run(Builtin::AssPlus, 4, Mode::Unitary)?;
    let got = model.model.dimensions();
    ensure(got == dims(&[(2, 0, 2), (3, -1, 6), (4, -2, 24)]), || format!("dimensions {got:?}"))?;
    let stage = model.stage();
    let target = model.rho().target().clone();
    let m2 = target.m2().map_err(|e| e.to_string())?;
    let id_gen = stage
        .ids_of_arity(2)
        .into_iter()
        .find(|&g| model.rho().value(g) == &m2)
        .ok_or("no arity-2 generator maps to the identity word")?;
    let identity = opminimal_core::TreeVector::identity();
    ensure(stage.generator(id_gen).restrictions == vec![identity.clone(), identity], || {
        format!("restrictions of {}", stage.label(id_gen))
    })?;
    let mut zero = 0;
    for (_, g) in stage.generators().filter(|(_, g)| g.arity >= 3) {
        for x in &g.restrictions {
            ensure(x.is_zero(), || format!("δ of {} is {}", g.label, stage.format_vector(x)))?;
            zero += 1;
        }
    }
    // degree bookkeeping: the candidate space P_{n-1}(n-1) has nothing in degree 2 - n
    for n in 3..=4 {
        let c = ArityComplex::new(stage, n - 1);
        let lowest = c.degrees().min().unwrap_or(0);
        ensure(c.dim(2 - n as i32) == 0 && lowest == 3 - n as i32, || format!("arity {} has degree {lowest}", n - 1))?;
    }
    Ok(format!("dims 2/6/24; {} restricts to (id, id); {zero} higher restrictions all zero", stage.label(id_gen)))
}

fn criterion_3() -> Outcome {
    let model = run(Builtin::Com, 4, Mode::NonUnitary)?;
    let got = model.model.dimensions();
    ensure(got == dims(&[(2, 0, 1), (3, -1, 2), (4, -2, 6)]), || format!("dimensions {got:?}"))?;
    let m2 = run_into(Builtin::Com, 3, 2, Mode::NonUnitary)?;
    let c3 = ArityComplex::new(m2.stage(), 3);
    let total: usize = c3.degrees().map(|k| c3.dim(k)).sum();
    let m = m2.rho().matrix(&c3, 0).map_err(|e| e.to_string())?;
    ensure(total == 3 && m.rows() == 1 && m.rank() == 1, || format!("Γ(E(2))(3) = {total}, rank {}", m.rank()))?;
    ensure(total - m.rank() == 2, || "kernel is not 2-dimensional".into())?;
    Ok("dims 1/2/6; Γ(E(2))(3) = 3 onto Com(3) = 1, kernel 2".into())
}

fn criterion_4() -> Outcome {
    let runs = [
        (Builtin::Ass, Mode::NonUnitary),
        (Builtin::AssPlus, Mode::Unitary),
        (Builtin::AssPlus, Mode::NonUnitary),
        (Builtin::Com, Mode::NonUnitary),
        (Builtin::ComPlus, Mode::Unitary),
    ];
    let mut checked = 0;
    for (b, mode) in runs {
        let model = run(b, 4, mode)?;
        let r = model.rho().is_quasi_iso_upto(4);
        ensure(r.is_ok(), || format!("{b} {mode}: {:?}", r.failed().collect::<Vec<_>>()))?;
        let target = model.rho().target();
        let start = if mode == Mode::Unitary { 0 } else { 1 };
        for n in start..=4 {
            let source = betti(&ArityComplex::new(model.stage(), n));
            let want = target.cohomology_dims(n).map_err(|e| e.to_string())?;
            ensure(source == want, || format!("{b} {mode} arity {n}: {source:?} vs {want:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} arity comparisons over 5 runs, all invertible"))
}

fn criterion_5() -> Outcome {
    let mut assertions = 0usize;
    let mut last = None;
    for max in 2..=4 {
        let model = run(Builtin::AssPlus, max, Mode::Unitary)?;
        let stage = model.stage();
        for n in 1..=4 {
            let c = ArityComplex::new(stage, n);
            for (k, ts) in &c.basis {
                for t in ts {
                    let v = stage.vector_of(t.clone(), scalar(1));
                    // every Σ_n-translate too, so signs from the action are covered
                    for sigma in Perm::all(n) {
                        let sv = stage.act(&sigma, &v).map_err(|e| e.to_string())?;
                        let dd = stage.differential(&stage.differential(&sv));
                        ensure(dd.is_zero(), || format!("∂∂({sigma:?}·{}) ≠ 0 in stage {max}, degree {k}", stage.format_tree(t)))?;
                        assertions += 1;
                    }
                }
            }
        }
        last = Some(model);
    }
    let model = last.unwrap();
    let stage = model.stage();
    let bases: Vec<Vec<Tree>> = (0..=4).map(|n| stage.basis(n).into_values().flatten().collect()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pairs = 0;
    while pairs < 200 {
        let m = rng.gen_range(1..=4usize);
        let q = rng.gen_range(1..=5 - m);
        let a = stage.vector_of(bases[m][rng.gen_range(0..bases[m].len())].clone(), scalar(rng.gen_range(1..5)));
        let b = stage.vector_of(bases[q][rng.gen_range(0..bases[q].len())].clone(), scalar(rng.gen_range(1..5)));
        let i = rng.gen_range(1..=m);
        let comp = |x: &opminimal_core::TreeVector, y: &opminimal_core::TreeVector| stage.partial_compose(x, i, y).unwrap();
        let lhs = stage.differential(&comp(&a, &b));
        let mut rhs = comp(&stage.differential(&a), &b);
        let sign = if a.degree() % 2 == 0 { scalar(1) } else { scalar(-1) };
        rhs.add_scaled(&sign, &comp(&a, &stage.differential(&b)));
        ensure(lhs.sub(&rhs).is_zero(), || format!("Leibniz fails on {} ∘_{i} {}", stage.format_vector(&a), stage.format_vector(&b)))?;
        pairs += 1;
    }
    Ok(format!("∂² = 0 on {assertions} translated basis trees; Leibniz on {pairs} random pairs"))
}

fn criterion_6() -> Outcome {
    let p = Builtin::AssPlus.build(4).map_err(|e| e.to_string())?;
    let id = p.identity();
    let m2 = p.m2().map_err(|e| e.to_string())?;
    let pt = p.point().map_err(|e| e.to_string())?;
    ensure(p.partial_compose(&m2, 2, 1, &pt, 0).unwrap() == id && p.partial_compose(&m2, 2, 2, &pt, 0).unwrap() == id, || {
        "m₂∘_i 1 ≠ id".into()
    })?;
    let d = |i: usize, k: usize, u: &Vector| p.restriction(i, k, u).unwrap();
    let s = |i: usize, k: usize, u: &Vector| p.degeneracy(i, k, u).unwrap();
    let mut families = [0usize; 5];
    for n in 1..=4 {
        for x in 0..p.dim(n) {
            let w = unit_vector(p.dim(n), x);
            for j in 1..=n {
                for i in 1..j {
                    ensure(d(i, n - 1, &d(j, n, &w)) == d(j - 1, n - 1, &d(i, n, &w)), || format!("δδ at arity {n}"))?;
                    families[0] += 1;
                }
            }
            if n == 4 {
                continue;
            }
            for j in 1..=n {
                let sj = s(j, n, &w);
                ensure(d(j, n + 1, &sj) == w, || format!("δ_{j}s_{j} ≠ id at arity {n}"))?;
                ensure(d(j + 1, n + 1, &sj) == w, || format!("δ_{}s_{j} ≠ id at arity {n}", j + 1))?;
                families[1] += 2;
                for i in 1..=n + 1 {
                    if i < j {
                        ensure(d(i, n + 1, &sj) == s(j - 1, n - 1, &d(i, n, &w)), || format!("δ_{i}s_{j} at arity {n}"))?;
                        families[2] += 1;
                    } else if i > j + 1 {
                        ensure(d(i, n + 1, &sj) == s(j, n - 1, &d(i - 1, n, &w)), || format!("δ_{i}s_{j} at arity {n}"))?;
                        families[3] += 1;
                    }
                }
                if n + 2 <= 4 {
                    for i in 1..=j {
                        ensure(s(i, n + 1, &sj) == s(j + 1, n + 1, &s(i, n, &w)), || format!("s_{i}s_{j} at arity {n}"))?;
                        families[4] += 1;
                    }
                }
            }
        }
    }
    Ok(format!("δδ {}, δs = id {}, δs (i<j) {}, δs (i>j+1) {}, ss {}", families[0], families[1], families[2], families[3], families[4]))
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vector {
    (0..dim).map(|_| scalar(rng.gen_range(-3..=3))).collect()
}

fn faces_of(p: &FiniteDgOperad, n: usize, k: i32, w: &[Scalar]) -> FaceFamily {
    FaceFamily::of(p, n, k, w).unwrap()
}

fn criterion_7() -> Outcome {
    let p = Builtin::AssPlus.build(4).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for round in 0..500 {
        let n = 2 + round % 3;
        let w = random_vector(&mut rng, p.block_dim(n, 0));
        let f = faces_of(&p, n, 0, &w);
        ensure(kan::is_kan_family(&p, &f).unwrap().is_none(), || format!("faces of an element are not a family ({round})"))?;
        let a = kan::fill(&p, &f).map_err(|e| e.to_string())?;
        let b = kan::fill_constructive(&p, &f).map_err(|e| e.to_string())?;
        ensure(faces_of(&p, n, 0, &a) == f && faces_of(&p, n, 0, &b) == f, || format!("face recovery failed ({round})"))?;
    }
    let mut flagged = 0;
    for round in 0..60 {
        let n = 2 + round % 3;
        let dim = p.block_dim(n, 0);
        let w = random_vector(&mut rng, dim);
        let f = faces_of(&p, n, 0, &w);
        let pivot = (0..dim).find(|&j| w[j] != scalar(0));
        let Some(j) = pivot else { continue };
        // φ with φ w = 0 and ψ with w in its image
        let r = Matrix::from_rows((0..2).map(|_| random_vector(&mut rng, dim)).collect(), dim).unwrap();
        let rw = r.mul_vec(&w).unwrap();
        let mut phi = r.clone();
        for row in 0..2 {
            let x = phi.get(row, j) - &rw[row] / &w[j];
            phi.set(row, j, x);
        }
        let mut cols = vec![w.clone()];
        cols.push(random_vector(&mut rng, dim));
        let psi = Matrix::from_columns(&cols, dim).unwrap();
        for flag in [Flag::Cocycle, Flag::InKernel(&phi), Flag::InImage(&psi)] {
            let fill = kan::fill_refined(&p, &f, &[flag]).map_err(|e| format!("{flag:?}: {e}"))?;
            ensure(faces_of(&p, n, 0, &fill.element) == f, || format!("refined {flag:?} lost faces"))?;
            match flag {
                Flag::InKernel(m) => ensure(m.mul_vec(&fill.element).unwrap().iter().all(|x| *x == scalar(0)), || "kernel flag".into())?,
                Flag::InImage(m) => {
                    let y = fill.image_witness.clone().ok_or("no image witness")?;
                    ensure(m.mul_vec(&y).unwrap() == fill.element, || "image witness".into())?;
                }
                _ => {}
            }
            flagged += 1;
        }
    }
    // a target with a nonzero differential: the arity-3 truncation of the unitary model's stage
    let model = run(Builtin::AssPlus, 3, Mode::Unitary)?;
    let stage = model.stage();
    let m2 = stage.corolla(stage.id_of("e2.0").unwrap()).terms().next().unwrap().0.clone();
    let q = FiniteDgOperad::from_stage(stage, 3, Some(&m2)).map_err(|e| e.to_string())?;
    for round in 0..40 {
        let n = 2 + round % 2;
        let y = random_vector(&mut rng, q.block_dim(n, -1));
        let w = q.differential_matrix(n, -1).mul_vec(&y).unwrap();
        let f = faces_of(&q, n, 0, &w);
        let fill = kan::fill_refined(&q, &f, &[Flag::Coboundary]).map_err(|e| format!("coboundary: {e}"))?;
        let u = fill.coboundary_witness.clone().ok_or("no coboundary witness")?;
        ensure(q.differential_matrix(n, -1).mul_vec(&u).unwrap() == fill.element, || "coboundary witness".into())?;
        ensure(faces_of(&q, n, 0, &fill.element) == f, || "coboundary fill lost faces".into())?;
        let z = random_vector(&mut rng, q.block_dim(n, -1));
        let f = faces_of(&q, n, -1, &z);
        if f.members.iter().all(|m| q.differential_matrix(n - 1, -1).mul_vec(m).unwrap().iter().all(|x| *x == scalar(0))) {
            let fill = kan::fill_refined(&q, &f, &[Flag::Cocycle]).map_err(|e| format!("cocycle: {e}"))?;
            ensure(
                q.differential_matrix(n, -1).mul_vec(&fill.element).unwrap().iter().all(|x| *x == scalar(0)),
                || "cocycle flag".into(),
            )?;
        }
        flagged += 1;
    }
    // equivariant fillers on the regular representation, checked on every σ
    let mut eq_checks = 0;
    for n in 2..=3 {
        let perms = Perm::all(n);
        let x = random_vector(&mut rng, p.block_dim(n, 0));
        let module = opminimal_core::symmod::SigmaModule::regular(n, 0).unwrap();
        let families: Vec<FaceFamily> = perms
            .iter()
            .map(|w| faces_of(&p, n, 0, &KanCarrier::act(&p, w, n, 0, &x).unwrap()))
            .collect();
        let act_e = |s: &Perm, v: &[Scalar]| module.act_permutation(s, v, 0);
        let l = kan::fill_equivariant(&p, n, 0, &families, act_e, &[]).map_err(|e| e.to_string())?;
        for (b, lb) in l.iter().enumerate() {
            ensure(faces_of(&p, n, 0, lb) == families[b], || "equivariant filler lost faces".into())?;
            for s in &perms {
                let se = module.act_permutation(s, &unit_vector(perms.len(), b), 0).unwrap();
                let mut lhs = zero_vector(lb.len());
                for (a, c) in se.iter().enumerate() {
                    add_scaled(&mut lhs, c, &l[a]);
                }
                ensure(lhs == KanCarrier::act(&p, s, n, 0, lb).unwrap(), || format!("L(σe) ≠ σL(e) in Σ_{n}"))?;
                eq_checks += 1;
            }
        }
    }
    Ok(format!("500 fuzzed families filled twice; {flagged} refined fills; {eq_checks} equivariance checks"))
}

fn arity_entries(j: &ModelJson, max: usize) -> String {
    let labels: Vec<&String> = j.generators.range(..=max).flat_map(|(_, d)| d.values().flatten()).collect();
    let mut out = serde_json::Map::new();
    for l in labels {
        out.insert(
            l.clone(),
            serde_json::json!({
                "d": j.differential[l],
                "rho": j.rho[l],
                "restrictions": j.restrictions.as_ref().map(|r| r[l].clone()),
            }),
        );
    }
    let gens: BTreeMap<_, _> = j.generators.range(..=max).collect();
    let acts: BTreeMap<_, _> = j.actions.range(..=max).collect();
    serde_json::to_string(&serde_json::json!({"generators": gens, "actions": acts, "entries": out})).unwrap()
}

fn criterion_8() -> Outcome {
    for (b, mode) in [(Builtin::AssPlus, Mode::Unitary), (Builtin::Com, Mode::NonUnitary)] {
        let a = run(b, 4, mode)?;
        let again = run(b, 4, mode)?;
        let ra = verify_minimal_model(&a);
        ensure(ra.is_ok(), || format!("{b}: verification failed: {:?}", ra.failed().collect::<Vec<_>>()))?;
        let text = a.to_json_string(Some(&ra));
        ensure(text == again.to_json_string(Some(&verify_minimal_model(&again))), || format!("{b}: runs differ"))?;
        let back = MinimalModel::from_json_str(&text).map_err(|e| e.to_string())?;
        ensure(back.to_json_string(Some(&ra)) == text, || format!("{b}: json round trip differs"))?;
        let small = run(b, 3, mode)?;
        ensure(arity_entries(&small.to_json(None), 3) == arity_entries(&a.to_json(None), 3), || {
            format!("{b}: arity ≤ 3 changed between max_arity 3 and 4")
        })?;
    }
    Ok("byte-identical reruns; arity-3 model is a prefix of the arity-4 model".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 A∞ reconstruction", criterion_1),
        ("2 strictly unital A∞", criterion_2),
        ("3 C∞ desk check", criterion_3),
        ("4 quasi-isomorphism suite", criterion_4),
        ("5 sign conventions", criterion_5),
        ("6 simplicial identities", criterion_6),
        ("7 Kan fillers", criterion_7),
        ("8 determinism and stability", criterion_8),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS criterion {name}: {msg} ({secs:.1}s)"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg} ({secs:.1}s)");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
