use super::*;
use crate::exactla::scalar;
use crate::freeop::TreeVector;

fn run(b: Builtin, max: usize, mode: Mode) -> MinimalModel {
    minimal_model(&Target::builtin(b, max).unwrap(), max, mode).unwrap()
}

fn dims(pairs: &[(usize, i32, usize)]) -> BTreeMap<usize, BTreeMap<i32, usize>> {
    let mut out: BTreeMap<usize, BTreeMap<i32, usize>> = BTreeMap::new();
    for &(n, k, d) in pairs {
        out.entry(n).or_default().insert(k, d);
    }
    out
}

#[test]
fn ass_binary_step() {
    let m = run(Builtin::Ass, 2, Mode::NonUnitary);
    assert_eq!(m.model.dimensions(), dims(&[(2, 0, 2)]));
    assert!(verify_minimal_model(&m).is_ok());
}

#[test]
fn ass_through_arity_four() {
    let m = run(Builtin::Ass, 4, Mode::NonUnitary);
    assert_eq!(m.model.dimensions(), dims(&[(2, 0, 2), (3, -1, 6), (4, -2, 24)]));
    let r = verify_minimal_model(&m);
    assert!(r.is_ok(), "{:?}", r.failed().collect::<Vec<_>>());
}

#[test]
fn com_through_arity_four() {
    let m = run(Builtin::Com, 4, Mode::NonUnitary);
    assert_eq!(m.model.dimensions(), dims(&[(2, 0, 1), (3, -1, 2), (4, -2, 6)]));
    assert!(verify_minimal_model(&m).is_ok());
}

#[test]
fn unitary_ass_restrictions() {
    let m = run(Builtin::AssPlus, 4, Mode::Unitary);
    assert_eq!(m.model.dimensions(), dims(&[(2, 0, 2), (3, -1, 6), (4, -2, 24)]));
    let stage = m.stage();
    for (_, g) in stage.generators() {
        for x in &g.restrictions {
            if g.arity == 2 {
                assert_eq!(x, &TreeVector::identity(), "{}", g.label);
            } else {
                assert!(x.is_zero(), "{}", g.label);
            }
        }
    }
    let r = verify_minimal_model(&m);
    assert!(r.is_ok(), "{:?}", r.failed().collect::<Vec<_>>());
}

#[test]
fn unitary_com_binary_generator() {
    let m = run(Builtin::ComPlus, 3, Mode::Unitary);
    assert_eq!(m.model.dimensions(), dims(&[(2, 0, 1), (3, -1, 2)]));
    let g = m.stage().generator(m.stage().id_of("e2.0").unwrap());
    assert_eq!(g.restrictions, vec![TreeVector::identity(); 2]);
    assert!(verify_minimal_model(&m).is_ok());
}

#[test]
fn unitary_and_plain_models_share_differentials() {
    let a = run(Builtin::Ass, 4, Mode::NonUnitary);
    let b = run(Builtin::AssPlus, 4, Mode::Unitary);
    for ((_, ga), (_, gb)) in a.stage().generators().zip(b.stage().generators()) {
        assert_eq!(ga.label, gb.label);
        assert_eq!(a.stage().format_vector(&ga.differential), b.stage().format_vector(&gb.differential));
    }
}

#[test]
fn hypotheses_are_checked() {
    let t = Target::builtin(Builtin::Com, 3).unwrap();
    assert!(matches!(minimal_model(&t, 3, Mode::Unitary), Err(Error::Hypothesis(_))));
    let t = Target::builtin(Builtin::Ass, 3).unwrap();
    let e = minimal_model(&t, 3, Mode::Unitary).unwrap_err();
    assert!(e.to_string().contains("P(0)"), "{e}");
    assert!(minimal_model(&Target::builtin(Builtin::ComPlus, 3).unwrap(), 3, Mode::NonUnitary).is_ok());
}

#[test]
fn json_round_trip_and_determinism() {
    let m = run(Builtin::AssPlus, 3, Mode::Unitary);
    let text = m.to_json_string(None);
    assert_eq!(text, run(Builtin::AssPlus, 3, Mode::Unitary).to_json_string(None));
    let back = MinimalModel::from_json_str(&text).unwrap();
    assert_eq!(back.to_json_string(None), text);
    assert!(verify_minimal_model(&back).is_ok());
}

#[test]
fn corrupted_models_fail_the_right_check() {
    let m = run(Builtin::AssPlus, 4, Mode::Unitary);
    let mut j = m.to_json(None);
    let terms = j.differential.get_mut("e4.0").unwrap();
    terms[0].coef = "2".into();
    let r = verify_minimal_model(&MinimalModel::from_json(&j).unwrap());
    assert!(!r.get("d_squared").unwrap().passed);

    let mut j = m.to_json(None);
    let rs = j.restrictions.as_mut().unwrap().get_mut("e2.0").unwrap();
    rs[0].clear();
    let r = verify_minimal_model(&MinimalModel::from_json(&j).unwrap());
    assert!(!r.get("restriction_compat").unwrap().passed);
    assert!(r.get("d_squared").unwrap().passed);
}

#[test]
fn section_correction_leaves_compatible_values_alone() {
    let m = run(Builtin::AssPlus, 2, Mode::Unitary);
    let t = m.model.target().clone();
    let base = StagedModel {
        mode: Mode::Unitary,
        rho: StageMorphism::new(FreeStage::trivial(true), t.clone(), vec![]).unwrap(),
        completed_arity: 1,
    };
    let blocks = new_generator_blocks(&base.rho, 2).unwrap();
    assert_eq!(blocks.len(), 1);
    let r = assign_generator_restrictions(&base.rho, &blocks[0]).unwrap();
    let fixed = unitary_section_correction(&base.rho, &blocks[0], &r).unwrap();
    assert_eq!(fixed, blocks[0].values);
    // 2·(12) restricts to 2·id, which no coboundary can repair
    let mut bad = blocks[0].clone();
    for v in &mut bad.values {
        *v = v.iter().map(|x| x * scalar(2)).collect();
    }
    assert!(matches!(unitary_section_correction(&base.rho, &bad, &r), Err(Error::Infeasible(_))));
}

/// The model's own stage, truncated, as a target with a nonzero differential.
#[test]
fn model_of_a_resolution() {
    let max = 3;
    let m = run(Builtin::AssPlus, max, Mode::Unitary);
    let stage = m.stage();
    let m2 = stage.corolla(stage.id_of("e2.0").unwrap()).terms().next().unwrap().0.clone();
    let p = FiniteDgOperad::from_stage(stage, max, Some(&m2)).unwrap();
    assert!(p.validate_operad_axioms(true).is_ok());
    for mode in [Mode::Unitary, Mode::NonUnitary] {
        let again = minimal_model(&Target::inline(p.clone()), max, mode).unwrap();
        assert_eq!(again.model.dimensions(), dims(&[(2, 0, 2), (3, -1, 6)]));
        let r = verify_minimal_model(&again);
        assert!(r.is_ok(), "{:?}", r.failed().collect::<Vec<_>>());
        let text = again.to_json_string(None);
        assert_eq!(MinimalModel::from_json_str(&text).unwrap().to_json_string(None), text);
    }
}
