use super::*;
use crate::exactla::scalar;
use crate::symmod::{GradedBasis, SigmaAction};

fn leaf(l: u32) -> TreeSpec {
    TreeSpec::Leaf(l)
}

fn node(g: &str, children: Vec<TreeSpec>) -> TreeSpec {
    TreeSpec::Node { g: g.into(), children }
}

/// `Γ(E(2))` with `E(2)` the regular representation in degree 0.
fn ass2(unitary: bool) -> FreeStage {
    let module = SigmaModule::regular(2, 0).unwrap();
    let d = vec![TreeVector::zero(2, 1), TreeVector::zero(2, 1)];
    if unitary {
        let r = vec![vec![TreeVector::identity(), TreeVector::identity()]; 2];
        FreeStage::trivial(true).make_unitary_principal_extension(2, module, d, r).unwrap()
    } else {
        FreeStage::trivial(false).make_principal_extension(2, module, d).unwrap()
    }
}

fn associator(stage: &FreeStage) -> TreeVector {
    let m = stage.corolla(stage.id_of("12").unwrap());
    stage.partial_compose(&m, 1, &m).unwrap().sub(&stage.partial_compose(&m, 2, &m).unwrap())
}

/// Adds six degree −1 generators in arity 3, `d(e_w) = w·(m∘₁m − m∘₂m)`.
fn ass3(unitary: bool) -> FreeStage {
    let p2 = ass2(unitary);
    let a = associator(&p2);
    let perms = Perm::all(3);
    let regular = SigmaModule::regular(3, -1).unwrap();
    let labels: Vec<String> = perms.iter().map(|w| format!("e{}", crate::symmod::word_label(w))).collect();
    let basis = GradedBasis::single_degree(3, -1, labels).unwrap();
    let module = SigmaModule::new(basis, regular.action.clone()).unwrap();
    let d: Vec<TreeVector> = perms.iter().map(|w| p2.act(w, &a).unwrap()).collect();
    if unitary {
        let r = vec![vec![TreeVector::zero(2, -1); 3]; 6];
        p2.make_unitary_principal_extension(3, module, d, r).unwrap()
    } else {
        p2.make_principal_extension(3, module, d).unwrap()
    }
}

fn basis_vectors(stage: &FreeStage, arity: usize) -> Vec<TreeVector> {
    stage.basis(arity).into_values().flatten().map(|t| stage.vector_of(t, scalar(1))).collect()
}

#[test]
fn canonical_tree_is_unchanged() {
    let p = ass2(false);
    let spec = node("12", vec![node("21", vec![leaf(1), leaf(2)]), leaf(3)]);
    let v = p.canonicalize(&spec).unwrap();
    assert_eq!(v.len(), 1);
    let (t, c) = v.terms().next().unwrap();
    assert_eq!(*c, scalar(1));
    assert_eq!(p.tree_to_spec(t), spec);
}

#[test]
fn swapped_binary_children_act_on_decoration() {
    let p = ass2(false);
    let v = p.canonicalize(&node("12", vec![leaf(2), leaf(1)])).unwrap();
    let expected = p.canonicalize(&node("21", vec![leaf(1), leaf(2)])).unwrap();
    assert_eq!(v, expected);
}

#[test]
fn swapping_odd_subtrees_costs_a_sign() {
    let p = ass2(false);
    let odd = SigmaModule::trivial(2, -1, vec!["a".into()]).unwrap();
    let p = p.make_principal_extension(2, odd, vec![TreeVector::zero(2, 0)]);
    // arity 2 already carries generators: attaching more there is refused
    assert!(p.is_err());

    let odd = SigmaModule::trivial(2, -1, vec!["a".into()]).unwrap();
    let m = SigmaModule::regular(2, 0).unwrap();
    let mut degrees = BTreeMap::new();
    degrees.insert(-1, vec!["a".to_string()]);
    degrees.insert(0, m.basis.labels(0).to_vec());
    let mut transpositions = BTreeMap::new();
    transpositions.insert(-1, odd.action.transpositions[&-1].clone());
    transpositions.insert(0, m.action.transpositions[&0].clone());
    let module = SigmaModule::new(GradedBasis::new(2, degrees).unwrap(), SigmaAction { transpositions }).unwrap();
    let d = vec![TreeVector::zero(2, 0), TreeVector::zero(2, 1), TreeVector::zero(2, 1)];
    let p = FreeStage::trivial(false).make_principal_extension(2, module, d).unwrap();

    let raw = node("12", vec![node("a", vec![leaf(3), leaf(4)]), node("a", vec![leaf(1), leaf(2)])]);
    let v = p.canonicalize(&raw).unwrap();
    let canonical = node("21", vec![node("a", vec![leaf(1), leaf(2)]), node("a", vec![leaf(3), leaf(4)])]);
    let c = p.canonicalize(&canonical).unwrap();
    assert_eq!(c.terms().next().unwrap().1, &scalar(1));
    assert_eq!(v, c.scaled(&scalar(-1)));
}

#[test]
fn composing_with_identity_is_neutral() {
    let p = ass3(false);
    let id = TreeVector::identity();
    for v in basis_vectors(&p, 3) {
        for i in 1..=3 {
            assert_eq!(p.partial_compose(&v, i, &id).unwrap(), v);
        }
        assert_eq!(p.partial_compose(&id, 1, &v).unwrap(), v);
    }
}

#[test]
fn left_comb_is_canonical() {
    let p = ass2(false);
    let m = p.corolla(p.id_of("12").unwrap());
    let v = p.partial_compose(&m, 1, &m).unwrap();
    let expected = node("12", vec![node("12", vec![leaf(1), leaf(2)]), leaf(3)]);
    assert_eq!(v.len(), 1);
    let (t, c) = v.terms().next().unwrap();
    assert_eq!((p.tree_to_spec(t), c.clone()), (expected, scalar(1)));
}

#[test]
fn stage_dimensions() {
    let p2 = ass2(false);
    let b = p2.basis(3);
    assert_eq!(b.len(), 1);
    assert_eq!(b[&0].len(), 12);
    let p3 = ass3(false);
    let b = p3.basis(3);
    assert_eq!(b[&0].len(), 12);
    assert_eq!(b[&-1].len(), 6);
    let b = p3.basis(4);
    assert_eq!(b[&0].len(), 120);
    assert_eq!(b[&-1].len(), 120);
    for trees in b.values() {
        assert!(trees.iter().all(Tree::is_canonical));
    }
}

#[test]
fn action_is_a_group_action() {
    let p = ass2(false);
    let basis = basis_vectors(&p, 3);
    for s in Perm::all(3) {
        for t in Perm::all(3) {
            let st = s.compose(&t);
            for v in &basis {
                let lhs = p.act(&s, &p.act(&t, v).unwrap()).unwrap();
                assert_eq!(lhs, p.act(&st, v).unwrap());
            }
        }
    }
    for v in &basis {
        assert_eq!(&p.act(&Perm::identity(3), v).unwrap(), v);
    }
}

#[test]
fn transposition_acts_on_corolla_decoration() {
    let p = ass2(false);
    let m12 = p.corolla(p.id_of("12").unwrap());
    let m21 = p.corolla(p.id_of("21").unwrap());
    assert_eq!(p.act(&Perm::adjacent(2, 0), &m12).unwrap(), m21);
}

#[test]
fn differential_of_closed_decorations_vanishes() {
    let p = ass2(false);
    for v in basis_vectors(&p, 4) {
        assert!(p.differential(&v).is_zero());
    }
}

#[test]
fn differential_squares_to_zero() {
    let p = ass3(false);
    let mut nonzero = 0;
    for arity in 3..=5 {
        for v in basis_vectors(&p, arity) {
            let dv = p.differential(&v);
            if !dv.is_zero() {
                nonzero += 1;
                assert!(FreeStage::is_decomposable(&dv));
            }
            assert!(p.differential(&dv).is_zero(), "∂² ≠ 0 on {}", p.format_vector(&v));
        }
    }
    assert!(nonzero > 0);
}

#[test]
fn leibniz_on_basis_pairs() {
    let p = ass3(false);
    let b3 = basis_vectors(&p, 3);
    for a in b3.iter().step_by(5) {
        for b in b3.iter().step_by(7) {
            for i in 1..=3 {
                let lhs = p.differential(&p.partial_compose(a, i, b).unwrap());
                let mut rhs = p.partial_compose(&p.differential(a), i, b).unwrap();
                let second = p.partial_compose(a, i, &p.differential(b)).unwrap();
                let sign = if a.degree().rem_euclid(2) == 1 { scalar(-1) } else { scalar(1) };
                rhs.add_scaled(&sign, &second);
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn extension_rejects_non_cocycles_and_bad_arities() {
    let p3 = ass3(false);
    let e = p3.corolla(p3.id_of("e123").unwrap());
    let module = SigmaModule::trivial(3, -2, vec!["x".into()]).unwrap();
    assert!(p3.make_principal_extension(3, module.clone(), vec![e.clone()]).is_err());
    let module4 = SigmaModule::trivial(4, -2, vec!["x".into()]).unwrap();
    let m = p3.corolla(p3.id_of("12").unwrap());
    let not_closed = p3.partial_compose(&e, 1, &m).unwrap();
    let err = p3.make_principal_extension(4, module4, vec![not_closed]).unwrap_err();
    assert!(err.to_string().contains("cocycle"), "{err}");
    let one = SigmaModule::trivial(1, 0, vec!["u".into()]).unwrap();
    assert!(FreeStage::trivial(false).make_principal_extension(1, one, vec![TreeVector::zero(1, 1)]).is_err());
    let empty = p3.make_principal_extension(4, SigmaModule::empty(4), vec![]).unwrap();
    assert_eq!(empty.generators().count(), p3.generators().count());
}

#[test]
fn restriction_of_binary_generator_is_identity() {
    let p = ass2(true);
    let m = p.corolla(p.id_of("12").unwrap());
    assert_eq!(p.restriction(1, &m).unwrap(), TreeVector::identity());
    assert_eq!(p.restriction(1, &TreeVector::identity()).unwrap(), TreeVector::point());
    let composed = p.partial_compose(&m, 2, &TreeVector::point()).unwrap();
    assert_eq!(composed, TreeVector::identity());
}

#[test]
fn restriction_kills_zero_restricted_summands() {
    let p = ass3(true);
    let e = p.corolla(p.id_of("e123").unwrap());
    for i in 1..=3 {
        assert!(p.restriction(i, &e).unwrap().is_zero());
        assert!(p.restriction(i, &p.differential(&e)).unwrap().is_zero());
    }
}

#[test]
fn restrictions_are_coherent() {
    let p = ass3(true);
    for arity in 2..=4 {
        for v in basis_vectors(&p, arity) {
            for j in 2..=arity {
                for i in 1..j {
                    let lhs = p.restriction(i, &p.restriction(j, &v).unwrap()).unwrap();
                    let rhs = p.restriction(j - 1, &p.restriction(i, &v).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}

#[test]
fn restriction_commutes_with_differential() {
    let p = ass3(true);
    for v in basis_vectors(&p, 4) {
        for i in 1..=4 {
            let lhs = p.differential(&p.restriction(i, &v).unwrap());
            let rhs = p.restriction(i, &p.differential(&v)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn unitary_extension_reports_offending_pair() {
    let module = SigmaModule::regular(2, 0).unwrap();
    let d = vec![TreeVector::zero(2, 1), TreeVector::zero(2, 1)];
    let id = TreeVector::identity();
    let r = vec![vec![id.clone(), id.scaled(&scalar(2))], vec![id.clone(), id.clone()]];
    let err = FreeStage::trivial(true).make_unitary_principal_extension(2, module, d, r).unwrap_err();
    assert!(err.to_string().contains("(12, 1, 2)"), "{err}");
}

#[test]
fn json_round_trip_is_exact() {
    let p = ass3(false);
    for v in basis_vectors(&p, 4).iter().take(40) {
        let dv = p.differential(v);
        let text = serde_json::to_string(&p.vector_to_json(&dv)).unwrap();
        let back: Vec<json::TermJson> = serde_json::from_str(&text).unwrap();
        let w = p.vector_from_json(&back, 4, dv.degree()).unwrap();
        assert_eq!(w, dv);
        assert_eq!(serde_json::to_string(&p.vector_to_json(&w)).unwrap(), text);
    }
}

#[test]
fn prefix_notation() {
    let p = ass2(false);
    assert_eq!(p.format_vector(&associator(&p)), "-12(1,12(2,3)) + 12(12(1,2),3)");
}
