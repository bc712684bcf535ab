use ksweep_core::positivity::is_bistochastic;
use ksweep_core::stable::{
    classification_evidence, classify_jordan_subalgebra, compute_stable_subspace,
    conditional_expectation, decompose, stable_subspace_search, verify_stable_structure, HSSubspace,
    JordanClass,
};
use ksweep_core::zoo::{choi_map, pinching, rotate_subspace, subalgebra, trace_map, two_block_map};
use ksweep_core::{random_unitary, seeded_rng, ComplexMatrix, SuperOperator};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn e(i: usize, j: usize) -> ComplexMatrix {
    ComplexMatrix::unit(3, i, j)
}

fn unitary(seed: u64) -> ComplexMatrix {
    random_unitary(&mut seeded_rng(seed), 3)
}

#[test]
fn identity_and_unitary_conjugation_fix_everything() {
    assert_eq!(compute_stable_subspace(&SuperOperator::identity(3), TOL).unwrap().dim(), 9);
    let u = SuperOperator::conjugation(&unitary(11)).unwrap();
    let k = compute_stable_subspace(&u, TOL).unwrap();
    assert_eq!(k.dim(), 9);
    assert_eq!(classify_jordan_subalgebra(&k, 1e-8).unwrap(), JordanClass::Full);
}

#[test]
fn two_block_stable_subspace() {
    let search = stable_subspace_search(&two_block_map(), TOL).unwrap();
    assert!(!search.cap_hit);
    let k = search.subspace;
    assert_eq!(k.dim(), 2);
    let p12 = ComplexMatrix::diag_real(&[1.0, 1.0, 0.0]);
    assert!(k.residual(&p12).unwrap() < 1e-12);
    assert!(k.residual(&e(2, 2)).unwrap() < 1e-12);
    assert!(k.residual(&e(0, 0)).unwrap() > 0.5);
    let expected = HSSubspace::from_spanning(3, &[p12, e(2, 2)], TOL).unwrap();
    assert!(k.distance(&expected).unwrap() < 1e-10);
}

#[test]
fn structural_clauses_hold_on_simple_maps() {
    let id = SuperOperator::identity(3);
    let k = compute_stable_subspace(&id, TOL).unwrap();
    let report = verify_stable_structure(&id, &k, 8, 1, 1e-8).unwrap();
    assert!(report.all_passed, "{report:?}");

    let diag = subalgebra(JordanClass::Diagonal).unwrap();
    let ed = conditional_expectation(&diag, TOL).unwrap();
    let k = compute_stable_subspace(&ed, TOL).unwrap();
    assert_eq!(k.dim(), 3);
    let report = verify_stable_structure(&ed, &k, 8, 2, 1e-8).unwrap();
    assert!(report.all_passed, "{report:?}");
    assert!(report.max_residual() <= 1e-8);
    assert!(report.clause("a").is_some());
}

#[test]
fn decomposition_of_two_block_map() {
    let s = two_block_map();
    let report = decompose(&s, TOL).unwrap();
    assert_eq!(report.jordan_class, JordanClass::TwoBlock);
    assert!(report.automorphism_residual < 1e-12);
    assert!(report.sweeping_monotone);
    for (k, norm) in report.sweeping_norms.iter().enumerate() {
        let expected = 2f64.powf(-((k + 1) as f64) / 2.0);
        assert!((norm - expected).abs() < 1e-12, "k = {}: {norm}", k + 1);
    }
    let s3 = s.power(3);
    assert!(s3.apply(&e(0, 1)).unwrap().max_abs() < 1e-15);
    assert!((s3.apply(&e(0, 2)).unwrap()[(0, 2)].re - 2f64.powf(-1.5)).abs() < 1e-15);
}

#[test]
fn decomposition_of_unitary_conjugation_has_no_sweep() {
    let u = SuperOperator::conjugation(&unitary(5)).unwrap();
    let report = decompose(&u, TOL).unwrap();
    assert_eq!(report.stable.dim(), 9);
    assert!(report.sweeping_norms.is_empty());
}

#[test]
fn transposed_automorphisms_decompose() {
    let u = unitary(6);
    let conj = SuperOperator::conjugation(&u).unwrap();
    let s = conj.compose(&SuperOperator::transposition(3)).unwrap();
    let report = decompose(&s, TOL).unwrap();
    assert_eq!(report.jordan_class, JordanClass::Full);
    assert!(report.automorphism_residual < 1e-12);

    let reflection = SuperOperator::from_fn(3, |a| {
        &ComplexMatrix::identity(3).scale(a.trace() * (2.0 / 3.0)) - a
    });
    assert!(decompose(&reflection, TOL).is_err());
}

#[test]
fn conditional_expectation_onto_diagonal_is_pinching() {
    let diag = subalgebra(JordanClass::Diagonal).unwrap();
    let ed = conditional_expectation(&diag, TOL).unwrap();
    assert!((ed.action() - pinching(3).action()).max_abs() < 1e-14);
    assert!(is_bistochastic(&ed, 1e-12));
}

#[test]
fn trace_map_is_ergodic() {
    let k = compute_stable_subspace(&trace_map(3), TOL).unwrap();
    assert_eq!(k.dim(), 1);
    assert_eq!(classify_jordan_subalgebra(&k, 1e-8).unwrap(), JordanClass::Trivial);
}

#[test]
fn classification_evidence_examples() {
    let ev = classification_evidence(&two_block_map(), TOL).unwrap();
    assert_eq!(ev.jordan_class, JordanClass::TwoBlock);
    assert_eq!(ev.dimension, 2);
    assert!(ev.extremal_candidate);

    let ev = classification_evidence(&pinching(3), TOL).unwrap();
    assert_eq!(ev.jordan_class, JordanClass::Diagonal);
    assert!(!ev.extremal_candidate);

    let ev = classification_evidence(&choi_map(), TOL).unwrap();
    assert_eq!(ev.jordan_class, JordanClass::Trivial);
    assert!(ev.extremal_candidate);

    assert!(classification_evidence(&trace_map(2), TOL).is_err());
}

#[test]
fn canonical_subalgebras_classify_to_themselves() {
    for class in JordanClass::ALL {
        let k = subalgebra(class).unwrap();
        assert_eq!(Some(k.dim()), class.dimension());
        k.check_jordan_subalgebra(1e-12).unwrap();
        assert_eq!(classify_jordan_subalgebra(&k, 1e-8).unwrap(), class);
    }
}

#[test]
fn non_subalgebra_is_rejected() {
    let k = HSSubspace::from_spanning(3, &[ComplexMatrix::identity(3), e(0, 1)], TOL).unwrap();
    assert!(k.check_jordan_subalgebra(1e-9).is_err());
    let no_unit = HSSubspace::from_spanning(3, &[e(0, 0)], TOL).unwrap();
    assert!(classify_jordan_subalgebra(&no_unit, 1e-9).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn classification_is_rotation_invariant(seed in any::<u64>(), idx in 0usize..7) {
        let class = JordanClass::ALL[idx];
        let k = rotate_subspace(&subalgebra(class).unwrap(), &unitary(seed)).unwrap();
        prop_assert_eq!(classify_jordan_subalgebra(&k, 1e-8).unwrap(), class);
        let ek = conditional_expectation(&k, TOL).unwrap();
        let stable = compute_stable_subspace(&ek, TOL).unwrap();
        prop_assert!(stable.distance(&k).unwrap() < 1e-8);
    }

    #[test]
    fn projection_is_idempotent(seed in any::<u64>(), idx in 0usize..7) {
        let k = rotate_subspace(&subalgebra(JordanClass::ALL[idx]).unwrap(), &unitary(seed)).unwrap();
        let a = &k.complement().random_element(seed) + &k.random_element(seed ^ 1);
        let p = k.project(&a).unwrap();
        prop_assert!((&k.project(&p).unwrap() - &p).max_abs() < 1e-12);
        prop_assert!(k.residual(&p).unwrap() < 1e-12);
    }
}
