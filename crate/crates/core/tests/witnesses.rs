use std::f64::consts::FRAC_1_SQRT_2;

use ksweep_core::positivity::random_unit_vectors;
use ksweep_core::witness::{
    build_witness, construct_detected_state, evaluate, is_ppt, negative_eigenspace,
    ppt_entangled_state, ppt_state_recipe, DensityMatrix,
};
use ksweep_core::zoo::{random_kraus_map, two_block_map};
use ksweep_core::{
    partial_transpose, random_unitary, seeded_rng, tensor, ComplexMatrix, ComplexVector, Error,
    SuperOperator, C64,
};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

#[test]
fn identity_witness_is_the_unnormalized_bell_projector() {
    let w = build_witness(&SuperOperator::identity(3), TOL).unwrap();
    assert_eq!(w.matrix.trace(), C64::new(3.0, 0.0));
    let omega = ComplexVector::from_real(&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    assert_eq!(w.matrix, omega.outer(&omega));
    assert!(w.is_psd(TOL));
}

#[test]
fn unitary_conjugation_witness_is_psd() {
    let u = random_unitary(&mut seeded_rng(9), 3);
    let w = build_witness(&SuperOperator::conjugation(&u).unwrap(), TOL).unwrap();
    assert!(w.is_psd(TOL));
    assert!((w.matrix.trace().re - 3.0).abs() < 1e-12);
}

#[test]
fn transposition_witness_is_the_swap() {
    let w = build_witness(&SuperOperator::transposition(3), TOL).unwrap();
    let swap = ComplexMatrix::from_fn(9, 9, |r, c| {
        let (i, j) = (r / 3, r % 3);
        let (k, l) = (c / 3, c % 3);
        C64::new(if i == l && j == k { 1.0 } else { 0.0 }, 0.0)
    });
    assert_eq!(w.matrix, swap);
    assert!((w.min_eigenvalue() + 1.0).abs() < 1e-12);
}

#[test]
fn witness_requires_hermiticity_preservation() {
    let s = SuperOperator::from_fn(3, |a| a.scale(C64::new(0.0, 1.0)));
    assert!(matches!(build_witness(&s, TOL), Err(Error::NotHermiticityPreserving { .. })));
}

#[test]
fn two_block_witness_is_nonnegative_on_product_states() {
    let w = build_witness(&two_block_map(), TOL).unwrap();
    let xs = random_unit_vectors(3, 1000, 1);
    let ys = random_unit_vectors(3, 1000, 2);
    for (x, y) in xs.iter().zip(&ys) {
        let rho = DensityMatrix::new(tensor(&x.outer(x), &y.outer(y)), TOL).unwrap();
        assert!(evaluate(&w, &rho, TOL).unwrap() >= -TOL);
    }
}

#[test]
fn negative_eigenvector_lives_on_the_coupled_pair() {
    let w = build_witness(&two_block_map(), TOL).unwrap();
    let (values, vectors) = negative_eigenspace(&w, TOL);
    assert_eq!(values.len(), 1);
    assert!((values[0] + FRAC_1_SQRT_2).abs() < 1e-12);
    let v = &vectors[0];
    for i in 0..9 {
        let weight = v[i].norm_sqr();
        if i == 5 || i == 7 {
            assert!((weight - 0.5).abs() < 1e-12);
        } else {
            assert!(weight < 1e-24);
        }
    }
    assert!((v[5] + v[7]).norm() < 1e-12);
}

#[test]
fn ppt_state_is_detected_and_ppt() {
    let w = build_witness(&two_block_map(), TOL).unwrap();
    let rho = ppt_entangled_state();
    assert!(is_ppt(&rho, (3, 3), TOL).unwrap());
    let value = evaluate(&w, &rho, TOL).unwrap();
    let expected = (2.0 - 2.0 * 2f64.sqrt()) / 7.0;
    let direct = (&w.matrix * rho.matrix()).trace().re;
    assert!((value - direct).abs() < 1e-14);
    assert!((value - expected).abs() < 1e-12);
}

#[test]
fn recipe_reproduces_ppt_state() {
    let w = build_witness(&two_block_map(), TOL).unwrap();
    let (lambda, rho0) = ppt_state_recipe();
    let cert = construct_detected_state(&w, &rho0, lambda, TOL).unwrap();
    assert!((cert.state.matrix() - ppt_entangled_state().matrix()).max_abs() < 1e-14);
    assert!(cert.ppt);
    cert.verify(&w, TOL).unwrap();
}

#[test]
fn construct_from_maximally_mixed_background() {
    let w = build_witness(&two_block_map(), TOL).unwrap();
    let cert = construct_detected_state(&w, &DensityMatrix::maximally_mixed(9), 0.5, TOL).unwrap();
    let expected = 0.5 * -FRAC_1_SQRT_2 + 0.5 * (3.0 + FRAC_1_SQRT_2) / 8.0;
    assert!((cert.witness_value - expected).abs() < 1e-12);
    assert!((cert.state.matrix().trace().re - 1.0).abs() < 1e-12);
    cert.verify(&w, TOL).unwrap();

    let mut tampered = cert.clone();
    tampered.witness_value += 1e-6;
    assert!(tampered.verify(&w, TOL).is_err());
    let mut flipped = cert;
    flipped.ppt = !flipped.ppt;
    assert!(flipped.verify(&w, TOL).is_err());
}

#[test]
fn construction_errors() {
    let w = build_witness(&two_block_map(), TOL).unwrap();
    let mixed = DensityMatrix::maximally_mixed(9);
    assert!(construct_detected_state(&w, &mixed, 0.0, TOL).is_err());
    assert!(construct_detected_state(&w, &mixed, 1.5, TOL).is_err());
    assert!(matches!(construct_detected_state(&w, &mixed, 0.01, TOL), Err(Error::DetectionFailed { .. })));
    let cp = build_witness(&SuperOperator::identity(3), TOL).unwrap();
    assert!(matches!(construct_detected_state(&cp, &mixed, 0.5, TOL), Err(Error::NoNegativeEigenvalue { .. })));
}

#[test]
fn density_matrix_validation() {
    assert!(DensityMatrix::new(ComplexMatrix::diag_real(&[0.5, 0.5]), TOL).is_ok());
    assert!(DensityMatrix::new(ComplexMatrix::diag_real(&[1.0, 1.0]), TOL).is_err());
    assert!(DensityMatrix::new(ComplexMatrix::diag_real(&[1.5, -0.5]), TOL).is_err());
    let m = ComplexMatrix::from_real(2, 2, &[0.5, 0.3, 0.1, 0.5]).unwrap();
    assert!(DensityMatrix::new(m, TOL).is_err());
    let pure = DensityMatrix::pure(&ComplexVector::from_real(&[3.0, 4.0])).unwrap();
    assert!((pure.matrix()[(0, 0)].re - 0.36).abs() < 1e-15);
}

#[test]
fn entangled_pure_state_is_not_ppt() {
    let bell = ComplexVector::from_real(&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    let rho = DensityMatrix::pure(&bell).unwrap();
    assert!(!is_ppt(&rho, (3, 3), TOL).unwrap());
    assert!(is_ppt(&DensityMatrix::maximally_mixed(9), (3, 3), TOL).unwrap());
    let pt = partial_transpose(rho.matrix(), (3, 3)).unwrap();
    assert!((ksweep_core::min_eigenvalue(&pt) + 1.0 / 3.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn witness_is_linear_in_the_map(a in any::<u64>(), b in any::<u64>(), x in 0.0..1.0f64) {
        let s = random_kraus_map(3, 2, a).unwrap();
        let t = random_kraus_map(3, 2, b).unwrap();
        let mix = s.scale(x).add(&t.scale(1.0 - x)).unwrap();
        let lhs = build_witness(&mix, TOL).unwrap().matrix;
        let rhs = &build_witness(&s, TOL).unwrap().matrix.scale_real(x)
            + &build_witness(&t, TOL).unwrap().matrix.scale_real(1.0 - x);
        prop_assert!((&lhs - &rhs).max_abs() < 1e-12);
    }

    #[test]
    fn kraus_witness_is_psd(seed in any::<u64>(), count in 1usize..4) {
        let w = build_witness(&random_kraus_map(3, count, seed).unwrap(), TOL).unwrap();
        prop_assert!(w.is_psd(TOL));
    }
}
