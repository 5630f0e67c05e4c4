//! Closed-form values checked through the public API.

use std::f64::consts::PI;

use numrad_core::ando::{ando_factorize, two_block_nilpotent, WitnessOptions};
use numrad_core::blockforms::{build_delta, build_gamma};
use numrad_core::certify::{fejer_riesz_scalar, refute, thm1_block2, thm2_delta, Claim, Refutation, TrigPolynomial};
use numrad_core::dilation::build_unitary_dilation;
use numrad_core::linalg::hermitian_eigenvalues;
use numrad_core::radius::{numerical_range_boundary, radius_of_power};
use numrad_core::{c64, numerical_radius, operator_norm, ComplexMatrix};

fn nilpotent(c: f64) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[c, 0.0]])
}

#[test]
fn shift_radii_match_cosine_formula() {
    // w(S_n) = cos(pi/(n+1))
    for n in 2..=7 {
        let w = numerical_radius(&ComplexMatrix::lower_shift(n)).unwrap().value;
        assert!((w - (PI / (n as f64 + 1.0)).cos()).abs() < 1e-10, "n = {n}");
    }
}

#[test]
fn shift4_powers() {
    let s = ComplexMatrix::lower_shift(4);
    assert!((radius_of_power(&s, 2).unwrap() - 0.5).abs() < 1e-10);
    assert!((radius_of_power(&s, 3).unwrap() - 0.5).abs() < 1e-10);
    assert!(radius_of_power(&s, 4).unwrap() < 1e-12);
}

#[test]
fn nilpotent_radius_is_half_the_entry() {
    for c in [0.3, 1.0, 2.0, 2.2] {
        let a = nilpotent(c);
        assert!((numerical_radius(&a).unwrap().value - c / 2.0).abs() < 1e-12);
        assert!((operator_norm(&a).unwrap() - c).abs() < 1e-12);
    }
}

#[test]
fn normal_matrix_radius_is_spectral_radius() {
    let a = ComplexMatrix::from_diag(&[c64::new(0.3, 0.4), c64::new(-0.9, 0.0), c64::new(0.0, 0.2)]);
    assert!((numerical_radius(&a).unwrap().value - 0.9).abs() < 1e-12);
}

#[test]
fn range_of_nilpotent_is_a_disc() {
    let pts = numerical_range_boundary(&nilpotent(2.0), 64).unwrap();
    for z in pts {
        assert!((z.norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn delta_one_of_identity() {
    // [[2, 1], [1, 2]] has eigenvalues 1 and 3
    let eig = hermitian_eigenvalues(&build_delta(&ComplexMatrix::identity(1), 1).unwrap()).unwrap();
    assert!((eig[0] - 1.0).abs() < 1e-14 && (eig[1] - 3.0).abs() < 1e-14);
}

#[test]
fn gamma_one_equals_delta_one() {
    let a = ComplexMatrix::from_fn(3, 3, |i, j| c64::new(i as f64 - j as f64, 0.5 * (i * j) as f64));
    assert!(build_gamma(&a, 1).unwrap().max_abs_diff(&build_delta(&a, 1).unwrap()) < 1e-15);
}

#[test]
fn boundary_nilpotent_passes_both_families() {
    let a = nilpotent(2.0);
    assert!(thm2_delta(&a, 12).unwrap().overall);
    assert!(!thm1_block2(&a).unwrap().is_positive);
}

#[test]
fn scalar_refutation_index() {
    // Δ_n(a) loses positivity once 2|a| cos(pi/(n+2)) > 2
    let a = ComplexMatrix::from_real_diag(&[1.1]);
    let expected = (1..)
        .find(|&n: &usize| 2.2 * (PI / (n as f64 + 2.0)).cos() > 2.0)
        .unwrap();
    match refute(Claim::Thm2Delta, &a, 40, 1e-9).unwrap() {
        Refutation::Refuted { n, .. } => assert_eq!(n, expected),
        other => panic!("expected a refutation, got {other:?}"),
    }
}

#[test]
fn fejer_riesz_of_one_plus_z() {
    // |1 + z|^2 = 2 + z + 1/z
    let q = TrigPolynomial::modulus_squared(&[c64::new(1.0, 0.0), c64::new(1.0, 0.0)]).unwrap();
    let p = fejer_riesz_scalar(&q).unwrap();
    assert_eq!(p.len(), 2);
    assert!((p[0].norm() - 1.0).abs() < 1e-7 && (p[1].norm() - 1.0).abs() < 1e-7);
}

#[test]
fn ando_of_boundary_nilpotent() {
    let a = nilpotent(1.8);
    let f = ando_factorize(&a, &WitnessOptions::default()).unwrap();
    let n = two_block_nilpotent(f.v.rows() / 2);
    assert!(f.v.adjoint_mul(&n.matmul(&f.v)).distance(&a) < 1e-7);
    assert!(f.residual("gram") < 1e-7);
}

#[test]
fn scalar_dilation_of_a_half() {
    let a = ComplexMatrix::from_real_diag(&[0.5]);
    let b = build_unitary_dilation(&a, 4).unwrap();
    assert_eq!(b.u.rows(), 5);
    assert!((b.u.data()[5].re - 0.75f64.sqrt()).abs() < 1e-14);
    assert!(b.compression_residuals().iter().all(|&r| r < 1e-14));
}
