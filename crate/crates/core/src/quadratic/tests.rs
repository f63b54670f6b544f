use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::*;
use crate::cone::preset;
use crate::error::Error;

fn v(x: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(x)
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

#[test]
fn polyhedral_phi_is_diagonal() {
    let q = QuadraticMap::polyhedral();
    let eta = v(&[0.3, -0.2, 1.1]);
    let want = DMatrix::from_diagonal(&v(&[1.1, 1.4, 1.2, 0.9]));
    assert_relative_eq!(q.phi(&eta), want, epsilon = 1e-14);
    let rebuilt = QuadraticMap::from_phi_tensor(q.slices().to_vec(), GenericCone::polyhedral()).unwrap();
    assert_eq!(rebuilt.m(), 4);
    // q(x) = Σ x_i² v_i
    let y = q.evaluate(&v(&[1.0, 2.0, 0.5, -1.0])).unwrap();
    assert_relative_eq!(y, v(&[4.25, 1.25, 6.25]), epsilon = 1e-14);
    assert!(GenericCone::polyhedral().contains(&y));
}

#[test]
fn herm2c_phi_matches_display() {
    let q = QuadraticMap::herm2c().unwrap();
    let e = v(&[1.3, 0.8, 0.2, -0.4]);
    let want = DMatrix::from_row_slice(4, 4, &[
        1.3, 0.0, 0.2, -0.4, //
        0.0, 1.3, 0.4, 0.2, //
        0.2, 0.4, 0.8, 0.0, //
        -0.4, 0.2, 0.0, 0.8,
    ]);
    assert_relative_eq!(q.phi(&e), want, epsilon = 1e-14);
    let det = 1.3 * 0.8 - 0.2 * 0.2 - 0.4 * 0.4;
    assert_relative_eq!(q.phi(&e).determinant(), det * det, epsilon = 1e-12);
    QuadraticMap::from_phi_tensor(q.slices().to_vec(), preset("herm2c").unwrap()).unwrap();
    // q(e_1) is the idempotent with diagonal block pattern (1, 1, 0)
    let y = q.evaluate(&v(&[1.0, 0.0, 0.0, 0.0])).unwrap();
    assert_relative_eq!(y, v(&[1.0, 0.0, 0.0, 0.0]));
    let m = preset("herm2c").unwrap().to_matrix(&y);
    assert_relative_eq!(m, DMatrix::from_diagonal(&v(&[1.0, 1.0, 0.0])));
}

#[test]
fn construction_errors() {
    let s2 = preset("sym(2)").unwrap();
    let eye = DMatrix::<f64>::identity(2, 2);
    assert!(matches!(
        QuadraticMap::from_phi_tensor(vec![eye.clone(), eye.clone()], s2.clone()),
        Err(Error::DimensionMismatch { .. })
    ));
    let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
    assert!(matches!(
        QuadraticMap::from_phi_tensor(vec![asym, eye.clone(), eye.clone()], s2.clone()),
        Err(Error::AsymmetricSlice { index: 0, .. })
    ));
    let neg = -eye.clone();
    assert!(matches!(
        QuadraticMap::from_phi_tensor(vec![neg.clone(), neg, DMatrix::zeros(2, 2)], s2.clone()),
        Err(Error::PositivityFailure { .. })
    ));
    assert!(matches!(QuadraticMap::basic(&s2, 2), Err(Error::IndexOutOfRange { .. })));
    assert!(matches!(QuadraticMap::standard(&s2, &[0, 0]), Err(Error::ZeroEpsilon)));
    assert!(matches!(QuadraticMap::restriction(3, &[]), Err(Error::EmptyIndexSet)));
    let q = QuadraticMap::basic(&s2, 0).unwrap();
    assert!(matches!(q.evaluate(&v(&[1.0])), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn evaluate_zero_and_q_rs() {
    let q = QuadraticMap::q_rs(3, 2).unwrap();
    assert_eq!(q.m(), 6);
    assert_eq!(q.evaluate(&DVector::zeros(6)).unwrap(), DVector::zeros(6));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = gaussian(&mut rng, 6);
    // domain layout is column-major: column 1 then column 2 of the 3×2 matrix
    let xm = DMatrix::from_column_slice(3, 2, x.as_slice());
    let s3 = preset("sym(3)").unwrap();
    let want = s3.from_matrix(&(&xm * xm.transpose())).unwrap();
    assert_relative_eq!(q.evaluate(&x).unwrap(), want, epsilon = 1e-12);
    let ones = QuadraticMap::direct_sum(&[QuadraticMap::q_rs(3, 1).unwrap(), QuadraticMap::q_rs(3, 1).unwrap()])
        .unwrap();
    for (a, b) in ones.slices().iter().zip(q.slices()) {
        assert_eq!(a, b);
    }
    assert_eq!(ones.meta().basic_counts, Some(vec![2, 0, 0]));
}

#[test]
fn vinberg_basic_maps() {
    let vb = preset("vinberg").unwrap();
    let q1 = QuadraticMap::basic(&vb, 0).unwrap();
    let e = v(&[1.1, 1.7, 0.9, 0.3, -0.4]);
    let want = DMatrix::from_row_slice(3, 3, &[1.1, 0.3, -0.4, 0.3, 1.7, 0.0, -0.4, 0.0, 0.9]);
    assert_relative_eq!(q1.phi(&e), want, epsilon = 1e-14);
    assert_relative_eq!(QuadraticMap::basic(&vb, 1).unwrap().phi(&e)[(0, 0)], 1.7);
    // q^1(x) = x xᵀ for x = x_0 w_0 + x_1 w_21 + x_2 w_31
    let x = v(&[0.7, -1.2, 2.0]);
    let w = vb.basic_basis(0);
    let xm = &w[0] * x[0] + &w[1] * x[1] + &w[2] * x[2];
    let want = vb.from_matrix(&(&xm * xm.transpose())).unwrap();
    assert_relative_eq!(q1.evaluate(&x).unwrap(), want, epsilon = 1e-13);
}

#[test]
fn sym_first_basic_map_is_q_r1() {
    let s3 = preset("sym(3)").unwrap();
    let q = QuadraticMap::basic(&s3, 0).unwrap();
    let e = v(&[1.0, 2.0, 3.0, 0.1, 0.2, 0.3]);
    assert_relative_eq!(q.phi(&e), s3.dual_matrix(&e), epsilon = 1e-14);
    let full = QuadraticMap::restriction(3, &[0, 1, 2]).unwrap();
    assert_relative_eq!(full.phi(&e), q.phi(&e), epsilon = 1e-14);
}

#[test]
fn standard_map_is_triangular_square() {
    let s3 = preset("sym(3)").unwrap();
    let eps = [1, 0, 1];
    let q = QuadraticMap::standard(&s3, &eps).unwrap();
    assert_eq!(q.m(), 4);
    let x = v(&[1.5, -0.5, 0.25, 2.0]);
    let t = standard_triangular(&s3, &eps, &x).unwrap();
    let tm = s3.lower_matrix(&t);
    let pattern = DMatrix::from_row_slice(3, 3, &[1.5, 0.0, 0.0, -0.5, 0.0, 0.0, 0.25, 0.0, 2.0]);
    assert_eq!(tm, pattern);
    let want = s3.from_matrix(&(&tm * tm.transpose())).unwrap();
    assert_relative_eq!(q.evaluate(&x).unwrap(), want, epsilon = 1e-13);
}

#[test]
fn last_standard_map_has_rank_one_image() {
    let s3 = preset("sym(3)").unwrap();
    let q = QuadraticMap::standard(&s3, &[0, 0, 1]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10 {
        let y = q.evaluate(&gaussian(&mut rng, q.m())).unwrap();
        assert!(crate::linalg::numerical_rank(&s3.to_matrix(&y), 1e-8) <= 1);
    }
}

#[test]
fn restriction_maps() {
    let q = QuadraticMap::restriction(3, &[1, 2]).unwrap();
    let s3 = preset("sym(3)").unwrap();
    let y = s3.to_matrix(&q.evaluate(&v(&[1.3, -0.7])).unwrap());
    for j in 0..3 {
        assert_eq!(y[(0, j)], 0.0);
        assert_eq!(y[(j, 0)], 0.0);
    }
    let q1 = QuadraticMap::restriction(3, &[0]).unwrap();
    let e = v(&[2.5, 1.0, 1.0, 0.3, 0.3, 0.3]);
    assert_eq!(q1.phi(&e), DMatrix::from_element(1, 1, 2.5));
}

#[test]
fn restriction_is_permuted_basic_map() {
    let s3 = preset("sym(3)").unwrap();
    // I = {1, 3}; the last-k basic map is q^2 on coordinates {2, 3}
    let qi = QuadraticMap::restriction(3, &[0, 2]).unwrap();
    let basic = QuadraticMap::basic(&s3, 1).unwrap();
    // w0 sends e2 ↦ e1, e3 ↦ e3
    let mut perm = DMatrix::zeros(3, 3);
    perm[(0, 1)] = 1.0;
    perm[(1, 0)] = 1.0;
    perm[(2, 2)] = 1.0;
    let g0 = s3.congruence_matrix(&perm).unwrap();
    let pushed = basic.pushforward(&g0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let x = gaussian(&mut rng, 2);
        assert_relative_eq!(pushed.evaluate(&x).unwrap(), qi.evaluate(&x).unwrap(), epsilon = 1e-13);
    }
}

#[test]
fn direct_sum_and_virtual_sum_checks() {
    let s2 = preset("sym(2)").unwrap();
    let s3 = preset("sym(3)").unwrap();
    let a = QuadraticMap::basic(&s2, 0).unwrap();
    let b = QuadraticMap::basic(&s3, 0).unwrap();
    assert!(matches!(QuadraticMap::direct_sum(&[a.clone(), b.clone()]), Err(Error::CodomainMismatch)));
    assert!(matches!(
        VirtualQuadraticMap::new(vec![(a.clone(), 1.0), (b, 1.0)]),
        Err(Error::CodomainMismatch)
    ));
    let a2 = QuadraticMap::basic(&s2, 1).unwrap();
    let sum = QuadraticMap::direct_sum(&[a.clone(), a2.clone()]).unwrap();
    let e = v(&[1.2, 0.7, 0.1]);
    let want = crate::linalg::block_diag(&[a.phi(&e), a2.phi(&e)]);
    assert_eq!(sum.phi(&e), want);
    let std = QuadraticMap::standard(&s2, &[1, 1]).unwrap();
    assert_eq!(std.phi(&e), want);
    // unsorted concatenations lose the basic-count description
    assert_eq!(QuadraticMap::direct_sum(&[a2, a]).unwrap().meta().basic_counts, None);
}

#[test]
fn virtual_basic_weights() {
    let lz = preset("herm2c").unwrap();
    let vq = VirtualQuadraticMap::basic(&lz, &[2.0, -2.0]).unwrap();
    assert_eq!(vq.basic_weights(), Some(vec![2.0, -2.0]));
    assert!(vq.to_true_map().is_none());
    let s3 = preset("sym(3)").unwrap();
    let vq = VirtualQuadraticMap::basic(&s3, &[2.0, 0.0, 1.0]).unwrap();
    let q = vq.to_true_map().unwrap();
    assert_eq!(q.m(), 2 * 3 + 1);
    assert_eq!(q.meta().basic_counts, Some(vec![2, 0, 1]));
    assert!(VirtualQuadraticMap::basic(&s3, &[f64::NAN, 0.0, 0.0]).is_err());
}

#[test]
fn pushforward_identity_and_relative_invariance() {
    let vb = preset("vinberg").unwrap();
    let q = QuadraticMap::basic(&vb, 0).unwrap();
    let id = DMatrix::identity(vb.dim(), vb.dim());
    let same = q.pushforward(&id).unwrap();
    for (a, b) in same.slices().iter().zip(q.slices()) {
        assert_relative_eq!(a, b, epsilon = 1e-15);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let t = vb.random_triangular(&mut rng);
    let g = vb.rho_matrix(&t).unwrap();
    let gq = q.pushforward(&g).unwrap();
    let ratios: Vec<f64> = (0..10)
        .map(|_| {
            let e = vb.random_dual(&mut rng);
            gq.phi(&e).determinant() / q.phi(&e).determinant()
        })
        .collect();
    for r in &ratios {
        assert_relative_eq!(*r, ratios[0], max_relative = 1e-9);
    }
    assert!(matches!(q.pushforward(&DMatrix::zeros(5, 5)), Err(Error::SingularTransform)));
}

#[test]
fn json_round_trip() {
    for q in [QuadraticMap::herm2c().unwrap(), QuadraticMap::polyhedral(), QuadraticMap::q_rs(2, 2).unwrap()] {
        let text = serde_json::to_string(&q.to_json()).unwrap();
        let back = QuadraticMap::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.slices(), q.slices());
        assert_eq!(back.meta(), q.meta());
        assert!(back.codomain().same_as(q.codomain()));
    }
    let by_name = r#"{"m":1,"codomain":"sym(1)","phi":[[[1.0]]]}"#;
    let q = QuadraticMap::from_json(&serde_json::from_str(by_name).unwrap()).unwrap();
    assert_eq!(q.n(), 1);
}

fn map_strategy() -> impl Strategy<Value = usize> {
    0usize..6
}

fn pick(i: usize) -> QuadraticMap {
    match i {
        0 => QuadraticMap::polyhedral(),
        1 => QuadraticMap::herm2c().unwrap(),
        2 => QuadraticMap::q_rs(3, 2).unwrap(),
        3 => QuadraticMap::standard(&preset("vinberg").unwrap(), &[1, 0, 1]).unwrap(),
        4 => QuadraticMap::basic(&preset("dual_vinberg").unwrap(), 0).unwrap(),
        _ => QuadraticMap::restriction(4, &[1, 3]).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn defining_identity(i in map_strategy(), seed in any::<u64>()) {
        let q = pick(i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = gaussian(&mut rng, q.m());
        let eta = gaussian(&mut rng, q.n());
        let lhs = q.codomain().coupling(&q.evaluate(&x).unwrap(), &eta);
        let rhs = (x.transpose() * q.phi(&eta) * &x)[(0, 0)];
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()) * 10.0);
    }

    #[test]
    fn omega_positivity(i in map_strategy(), seed in any::<u64>()) {
        let q = pick(i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = gaussian(&mut rng, q.m());
        let eta = -q.codomain().default_theta();
        // ⟨q(x), η⟩ ≥ λ_min(φ(η)) ‖x‖² > 0
        let (lmin, _) = crate::linalg::eig_range(&q.phi(&eta));
        let val = q.codomain().coupling(&q.evaluate(&x).unwrap(), &eta);
        prop_assert!(val >= lmin * x.norm_squared() * (1.0 - 1e-12));
        prop_assert!(val > 0.0);
    }
}
