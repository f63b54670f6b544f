use std::sync::Arc;

use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;

use super::stats;
use super::*;
use crate::cone::{preset, ConeRealization, TriangularElement};
use crate::error::Error;
use crate::gindikin::RieszDescriptor;
use crate::linalg::{dvec, numerical_rank};
use crate::quadratic::{GenericCone, QuadraticMap, VirtualQuadraticMap};
use crate::verify::vinberg_closed_form;

fn scalar_law() -> WishartLaw {
    WishartLaw::new(QuadraticMap::q_rs(1, 1).unwrap(), dvec(&[-1.0])).unwrap()
}

fn basic_law(cone: &Arc<ConeRealization>, weights: &[f64], rng: &mut ChaCha8Rng) -> WishartLaw {
    let theta = -cone.random_dual(rng);
    WishartLaw::new(VirtualQuadraticMap::basic(cone, weights).unwrap(), theta).unwrap()
}

/// A small dual element `η` keeping `−θ−η` inside the dual cone.
fn small_eta(law: &WishartLaw, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let dim = law.dim();
    loop {
        let eta = DVector::from_fn(dim, |_, _| rng.random_range(-0.2..0.2));
        if law.in_laplace_domain(&(&eta * 2.0)) {
            return eta;
        }
    }
}

#[test]
fn scalar_cone_closed_forms() {
    let law = scalar_law();
    assert_eq!(law.laplace(&dvec(&[0.0])).unwrap(), 1.0);
    for t in [0.0, 0.3, 2.0, 10.0] {
        assert_relative_eq!(law.laplace(&dvec(&[-t])).unwrap(), (1.0 + t).powf(-0.5), max_relative = 1e-14);
    }
    let one = dvec(&[1.0]);
    assert_relative_eq!(law.mean_form(&one).unwrap(), 0.5);
    assert_relative_eq!(law.covariance_form(&one, &one).unwrap(), 0.5);
    assert_relative_eq!(law.moment(&[one.clone(), one.clone()]).unwrap(), 0.75);
    assert_relative_eq!(law.univariate_moment(&one, 2).unwrap(), 0.75);
    // E(X²/2)^3 = 15/8
    assert_relative_eq!(law.univariate_moment(&one, 3).unwrap(), 15.0 / 8.0, max_relative = 1e-14);
    assert_eq!(law.mean_form(&dvec(&[0.0])).unwrap(), 0.0);
    assert!(matches!(law.laplace(&dvec(&[1.0])), Err(Error::OutOfLaplaceDomain)));
}

#[test]
fn laplace_is_a_ratio_of_riesz_transforms() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for name in ["vinberg", "sym(3)", "herm2c"] {
        let cone = preset(name).unwrap();
        let weights: Vec<f64> = (0..cone.rank()).map(|i| 1.5 + i as f64).collect();
        let riesz = RieszDescriptor::from_weights(&cone, &weights).unwrap();
        for _ in 0..10 {
            let law = basic_law(&cone, &weights, &mut rng);
            let eta = small_eta(&law, &mut rng);
            let want = riesz.laplace(&(law.theta() + &eta)).unwrap() / riesz.laplace(law.theta()).unwrap();
            assert_relative_eq!(law.laplace(&eta).unwrap(), want, max_relative = 1e-12);
        }
    }
}

#[test]
fn sym_mean_element_is_scaled_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (r, s) in [(2, 3), (3, 5), (4, 4)] {
        let q = QuadraticMap::q_rs(r, s).unwrap();
        let cone = q.codomain().realization().unwrap().clone();
        let eta0 = cone.random_dual(&mut rng);
        let law = WishartLaw::new(q, -&eta0).unwrap();
        let got = cone.to_matrix(&law.mean_element());
        let want = cone.dual_matrix(&eta0).try_inverse().unwrap() * (s as f64 / 2.0);
        assert!((got - want).amax() < 1e-12);
    }
}

#[test]
fn moment_formulas_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in ["sym(3)", "vinberg", "dual_vinberg", "herm2c"] {
        let cone = preset(name).unwrap();
        let weights: Vec<f64> = (0..cone.rank()).map(|_| rng.random_range(1.0..3.0)).collect();
        let law = basic_law(&cone, &weights, &mut rng);
        let eta = cone.random_dual(&mut rng);
        for n in 1..=6 {
            let etas = vec![eta.clone(); n];
            assert_relative_eq!(
                law.moment(&etas).unwrap(),
                law.univariate_moment(&eta, n).unwrap(),
                max_relative = 1e-9
            );
        }
        let e2 = cone.random_dual(&mut rng);
        let m = law.mean_form(&eta).unwrap() * law.mean_form(&e2).unwrap() + law.covariance_form(&eta, &e2).unwrap();
        assert_relative_eq!(law.moment(&[eta.clone(), e2]).unwrap(), m, max_relative = 1e-12);
        assert_relative_eq!(law.moment(std::slice::from_ref(&eta)).unwrap(), law.mean_form(&eta).unwrap());
    }
}

#[test]
fn moment_order_limit() {
    let law = scalar_law();
    let one = dvec(&[1.0]);
    let ten = vec![one.clone(); 10];
    assert_relative_eq!(law.moment(&ten).unwrap(), law.univariate_moment(&one, 10).unwrap());
    let mut mixed = ten.clone();
    mixed[3] = dvec(&[2.0]);
    assert!(matches!(law.moment(&mixed), Err(Error::OrderTooLarge { order: 10, max: 8 })));
    // E(X²/2)^N = (2N-1)!! / 2^N
    let double_fact: f64 = (1..=10).map(|k| (2 * k - 1) as f64).product();
    assert_relative_eq!(law.univariate_moment(&one, 10).unwrap(), double_fact / 1024.0, max_relative = 1e-12);
}

#[test]
fn integer_virtual_weights_match_concatenation() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let cone = preset("vinberg").unwrap();
    let q1 = QuadraticMap::basic(&cone, 0).unwrap();
    let q3 = QuadraticMap::basic(&cone, 2).unwrap();
    let vq = VirtualQuadraticMap::new(vec![(q1.clone(), 2.0), (q3.clone(), 3.0)]).unwrap();
    let concat = vq.to_true_map().unwrap();
    let theta = -cone.random_dual(&mut rng);
    let virt = WishartLaw::new(vq, theta.clone()).unwrap();
    let real = WishartLaw::new(concat, theta).unwrap();
    let etas: Vec<_> = (0..5).map(|_| small_eta(&virt, &mut rng)).collect();
    assert_relative_eq!(virt.laplace(&etas[0]).unwrap(), real.laplace(&etas[0]).unwrap(), max_relative = 1e-10);
    assert_relative_eq!(virt.moment(&etas).unwrap(), real.moment(&etas).unwrap(), max_relative = 1e-10);
    assert_eq!(virt.sigma(), real.sigma());
}

#[test]
fn finite_differences_reproduce_mean_and_covariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let cone = preset("vinberg").unwrap();
    let law = basic_law(&cone, &[2.5, 1.0, 1.5], &mut rng);
    let h = 1e-4;
    let f = |x: &DVector<f64>| law.log_laplace(x).unwrap();
    for _ in 0..5 {
        let a = small_eta(&law, &mut rng);
        let b = small_eta(&law, &mut rng);
        let d1 = (f(&(&a * h)) - f(&(&a * -h))) / (2.0 * h);
        assert!((d1 - law.mean_form(&a).unwrap()).abs() < 1e-6);
        let mixed = (f(&((&a + &b) * h)) - f(&((&a - &b) * h)) - f(&((&b - &a) * h)) + f(&((&a + &b) * -h)))
            / (4.0 * h * h);
        assert!((mixed - law.covariance_form(&a, &b).unwrap()).abs() < 1e-6);
    }
}

#[test]
fn sym1_density_is_gamma_pdf() {
    let cone = preset("sym(1)").unwrap();
    for (sigma, eta) in [(0.7, 1.0), (2.5, 0.3), (4.0, 3.0)] {
        let law = WishartLaw::gindikin(&cone, &[sigma], dvec(&[-eta])).unwrap();
        for y in [0.1, 1.0, 3.7] {
            let want = (-y * eta).exp() * eta.powf(sigma) * y.powf(sigma - 1.0) / gamma(sigma);
            assert_relative_eq!(law.density(&dvec(&[y])).unwrap(), want, max_relative = 1e-12);
        }
    }
}

#[test]
fn vinberg_density_closed_form() {
    let cone = preset("vinberg").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for s in [4.0, 5.5] {
        let eta = cone.random_dual(&mut rng);
        let law = WishartLaw::new(VirtualQuadraticMap::basic(&cone, &[s, 0.0, 0.0]).unwrap(), -&eta).unwrap();
        for _ in 0..20 {
            let y = cone.random_interior(&mut rng);
            assert_relative_eq!(law.density(&y).unwrap(), vinberg_closed_form(s, &y, &eta), max_relative = 1e-10);
        }
    }
}

#[test]
fn density_errors() {
    let cone = preset("sym(2)").unwrap();
    let law = WishartLaw::gindikin(&cone, &[2.0, 2.0], -cone.identity_coords()).unwrap();
    assert!(matches!(law.density(&dvec(&[1.0, 1.0, 1.0])), Err(Error::NotInCone { .. })));
    let singular = WishartLaw::gindikin(&cone, &[0.5, 0.5], -cone.identity_coords()).unwrap();
    assert!(matches!(singular.density(&dvec(&[1.0, 1.0, 0.0])), Err(Error::SingularLaw)));
    let generic = WishartLaw::new(QuadraticMap::polyhedral(), dvec(&[-1.0, -1.0, -1.0])).unwrap();
    assert!(matches!(generic.density(&dvec(&[1.0, 1.0, 3.0])), Err(Error::MissingTriangularForm)));
}

#[test]
fn dirac_and_singular_support() {
    let cone = preset("sym(3)").unwrap();
    let zero = WishartLaw::gindikin(&cone, &[0.0; 3], -cone.identity_coords()).unwrap();
    let batch = bartlett_sample(&zero, 1, 100).unwrap();
    assert!(batch.draws.iter().all(|y| y.iter().all(|&v| v == 0.0)));
    assert_eq!(zero.mean_element(), DVector::zeros(6));

    let rank_one = WishartLaw::new(VirtualQuadraticMap::basic(&cone, &[1.0, 0.0, 0.0]).unwrap(), -cone.identity_coords())
        .unwrap();
    assert_eq!(rank_one.epsilon(), Some(&[1, 0, 0][..]));
    let batch = bartlett_sample(&rank_one, 2, 500).unwrap();
    for y in &batch.draws {
        assert_eq!(numerical_rank(&cone.to_matrix(y), 1e-8), 1);
    }
}

#[test]
fn sym4_singular_orbit() {
    let cone = preset("sym(4)").unwrap();
    let law = WishartLaw::from_epsilon_u(&cone, &[0, 1, 0, 1], &[0.0, 1.0, 0.0, 1.0], -cone.identity_coords()).unwrap();
    assert_eq!(law.sigma(), Some(&[0.0, 1.0, 0.5, 1.5][..]));
    let batch = bartlett_sample(&law, 3, 1000).unwrap();
    let classes = batch.classify(&cone, ORBIT_TOL).unwrap();
    assert!(classes.iter().all(|e| e == &vec![0, 1, 0, 1]));
    for y in &batch.draws {
        assert_eq!(numerical_rank(&cone.to_matrix(y), 1e-8), 2);
    }
}

fn assert_mean_matches(batch: &SampleBatch, law: &WishartLaw, z_max: f64) {
    let mean = law.mean_element();
    for j in 0..law.dim() {
        let xs: Vec<f64> = batch.draws.iter().map(|y| y[j]).collect();
        let z = stats::mean(&xs).z(mean[j]);
        assert!(z < z_max, "coordinate {j}: z = {z}");
    }
}

#[test]
fn bartlett_means_on_blocked_cones() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for name in ["herm2c", "lorentz(3)", "vinberg", "dual_vinberg"] {
        let cone = preset(name).unwrap();
        let weights: Vec<f64> = (0..cone.rank()).map(|i| 2.0 + 0.5 * i as f64).collect();
        let law = basic_law(&cone, &weights, &mut rng);
        let batch = bartlett_sample(&law, 29, 20_000).unwrap();
        assert_mean_matches(&batch, &law, 4.0);
        let eta = cone.random_dual(&mut rng);
        let var = stats::variance(&batch.pairings(&eta));
        assert!(var.z(law.covariance_form(&eta, &eta).unwrap()) < 4.0, "{name}");
    }
}

#[test]
fn direct_sampler_on_generic_codomain() {
    let law = WishartLaw::new(QuadraticMap::polyhedral(), dvec(&[-1.0, -1.0, -1.0])).unwrap();
    assert!(matches!(bartlett_sample(&law, 0, 1), Err(Error::MissingTriangularForm)));
    let batch = direct_sample(&law, 31, 20_000).unwrap();
    assert_mean_matches(&batch, &law, 4.0);
    let gc = GenericCone::polyhedral();
    assert!(batch.draws.iter().all(|y| gc.contains(y)));
}

#[test]
fn direct_sampler_rejects_virtual_laws() {
    let cone = preset("herm2c").unwrap();
    let law = WishartLaw::new(VirtualQuadraticMap::basic(&cone, &[2.0, -2.0]).unwrap(), -cone.identity_coords()).unwrap();
    assert!(matches!(direct_sample(&law, 0, 1), Err(Error::VirtualMapUnsupported)));
    assert_eq!(law.sigma(), Some(&[1.0, 1.0][..]));
    assert_eq!(law.epsilon(), Some(&[1, 0][..]));
}

#[test]
fn herm2c_homogeneous_fit() {
    let q = QuadraticMap::herm2c().unwrap();
    let cone = q.codomain().realization().unwrap().clone();
    let id = DMatrix::identity(4, 4);
    let fit = HomogeneousFit::estimate(&q, &id).unwrap();
    assert_eq!(fit.m, vec![2.0, 2.0]);
    assert_relative_eq!(fit.constant, 1.0, max_relative = 1e-12);

    let theta = -cone.identity_coords();
    let law = WishartLaw::homogeneous(&q, 1.0, &id, theta.clone()).unwrap();
    assert_eq!(law.sigma(), Some(&[1.0, 1.0][..]));
    let virt = WishartLaw::new(VirtualQuadraticMap::basic(&cone, &[2.0, -2.0]).unwrap(), theta).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for _ in 0..5 {
        let eta = small_eta(&law, &mut rng);
        assert_relative_eq!(law.laplace(&eta).unwrap(), virt.laplace(&eta).unwrap(), max_relative = 1e-12);
    }
    let a = bartlett_sample(&law, 41, 20_000).unwrap();
    let b = direct_sample(&law, 43, 20_000).unwrap();
    for j in 0..4 {
        let xa: Vec<f64> = a.draws.iter().map(|y| y[j]).collect();
        let xb: Vec<f64> = b.draws.iter().map(|y| y[j]).collect();
        assert!(stats::mean(&xa).z_against(&stats::mean(&xb)) < 4.0);
    }
}

#[test]
fn homogeneous_rejects_wrong_conjugator() {
    let q = QuadraticMap::herm2c().unwrap();
    let mut g = DMatrix::identity(4, 4);
    g[(2, 0)] = 0.7;
    assert!(matches!(
        HomogeneousFit::estimate(&q, &g),
        Err(Error::RelativeInvarianceFailure { .. } | Error::NonIntegralExponent { .. } | Error::NotPD)
    ));
}

#[test]
fn conjugated_basic_map_uses_outer_transport() {
    let cone = preset("sym(3)").unwrap();
    let t = TriangularElement::from_slice(&cone, &[1.5, 0.5, 2.0, 0.3, -0.4, 1.1]).unwrap();
    let g0 = t.rho_matrix();
    let q = QuadraticMap::basic(&cone, 0).unwrap().pushforward(&g0).unwrap();
    let law = WishartLaw::homogeneous(&q, 4.0, &g0, -cone.identity_coords()).unwrap();
    let plain = WishartLaw::new(VirtualQuadraticMap::new(vec![(q, 4.0)]).unwrap(), -cone.identity_coords()).unwrap();
    let y = cone.random_interior(&mut ChaCha8Rng::seed_from_u64(47));
    let base = WishartLaw::gindikin(&cone, law.sigma().unwrap(), cone.adjoint(&g0) * -cone.identity_coords()).unwrap();
    let y0 = g0.clone().lu().solve(&y).unwrap();
    assert_relative_eq!(
        law.density(&y).unwrap(),
        base.density(&y0).unwrap() / g0.determinant().abs(),
        max_relative = 1e-10
    );
    let batch = bartlett_sample(&law, 53, 20_000).unwrap();
    assert_mean_matches(&batch, &plain, 4.0);
}

#[test]
fn pushforward_identity_and_means() {
    let mut rng = ChaCha8Rng::seed_from_u64(59);
    let cone = preset("vinberg").unwrap();
    let law = basic_law(&cone, &[3.0, 1.0, 2.0], &mut rng);
    let same = pushforward_law(&DMatrix::identity(5, 5), &law).unwrap();
    assert_eq!(same.theta(), law.theta());
    let t = cone.random_triangular(&mut rng);
    let g = cone.rho_matrix(&t).unwrap();
    let pushed = law.pushforward(&g).unwrap();
    let want = &g * law.mean_element();
    assert!((pushed.mean_element() - want).amax() < 1e-10 * (1.0 + pushed.mean_element().amax()));
    let eta = cone.random_dual(&mut rng);
    let adj = cone.adjoint(&g) * &eta;
    assert_relative_eq!(
        pushed.covariance_form(&eta, &eta).unwrap(),
        law.covariance_form(&adj, &adj).unwrap(),
        max_relative = 1e-10
    );
    assert!(matches!(law.pushforward(&DMatrix::zeros(5, 5)), Err(Error::SingularTransform)));
}

#[test]
fn pushforward_density_and_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let cone = preset("vinberg").unwrap();
    let law = basic_law(&cone, &[4.0, 1.0, 1.0], &mut rng);
    let g = cone.rho_matrix(&cone.random_triangular(&mut rng)).unwrap();
    let pushed = law.pushforward(&g).unwrap();
    let y = cone.random_interior(&mut rng);
    let y0 = g.clone().lu().solve(&y).unwrap();
    assert_relative_eq!(
        pushed.density(&y).unwrap(),
        law.density(&y0).unwrap() / g.determinant().abs(),
        max_relative = 1e-9
    );
    let batch = transform_batch(&g, &bartlett_sample(&law, 67, 10_000).unwrap()).unwrap();
    assert_mean_matches(&batch, &pushed, 4.0);
}

#[test]
fn sampling_is_deterministic() {
    let cone = preset("sym(3)").unwrap();
    let law = WishartLaw::new(VirtualQuadraticMap::basic(&cone, &[5.0, 0.0, 0.0]).unwrap(), -cone.identity_coords())
        .unwrap();
    let a = bartlett_sample(&law, 7, 3000).unwrap();
    let b = bartlett_sample(&law, 7, 3000).unwrap();
    let c = bartlett_sample(&law, 8, 3000).unwrap();
    assert_eq!(a.draws, b.draws);
    assert_ne!(a.draws, c.draws);
    let prefix = bartlett_sample(&law, 7, 1500).unwrap();
    assert_eq!(&a.draws[..1500], &prefix.draws[..]);
}

#[test]
fn csv_export_layout() {
    let cone = preset("sym(2)").unwrap();
    let law = WishartLaw::gindikin(&cone, &[2.0, 2.0], -cone.identity_coords()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("draws.csv");
    let batch = bartlett_sample(&law, 1, 5).unwrap();
    let side = batch.export(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "y11,y22,y21");
    assert_eq!(lines.len(), 6);
    let sidecar: Sidecar = serde_json::from_str(&std::fs::read_to_string(side).unwrap()).unwrap();
    assert_eq!(sidecar.count, 5);
    assert_eq!(sidecar.epsilon, Some(vec![1, 1]));

    let empty = bartlett_sample(&law, 1, 0).unwrap();
    let mut buf = Vec::new();
    empty.write_csv(&mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), "y11,y22,y21\n");
}

#[test]
fn theta_from_triangular_matches_solve() {
    let cone = preset("dual_vinberg").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let t = cone.random_triangular(&mut rng);
    let vq = VirtualQuadraticMap::basic(&cone, &[1.0, 2.0, 3.0]).unwrap();
    let a = WishartLaw::with_triangular(vq.clone(), &t).unwrap();
    let b = WishartLaw::new(vq, theta_of_triangular(&cone, &t).unwrap()).unwrap();
    let (ta, tb) = (a.bartlett().unwrap().triangular(), b.bartlett().unwrap().triangular());
    assert!((ta - tb).amax() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn laplace_normalized_and_covariance_psd(
        ci in 0usize..4,
        w in prop::collection::vec(1.0f64..4.0, 4),
        seed in any::<u64>(),
    ) {
        let cone = preset(["sym(3)", "vinberg", "dual_vinberg", "herm2c"][ci]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let law = basic_law(&cone, &w[..cone.rank()], &mut rng);
        prop_assert_eq!(law.laplace(&DVector::zeros(cone.dim())).unwrap(), 1.0);
        let a = cone.random_dual(&mut rng);
        let b = DVector::from_fn(cone.dim(), |_, _| rng.random_range(-1.0..1.0));
        prop_assert!(law.covariance_form(&b, &b).unwrap() >= -1e-12);
        let (ab, ba) = (law.covariance_form(&a, &b).unwrap(), law.covariance_form(&b, &a).unwrap());
        prop_assert!((ab - ba).abs() <= 1e-10 * (1.0 + ab.abs()));
        prop_assert!(law.mean_form(&a).unwrap() > 0.0);
    }
}
