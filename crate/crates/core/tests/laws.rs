use std::f64::consts::PI;

use conewishart::cone::{load_cone, preset, ConeSpec};
use conewishart::gindikin::{gamma_epsilon_u, riesz_exists, RieszDescriptor};
use conewishart::quadratic::{GenericCone, QuadraticMap, VirtualQuadraticMap};
use conewishart::wishart::stats;
use conewishart::wishart::{bartlett_sample, direct_sample, pushforward_law, transform_batch, WishartLaw};
use conewishart::Error;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn json_cone_spec_drives_a_law() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("vinberg.json");
    let spec = ConeSpec::of(&preset("vinberg").unwrap());
    std::fs::write(&path, serde_json::to_string_pretty(&spec).unwrap()).unwrap();
    let cone = load_cone(path.to_str().unwrap()).unwrap();
    assert_eq!(cone.dim(), 5);
    let law = WishartLaw::new(VirtualQuadraticMap::basic(&cone, &[3.0, 1.0, 1.0]).unwrap(), -cone.identity_coords())
        .unwrap();
    let batch = bartlett_sample(&law, 5, 20_000).unwrap();
    let mean = law.mean_element();
    for j in 0..5 {
        let xs: Vec<f64> = batch.draws.iter().map(|y| y[j]).collect();
        assert!(stats::mean(&xs).z(mean[j]) < 4.0);
    }
}

#[test]
fn polyhedral_generic_cone_law() {
    let q = QuadraticMap::polyhedral();
    let theta = DVector::from_column_slice(&[-1.0, -1.0, -1.0]);
    let law = WishartLaw::new(q, theta).unwrap();
    let cone = GenericCone::polyhedral();
    let batch = direct_sample(&law, 9, 20_000).unwrap();
    assert!(batch.draws.iter().all(|y| cone.contains(y)));
    let mean = law.mean_element();
    for j in 0..3 {
        let xs: Vec<f64> = batch.draws.iter().map(|y| y[j]).collect();
        assert!(stats::mean(&xs).z(mean[j]) < 4.0);
    }
    let outside = DVector::from_column_slice(&[5.0, 0.0, 0.0]);
    assert!(matches!(law.laplace(&outside), Err(Error::OutOfLaplaceDomain)));
}

#[test]
fn herm2c_virtual_and_true_descriptions_agree() {
    let cone = preset("herm2c").unwrap();
    let vq = VirtualQuadraticMap::basic(&cone, &[2.0, -2.0]).unwrap();
    let desc = riesz_exists(&cone, &vq).unwrap();
    let q = QuadraticMap::herm2c().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let eta = cone.random_dual(&mut rng);
        let want = PI * PI / q.phi(&eta).determinant().sqrt();
        let got = desc.laplace(&-&eta).unwrap();
        assert!((got - want).abs() < 1e-12 * want);
    }
    let t = cone.random_triangular(&mut rng);
    let virt = WishartLaw::with_triangular(vq, &t).unwrap();
    let homog = WishartLaw::homogeneous(&q, 1.0, &DMatrix::identity(4, 4), virt.theta().clone()).unwrap();
    let eta = cone.random_dual(&mut rng);
    assert!((virt.mean_form(&eta).unwrap() - homog.mean_form(&eta).unwrap()).abs() < 1e-10);
    assert!(
        (virt.covariance_form(&eta, &eta).unwrap() - homog.covariance_form(&eta, &eta).unwrap()).abs() < 1e-9
    );
}

#[test]
fn gamma_constant_for_half() {
    let cone = preset("sym(1)").unwrap();
    let g = gamma_epsilon_u(&cone, &[1], &[0.5]).unwrap();
    assert!((g - PI.sqrt() / 2.0).abs() < 1e-15);
}

#[test]
fn riesz_descriptor_from_sigma() {
    let cone = preset("sym(4)").unwrap();
    let d = RieszDescriptor::from_sigma(&cone, &[0.0, 1.0, 0.5, 1.5]).unwrap();
    assert_eq!(d.parameter().epsilon, vec![0, 1, 0, 1]);
    assert_eq!(d.weights(), &[0.0, 2.0, -1.0, 2.0]);
}

#[test]
fn pushforward_commutes_with_transform() {
    let cone = preset("dual_vinberg").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let law = WishartLaw::new(VirtualQuadraticMap::basic(&cone, &[2.0, 1.5, 3.0]).unwrap(), -cone.random_dual(&mut rng))
        .unwrap();
    let g = cone.rho_matrix(&cone.random_triangular(&mut rng)).unwrap();
    let pushed = pushforward_law(&g, &law).unwrap();
    let moved = transform_batch(&g, &bartlett_sample(&law, 1, 20_000).unwrap()).unwrap();
    let direct = bartlett_sample(&pushed, 2, 20_000).unwrap();
    for j in 0..cone.dim() {
        let a: Vec<f64> = moved.draws.iter().map(|y| y[j]).collect();
        let b: Vec<f64> = direct.draws.iter().map(|y| y[j]).collect();
        assert!(stats::mean(&a).z_against(&stats::mean(&b)) < 4.0);
    }
}
