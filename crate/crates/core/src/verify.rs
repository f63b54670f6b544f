//! The cross-validation battery run by `conewishart verify` and the acceptance target.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::cone::{preset, ConeRealization, Preset};
use crate::error::Result;
use crate::gindikin::{riesz_exists, RieszDescriptor};
use crate::linalg::{eig_range, numerical_rank};
use crate::quadratic::{QuadraticMap, VirtualQuadraticMap};
use crate::wishart::stats::{self, Estimate};
use crate::wishart::{bartlett_sample, direct_sample, pushforward_law, transform_batch, SampleBatch, WishartLaw};

/// `Cov(⟨Y,η⟩, ⟨Y,η'⟩)` as used by the checks; replaceable to exercise the suite.
pub type CovarianceFn = fn(&WishartLaw, &DVector<f64>, &DVector<f64>) -> Result<f64>;

/// Importance-sampling budget for the normalization check, independent of `draws`.
pub const NORMALIZATION_DRAWS: usize = 200_000;

pub const PRESETS: [&str; 6] = ["sym(3)", "vinberg", "dual_vinberg", "lorentz(1)", "lorentz(3)", "herm2c"];

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Draws for the Monte Carlo checks.
    pub draws: usize,
    pub covariance: CovarianceFn,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: 20240607, draws: 100_000, covariance: WishartLaw::covariance_form }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(serialize_with = "as_seconds")]
    pub elapsed: Duration,
}

fn as_seconds<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl std::fmt::Display for CheckResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} [{}] {} ({:.2}s): {}", self.id, self.name, self.elapsed.as_secs_f64(), self.detail)
    }
}

type Outcome = std::result::Result<String, String>;
type Check = (&'static str, fn(&VerifyConfig) -> Outcome);

pub const CHECKS: [Check; 9] = [
    ("gindikin criterion on Sym(r)", check_gindikin),
    ("Hermitian 2x2 Laplace identity", check_herm2c),
    ("moment formula cross-checks", check_moments),
    ("Monte Carlo validation on Sym(3)", check_monte_carlo),
    ("two-sampler equivalence", check_two_samplers),
    ("singular support on Sym(4)", check_singular_support),
    ("density correctness", check_density),
    ("equivariance on the Vinberg cone", check_equivariance),
    ("structural oracles", check_structure),
];

pub fn run_check(id: usize, config: &VerifyConfig) -> CheckResult {
    let (name, f) = CHECKS[id - 1];
    let start = Instant::now();
    let outcome = f(config);
    let elapsed = start.elapsed();
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CheckResult { id, name, passed, detail, elapsed }
}

pub fn run_all(config: &VerifyConfig) -> Vec<CheckResult> {
    (1..=CHECKS.len()).map(|id| run_check(id, config)).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn rng_for(config: &VerifyConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(config.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn check_gindikin(_: &VerifyConfig) -> Outcome {
    let mut tested = 0;
    for r in 2..=5usize {
        let cone = Preset::Sym(r).build().map_err(err)?;
        for step in 0..=24 {
            let s = step as f64 * 0.25;
            let mut w = vec![0.0; r];
            w[0] = s;
            let vq = VirtualQuadraticMap::basic(&cone, &w).map_err(err)?;
            let accepted = riesz_exists(&cone, &vq).is_ok();
            let expected = (s.fract() == 0.0 && s <= (r - 1) as f64) || s > (r - 1) as f64;
            ensure(accepted == expected, || format!("Sym({r}), s = {s}: accepted = {accepted}"))?;
            tested += 1;
        }
    }
    Ok(format!("{tested} (r, s) pairs match {{0, …, r−1}} ∪ (r−1, ∞)"))
}

fn check_herm2c(config: &VerifyConfig) -> Outcome {
    let cone = preset("herm2c").map_err(err)?;
    let desc = RieszDescriptor::from_weights(&cone, &[2.0, -2.0]).map_err(err)?;
    let q = QuadraticMap::herm2c().map_err(err)?;
    let mut rng = rng_for(config, 2);
    let (mut worst_a, mut worst_b) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let eta = cone.random_dual(&mut rng);
        let got = desc.laplace(&-&eta).map_err(err)?;
        let quad = eta[0] * eta[1] - eta[2] * eta[2] - eta[3] * eta[3];
        worst_a = worst_a.max(rel(got, PI * PI / quad));
        worst_b = worst_b.max(rel(got, PI * PI / q.phi(&eta).determinant().sqrt()));
    }
    ensure(worst_a < 1e-10 && worst_b < 1e-10, || {
        format!("max rel. error {worst_a:.2e} (closed form), {worst_b:.2e} (phi determinant)")
    })?;
    Ok(format!("1000 points, max rel. error {worst_a:.2e} / {worst_b:.2e}"))
}

fn random_law(cone: &Arc<ConeRealization>, rng: &mut ChaCha8Rng) -> Result<WishartLaw> {
    let w: Vec<f64> = (0..cone.rank()).map(|_| rng.random_range(1.0..4.0)).collect();
    WishartLaw::new(VirtualQuadraticMap::basic(cone, &w)?, -cone.random_dual(rng))
}

/// A direction `η` with `±2η` inside the Laplace domain.
fn small_direction(law: &WishartLaw, rng: &mut ChaCha8Rng, scale: f64) -> DVector<f64> {
    let mut s = scale;
    loop {
        let eta = DVector::from_fn(law.dim(), |_, _| rng.random_range(-s..s));
        if law.in_laplace_domain(&(&eta * 2.0)) && law.in_laplace_domain(&(&eta * -2.0)) {
            return eta;
        }
        s *= 0.9;
    }
}

fn check_moments(config: &VerifyConfig) -> Outcome {
    let mut rng = rng_for(config, 3);
    let mut worst_a = 0.0f64;
    for i in 0..100 {
        let cone = preset(PRESETS[i % PRESETS.len()]).map_err(err)?;
        let law = random_law(&cone, &mut rng).map_err(err)?;
        let eta = cone.random_dual(&mut rng);
        for n in 1..=6 {
            let a = law.moment(&vec![eta.clone(); n]).map_err(err)?;
            let b = law.univariate_moment(&eta, n).map_err(err)?;
            worst_a = worst_a.max(rel(a, b));
        }
    }
    ensure(worst_a < 1e-9, || format!("(a) permutation vs partition sum: max rel. error {worst_a:.2e}"))?;

    let mut worst_b = 0.0f64;
    for i in 0..20 {
        let cone = preset(PRESETS[i % PRESETS.len()]).map_err(err)?;
        let pairs: Vec<(QuadraticMap, f64)> = (0..cone.rank())
            .map(|k| Ok((QuadraticMap::basic(&cone, k)?, rng.random_range(1..4) as f64)))
            .collect::<Result<_>>()
            .map_err(err)?;
        let vq = VirtualQuadraticMap::new(pairs).map_err(err)?;
        let concat = vq.to_true_map().ok_or("integer weights must concatenate")?;
        let theta = -cone.random_dual(&mut rng);
        let virt = WishartLaw::new(vq, theta.clone()).map_err(err)?;
        let real = WishartLaw::new(concat, theta).map_err(err)?;
        let etas: Vec<DVector<f64>> = (0..4).map(|_| small_direction(&virt, &mut rng, 0.3)).collect();
        let pairs = [
            (virt.laplace(&etas[0]).map_err(err)?, real.laplace(&etas[0]).map_err(err)?),
            (virt.mean_form(&etas[1]).map_err(err)?, real.mean_form(&etas[1]).map_err(err)?),
            (
                (config.covariance)(&virt, &etas[1], &etas[2]).map_err(err)?,
                (config.covariance)(&real, &etas[1], &etas[2]).map_err(err)?,
            ),
            (virt.moment(&etas).map_err(err)?, real.moment(&etas).map_err(err)?),
            (virt.univariate_moment(&etas[3], 5).map_err(err)?, real.univariate_moment(&etas[3], 5).map_err(err)?),
        ];
        for (a, b) in pairs {
            worst_b = worst_b.max((a - b).abs() / a.abs().max(b.abs()).max(1e-300));
        }
    }
    ensure(worst_b < 1e-10, || format!("(b) virtual vs concatenated: max rel. error {worst_b:.2e}"))?;

    let h = 1e-4;
    let mut worst_c = 0.0f64;
    for i in 0..20 {
        let cone = preset(PRESETS[i % PRESETS.len()]).map_err(err)?;
        let law = random_law(&cone, &mut rng).map_err(err)?;
        let a = small_direction(&law, &mut rng, 0.5);
        let b = small_direction(&law, &mut rng, 0.5);
        let f = |x: DVector<f64>| law.log_laplace(&x);
        let d1 = (f(&a * h).map_err(err)? - f(&a * -h).map_err(err)?) / (2.0 * h);
        let d2 = (f((&a + &b) * h).map_err(err)? - f((&a - &b) * h).map_err(err)? - f((&b - &a) * h).map_err(err)?
            + f((&a + &b) * -h).map_err(err)?)
            / (4.0 * h * h);
        worst_c = worst_c.max((d1 - law.mean_form(&a).map_err(err)?).abs());
        worst_c = worst_c.max((d2 - (config.covariance)(&law, &a, &b).map_err(err)?).abs());
    }
    ensure(worst_c < 1e-6, || format!("(c) finite differences: max abs. error {worst_c:.2e}"))?;
    Ok(format!("(a) {worst_a:.1e}  (b) {worst_b:.1e}  (c) {worst_c:.1e}"))
}

fn coordinate(batch: &SampleBatch, j: usize) -> Vec<f64> {
    batch.draws.iter().map(|y| y[j]).collect()
}

fn sym3_law() -> Result<(Arc<ConeRealization>, WishartLaw)> {
    let cone = preset("sym(3)")?;
    let law = WishartLaw::new(VirtualQuadraticMap::basic(&cone, &[5.0, 0.0, 0.0])?, -cone.identity_coords())?;
    Ok((cone, law))
}

fn check_monte_carlo(config: &VerifyConfig) -> Outcome {
    let (cone, law) = sym3_law().map_err(err)?;
    let batch = bartlett_sample(&law, config.seed, config.draws).map_err(err)?;
    let expected = cone.coords_of_matrix(&(DMatrix::identity(3, 3) * 2.5));
    let mut worst_mean = 0.0f64;
    for j in 0..cone.dim() {
        worst_mean = worst_mean.max(stats::mean(&coordinate(&batch, j)).z(expected[j]));
    }
    ensure(worst_mean < 3.0, || format!("sample mean off by {worst_mean:.2} standard errors"))?;

    let mut rng = rng_for(config, 4);
    let mut worst_cov = 0.0f64;
    let dirs: Vec<DVector<f64>> =
        std::iter::once(cone.identity_coords()).chain((0..3).map(|_| cone.random_dual(&mut rng))).collect();
    for a in &dirs {
        for b in &dirs {
            let est = stats::covariance(&batch.pairings(a), &batch.pairings(b));
            worst_cov = worst_cov.max(est.z((config.covariance)(&law, a, b).map_err(err)?));
        }
    }
    ensure(worst_cov < 4.0, || format!("covariance form off by {worst_cov:.2} standard errors"))?;

    let mut worst_mgf = 0.0f64;
    for _ in 0..5 {
        let eta = small_direction(&law, &mut rng, 0.15);
        let values: Vec<f64> = batch.pairings(&eta).iter().map(|v| v.exp()).collect();
        worst_mgf = worst_mgf.max(stats::mean(&values).z(law.laplace(&eta).map_err(err)?));
    }
    ensure(worst_mgf < 3.0, || format!("empirical MGF off by {worst_mgf:.2} standard errors"))?;
    Ok(format!(
        "{} draws; max z: mean {worst_mean:.2}, covariance {worst_cov:.2}, MGF {worst_mgf:.2}",
        config.draws
    ))
}

fn moment_statistics(batch: &SampleBatch) -> Vec<Estimate> {
    let dim = batch.info.names.len();
    let cols: Vec<Vec<f64>> = (0..dim).map(|j| coordinate(batch, j)).collect();
    let mut out: Vec<Estimate> = cols.iter().map(|c| stats::mean(c)).collect();
    for i in 0..dim {
        for j in i..dim {
            out.push(stats::covariance(&cols[i], &cols[j]));
        }
    }
    out
}

fn check_two_samplers(config: &VerifyConfig) -> Outcome {
    let (cone, basic) = sym3_law().map_err(err)?;
    let direct = WishartLaw::new(QuadraticMap::q_rs(3, 5).map_err(err)?, -cone.identity_coords()).map_err(err)?;
    let a = bartlett_sample(&basic, config.seed, config.draws).map_err(err)?;
    let b = direct_sample(&direct, config.seed.wrapping_add(1), config.draws).map_err(err)?;
    let (sa, sb) = (moment_statistics(&a), moment_statistics(&b));
    let worst = sa.iter().zip(&sb).map(|(x, y)| x.z_against(y)).fold(0.0, f64::max);
    ensure(worst < 4.0, || format!("max joint z {worst:.2}"))?;
    Ok(format!("{} mean/covariance statistics, max joint z {worst:.2}", sa.len()))
}

fn check_singular_support(config: &VerifyConfig) -> Outcome {
    let cone = preset("sym(4)").map_err(err)?;
    let law = WishartLaw::from_epsilon_u(&cone, &[0, 1, 0, 1], &[0.0, 1.0, 0.0, 1.0], -cone.identity_coords())
        .map_err(err)?;
    let n = 10_000;
    let batch = bartlett_sample(&law, config.seed, n).map_err(err)?;
    let mut good = 0;
    for y in &batch.draws {
        let m = cone.to_matrix(y);
        let (min, max) = eig_range(&m);
        if min >= -1e-8 * max.abs() && numerical_rank(&m, 1e-8) == 2 {
            good += 1;
        }
    }
    ensure(good == n, || format!("{good}/{n} draws PSD with rank 2"))?;
    Ok(format!("{good}/{n} draws PSD with rank 2"))
}

/// The Vinberg density for weights `(s, 0, 0)` at `θ = −η`, written out coordinatewise.
pub fn vinberg_closed_form(s: f64, y: &DVector<f64>, eta: &DVector<f64>) -> f64 {
    let (y11, y22, y33, y21, y31) = (y[0], y[1], y[2], y[3], y[4]);
    let (e11, e22, e33, e21, e31) = (eta[0], eta[1], eta[2], eta[3], eta[4]);
    let pairing = y11 * e11 + y22 * e22 + y33 * e33 + 2.0 * (y21 * e21 + y31 * e31);
    let det_eta = e11 * e22 * e33 - e33 * e21 * e21 - e22 * e31 * e31;
    (-pairing).exp()
        * det_eta.powf(s / 2.0)
        * y11.powf(1.0 - s / 2.0)
        * (y11 * y22 - y21 * y21).powf((s - 3.0) / 2.0)
        * (y11 * y33 - y31 * y31).powf((s - 3.0) / 2.0)
        / (PI * gamma(s / 2.0) * gamma((s - 1.0) / 2.0).powi(2))
}

fn check_density(config: &VerifyConfig) -> Outcome {
    let mut rng = rng_for(config, 7);
    let s1 = preset("sym(1)").map_err(err)?;
    let mut worst_a = 0.0f64;
    for _ in 0..50 {
        let sigma = rng.random_range(0.2..6.0);
        let eta = rng.random_range(0.2..4.0);
        let law = WishartLaw::gindikin(&s1, &[sigma], DVector::from_element(1, -eta)).map_err(err)?;
        for _ in 0..20 {
            let y = rng.random_range(0.01..10.0);
            let want = (-y * eta).exp() * eta.powf(sigma) * y.powf(sigma - 1.0) / gamma(sigma);
            worst_a = worst_a.max(rel(law.density(&DVector::from_element(1, y)).map_err(err)?, want));
        }
    }
    ensure(worst_a < 1e-12, || format!("(a) Sym(1) vs Gamma pdf: max rel. error {worst_a:.2e}"))?;

    let vb = preset("vinberg").map_err(err)?;
    let s = 4.0;
    let mut worst_b = 0.0f64;
    for _ in 0..1000 {
        let eta = vb.random_dual(&mut rng);
        let law = WishartLaw::new(VirtualQuadraticMap::basic(&vb, &[s, 0.0, 0.0]).map_err(err)?, -&eta).map_err(err)?;
        let y = vb.random_interior(&mut rng);
        worst_b = worst_b.max(rel(law.density(&y).map_err(err)?, vinberg_closed_form(s, &y, &eta)));
    }
    ensure(worst_b < 1e-10, || format!("(b) Vinberg closed form: max rel. error {worst_b:.2e}"))?;

    let integral = lorentz1_normalization(config.seed, NORMALIZATION_DRAWS).map_err(err)?;
    ensure((integral.value - 1.0).abs() < 0.01, || {
        format!("(c) Lorentz(1) integral {:.4} ± {:.4}", integral.value, integral.se)
    })?;
    Ok(format!(
        "(a) {worst_a:.1e}  (b) {worst_b:.1e}  (c) integral {:.4} ± {:.4}",
        integral.value, integral.se
    ))
}

/// Importance-sampling estimate of `∫ f` for a Lorentz(1) density.
///
/// Proposal: `y11, y22 ~ Gamma(5/2, 1)` and `y21 = √(y11 y22) U` with `U ~ Uniform(−1, 1)`.
pub fn lorentz1_normalization(seed: u64, draws: usize) -> Result<Estimate> {
    let cone = preset("lorentz(1)")?;
    let law = WishartLaw::gindikin(&cone, &[2.5, 2.5], -cone.identity_coords())?;
    let shape = 2.5;
    let proposal = Gamma::new(shape, 1.0).expect("valid gamma");
    let log_g1 = |x: f64| (shape - 1.0) * x.ln() - x - statrs::function::gamma::ln_gamma(shape);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = Vec::with_capacity(draws);
    for _ in 0..draws {
        let (a, b): (f64, f64) = (proposal.sample(&mut rng), proposal.sample(&mut rng));
        let root = (a * b).sqrt();
        let y = DVector::from_column_slice(&[a, b, root * rng.random_range(-1.0..1.0)]);
        let log_g = log_g1(a) + log_g1(b) - (2.0 * root).ln();
        let w = match law.log_density(&y) {
            Ok(lf) => (lf - log_g).exp(),
            Err(_) => 0.0,
        };
        weights.push(w);
    }
    Ok(stats::mean(&weights))
}

fn check_equivariance(config: &VerifyConfig) -> Outcome {
    let cone = preset("vinberg").map_err(err)?;
    let law = WishartLaw::new(VirtualQuadraticMap::basic(&cone, &[3.0, 1.5, 2.0]).map_err(err)?, -cone.identity_coords())
        .map_err(err)?;
    let mut rng = rng_for(config, 8);
    let per = (config.draws / 5).max(1000);
    let mut worst = 0.0f64;
    for i in 0..20u64 {
        let t = cone.random_triangular(&mut rng);
        let g = cone.rho_matrix(&t).map_err(err)?;
        let pushed = pushforward_law(&g, &law).map_err(err)?;
        let base = bartlett_sample(&law, config.seed.wrapping_add(100 + i), per).map_err(err)?;
        let batch = transform_batch(&g, &base).map_err(err)?;
        let mean = pushed.mean_element();
        for j in 0..cone.dim() {
            worst = worst.max(stats::mean(&coordinate(&batch, j)).z(mean[j]));
        }
        let eta = cone.random_dual(&mut rng);
        let var = stats::variance(&batch.pairings(&eta));
        worst = worst.max(var.z((config.covariance)(&pushed, &eta, &eta).map_err(err)?));
    }
    ensure(worst < 4.0, || format!("max z {worst:.2}"))?;
    Ok(format!("20 transforms × {per} draws, max z {worst:.2}"))
}

fn check_structure(config: &VerifyConfig) -> Outcome {
    let mut rng = rng_for(config, 9);
    let names = ["sym(1)", "sym(2)", "sym(3)", "sym(4)", "sym(5)", "vinberg", "dual_vinberg", "lorentz(1)", "lorentz(3)", "herm2c"];
    let (mut worst_chol, mut worst_star) = (0.0f64, 0.0f64);
    for name in names {
        let cone = preset(name).map_err(err)?;
        for check in cone.axiom_report() {
            ensure(check.passed, || format!("{name}: axiom {} fails ({:.2e})", check.rule, check.worst_residual))?;
        }
        for _ in 0..1000 {
            let y = cone.random_interior(&mut rng);
            let t = cone.structured_cholesky(&y).map_err(err)?;
            let tm = cone.lower_matrix(&t);
            let back = cone.coords_of_matrix(&(&tm * tm.transpose()));
            worst_chol = worst_chol.max((back - &y).amax() / y.amax());
        }
        for _ in 0..200 {
            let t = cone.random_triangular(&mut rng);
            let sigma: Vec<f64> = (0..cone.rank()).map(|_| rng.random_range(-3.0..3.0)).collect();
            let eta = cone.dual_orbit_point(&t).map_err(err)?;
            let sigma_star: Vec<f64> = sigma.iter().rev().copied().collect();
            let got = cone.log_delta_star(&sigma, &eta).map_err(err)?;
            let want = cone.log_chi(&sigma_star, &t);
            worst_star = worst_star.max(rel(got.exp(), want.exp()));
        }
    }
    ensure(worst_chol < 1e-10, || format!("Cholesky round trip: max rel. error {worst_chol:.2e}"))?;
    ensure(worst_star < 1e-10, || format!("delta_star oracle: max rel. error {worst_star:.2e}"))?;
    Ok(format!(
        "axioms hold on {} presets; Cholesky {worst_chol:.1e}; delta_star {worst_star:.1e}",
        names.len()
    ))
}
