//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde_json::json;

use crate::cone::{load_cone, load_vsystem, ConeRealization, AXIOM_TOL};
use crate::error::{Error, Result};
use crate::gindikin::{sigma_of_weights, GindikinReport};
use crate::quadratic::{Codomain, MapJson, QuadraticMap, VirtualQuadraticMap};
use crate::verify::{run_all, run_check, VerifyConfig, CHECKS};
use crate::wishart::{bartlett_sample, direct_sample, SampleBatch, WishartLaw, ORBIT_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "conewishart", version, about = "Riesz measures and Wishart laws on matrix-realized homogeneous cones")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct LawArgs {
    /// Preset name (sym(3), vinberg, dual_vinberg, lorentz(m), herm2c) or JSON cone spec path.
    #[arg(long)]
    pub cone: Option<String>,
    /// Comma-separated basic-map weights s.
    #[arg(long, allow_hyphen_values = true)]
    pub weights: Option<String>,
    /// JSON quadratic map (phi tensor) used instead of --cone/--weights.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// `identity` for θ = −I_N, triangular coordinates of T for θ = −ρ*(T)I_N, or `raw:θ1,θ2,…`.
    #[arg(long, default_value = "identity", allow_hyphen_values = true)]
    pub theta: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sampler {
    Bartlett,
    Direct,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print structure constants and axiom verdicts of a cone.
    Inspect {
        #[arg(long)]
        cone: String,
    },
    /// Check the V-system axioms; exits 1 when one fails.
    Axioms {
        #[arg(long)]
        cone: String,
        #[arg(long, default_value_t = AXIOM_TOL)]
        tol: f64,
    },
    /// Decide membership of σ in the Gindikin set.
    Gindikin {
        #[arg(long)]
        cone: String,
        #[arg(long, allow_hyphen_values = true)]
        weights: Option<String>,
        /// σ given directly instead of weights.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "weights")]
        sigma: Option<String>,
    },
    /// Evaluate the Laplace transform of a Wishart law.
    Laplace {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
    },
    /// Mean, covariance and an N-th moment of ⟨Y, η⟩.
    Moments {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
        #[arg(long, allow_hyphen_values = true)]
        eta2: Option<String>,
        #[arg(long, default_value_t = 2)]
        order: usize,
    },
    /// Evaluate the density of a non-singular law.
    Density {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Draw samples to a CSV file with a JSON sidecar.
    Sample {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Sampler::Bartlett)]
        sampler: Sampler,
        /// Zero-pivot tolerance for classifying the orbit of each draw.
        #[arg(long, default_value_t = ORBIT_TOL)]
        tol: f64,
    },
    /// Run the cross-validation battery; exits 1 on any failure.
    Verify {
        #[arg(long)]
        seed: Option<u64>,
        /// Draws for the Monte Carlo checks.
        #[arg(long)]
        count: Option<usize>,
        /// Run only these checks (1-based, repeatable).
        #[arg(long)]
        only: Vec<usize>,
        /// Also write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| Error::SpecParse(format!("not a number: `{s}`"))))
        .collect()
}

fn parse_vector(text: &str, dim: usize) -> Result<DVector<f64>> {
    let v = parse_list(text)?;
    if v.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
    }
    Ok(DVector::from_vec(v))
}

enum Theta {
    Default,
    Raw(DVector<f64>),
    Triangular(DVector<f64>),
}

fn parse_theta(text: &str, codomain: &Codomain) -> Result<Theta> {
    let dim = codomain.dim();
    if text.trim() == "identity" {
        Ok(Theta::Default)
    } else if let Some(raw) = text.strip_prefix("raw:") {
        Ok(Theta::Raw(parse_vector(raw, dim)?))
    } else if codomain.realization().is_some() {
        Ok(Theta::Triangular(parse_vector(text, dim)?))
    } else {
        Err(Error::SpecParse("a generic codomain takes `identity` or `raw:` for --theta".into()))
    }
}

pub fn build_law(args: &LawArgs) -> Result<WishartLaw> {
    let vq: VirtualQuadraticMap = match (&args.map, &args.cone) {
        (Some(path), _) => {
            let json: MapJson = serde_json::from_str(&std::fs::read_to_string(path)?)
                .map_err(|e| Error::SpecParse(e.to_string()))?;
            QuadraticMap::from_json(&json)?.into()
        }
        (None, Some(spec)) => {
            let cone = load_cone(spec)?;
            let weights = args
                .weights
                .as_deref()
                .ok_or_else(|| Error::SpecParse("--weights is required with --cone".into()))?;
            VirtualQuadraticMap::basic(&cone, &parse_list(weights)?)?
        }
        (None, None) => return Err(Error::SpecParse("either --cone or --map is required".into())),
    };
    let codomain = vq.codomain().clone();
    match parse_theta(&args.theta, &codomain)? {
        Theta::Default => WishartLaw::new(vq, codomain.default_theta()),
        Theta::Raw(theta) => WishartLaw::new(vq, theta),
        Theta::Triangular(t) => WishartLaw::with_triangular(vq, &t),
    }
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| (x + 0.0).to_string()).collect();
    format!("({})", parts.join(", "))
}

fn print_json<W: Write>(out: &mut W, value: &impl serde::Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn inspect<W: Write>(cone: &Arc<ConeRealization>, out: &mut W) -> Result<()> {
    let r = cone.rank();
    writeln!(out, "cone: {}", cone.name())?;
    writeln!(out, "partition: {:?}", cone.partition())?;
    writeln!(out, "rank: {r}")?;
    writeln!(out, "dimZ: {}", cone.dim())?;
    writeln!(out, "coordinates: {}", cone.coordinate_names().join(" "))?;
    writeln!(out, "n_lk:")?;
    for l in 1..r {
        let row: Vec<String> = (0..l).map(|k| format!("{:>3}", cone.n_lk(l, k))).collect();
        writeln!(out, "  {:>2} |{}", l + 1, row.join(""))?;
    }
    for i in 0..r {
        let m: Vec<f64> = cone.m_vector(i).iter().map(|&x| x as f64).collect();
        writeln!(out, "m({}) = {}", i + 1, fmt_list(&m))?;
    }
    writeln!(out, "p(1,...,1) = {}", fmt_list(&cone.p_full()))?;
    let col: Vec<f64> = (0..r).map(|k| (k + 1..r).map(|l| cone.n_lk(l, k) as f64).sum()).collect();
    writeln!(out, "column dims sum_(l>k) n_lk = {}", fmt_list(&col))?;
    writeln!(out, "d = {}", fmt_list(cone.d_vector()))?;
    for c in cone.axiom_report() {
        writeln!(
            out,
            "axiom {}: {} (worst residual {:.2e} over {} cases)",
            c.rule,
            if c.passed { "pass" } else { "FAIL" },
            c.worst_residual,
            c.cases
        )?;
    }
    Ok(())
}

fn sample_summary(batch: &SampleBatch, cone: Option<&Arc<ConeRealization>>, tol: f64) -> Result<serde_json::Value> {
    let mut summary = json!({
        "count": batch.len(),
        "epsilon": batch.info.epsilon,
        "mean": batch.mean().iter().collect::<Vec<_>>(),
    });
    if let (Some(cone), Some(eps)) = (cone, &batch.info.epsilon) {
        let classes = batch.classify(cone, tol)?;
        let matching = classes.iter().filter(|e| *e == eps).count();
        summary["orbit_matches"] = json!(matching);
    }
    Ok(summary)
}

/// Runs a parsed command, writing its report to `out`; returns the exit code.
pub fn run<W: Write>(cli: Cli, out: &mut W) -> Result<i32> {
    match cli.command {
        Command::Inspect { cone } => {
            inspect(&load_cone(&cone)?, out)?;
            Ok(EXIT_OK)
        }
        Command::Axioms { cone, tol } => {
            let (name, vs) = load_vsystem(&cone)?;
            let mut ok = true;
            writeln!(out, "cone: {name}")?;
            for c in vs.axiom_report() {
                let passed = c.worst_residual <= tol;
                ok &= passed;
                let at = c.worst_at.map(|(a, b, e)| format!(" at ({}, {}, {})", a + 1, b + 1, e + 1)).unwrap_or_default();
                writeln!(
                    out,
                    "{}: {} (worst residual {:.2e}{at}, {} cases)",
                    c.rule,
                    if passed { "pass" } else { "FAIL" },
                    c.worst_residual,
                    c.cases
                )?;
            }
            Ok(if ok { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        Command::Gindikin { cone, weights, sigma } => {
            let cone = load_cone(&cone)?;
            let sigma = match (weights, sigma) {
                (_, Some(s)) => parse_list(&s)?,
                (Some(w), None) => sigma_of_weights(&cone, &parse_list(&w)?)?,
                (None, None) => return Err(Error::SpecParse("--weights or --sigma is required".into())),
            };
            print_json(out, &GindikinReport::for_sigma(&cone, &sigma)?)?;
            Ok(EXIT_OK)
        }
        Command::Laplace { law, eta } => {
            let law = build_law(&law)?;
            let eta = parse_vector(&eta, law.dim())?;
            let log = law.log_laplace(&eta)?;
            print_json(out, &json!({ "laplace": log.exp(), "log_laplace": log }))?;
            Ok(EXIT_OK)
        }
        Command::Moments { law, eta, eta2, order } => {
            let law = build_law(&law)?;
            let eta = parse_vector(&eta, law.dim())?;
            let eta2 = match eta2 {
                Some(e) => parse_vector(&e, law.dim())?,
                None => eta.clone(),
            };
            print_json(
                out,
                &json!({
                    "mean_form": law.mean_form(&eta)?,
                    "mean_element": law.mean_element().iter().collect::<Vec<_>>(),
                    "covariance": law.covariance_form(&eta, &eta2)?,
                    "order": order,
                    "moment": law.univariate_moment(&eta, order)?,
                }),
            )?;
            Ok(EXIT_OK)
        }
        Command::Density { law, y } => {
            let law = build_law(&law)?;
            let y = parse_vector(&y, law.dim())?;
            let log = law.log_density(&y)?;
            print_json(out, &json!({ "density": log.exp(), "log_density": log }))?;
            Ok(EXIT_OK)
        }
        Command::Sample { law, seed, count, out: path, sampler, tol } => {
            let law = build_law(&law)?;
            let batch = match sampler {
                Sampler::Bartlett => bartlett_sample(&law, seed, count)?,
                Sampler::Direct => direct_sample(&law, seed, count)?,
            };
            let sidecar = batch.export(&path)?;
            let mut summary = sample_summary(&batch, law.codomain().realization(), tol)?;
            summary["csv"] = json!(path);
            summary["sidecar"] = json!(sidecar);
            print_json(out, &summary)?;
            Ok(EXIT_OK)
        }
        Command::Verify { seed, count, only, out: path } => {
            let mut config = VerifyConfig::default();
            if let Some(s) = seed {
                config.seed = s;
            }
            if let Some(c) = count {
                config.draws = c;
            }
            if let Some(&bad) = only.iter().find(|&&i| i == 0 || i > CHECKS.len()) {
                return Err(Error::IndexOutOfRange { index: bad, rank: CHECKS.len() });
            }
            let results = if only.is_empty() {
                run_all(&config)
            } else {
                only.iter().map(|&i| run_check(i, &config)).collect()
            };
            for r in &results {
                writeln!(out, "{r}")?;
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            writeln!(out, "{} of {} checks passed", results.len() - failed, results.len())?;
            if let Some(p) = path {
                let mut f = std::fs::File::create(p)?;
                print_json(&mut f, &results)?;
            }
            Ok(if failed == 0 { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
    }
}
