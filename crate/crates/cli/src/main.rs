//! Command-line front end: classification and certification of sphere
//! disks, bound curves, calculus verification, and K estimation.
//!
//! Exit codes: 0 success, 2 usage or domain error, 3 ambiguous
//! geometry, 4 inadmissible operator, 5 numerical failure.

use std::fmt::Display;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use kspectral::bounds::{self, BoundsError};
use kspectral::calculus::{
    self, AnnulusContext, CalculusError, QuadratureConfig, DEFAULT_MARGIN,
};
use kspectral::estimator::{self, EstimatorError};
use kspectral::geometry::{
    certify_spectral, classify, CertifyKind, Classification, GeometryError, MoebiusMap,
    SphereDisk, SpherePoint,
};
use kspectral::linalg::{self, Matrix};
use kspectral::ratfun::{MatrixRationalFunction, RationalFunction};
use kspectral::rng::{derive_seed, SplitMix64};

const EXIT_USAGE: i32 = 2;
const EXIT_AMBIGUOUS: i32 = 3;
const EXIT_INADMISSIBLE: i32 = 4;
const EXIT_NUMERICAL: i32 = 5;

#[derive(Parser)]
#[command(
    name = "kspectral",
    about = "Spectral-set disks, annulus functional calculus, and K-spectral bounds",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the intersection of two disks of the Riemann sphere.
    Classify(ClassifyArgs),
    /// Check the von Neumann criterion for one disk and one matrix.
    Certify(CertifyArgs),
    /// Tabulate the bound curves as CSV.
    Bounds(BoundsArgs),
    /// Run the annulus-calculus verification suite on one operator.
    Verify(VerifyArgs),
    /// Estimate realized K ratios.
    Estimate(EstimateArgs),
}

#[derive(Args)]
struct ClassifyArgs {
    /// Path to the first disk JSON.
    d1: PathBuf,
    /// Path to the second disk JSON.
    d2: PathBuf,
    /// Geometric tolerance for tangency and coincidence decisions.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    /// Path to the disk JSON.
    disk: PathBuf,
    /// Path to the matrix JSON.
    matrix: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// One or more R values (repeatable).
    #[arg(long = "R", value_name = "R")]
    r_values: Vec<f64>,
    /// Geometric grid lo:hi:count.
    #[arg(long = "R-range", value_name = "LO:HI:COUNT")]
    r_range: Option<String>,
    /// Tail tolerance for the infinite product.
    #[arg(long, default_value_t = 1e-10)]
    tail_tol: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Path to the operator matrix JSON (omit when using --random-n).
    matrix: Option<PathBuf>,
    /// Draw a random admissible operator of this dimension instead.
    #[arg(long = "random-n", value_name = "N")]
    random_n: Option<usize>,
    #[arg(long = "R")]
    big_r: f64,
    /// Residual tolerance for the verification checks.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Initial quadrature node count (power of two).
    #[arg(long, default_value_t = 256)]
    quad_nodes: usize,
    /// Admissibility strictness margin.
    #[arg(long, default_value_t = DEFAULT_MARGIN)]
    margin: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EstimateMode {
    Witness,
    Random,
    Complete,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long = "R")]
    big_r: f64,
    #[arg(long, value_enum)]
    mode: EstimateMode,
    /// Operator dimension for random mode.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Laurent index range [-degree, degree] (complete mode caps the
    /// entry degree at 8).
    #[arg(long, default_value_t = 16)]
    degree: usize,
    /// Objective evaluation budget.
    #[arg(long, default_value_t = 200_000)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn fail(code: i32, msg: impl Display) -> ! {
    eprintln!("error: {msg}");
    std::process::exit(code);
}

fn geometry_exit(e: &GeometryError) -> i32 {
    match e {
        GeometryError::Ambiguous { .. } => EXIT_AMBIGUOUS,
        GeometryError::Degenerate(_) => EXIT_NUMERICAL,
        GeometryError::Linalg(_) => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

fn calculus_exit(e: &CalculusError) -> i32 {
    match e {
        CalculusError::Inadmissible { .. } => EXIT_INADMISSIBLE,
        CalculusError::InvalidConfig(_) => EXIT_USAGE,
        CalculusError::RatFun(_) => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

fn bounds_exit(e: &BoundsError) -> i32 {
    match e {
        BoundsError::Precision(_) => EXIT_NUMERICAL,
        BoundsError::Element { source, .. } => bounds_exit(source),
        BoundsError::Domain(_) => EXIT_USAGE,
    }
}

fn estimator_exit(e: &EstimatorError) -> i32 {
    match e {
        EstimatorError::Inadmissible { .. } => EXIT_INADMISSIBLE,
        EstimatorError::Domain(_) => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

fn read_file(path: &PathBuf) -> String {
    match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => fail(EXIT_USAGE, format!("cannot read {}: {e}", path.display())),
    }
}

fn emit(output: &Option<PathBuf>, text: &str) {
    match output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                fail(EXIT_USAGE, format!("cannot write {}: {e}", path.display()));
            }
        }
        None => println!("{text}"),
    }
}

fn point_json(p: &SpherePoint) -> serde_json::Value {
    match p {
        SpherePoint::Finite(z) => json!([z.re, z.im]),
        SpherePoint::Infinity => json!("inf"),
    }
}

fn map_json(m: &MoebiusMap) -> serde_json::Value {
    json!({
        "m11": [m.m11.re, m.m11.im],
        "m12": [m.m12.re, m.m12.im],
        "m21": [m.m21.re, m.m21.im],
        "m22": [m.m22.re, m.m22.im],
    })
}

fn classification_json(cls: &Classification) -> serde_json::Value {
    json!({
        "case": format!("{:?}", cls.case_label),
        "boundary_points": cls.boundary_points.iter().map(point_json).collect::<Vec<_>>(),
        "canonical_map": cls.canonical_map.as_ref().map(map_json),
        "canonical_R": cls.canonical_r,
    })
}

fn cmd_classify(args: ClassifyArgs) {
    let d1 = SphereDisk::from_json(&read_file(&args.d1))
        .unwrap_or_else(|e| fail(EXIT_USAGE, format!("{}: {e}", args.d1.display())));
    let d2 = SphereDisk::from_json(&read_file(&args.d2))
        .unwrap_or_else(|e| fail(EXIT_USAGE, format!("{}: {e}", args.d2.display())));
    match classify(&d1, &d2, args.tol) {
        Ok(cls) => {
            let text = serde_json::to_string(&classification_json(&cls)).expect("json");
            emit(&args.output, &text);
        }
        Err(e) => fail(geometry_exit(&e), e),
    }
}

fn cmd_certify(args: CertifyArgs) {
    let disk = SphereDisk::from_json(&read_file(&args.disk))
        .unwrap_or_else(|e| fail(EXIT_USAGE, format!("{}: {e}", args.disk.display())));
    let matrix = Matrix::from_json(&read_file(&args.matrix))
        .unwrap_or_else(|e| fail(EXIT_USAGE, format!("{}: {e}", args.matrix.display())));
    match certify_spectral(&disk, &matrix) {
        Ok(cert) => {
            let kind = match cert.kind {
                CertifyKind::Disk => "disk",
                CertifyKind::ExteriorDisk => "codisk",
                CertifyKind::HalfPlane => "halfplane",
            };
            let text = serde_json::to_string(&json!({
                "holds": cert.holds,
                "kind": kind,
                "measured": cert.measured,
                "threshold": cert.threshold,
                "singular_shift": cert.singular_shift,
            }))
            .expect("json");
            emit(&args.output, &text);
        }
        Err(e) => fail(geometry_exit(&e), e),
    }
}

fn parse_range(spec: &str) -> Vec<f64> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        fail(EXIT_USAGE, format!("range '{spec}' must be LO:HI:COUNT"));
    }
    let lo: f64 = parts[0].parse().unwrap_or_else(|_| fail(EXIT_USAGE, "bad range LO"));
    let hi: f64 = parts[1].parse().unwrap_or_else(|_| fail(EXIT_USAGE, "bad range HI"));
    let count: usize = parts[2].parse().unwrap_or_else(|_| fail(EXIT_USAGE, "bad range COUNT"));
    if !(lo > 0.0 && hi > lo && count >= 2) {
        fail(EXIT_USAGE, format!("range '{spec}' needs 0 < LO < HI and COUNT >= 2"));
    }
    (0..count)
        .map(|k| lo * (hi / lo).powf(k as f64 / (count - 1) as f64))
        .collect()
}

fn cmd_bounds(args: BoundsArgs) {
    let mut r_values = args.r_values.clone();
    if let Some(range) = &args.r_range {
        r_values.extend(parse_range(range));
    }
    if r_values.is_empty() {
        fail(EXIT_USAGE, "no R values given; use --R or --R-range");
    }
    match bounds::curve_table(&r_values, args.tail_tol) {
        Ok(rows) => emit(&args.output, &bounds::curve_table_csv(&rows)),
        Err(e) => fail(bounds_exit(&e), e),
    }
}

struct Check {
    name: &'static str,
    pass: bool,
    residual: f64,
    threshold: f64,
}

fn verify_battery(seed: u64, big_r: f64) -> Vec<(String, RationalFunction)> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut battery: Vec<(String, RationalFunction)> = vec![
        ("constant".into(), RationalFunction::constant(one)),
        ("z".into(), RationalFunction::polynomial(vec![zero, one]).expect("valid")),
        ("1/z".into(), RationalFunction::laurent(-1, vec![one]).expect("valid")),
        ("z^2".into(), RationalFunction::polynomial(vec![zero, zero, one]).expect("valid")),
        (
            "z + 1/z".into(),
            RationalFunction::laurent(-1, vec![one, zero, one]).expect("valid"),
        ),
        (
            "rational with outside pole".into(),
            RationalFunction::new(vec![one, zero, one], vec![
                Complex64::new(-3.0 * big_r, 0.0),
                one,
            ])
            .expect("valid"),
        ),
    ];
    let mut rng = SplitMix64::new(derive_seed(seed, 101));
    for idx in 0..3 {
        let coeffs: Vec<Complex64> = (0..9)
            .map(|_| Complex64::new(rng.next_gaussian(), rng.next_gaussian()))
            .collect();
        battery.push((
            format!("random laurent {idx}"),
            RationalFunction::laurent(-4, coeffs).expect("valid"),
        ));
    }
    battery
}

fn cmd_verify(args: VerifyArgs) {
    let a = match (&args.matrix, args.random_n) {
        (Some(path), None) => Matrix::from_json(&read_file(path))
            .unwrap_or_else(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display()))),
        (None, Some(n)) => {
            if n == 0 {
                fail(EXIT_USAGE, "--random-n must be positive");
            }
            estimator::random_admissible(n, args.big_r, args.seed)
        }
        _ => fail(EXIT_USAGE, "give exactly one of a matrix path or --random-n"),
    };

    let ctx = match AnnulusContext::new(a, args.big_r, args.margin) {
        Ok(ctx) => ctx,
        Err(e) => fail(calculus_exit(&e), e),
    };
    let quad = QuadratureConfig::new(args.quad_nodes, (args.tol * 1e-2).min(1e-10), 1 << 16)
        .unwrap_or_else(|e| fail(EXIT_USAGE, e));

    let mut checks: Vec<Check> = Vec::new();

    match calculus::partition_of_unity_residuals(&ctx, &quad) {
        Ok((r1, r2)) => {
            checks.push(Check {
                name: "partition of unity (outer kernel)",
                pass: r1 <= 1e-10,
                residual: r1,
                threshold: 1e-10,
            });
            checks.push(Check {
                name: "partition of unity (inner kernel)",
                pass: r2 <= 1e-10,
                residual: r2,
                threshold: 1e-10,
            });
        }
        Err(e) => fail(calculus_exit(&e), e),
    }

    match calculus::kernel_scan(&ctx, 64) {
        Ok((min_mu, min_dom)) => {
            checks.push(Check {
                name: "kernel positivity (min eig mu)",
                pass: min_mu >= -1e-12,
                residual: min_mu,
                threshold: -1e-12,
            });
            checks.push(Check {
                name: "domination Re M >= N (min eig)",
                pass: min_dom >= -1e-10,
                residual: min_dom,
                threshold: -1e-10,
            });
        }
        Err(e) => fail(calculus_exit(&e), e),
    }

    let mut battery_results = Vec::new();
    let mut battery_pass = true;
    let mut battery_worst = 0.0f64;
    for (name, f) in verify_battery(args.seed, args.big_r) {
        let direct = match f.eval_matrix(ctx.matrix()) {
            Ok(m) => m,
            Err(e) => fail(EXIT_NUMERICAL, e),
        };
        let via = match calculus::represent(&ctx, &f, &quad) {
            Ok(m) => m,
            Err(e) => fail(calculus_exit(&e), e),
        };
        let sup = f.sup_norm_annulus(args.big_r, 4096).unwrap_or(1.0);
        let resid = linalg::spectral_norm(&via.sub(&direct)).unwrap_or(f64::INFINITY);
        let threshold = args.tol * sup.max(1.0);
        battery_results.push(json!({
            "f": name,
            "residual": resid,
            "threshold": threshold,
            "pass": resid <= threshold,
        }));
        battery_worst = battery_worst.max(resid / threshold.max(1e-300));
        if resid > threshold {
            battery_pass = false;
        }
    }
    checks.push(Check {
        name: "representation formula battery (worst residual / threshold)",
        pass: battery_pass,
        residual: battery_worst,
        threshold: 1.0,
    });

    let k = match calculus::k_formula(&ctx, &quad) {
        Ok(k) => k,
        Err(e) => fail(calculus_exit(&e), e),
    };
    let envelope = 2.0 + bounds::j_closed(args.big_r).unwrap_or_else(|e| fail(EXIT_USAGE, e));
    checks.push(Check {
        name: "K formula within closed-form envelope",
        pass: k <= envelope + 1e-8,
        residual: k - envelope,
        threshold: 1e-8,
    });

    let all_pass = checks.iter().all(|c| c.pass);
    let report = json!({
        "R": args.big_r,
        "n": ctx.dim(),
        "norm_a": ctx.norm_a(),
        "norm_a_inv": ctx.norm_a_inv(),
        "k_formula": k,
        "envelope": envelope,
        "checks": checks.iter().map(|c| json!({
            "name": c.name,
            "pass": c.pass,
            "residual": c.residual,
            "threshold": c.threshold,
        })).collect::<Vec<_>>(),
        "battery": battery_results,
        "all_pass": all_pass,
    });
    emit(&args.output, &serde_json::to_string(&report).expect("json"));
    if !all_pass {
        std::process::exit(EXIT_NUMERICAL);
    }
}

fn random_laurent(rng: &mut SplitMix64, degree: i64, scale_r: f64) -> RationalFunction {
    let coeffs: Vec<Complex64> = (-degree..=degree)
        .map(|k| {
            let s = scale_r.powi(-(k.abs() as i32));
            Complex64::new(rng.next_gaussian() * s, rng.next_gaussian() * s)
        })
        .collect();
    RationalFunction::laurent(-degree, coeffs).expect("valid Laurent function")
}

fn cmd_estimate(args: EstimateArgs) {
    if args.budget == 0 {
        fail(EXIT_USAGE, "budget must be positive");
    }
    if !(args.big_r.is_finite() && args.big_r > 1.0) {
        fail(EXIT_USAGE, format!("R = {} must exceed 1", args.big_r));
    }
    let lower = bounds::lower_simple(args.big_r).unwrap_or_else(|e| fail(EXIT_USAGE, e));
    let upper = bounds::thm1_upper(args.big_r).unwrap_or_else(|e| fail(EXIT_USAGE, e));
    let envelope = json!({ "lower_simple": lower, "thm1_upper": upper });

    match args.mode {
        EstimateMode::Witness | EstimateMode::Random => {
            let a = if args.mode == EstimateMode::Witness {
                estimator::jordan_witness(args.big_r).unwrap_or_else(|e| fail(EXIT_USAGE, e))
            } else {
                estimator::random_admissible(args.n, args.big_r, args.seed)
            };
            let result =
                estimator::maximize_ratio(&a, args.big_r, args.degree, args.budget, args.seed)
                    .unwrap_or_else(|e| fail(estimator_exit(&e), e));
            let mut body: serde_json::Value =
                serde_json::from_str(&result.to_json()).expect("ratio json");
            body["mode"] = json!(match args.mode {
                EstimateMode::Witness => "witness",
                _ => "random",
            });
            body["envelope"] = envelope;
            emit(&args.output, &serde_json::to_string(&body).expect("json"));
        }
        EstimateMode::Complete => {
            let a = estimator::random_admissible(args.n, args.big_r, args.seed);
            let mut best = 0.0f64;
            let mut ratios = Vec::new();
            let trials = 10;
            for trial in 0..trials {
                let mut rng = SplitMix64::new(derive_seed(args.seed, 500 + trial));
                let degree = (args.degree as i64).clamp(1, 8);
                let entries: Vec<Vec<RationalFunction>> = (0..2)
                    .map(|_| {
                        (0..2).map(|_| random_laurent(&mut rng, degree, args.big_r)).collect()
                    })
                    .collect();
                let big_f = MatrixRationalFunction::new(entries).expect("square grid");
                let ratio = estimator::complete_ratio(&a, args.big_r, &big_f)
                    .unwrap_or_else(|e| fail(estimator_exit(&e), e));
                ratios.push(ratio);
                best = best.max(ratio);
            }
            let body = json!({
                "R": args.big_r,
                "mode": "complete",
                "ratio": best,
                "ratios": ratios,
                "trials": trials,
                "seed": args.seed,
                "envelope": envelope,
            });
            emit(&args.output, &serde_json::to_string(&body).expect("json"));
        }
    }
}

fn main() {
    match Cli::parse().command {
        Command::Classify(args) => cmd_classify(args),
        Command::Certify(args) => cmd_certify(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Estimate(args) => cmd_estimate(args),
    }
}
