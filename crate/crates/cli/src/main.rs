//! `drokit` command-line front end.
//!
//! Exit status: 0 on success, 1 when the library reports an error, 2 on usage
//! errors. With `--format json` errors are written to standard error as
//! `{"error": {"code": ..., "message": ...}}`.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use drokit::domain::{ot_distance, Norm, TransportCost};
use drokit::envelopes::{envelope, envelope_numeric, UnivariateLoss};
use drokit::io::{
    fmt17, read_dataset_csv, read_distribution_json, read_returns_csv, write_experiment_csv, write_perturbed_csv,
};
use drokit::nash_svm::{gaussian_blobs, nash_pipeline, synthetic_digits, verify_saddle, Alpha};
use drokit::portfolio::{
    default_eps_grid, run_experiment, solve_portfolio, summarize, ExperimentConfig, PortfolioProblem, SolveOptions,
};
use drokit::regbounds::{lipschitz_bound, variation_bound, wasserstein_bound, DerivativeProfile, WassersteinVariant};
use drokit::{ctransform::dro_value_via_envelope, Tolerances};

#[derive(Parser)]
#[command(name = "drokit", version, about = "Optimal-transport distributionally robust optimization toolkit")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Solver tolerance; takes precedence over the `gap` entry of DROKIT_TOL.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; each subcommand documents its default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for independent trials.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKind {
    Variation,
    Lipschitz,
    WassersteinVariation,
    WassersteinLipschitz,
}

#[derive(Subcommand)]
enum Command {
    /// Envelope L_p(s, lambda) = sup_s' L(s') - lambda |s - s'|^p (default format json).
    Envelope {
        /// hinge, zero-one, quadratic, neg-log or logistic.
        #[arg(long)]
        loss: UnivariateLoss,
        #[arg(long)]
        p: u32,
        #[arg(long, allow_negative_numbers = true)]
        s: f64,
        #[arg(long)]
        lambda: f64,
        /// Use the grid and golden-section oracle instead of closed forms.
        #[arg(long)]
        numeric: bool,
    },
    /// Worst-case expected loss of <theta, Z> over a transport ball (default format json).
    DroValue {
        /// Reference distribution as JSON {"atoms": [[...]], "weights": [...]}.
        #[arg(long)]
        dist: PathBuf,
        /// Comma-separated coefficients.
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        loss: UnivariateLoss,
        /// Transport cost normK^p with K in {1, 2, inf}.
        #[arg(long, default_value = "norm2")]
        cost: TransportCost,
    },
    /// Regularization upper bound, one CSV row per order k (default format csv).
    Bound {
        /// JSON with "weights", "values", "tensor_norms" and "lipschitz".
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value = "variation")]
        variant: BoundKind,
    },
    /// Hinge-loss SVM equilibrium: primal, dual and a least favorable distribution (default format json).
    SvmNash {
        /// Dataset CSV with header x1,...,xk,y.
        #[arg(long, conflicts_with_all = ["blobs", "digits"])]
        data: Option<PathBuf>,
        /// Generate Gaussian blobs with this many samples per class.
        #[arg(long, conflicts_with = "digits")]
        blobs: Option<usize>,
        /// Generate this many 8x8 synthetic digit images.
        #[arg(long)]
        digits: Option<usize>,
        #[arg(long)]
        norm: Norm,
        #[arg(long)]
        eps: f64,
        /// uniform, single:<j>, or a JSON file holding the weight vector.
        #[arg(long, default_value = "uniform")]
        alpha: String,
        /// Clip perturbed features to lo,hi and re-certify.
        #[arg(long, allow_hyphen_values = true)]
        clip: Option<String>,
        /// Write <prefix>.perturbed.csv and <prefix>.certificate.json.
        #[arg(long)]
        out_prefix: Option<PathBuf>,
    },
    /// Robust log-optimal portfolios: SAA vs DRO experiment, or one solve on a returns CSV (default format csv).
    Portfolio {
        #[arg(long, default_value_t = 10)]
        d: usize,
        #[arg(long, default_value_t = 100)]
        train: usize,
        #[arg(long, default_value_t = 100_000)]
        test: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Comma-separated radii; 0 and {a 10^b : a = 1..10, b = -4..-1} by default.
        #[arg(long)]
        eps_grid: Option<String>,
        /// graal or projected_gradient.
        #[arg(long, default_value = "graal")]
        solver: String,
        /// Per-radius summary CSV.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Solve once on these gross returns instead of running the experiment.
        #[arg(long, requires = "eps")]
        returns: Option<PathBuf>,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Exact optimal transport cost between two JSON distributions (default format json).
    OtDistance {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
        /// normK^p, label-normK or log-metric.
        #[arg(long)]
        cost: TransportCost,
    },
}

enum Failure {
    Usage(String),
    Lib(drokit::Error),
}

impl From<drokit::Error> for Failure {
    fn from(e: drokit::Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(e.into())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn open(path: &Path) -> std::result::Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Lib(drokit::Error::Io(format!("cannot open {}: {e}", path.display()))))
}

fn parse_list(s: &str, what: &str) -> std::result::Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("{what}: not a number: {t:?}"))))
        .collect()
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Outcome {
    match out {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn json_bytes(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("serializable");
    s.push(b'\n');
    s
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s.into_bytes()
}

fn run(cli: Cli) -> Outcome {
    let tols = Tolerances::from_env().map_err(|e| Failure::Usage(e.to_string()))?;
    let tol = cli.tol.unwrap_or(tols.gap);
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Failure::Usage(format!("--tol must be positive, got {tol}")));
    }
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Failure::Usage(format!("--jobs: {e}")))?;
    }
    let out = &cli.out;
    match cli.command {
        Command::Envelope { loss, p, s, lambda, numeric } => {
            let r = if numeric { envelope_numeric(&loss, p, s, lambda)? } else { envelope(&loss, p, s, lambda)? };
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => emit(out, &json_bytes(&json!({ "value": r.value, "maximizer": r.maximizer }))),
                Format::Csv => {
                    let row = vec![fmt17(r.value), r.maximizer.map(fmt17).unwrap_or_default()];
                    emit(out, &csv_bytes(&["value", "maximizer"], &[row]))
                }
            }
        }
        Command::DroValue { dist, theta, eps, loss, cost } => {
            let reference = read_distribution_json(open(&dist)?)?;
            let theta = parse_list(&theta, "--theta")?;
            let TransportCost::NormPower { norm, p } = cost else {
                return Err(Failure::Usage("dro-value needs a normK^p cost".into()));
            };
            let r = dro_value_via_envelope(&loss, norm, p, &theta, &reference, eps)?;
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => emit(out, &json_bytes(&json!({ "value": r.value, "lambda_star": r.lambda_star }))),
                Format::Csv => emit(out, &csv_bytes(&["value", "lambda_star"], &[vec![fmt17(r.value), fmt17(r.lambda_star)]])),
            }
        }
        Command::Bound { profile, p, eps, variant } => {
            let mut v: Value = serde_json::from_reader(open(&profile)?).map_err(drokit::Error::from)?;
            let weights: Vec<f64> = v
                .as_object_mut()
                .and_then(|o| o.remove("weights"))
                .ok_or_else(|| Failure::Usage("profile needs a \"weights\" array".into()))
                .and_then(|w| serde_json::from_value(w).map_err(|e| Failure::Lib(e.into())))?;
            let prof: DerivativeProfile = serde_json::from_value(v).map_err(drokit::Error::from)?;
            let report = match variant {
                BoundKind::Variation => variation_bound(&prof, &weights, p, eps)?,
                BoundKind::Lipschitz => lipschitz_bound(&prof, &weights, p, eps)?,
                BoundKind::WassersteinVariation => wasserstein_bound(&prof, &weights, p, eps, WassersteinVariant::Variation)?,
                BoundKind::WassersteinLipschitz => wasserstein_bound(&prof, &weights, p, eps, WassersteinVariant::Lipschitz)?,
            };
            match cli.format.unwrap_or(Format::Csv) {
                Format::Json => emit(out, &json_bytes(&serde_json::to_value(&report).map_err(drokit::Error::from)?)),
                Format::Csv => {
                    let mut acc = report.nominal;
                    let rows: Vec<Vec<String>> = report
                        .terms
                        .iter()
                        .enumerate()
                        .map(|(i, t)| {
                            acc += t;
                            vec![(i + 1).to_string(), fmt17(*t), fmt17(acc)]
                        })
                        .collect();
                    emit(out, &csv_bytes(&["k", "term", "cumulative"], &rows))
                }
            }
        }
        Command::SvmNash { data, blobs, digits, norm, eps, alpha, clip, out_prefix } => {
            let dataset = match (data, blobs, digits) {
                (Some(path), _, _) => read_dataset_csv(open(&path)?)?,
                (None, Some(n), _) => gaussian_blobs(n, cli.seed),
                (None, None, Some(n)) => synthetic_digits(n, cli.seed),
                _ => return Err(Failure::Usage("one of --data, --blobs or --digits is required".into())),
            };
            let alpha = match alpha.parse::<Alpha>() {
                Ok(a) => a,
                Err(_) => {
                    let w: Vec<f64> =
                        serde_json::from_reader(open(Path::new(&alpha))?).map_err(drokit::Error::from)?;
                    Alpha::Weights(w)
                }
            };
            let mut run = nash_pipeline(&dataset, norm, eps, &alpha, tol)?;
            if let Some(c) = clip {
                let b = parse_list(&c, "--clip")?;
                if b.len() != 2 || !(b[0] <= b[1]) {
                    return Err(Failure::Usage("--clip expects lo,hi".into()));
                }
                run.distribution.clip_features(b[0], b[1]);
                let family = run.certificate.family.take();
                run.certificate = verify_saddle(&dataset, norm, eps, &run.primal.theta, &run.distribution, 50_000)?;
                run.certificate.family = family;
            }
            let alpha_weights = match &run.distribution.provenance {
                drokit::nash_svm::Provenance::LeastFavorable { alpha } => alpha.clone(),
                drokit::nash_svm::Provenance::WorstCase => Vec::new(),
            };
            let cert = json!({
                "norm": norm.name(),
                "eps": eps,
                "primal": run.primal.value,
                "dual": run.dual.value,
                "gap": (run.primal.value - run.dual.value).abs(),
                "theta": run.primal.theta,
                "lambda": run.primal.lambda,
                "expected_hinge": run.distribution.expected_hinge(&run.primal.theta),
                "left_residual": run.certificate.left_residual,
                "right_residual": run.certificate.right_residual,
                "transport_cost": run.certificate.transport_cost,
                "alpha": alpha_weights,
                "q": run.dual.q,
                "j_plus": run.dual.j_plus,
            });
            if let Some(prefix) = out_prefix {
                let base = prefix.to_string_lossy().into_owned();
                let mut buf = Vec::new();
                write_perturbed_csv(&run.distribution, &mut buf)?;
                std::fs::write(format!("{base}.perturbed.csv"), buf)?;
                std::fs::write(format!("{base}.certificate.json"), json_bytes(&cert))?;
                return Ok(());
            }
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => emit(out, &json_bytes(&cert)),
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_perturbed_csv(&run.distribution, &mut buf)?;
                    emit(out, &buf)
                }
            }
        }
        Command::Portfolio { d, train, test, trials, eps_grid, solver, summary, returns, eps } => {
            let options = SolveOptions { tol: cli.tol.unwrap_or(SolveOptions::default().tol), ..SolveOptions::default() };
            if let Some(path) = returns {
                let samples = read_returns_csv(open(&path)?)?;
                let problem = PortfolioProblem::uniform(samples, eps.expect("clap enforces --eps"))?;
                let s = solve_portfolio(&problem, &solver, &options)?;
                let v = json!({
                    "theta": s.theta, "lambda": s.lambda, "value": s.value,
                    "iterations": s.iterations, "solver": s.solver,
                });
                return emit(out, &json_bytes(&v));
            }
            let mut cfg = ExperimentConfig::with_defaults(d, train, test, trials, cli.seed);
            cfg.solver = solver;
            if let Some(t) = cli.tol {
                cfg.options.tol = t;
            }
            cfg.eps_grid = match eps_grid {
                Some(g) => parse_list(&g, "--eps-grid")?,
                None => default_eps_grid(),
            };
            let rows = run_experiment(&cfg)?;
            if let Some(path) = summary {
                let srows: Vec<Vec<String>> = summarize(&rows)
                    .iter()
                    .map(|s| {
                        [s.eps, s.mean_loss, s.se_loss, s.mean_diff, s.se_diff, s.mean_return, s.mean_sharpe]
                            .iter()
                            .map(|v| fmt17(*v))
                            .collect()
                    })
                    .collect();
                let header = ["eps", "mean_loss", "se_loss", "mean_diff", "se_diff", "mean_return", "mean_sharpe"];
                std::fs::write(path, csv_bytes(&header, &srows))?;
            }
            match cli.format.unwrap_or(Format::Csv) {
                Format::Json => emit(out, &json_bytes(&serde_json::to_value(&rows).map_err(drokit::Error::from)?)),
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_experiment_csv(&rows, &mut buf)?;
                    emit(out, &buf)
                }
            }
        }
        Command::OtDistance { p, q, cost } => {
            let p = read_distribution_json(open(&p)?)?;
            let q = read_distribution_json(open(&q)?)?;
            let (value, plan) = ot_distance(&p, &q, &cost)?;
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => emit(out, &json_bytes(&json!({ "value": value, "plan": plan }))),
                Format::Csv => emit(out, &csv_bytes(&["value"], &[vec![fmt17(value)]])),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_errors = cli.format == Some(Format::Json);
    let report = |code: &str, msg: String| {
        if json_errors {
            eprintln!("{}", json!({ "error": { "code": code, "message": msg } }));
        } else {
            eprintln!("error: {msg}");
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            report(e.code(), e.to_string());
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            report("usage", msg);
            ExitCode::from(2)
        }
    }
}
