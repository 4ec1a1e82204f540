mod mixture;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qcorr::classical::export::{write_local_membership_csv, write_vertices_csv};
use qcorr::classical::{
    bipartite_lambda_star_lower, lambda_star_bounds, local_membership_lp, separable_lambda_bound,
    DEFAULT_VERTEX_CAP,
};
use qcorr::experiments::{
    export_scan, scan_triangle, verify_claims, ClaimStatus, ExportFormat, Triangle,
    DEFAULT_SCAN_TOL, DEFAULT_SLICES,
};
use qcorr::membership::{caratheodory_quantum, membership};
use qcorr::optim::Optimizer;
use qcorr::scenario::{canonical_box, mix_boxes, ns_dimension, probs_from_correlators};
use qcorr::schema::{read_box, BoxSpec};
use qcorr::{BellScenario, BoxLabel, ProbBox, SetDescriptor, SolverConfig, Verdict};

const EXIT_USAGE: u8 = 3;
const EXIT_RUNTIME: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "qcorr",
    version,
    about = "Membership tests for Bell boxes under dimension and randomness limits"
)]
struct Cli {
    /// JSON file with any of: seed, restarts, max_iterations,
    /// feasibility_threshold, infeasibility_threshold, optimizer, pvm_only,
    /// out_dir, format.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Caps the worker threads used by the solver.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Restrict qubit measurements to projective ones.
    #[arg(long, global = true)]
    pvm_only: bool,
    /// Directory for output files (default: current directory).
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a box lies in a set; prints the result as JSON.
    Membership {
        /// Canonical name (P1, P3:4, PTB, ...), JSON file or mixture such as
        /// "0.5*P1+0.5*P3".
        #[arg(long = "box", value_name = "BOX")]
        target: String,
        /// q2, q2-pvm, local, lhv:N or hybrid:D:N.
        #[arg(long, default_value = "q2")]
        set: String,
    },
    /// Critical weights across a triangle of boxes.
    Scan {
        /// Three boxes separated by commas, e.g. P0,P1,P3:4.
        #[arg(long, value_name = "A,B,C")]
        triangle: String,
        #[arg(long, default_value = "q2")]
        set: String,
        #[arg(long, default_value_t = DEFAULT_SLICES)]
        slices: usize,
        #[arg(long, value_enum)]
        format: Option<FileFormat>,
        /// Bisection width for heuristic sets.
        #[arg(long, default_value_t = DEFAULT_SCAN_TOL)]
        tol: f64,
    },
    /// Print dimension and shared-randomness bounds for a scenario.
    Bounds {
        parties: usize,
        inputs: usize,
        outputs: usize,
    },
    /// Run the claim suite and write a report.
    Verify {
        /// Claim ids to run (comma separated or repeated).
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
    /// Write vertex lists, decompositions, witnesses or realizations.
    Export {
        #[command(subcommand)]
        what: ExportCommand,
    },
}

#[derive(Subcommand, Debug)]
enum ExportCommand {
    /// Deterministic vertices of the local polytope as CSV.
    Vertices {
        parties: usize,
        inputs: usize,
        outputs: usize,
    },
    /// Local decomposition (inside) or Bell witness (outside) as CSV.
    Local {
        #[arg(long = "box", value_name = "BOX")]
        target: String,
    },
    /// Resolved box in the JSON box format.
    Box {
        #[arg(long = "box", value_name = "BOX")]
        target: String,
        #[arg(long, value_enum, default_value = "prob")]
        layout: BoxLayout,
    },
    /// Best realization found by a membership search, as JSON.
    Realization {
        #[arg(long = "box", value_name = "BOX")]
        target: String,
        #[arg(long, default_value = "q2")]
        set: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum FileFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BoxLayout {
    Prob,
    Correlator,
}

/// Settings accepted by `--config`; flags override them.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct CliConfig {
    seed: Option<u64>,
    restarts: Option<usize>,
    max_iterations: Option<usize>,
    feasibility_threshold: Option<f64>,
    infeasibility_threshold: Option<f64>,
    optimizer: Option<Optimizer>,
    pvm_only: Option<bool>,
    out_dir: Option<PathBuf>,
    format: Option<FileFormat>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<qcorr::Error> for Failure {
    fn from(e: qcorr::Error) -> Self {
        match e {
            qcorr::Error::Io(_) | qcorr::Error::Csv(_) | qcorr::Error::Json(_) => {
                Failure::Runtime(e.to_string())
            }
            qcorr::Error::Lp(_) | qcorr::Error::TooLarge { .. } => Failure::Runtime(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<mixture::ParseError> for Failure {
    fn from(e: mixture::ParseError) -> Self {
        Failure::Usage(format!("mixture expression, {e}"))
    }
}

struct Context {
    solver: SolverConfig,
    out_dir: PathBuf,
    format: Option<FileFormat>,
    command_hash: String,
}

impl Context {
    fn output_path(&self, stem: &str, ext: &str) -> Result<PathBuf, Failure> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|e| Failure::Runtime(format!("{}: {e}", self.out_dir.display())))?;
        Ok(self
            .out_dir
            .join(format!("{stem}-{}.{ext}", self.command_hash)))
    }
}

/// First 12 hex digits of SHA-256 over the arguments, NUL separated.
fn command_hash(args: &[String]) -> String {
    let mut h = Sha256::new();
    for a in args {
        h.update(a.as_bytes());
        h.update([0]);
    }
    h.finalize().iter().take(6).fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn build_context(cli: &Cli, args: &[String]) -> Result<Context, Failure> {
    let file: CliConfig = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
        }
        None => CliConfig::default(),
    };
    let mut solver = SolverConfig::default();
    if let Some(v) = file.seed {
        solver.seed = v;
    }
    if let Some(v) = file.restarts {
        solver.restarts = v;
    }
    if let Some(v) = file.max_iterations {
        solver.max_iterations = v;
    }
    if let Some(v) = file.feasibility_threshold {
        solver.feasibility_threshold = v;
    }
    if let Some(v) = file.infeasibility_threshold {
        solver.infeasibility_threshold = v;
    }
    if let Some(v) = file.optimizer {
        solver.optimizer = v;
    }
    solver.pvm_only = file.pvm_only.unwrap_or(false) || cli.pvm_only;
    if let Some(v) = cli.seed {
        solver.seed = v;
    }
    if let Some(v) = cli.restarts {
        solver.restarts = v;
    }
    solver.validate()?;
    // the config file contents are part of the command identity
    let mut identity = args.to_vec();
    if let Some(path) = &cli.config {
        identity.push(std::fs::read_to_string(path).unwrap_or_default());
    }
    Ok(Context {
        solver,
        out_dir: cli
            .out_dir
            .clone()
            .or(file.out_dir)
            .unwrap_or_else(|| PathBuf::from(".")),
        format: file.format,
        command_hash: command_hash(&identity),
    })
}

/// Canonical name, JSON file or mixture expression.
fn resolve_box(spec: &str) -> Result<ProbBox, Failure> {
    let spec = spec.trim();
    if let Ok(label) = spec.parse::<BoxLabel>() {
        return Ok(probs_from_correlators(&canonical_box(label))?);
    }
    let path = Path::new(spec);
    if path.is_file() {
        return read_box(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())));
    }
    if spec.contains('*') {
        let terms = mixture::parse_mixture(spec)?;
        let boxes = terms
            .iter()
            .map(|(l, _)| probs_from_correlators(&canonical_box(*l)))
            .collect::<qcorr::Result<Vec<_>>>()?;
        let weights: Vec<f64> = terms.iter().map(|t| t.1).collect();
        let total: f64 = weights.iter().sum();
        let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
        return Ok(mix_boxes(&boxes, &weights)?);
    }
    if spec.ends_with(".json") {
        return Err(Failure::Runtime(format!("{spec}: no such file")));
    }
    Err(Failure::Usage(format!(
        "'{spec}' is not a box name ({}), a JSON file or a mixture expression",
        BoxLabel::ALL.map(|l| l.name()).join(", ")
    )))
}

fn parse_set(s: &str) -> Result<SetDescriptor, Failure> {
    Ok(s.parse::<SetDescriptor>()?)
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Feasible => 0,
        Verdict::Infeasible => 1,
        Verdict::Inconclusive => 2,
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Failure::Runtime(e.to_string()))
}

fn scenario(n: usize, m: usize, v: usize) -> Result<BellScenario, Failure> {
    Ok(BellScenario::new(n, m, v)?)
}

fn run(cli: Cli, ctx: Context) -> Result<u8, Failure> {
    match cli.command {
        Command::Membership { target, set } => {
            let b = resolve_box(&target)?;
            let set = parse_set(&set)?;
            let r = membership(&b, set, &ctx.solver)?;
            println!("{}", to_json(&r)?);
            Ok(verdict_code(r.verdict))
        }
        Command::Scan {
            triangle,
            set,
            slices,
            format,
            tol,
        } => {
            let parts: Vec<&str> = triangle.split(',').map(str::trim).collect();
            let [a, b, c] = parts.as_slice() else {
                return Err(Failure::Usage(format!(
                    "--triangle needs three boxes, got {}",
                    parts.len()
                )));
            };
            let boxes = [resolve_box(a)?, resolve_box(b)?, resolve_box(c)?];
            let names = [a, b, c].map(|s| s.to_string());
            let tri = Triangle::new(names, boxes)?;
            let set = parse_set(&set)?;
            let table = scan_triangle(&tri, slices, set, &ctx.solver, tol)?;
            let format = format.or(ctx.format).unwrap_or(FileFormat::Csv);
            let (ext, export) = match format {
                FileFormat::Csv => ("csv", ExportFormat::Csv),
                FileFormat::Json => ("json", ExportFormat::Json),
            };
            let path = ctx.output_path("scan", ext)?;
            export_scan(&table, export, &path)?;
            println!("wrote {}", path.display());
            match table.max_abs_error() {
                Some(e) => println!("max abs_error {e:.6e} over {} slices", table.rows.len()),
                None => println!("no reference curve for this triangle and set"),
            }
            Ok(0)
        }
        Command::Bounds {
            parties,
            inputs,
            outputs,
        } => {
            print_bounds(scenario(parties, inputs, outputs)?);
            Ok(0)
        }
        Command::Verify { only } => {
            let filter = (!only.is_empty()).then_some(only.as_slice());
            let report = verify_claims(&ctx.solver, filter)?;
            let path = ctx.output_path("verify", "json")?;
            std::fs::write(&path, to_json(&report)? + "\n")
                .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
            let mut code = 0;
            for c in &report.claims {
                println!(
                    "{:<13} {:<30} measured {:.6e}  expected {:.4e}  tol {:.1e}{}",
                    c.status.to_string(),
                    c.id,
                    c.measured,
                    c.expected,
                    c.tolerance,
                    if c.heuristic { "  (heuristic)" } else { "" }
                );
                code = code.max(match c.status {
                    ClaimStatus::Fail => 1,
                    ClaimStatus::Inconclusive => 2,
                    _ => 0,
                });
            }
            let count = |s: ClaimStatus| report.claims.iter().filter(|c| c.status == s).count();
            println!(
                "{} passed, {} failed, {} inconclusive, {} report-only; report in {}",
                count(ClaimStatus::Pass),
                count(ClaimStatus::Fail),
                count(ClaimStatus::Inconclusive),
                count(ClaimStatus::ReportOnly),
                path.display()
            );
            // a failure outranks an inconclusive claim
            Ok(code)
        }
        Command::Export { what } => export(what, &ctx),
    }
}

fn export(what: ExportCommand, ctx: &Context) -> Result<u8, Failure> {
    let path = match what {
        ExportCommand::Vertices {
            parties,
            inputs,
            outputs,
        } => {
            let path = ctx.output_path("vertices", "csv")?;
            let n = write_vertices_csv(
                &scenario(parties, inputs, outputs)?,
                DEFAULT_VERTEX_CAP,
                &path,
            )?;
            println!("{n} vertices");
            path
        }
        ExportCommand::Local { target } => {
            let b = resolve_box(&target)?;
            let m = local_membership_lp(&b)?;
            let path =
                ctx.output_path(if m.inside { "decomposition" } else { "witness" }, "csv")?;
            write_local_membership_csv(&b.scenario(), &m, &path)?;
            println!("{}", if m.inside { "local" } else { "nonlocal" });
            path
        }
        ExportCommand::Box { target, layout } => {
            let b = resolve_box(&target)?;
            let spec = match layout {
                BoxLayout::Prob => BoxSpec::from_prob_box(&b),
                BoxLayout::Correlator => {
                    BoxSpec::from_correlators(&qcorr::scenario::correlators_from_probs(&b)?)
                }
            };
            let path = ctx.output_path("box", "json")?;
            write_text(&path, to_json(&spec)?)?;
            path
        }
        ExportCommand::Realization { target, set } => {
            let b = resolve_box(&target)?;
            let r = membership(&b, parse_set(&set)?, &ctx.solver)?;
            let Some(realization) = &r.best_parameters else {
                return Err(Failure::Runtime(
                    "the search returned no realization".into(),
                ));
            };
            let path = ctx.output_path("realization", "json")?;
            write_text(&path, to_json(realization)?)?;
            println!("distance {:.3e} ({})", r.best_distance, r.verdict);
            path
        }
    };
    println!("wrote {}", path.display());
    Ok(0)
}

fn write_text(path: &Path, text: String) -> Result<(), Failure> {
    std::fs::write(path, text + "\n")
        .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn print_bounds(s: BellScenario) {
    let (n, m, v) = (s.n_parties(), s.n_inputs(), s.n_outputs());
    let b = lambda_star_bounds(&s);
    let q = caratheodory_quantum(&s);
    println!("scenario (n, m, v) = ({n}, {m}, {v})");
    println!(
        "statistical dimension F = (m(v-1)+1)^n - 1 = {}",
        ns_dimension(&s)
    );
    println!("shared randomness spanning the local polytope:");
    println!("  lower bound                           = {}", b.lower);
    println!(
        "    (m(v-1)+1)^(n-1) before corrections = {}",
        b.loose_lower
    );
    if n == 2 {
        println!(
            "    two-party closed form               = {}",
            bipartite_lambda_star_lower(m as u128, v as u128)
        );
    }
    println!("  upper bound min(v^(m(n-1)), F)        = {}", b.upper);
    println!(
        "    v^(m(n-1))                          = {}",
        b.deterministic_parties_bound
    );
    println!(
        "    F                                   = {}",
        b.dimension_bound
    );
    println!("qubit boxes spanning the convex hull    <= {}", q.upper);
    match q.masanes_dim {
        Some(d) => println!("local dimension making the set convex  = {d}"),
        None => println!(
            "local dimension making the set convex  = n/a (two parties, two binary inputs only)"
        ),
    }
    for d in [2u128, 3, 4] {
        println!(
            "separable states, local dimension {d}    : d^n = {}",
            separable_lambda_bound(d, n as u32)
        );
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    }
    let outcome = build_context(&cli, &args[1..]).and_then(|ctx| run(cli, ctx));
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
