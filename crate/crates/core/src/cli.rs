//! Command-line front end. Exit codes: 0 success or accept, 1 verifier
//! rejection or pipeline failure, 2 input or usage error, 3 generator or
//! eigensolver budget exhausted.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::completion::CarvePolicy;
use crate::generators::{generate, GenError, GenSpec, Model};
use crate::graph::Graph;
use crate::partition::Mode;
use crate::pipeline::{
    counting_bounds, factorize, read_factorization, verify_triples, write_factorization, PipelineConfig, Verdict,
};
use crate::spectral::{mixing_audit, second_eigenvalue_with, Method, SpectralConfig, SpectralError, DEFAULT_TOL};

pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Parser)]
#[command(name = "onefactor", version, about = "Construct and verify 1-factorizations of regular graphs")]
struct Cli {
    /// Print the effective configuration as JSON and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a test graph in edge-list format.
    Gen(GenArgs),
    /// Estimate λ(G) and audit the mixing inequality.
    Spectral(SpectralArgs),
    /// Compute a 1-factorization.
    Factorize(FactorizeArgs),
    /// Check a factorization file against a graph.
    Verify(VerifyArgs),
    /// Counting bounds on the number of 1-factorizations (natural logs).
    Bounds(BoundsArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_parser = parse_model)]
    model: Model,
    #[arg(short = 'n')]
    n: Option<usize>,
    #[arg(short = 'd', default_value_t = 0)]
    d: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Dense,
    Iterative,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct SpectralArgs {
    graph: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Random subsets for the mixing audit (every subset when n ≤ 16).
    #[arg(long, default_value_t = 200)]
    audit_trials: usize,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
    #[arg(short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FactorFormat {
    /// `u v k` per edge.
    Triples,
    /// One line per class listing `u-v` pairs.
    Classes,
}

#[derive(Debug, Args)]
struct FactorizeArgs {
    graph: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Number of pieces (odd).
    #[arg(long)]
    t: Option<usize>,
    /// Keep t fixed instead of stepping down after failed attempts.
    #[arg(long)]
    fixed_t: bool,
    /// Use the sampled bisections as drawn, without cut refinement.
    #[arg(long)]
    no_refine: bool,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Full pipeline attempts.
    #[arg(long)]
    max_retries: Option<usize>,
    /// Multiplier on the partition windows.
    #[arg(long)]
    slack: Option<f64>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    #[arg(long, value_parser = parse_carve)]
    carve: Option<CarvePolicy>,
    #[arg(long, value_enum, default_value_t = FactorFormat::Triples)]
    format: FactorFormat,
    #[arg(short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    graph: PathBuf,
    factorization: PathBuf,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(short = 'n')]
    n: usize,
    #[arg(short = 'd')]
    d: usize,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Side size for the Schrijver bound.
    #[arg(short = 'k')]
    k: Option<usize>,
    /// Degree for the Schrijver bound (defaults to d).
    #[arg(short = 'r')]
    r: Option<usize>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
}

fn parse_model(s: &str) -> Result<Model, String> {
    s.parse()
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

fn parse_carve(s: &str) -> Result<CarvePolicy, String> {
    s.parse()
}

struct Exit {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Exit {
    Exit { code: 2, message: message.into() }
}

fn read_graph(path: &Path) -> Result<Graph, Exit> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Graph::parse_edge_list(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(data: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), Exit> {
    match path {
        Some(p) => std::fs::write(p, data).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => out.write_all(data.as_bytes()).map_err(|e| usage(e.to_string())),
    }
}

fn pipeline_config(a: &FactorizeArgs) -> PipelineConfig {
    let mut cfg = PipelineConfig { seed: a.seed, ..PipelineConfig::default() };
    if let Some(t) = a.t {
        cfg.t = t;
    }
    cfg.adaptive_t = !a.fixed_t;
    cfg.partition.refine = !a.no_refine;
    if let Some(alpha) = a.alpha {
        cfg.alpha = alpha;
        cfg.completion.alpha = alpha;
    }
    if let Some(eps) = a.epsilon {
        cfg.epsilon = eps;
    }
    if let Some(r) = a.max_retries {
        cfg.max_retries = r;
    }
    if let Some(s) = a.slack {
        cfg.partition.slack = s;
    }
    if let Some(m) = a.mode {
        cfg.partition.mode = m;
    }
    if let Some(c) = a.carve {
        cfg.completion.carve = c;
    }
    cfg
}

/// Parses `args` (program name first) and runs the command, writing data to
/// `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 2;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) => 0,
        Err(Exit { code, message }) => {
            let _ = writeln!(err, "onefactor: {message}");
            code
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Exit> {
    if cli.print_config {
        let cfg = match &cli.command {
            Some(Command::Factorize(a)) => pipeline_config(a),
            _ => PipelineConfig::default(),
        };
        let json = serde_json::json!({
            "factorize": cfg,
            "spectral": { "tol": DEFAULT_TOL, "dense_limit": crate::spectral::DENSE_LIMIT, "audit_trials": 200 },
            "default_seed": DEFAULT_SEED,
        });
        let text = serde_json::to_string_pretty(&json).expect("config serializes");
        return emit(&format!("{text}\n"), None, out);
    }
    match cli.command {
        None => Err(usage("a subcommand is required (gen, spectral, factorize, verify, bounds); see --help")),
        Some(Command::Gen(a)) => run_gen(a, out),
        Some(Command::Spectral(a)) => run_spectral(a, out),
        Some(Command::Factorize(a)) => run_factorize(a, out, err),
        Some(Command::Verify(a)) => run_verify(a, out),
        Some(Command::Bounds(a)) => run_bounds(a, out),
    }
}

fn run_gen(a: GenArgs, out: &mut dyn Write) -> Result<(), Exit> {
    let n = match (a.model, a.n) {
        (Model::Petersen, n) => n.unwrap_or(10),
        (_, Some(n)) => n,
        (_, None) => return Err(usage("-n is required for this model")),
    };
    let g = generate(GenSpec { model: a.model, n, d: a.d, seed: a.seed }).map_err(|e| match e {
        GenError::BudgetExhausted { .. } => Exit { code: 3, message: e.to_string() },
        _ => usage(e.to_string()),
    })?;
    emit(&g.to_edge_list(), a.output.as_deref(), out)
}

fn run_spectral(a: SpectralArgs, out: &mut dyn Write) -> Result<(), Exit> {
    let g = read_graph(&a.graph)?;
    let method = match a.method {
        MethodArg::Auto => None,
        MethodArg::Dense => Some(Method::Dense),
        MethodArg::Iterative => Some(Method::Iterative),
    };
    let cfg = SpectralConfig { tol: a.tol, method, seed: a.seed, ..SpectralConfig::default() };
    let r = second_eigenvalue_with(&g, &cfg).map_err(|e| match e {
        SpectralError::Budget { .. } => Exit { code: 3, message: e.to_string() },
        _ => usage(e.to_string()),
    })?;
    let audit = mixing_audit(&g, r.lambda, a.audit_trials, a.seed);
    let d = r.d as f64;
    let ramanujan = if r.d >= 1 { 2.0 * (d - 1.0).sqrt() } else { 0.0 };
    let text = match a.format {
        ReportFormat::Json => {
            let v = serde_json::json!({
                "n": g.n(), "d": r.d, "lambda": r.lambda, "lambda2": r.lambda2, "lambda_n": r.lambda_n,
                "epsilon_star": r.epsilon_star, "method": r.method.name(), "residual": r.residual,
                "ramanujan_bound": ramanujan, "lambda_below_d_pow_0_9": r.lambda <= d.powf(0.9),
                "mixing_audit": if audit.passed() { "pass" } else { "fail" },
                "mixing_exhaustive": audit.exhaustive, "mixing_sets": audit.sets_checked,
            });
            format!("{v}\n")
        }
        ReportFormat::Text => {
            let mut s = String::new();
            for (k, v) in [
                ("n", g.n().to_string()),
                ("d", r.d.to_string()),
                ("lambda", format!("{:.12}", r.lambda)),
                ("lambda2", format!("{:.12}", r.lambda2)),
                ("lambda_n", format!("{:.12}", r.lambda_n)),
                ("epsilon_star", format!("{:.6}", r.epsilon_star)),
                ("method", r.method.name().to_string()),
                ("residual", format!("{:e}", r.residual)),
                ("ramanujan_bound", format!("{ramanujan:.6}")),
                ("lambda_below_d_pow_0_9", (r.lambda <= d.powf(0.9)).to_string()),
                ("mixing_audit", if audit.passed() { "pass" } else { "fail" }.to_string()),
                ("mixing_exhaustive", audit.exhaustive.to_string()),
                ("mixing_sets", audit.sets_checked.to_string()),
            ] {
                s.push_str(&format!("{k}={v}\n"));
            }
            s
        }
    };
    emit(&text, a.output.as_deref(), out)
}

fn run_factorize(a: FactorizeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Exit> {
    let g = read_graph(&a.graph)?;
    let cfg = pipeline_config(&a);
    let outcome = factorize(&g, &cfg).map_err(|e| usage(e.to_string()))?;
    let s = &outcome.stats;
    let _ = writeln!(
        err,
        "factorize: n={} d={} attempts={} t={} r={} r'={} rounds={} time={:.3}s",
        g.n(),
        g.max_degree(),
        s.attempts,
        s.t,
        s.r,
        s.r_prime,
        s.completion_rounds,
        s.wall_time.as_secs_f64()
    );
    let f = match outcome.result {
        Ok(f) => f,
        Err(failure) => {
            for line in &s.failures {
                let _ = writeln!(err, "  attempt failed: {line}");
            }
            return Err(Exit { code: 1, message: format!("no 1-factorization found ({failure})") });
        }
    };
    let text = match a.format {
        FactorFormat::Triples => {
            let mut header = vec![
                ("onefactor".to_string(), "factorization".to_string()),
                ("n".into(), g.n().to_string()),
                ("d".into(), g.max_degree().to_string()),
                ("seed".into(), a.seed.to_string()),
                ("attempts".into(), s.attempts.to_string()),
            ];
            match s.shortcut {
                Some(kind) => header.push(("route".into(), kind.to_string())),
                None => {
                    header.push(("t".into(), s.t.to_string()));
                    header.push(("r".into(), s.r.to_string()));
                    let rp: Vec<String> = s.r_primes.iter().map(ToString::to_string).collect();
                    header.push(("r_prime".into(), format!("{} ({})", s.r_prime, rp.join(","))));
                    header.push(("rounds".into(), s.completion_rounds.to_string()));
                }
            }
            if let Some(sp) = &outcome.spectral {
                header.push(("lambda".into(), format!("{:.9}", sp.lambda)));
                header.push(("epsilon_star".into(), format!("{:.6}", sp.epsilon_star)));
            }
            write_factorization(&g, &f, &header)
        }
        FactorFormat::Classes => {
            let mut text = String::new();
            for class in &f.classes {
                let pairs: Vec<String> = class
                    .edges()
                    .iter()
                    .map(|&e| {
                        let (u, v) = g.edge(e);
                        format!("{u}-{v}")
                    })
                    .collect();
                text.push_str(&pairs.join(" "));
                text.push('\n');
            }
            text
        }
    };
    emit(&text, a.output.as_deref(), out)
}

fn run_verify(a: VerifyArgs, out: &mut dyn Write) -> Result<(), Exit> {
    let g = read_graph(&a.graph)?;
    let text =
        std::fs::read_to_string(&a.factorization).map_err(|e| usage(format!("{}: {e}", a.factorization.display())))?;
    let triples = read_factorization(&text).map_err(|e| usage(format!("{}: {e}", a.factorization.display())))?;
    match verify_triples(&g, &triples) {
        Verdict::Accept => emit("accept\n", None, out),
        Verdict::Reject(v) => {
            emit(&format!("reject: {v}\n"), None, out)?;
            Err(Exit { code: 1, message: format!("verification failed: {v}") })
        }
    }
}

fn run_bounds(a: BoundsArgs, out: &mut dyn Write) -> Result<(), Exit> {
    let b = counting_bounds(a.n, a.d, a.epsilon, a.k, a.r).map_err(|e| usage(e.to_string()))?;
    let text = match a.format {
        ReportFormat::Json => format!("{}\n", serde_json::to_string(&b).expect("bounds serialize")),
        ReportFormat::Text => {
            let mut s = format!(
                "ln_lower={:.6}\nln_upper={:.6}\nupper_omits_lower_order={}\n",
                b.lower, b.upper, b.upper_omits_lower_order
            );
            if let Some(sch) = b.schrijver {
                s.push_str(&format!("ln_schrijver={sch:.6}\nschrijver={:.6}\n", sch.exp()));
            }
            s
        }
    };
    emit(&text, None, out)
}
