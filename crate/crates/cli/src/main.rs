use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use totalwalk::experiments::{
    check_hypotheses, compare_spectrum, fit_csv, rows_to_csv, rows_to_json, search_instance, sweep, Family,
    MarkedSelection, OutputFormat, SweepConfig,
};
use totalwalk::knn::MarkedKind;
use totalwalk::search::PMAX_SAMPLES;
use totalwalk::{Error, Execution};

const EXIT_RUNTIME: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_ASSUMPTION: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "totalwalk", version, about = "Quantum-walk search on total graphs")]
struct Cli {
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Exit with status 3 when a numerical assumption fails.
    #[arg(long, global = true)]
    strict: bool,
    /// JSON file with default option values; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run single-threaded.
    #[arg(long, global = true)]
    sequential: bool,
    /// Worker threads for sweeps and dense kernels.
    #[arg(long, global = true, env = "TOTALWALK_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum FamilyArg {
    Kn,
    Knn,
    Cycle,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Kn => Family::Kn,
            FamilyArg::Knn => Family::Knn,
            FamilyArg::Cycle => Family::Cycle,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum MarkedArg {
    Vertex,
    Edge,
    Both,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form total-graph spectrum against the dense eigensolver.
    Spectrum(GraphArgs),
    /// Full-dynamics search on one instance: JSON report plus CSV trace.
    Search(SearchArgs),
    /// Exact λ± analysis over a range of sizes.
    SweepEpsilon(SweepArgs),
    /// Log-log least-squares fit of a sweep column against N.
    Fit(FitArgs),
    /// Pass/fail summary of the two-level hypotheses over a sweep.
    Check(SweepArgs),
}

#[derive(Args, Debug)]
struct GraphArgs {
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, value_enum)]
    marked: Option<MarkedArg>,
    /// Coupling; defaults to S1.
    #[arg(long)]
    gamma: Option<f64>,
    /// Samples on [0, 2 t_opt].
    #[arg(long)]
    samples: Option<usize>,
    /// Trace CSV path; defaults to `<out>.trace.csv` when --out is given.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    step: Option<usize>,
    #[arg(long, value_enum)]
    marked: Option<MarkedArg>,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Sweep CSV.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    column: Option<String>,
    /// Restrict to rows of one marked kind.
    #[arg(long, value_enum)]
    kind: Option<MarkedArg>,
}

/// Every option the JSON config may set.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    out: Option<PathBuf>,
    format: Option<Format>,
    strict: Option<bool>,
    family: Option<FamilyArg>,
    n: Option<usize>,
    n_min: Option<usize>,
    n_max: Option<usize>,
    step: Option<usize>,
    marked: Option<MarkedArg>,
    gamma: Option<f64>,
    samples: Option<usize>,
    trace: Option<PathBuf>,
    input: Option<PathBuf>,
    column: Option<String>,
    kind: Option<MarkedArg>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
    Assumption(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidSize(_) | Error::Parse(_) | Error::InvalidGraph(_) | Error::Json(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

struct Context {
    out: Option<PathBuf>,
    format: Option<Format>,
    strict: bool,
    exec: Execution,
    file: FileConfig,
}

impl Context {
    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.out {
            Some(path) => fs::write(path, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }

    fn json_only(&self, command: &str) -> Result<(), Failure> {
        if self.format == Some(Format::Csv) {
            return Err(Failure::Usage(format!("`{command}` writes JSON only")));
        }
        Ok(())
    }

    fn family(&self, flag: Option<FamilyArg>) -> Family {
        flag.or(self.file.family).map_or(Family::Knn, Family::from)
    }

    fn sweep_config(&self, args: &SweepArgs) -> Result<SweepConfig, Failure> {
        let d = SweepConfig::default();
        let marked = match args.marked.or(self.file.marked) {
            Some(MarkedArg::Vertex) => MarkedSelection::Vertex,
            Some(MarkedArg::Edge) => MarkedSelection::Edge,
            Some(MarkedArg::Both) | None => MarkedSelection::Both,
        };
        let config = SweepConfig {
            family: self.family(args.family),
            n_min: args.n_min.or(self.file.n_min).unwrap_or(d.n_min),
            n_max: args.n_max.or(self.file.n_max).unwrap_or(d.n_max),
            step: args.step.or(self.file.step).unwrap_or(d.step),
            marked,
            format: match self.format {
                Some(Format::Json) => OutputFormat::Json,
                _ => OutputFormat::Csv,
            },
            time_samples: self.file.samples.unwrap_or(d.time_samples),
            output: self.out.clone(),
        };
        config.validate()?;
        Ok(config)
    }
}

fn required<T>(value: Option<T>, name: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::Usage(format!("missing --{name}")))
}

fn single_kind(arg: Option<MarkedArg>) -> Result<Option<MarkedKind>, Failure> {
    match arg {
        None => Ok(None),
        Some(MarkedArg::Vertex) => Ok(Some(MarkedKind::Vertex)),
        Some(MarkedArg::Edge) => Ok(Some(MarkedKind::Edge)),
        Some(MarkedArg::Both) => Err(Failure::Usage("expected `vertex` or `edge`".into())),
    }
}

fn trace_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push(".trace.csv");
    out.with_file_name(name)
}

/// Tolerance on the closed-form versus dense spectrum.
const SPECTRUM_TOL: f64 = 1e-9;

fn cmd_spectrum(ctx: &Context, args: &GraphArgs) -> Result<(), Failure> {
    let family = ctx.family(args.family);
    let n = required(args.n.or(ctx.file.n), "n")?;
    let cmp = compare_spectrum(family, n, ctx.exec)?;
    let text = match ctx.format {
        Some(Format::Csv) => {
            let mut s = String::from("source,value,multiplicity\n");
            for (source, spec) in [("closed_form", &cmp.closed_form_spectrum), ("oracle", &cmp.oracle)] {
                for (v, m) in spec.values().iter().zip(spec.multiplicities()) {
                    s.push_str(&format!("{source},{},{m}\n", totalwalk::format::sci17(*v)));
                }
            }
            s
        }
        _ => serde_json::to_string_pretty(&cmp).map_err(Error::from)? + "\n",
    };
    ctx.emit(&text)?;
    let ok = cmp.multiplicities_match && cmp.max_diff.is_some_and(|d| d <= SPECTRUM_TOL);
    if ctx.strict && !ok {
        return Err(Failure::Assumption(format!(
            "closed form and oracle disagree (max diff {:?})",
            cmp.max_diff
        )));
    }
    Ok(())
}

fn cmd_search(ctx: &Context, args: &SearchArgs) -> Result<(), Failure> {
    ctx.json_only("search")?;
    let family = ctx.family(args.graph.family);
    let n = required(args.graph.n.or(ctx.file.n), "n")?;
    let kind = single_kind(args.marked.or(ctx.file.marked))?.unwrap_or(MarkedKind::Vertex);
    let gamma = args.gamma.or(ctx.file.gamma);
    let samples = args.samples.or(ctx.file.samples).unwrap_or(PMAX_SAMPLES);
    if samples < 3 {
        return Err(Failure::Usage("--samples must be at least 3".into()));
    }
    let outcome = search_instance(family, n, kind, gamma, samples, ctx.exec)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    ctx.emit(&(serde_json::to_string_pretty(&outcome).map_err(Error::from)? + "\n"))?;
    let trace = args
        .trace
        .clone()
        .or_else(|| ctx.file.trace.clone())
        .or_else(|| ctx.out.as_deref().map(trace_path));
    if let Some(path) = trace {
        fs::write(path, outcome.trace.to_csv_string())?;
    }
    if ctx.strict && !outcome.warnings.is_empty() {
        return Err(Failure::Assumption(outcome.warnings.join("; ")));
    }
    Ok(())
}

fn cmd_sweep(ctx: &Context, args: &SweepArgs) -> Result<(), Failure> {
    let config = ctx.sweep_config(args)?;
    let rows = sweep(&config, ctx.exec)?;
    let text = match config.format {
        OutputFormat::Csv => rows_to_csv(&rows),
        OutputFormat::Json => rows_to_json(&rows) + "\n",
    };
    ctx.emit(&text)?;
    if ctx.strict {
        let bad: Vec<usize> = rows
            .iter()
            .filter(|r| !(r.eps_plus > 0.0 && r.eps_minus < 0.0) || r.leakage > totalwalk::search::LEAKAGE_THRESHOLD)
            .map(|r| r.n)
            .collect();
        if !bad.is_empty() {
            return Err(Failure::Assumption(format!("assumptions fail at n = {bad:?}")));
        }
    }
    Ok(())
}

fn cmd_fit(ctx: &Context, args: &FitArgs) -> Result<(), Failure> {
    let input = required(args.input.clone().or_else(|| ctx.file.input.clone()), "input")?;
    let column = args
        .column
        .clone()
        .or_else(|| ctx.file.column.clone())
        .unwrap_or_else(|| "eps_plus".into());
    let kind = single_kind(args.kind.or(ctx.file.kind))?;
    let file = fs::File::open(&input).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
    let fit = fit_csv(file, &column, kind)?;
    let text = match ctx.format {
        Some(Format::Csv) => format!(
            "slope,intercept,rms,points\n{},{},{},{}\n",
            totalwalk::format::sci17(fit.slope),
            totalwalk::format::sci17(fit.intercept),
            totalwalk::format::sci17(fit.rms),
            fit.points
        ),
        _ => serde_json::to_string_pretty(&fit).map_err(Error::from)? + "\n",
    };
    ctx.emit(&text)
}

fn cmd_check(ctx: &Context, args: &SweepArgs) -> Result<(), Failure> {
    ctx.json_only("check")?;
    let config = ctx.sweep_config(args)?;
    let summary = check_hypotheses(&config, ctx.exec)?;
    ctx.emit(&(serde_json::to_string_pretty(&summary).map_err(Error::from)? + "\n"))?;
    if ctx.strict && !summary.passed {
        return Err(Failure::Assumption("hypothesis checks failed".into()));
    }
    Ok(())
}

fn load_config(path: &Path) -> Result<FileConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.config {
        Some(path) => load_config(path)?,
        None => FileConfig::default(),
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Failure::Usage("TOTALWALK_THREADS must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    let ctx = Context {
        out: cli.out.or_else(|| file.out.clone()),
        format: cli.format.or(file.format),
        strict: cli.strict || file.strict.unwrap_or(false),
        exec: if cli.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
        file,
    };
    match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(&ctx, a),
        Command::Search(a) => cmd_search(&ctx, a),
        Command::SweepEpsilon(a) => cmd_sweep(&ctx, a),
        Command::Fit(a) => cmd_fit(&ctx, a),
        Command::Check(a) => cmd_check(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_RUNTIME)
        }
        Err(Failure::Assumption(msg)) => {
            eprintln!("assumption failed: {msg}");
            ExitCode::from(EXIT_ASSUMPTION)
        }
    }
}
