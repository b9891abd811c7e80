//! The `dgk` command-line frontend.
//!
//! Exit codes: 0 success, 1 a check failed (or a numerical routine did not
//! converge), 2 usage error, 3 input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dynamics::{
    cesaro_average, consensus_limit, diffusion_limit, plain_power_limit, simulate_continuous, simulate_discrete,
    Measure, Process, StateVector, Trajectory,
};
use crate::embedding::{closure_check, PATTERN_EPS};
use crate::error::Error;
use crate::example::{g7, verify};
use crate::graph::{build_matrix, parse_graph, DanglingPolicy, Digraph, GraphFormat, MatrixKind};
use crate::kernels::KernelBases;
use crate::matrix::{vector_to_json, Matrix};
use crate::ranking::{alpha_from_beta, rank, RankOptions};
use crate::scalar::{parse_rational, Mode, Rational, Scalar};
use crate::structure::{cabal_period, decompose, reach_decomposition, ReachDecomposition};

#[derive(Debug, Parser)]
#[command(
    name = "dgk",
    version,
    about = "Reaches, Laplacian kernels, consensus and pagerank of weighted digraphs"
)]
pub struct Cli {
    /// Arithmetic: exact rationals or f64. Defaults to rational up to 512 vertices.
    #[arg(long, global = true, env = "DGK_MODE", value_parser = parse_mode)]
    pub arithmetic: Option<Mode>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,

    /// Input format; inferred from the file extension when omitted.
    #[arg(long, global = true, value_parser = parse_graph_format)]
    pub input_format: Option<GraphFormat>,

    /// Treatment of vertices with no incoming edge.
    #[arg(long, global = true, value_enum, default_value_t = Dangling::SelfLoop)]
    pub dangling: Dangling,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dangling {
    SelfLoop,
    Uniform,
}

impl From<Dangling> for DanglingPolicy {
    fn from(d: Dangling) -> Self {
        match d {
            Dangling::SelfLoop => DanglingPolicy::SelfLoop,
            Dangling::Uniform => DanglingPolicy::Uniform,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reach decomposition: cabals, exclusive and common parts, periods.
    Analyze {
        input: PathBuf,
        /// Decompose each weak component separately instead of rejecting
        /// disconnected input.
        #[arg(long)]
        per_component: bool,
    },
    /// Right and left kernel bases and the projection onto the kernel.
    Kernels { input: PathBuf },
    /// Evolve a consensus or diffusion process and report its limit.
    Simulate(SimulateArgs),
    /// Influence, pagerank and the teleporting variant.
    Rank(RankArgs),
    /// Properties of exp(-L): stochasticity, positivity pattern, kernels.
    CheckAppendix {
        input: PathBuf,
        #[arg(long, default_value_t = PATTERN_EPS)]
        eps: f64,
        #[arg(long, default_value_t = 1e-8)]
        kernel_tol: f64,
    },
    /// Recompute every published value of the seven-vertex example.
    VerifyPaperExample {
        /// Edge list of the example; the embedded copy is used when omitted.
        fixture: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProcessArg {
    Diffusion,
    Consensus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TimeArg {
    Discrete,
    Continuous,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = ProcessArg::Diffusion)]
    pub process: ProcessArg,
    #[arg(long, value_enum, default_value_t = TimeArg::Discrete)]
    pub mode: TimeArg,
    /// Discrete steps, or the number of sampling intervals in continuous mode.
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// End time in continuous mode.
    #[arg(long, default_value_t = 10.0)]
    pub time: f64,
    /// `uniform`, `delta:LABEL`, or a file holding `label value` pairs on one line.
    #[arg(long)]
    pub init: Option<String>,
    /// Truncation tolerance of the heat kernel.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Teleport {
    None,
    Uniform,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    pub input: PathBuf,
    /// Damping factor in (0, 1); 0.85 unless --alpha is given.
    #[arg(long, value_parser = parse_rational_arg, conflicts_with = "alpha")]
    pub beta: Option<Rational>,
    /// Resolvent parameter, alpha = 1/beta - 1.
    #[arg(long, value_parser = parse_rational_arg)]
    pub alpha: Option<Rational>,
    #[arg(long, value_enum, default_value_t = Teleport::None)]
    pub teleport: Teleport,
    /// l1 stopping tolerance of the power iteration.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

fn parse_graph_format(s: &str) -> Result<GraphFormat, String> {
    s.parse()
}

fn parse_rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("`{s}` is not a number"))
}

/// An error with its exit code.
#[derive(Debug)]
pub enum Failure {
    Check(String),
    Usage(String),
    Input(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Check(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Input(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Check(m) | Failure::Usage(m) | Failure::Input(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Parse { .. }
            | Error::DuplicateEdge { .. }
            | Error::BadWeight { .. }
            | Error::DanglingVertex { .. }
            | Error::WeaklyDisconnected { .. }
            | Error::UnknownVertex(_)
            | Error::InvalidMeasure(_) => Failure::Input(msg),
            Error::BadAlpha
            | Error::BadBeta
            | Error::PolicyConflict { .. }
            | Error::ToleranceUnreachable { .. }
            | Error::InvalidArgument(_) => Failure::Usage(msg),
            _ => Failure::Check(msg),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn read_graph(path: &Path, format: Option<GraphFormat>) -> CliResult<Digraph> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    let format = format.unwrap_or_else(|| GraphFormat::from_path(path));
    parse_graph(&text, format).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes())
        .and_then(|_| {
            if text.ends_with('\n') {
                Ok(())
            } else {
                out.write_all(b"\n")
            }
        })
        .map_err(|e| Failure::Check(format!("cannot write output: {e}")))
}

fn emit_json(out: &mut dyn Write, value: &serde_json::Value) -> CliResult<()> {
    emit(
        out,
        &serde_json::to_string_pretty(value).expect("json values serialize"),
    )
}

impl Cli {
    fn mode_for(&self, n: usize) -> Mode {
        self.arithmetic.unwrap_or_else(|| Mode::default_for(n))
    }

    fn require_float(&self, what: &str) -> CliResult<()> {
        if self.arithmetic == Some(Mode::Rational) {
            return Err(Failure::Usage(format!("{what} is only available in float arithmetic")));
        }
        Ok(())
    }

    fn reject_csv(&self, what: &str) -> CliResult<()> {
        if self.format == OutputFormat::Csv {
            return Err(Failure::Usage(format!("{what} has no CSV output")));
        }
        Ok(())
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult<i32> {
    match &cli.command {
        Command::Analyze { input, per_component } => {
            cli.reject_csv("analyze")?;
            let g = read_graph(input, cli.input_format)?;
            emit_json(out, &analyze_json(&g, *per_component)?)?;
            Ok(0)
        }
        Command::Kernels { input } => {
            cli.reject_csv("kernels")?;
            let g = read_graph(input, cli.input_format)?;
            let policy = cli.dangling.into();
            let value = match cli.mode_for(g.n()) {
                Mode::Rational => kernels_json::<Rational>(&g, policy)?,
                Mode::Float => kernels_json::<f64>(&g, policy)?,
            };
            emit_json(out, &value)?;
            Ok(0)
        }
        Command::Simulate(args) => simulate(cli, args, out),
        Command::Rank(args) => {
            cli.reject_csv("rank")?;
            let g = read_graph(&args.input, cli.input_format)?;
            let alpha = match (&args.alpha, &args.beta) {
                (Some(a), _) => a.clone(),
                (None, Some(b)) => alpha_from_beta(b)?,
                (None, None) => alpha_from_beta(&Rational::new(17.into(), 20.into()))?,
            };
            let policy = match args.teleport {
                Teleport::None => DanglingPolicy::SelfLoop,
                Teleport::Uniform => DanglingPolicy::Uniform,
            };
            let opts = RankOptions {
                alpha,
                policy,
                tol: args.tol,
                max_iter: args.max_iter,
            };
            let value = match cli.mode_for(g.n()) {
                Mode::Rational => rank::<Rational>(&g, &opts)?.to_json(),
                Mode::Float => rank::<f64>(&g, &opts)?.to_json(),
            };
            emit_json(out, &value)?;
            Ok(0)
        }
        Command::CheckAppendix { input, eps, kernel_tol } => {
            cli.require_float("check-appendix")?;
            cli.reject_csv("check-appendix")?;
            let g = read_graph(input, cli.input_format)?;
            let report = closure_check(&g, cli.dangling.into(), *eps, *kernel_tol)?;
            let mut value = serde_json::to_value(&report).expect("report serializes");
            value["ok"] = report.ok().into();
            emit_json(out, &value)?;
            Ok(if report.ok() { 0 } else { 1 })
        }
        Command::VerifyPaperExample { fixture } => {
            cli.reject_csv("verify-paper-example")?;
            let g = match fixture {
                Some(path) => read_graph(path, cli.input_format)?,
                None => g7(),
            };
            let items = verify(&g)?;
            let all = items.iter().all(|i| i.passed);
            if cli.format == OutputFormat::Json {
                emit_json(out, &serde_json::json!({ "items": items, "passed": all }))?;
            } else {
                let lines: Vec<String> = items.iter().map(ToString::to_string).collect();
                emit(out, &lines.join("\n"))?;
            }
            Ok(if all { 0 } else { 1 })
        }
    }
}

fn reach_json(g: &Digraph, dec: &ReachDecomposition) -> CliResult<serde_json::Value> {
    let labels = |vs: &[usize]| -> Vec<&str> { vs.iter().map(|&v| g.label(v)).collect() };
    let reaches = dec
        .reaches()
        .iter()
        .map(|r| {
            Ok(serde_json::json!({
                "vertices": labels(&r.vertices),
                "cabal": labels(&r.cabal),
                "exclusive": labels(&r.exclusive),
                "common": labels(&r.common),
                "period": cabal_period(g, &r.cabal)?,
            }))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(serde_json::json!({ "vertices": g.vertex_ids(), "k": dec.k(), "reaches": reaches }))
}

fn analyze_json(g: &Digraph, per_component: bool) -> CliResult<serde_json::Value> {
    if !per_component {
        let dec = reach_decomposition(g).map_err(|e| match e {
            Error::WeaklyDisconnected { .. } => Failure::Input(format!("{e}; rerun with --per-component")),
            other => other.into(),
        })?;
        return reach_json(g, &dec);
    }
    let components = g
        .weak_components()
        .iter()
        .map(|vs| {
            let sub = g.induced(vs);
            reach_json(&sub, &decompose(&sub))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(serde_json::json!({ "components": components }))
}

/// Decomposition matching the walk of `S` under `policy`: teleporting rows
/// connect their vertex to everything.
fn walk_decomposition<T: Scalar>(g: &Digraph, s: &Matrix<T>) -> CliResult<ReachDecomposition> {
    Ok(decompose(&Digraph::from_matrix_pattern(g.vertex_ids().to_vec(), s)?))
}

fn bases<T: Scalar>(g: &Digraph, policy: DanglingPolicy) -> CliResult<KernelBases<T>> {
    let l = build_matrix::<T>(g, MatrixKind::RwLaplacian, Some(policy))?;
    let dec = walk_decomposition(g, &l.stochastic()?)?;
    Ok(KernelBases::compute(&l, dec)?)
}

fn kernels_json<T: Scalar>(g: &Digraph, policy: DanglingPolicy) -> CliResult<serde_json::Value> {
    Ok(bases::<T>(g, policy)?.to_json(g))
}

fn read_init<T: Scalar>(g: &Digraph, init: &str) -> CliResult<Vec<T>> {
    let n = g.n();
    if init == "uniform" {
        return Ok(vec![T::one() / T::from_usize(n); n]);
    }
    if let Some(label) = init.strip_prefix("delta:") {
        let v = g.vertex(label)?;
        let mut x = vec![T::zero(); n];
        x[v] = T::one();
        return Ok(x);
    }
    let text = std::fs::read_to_string(init).map_err(|e| Failure::Input(format!("cannot read {init}: {e}")))?;
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if !tokens.len().is_multiple_of(2) {
        return Err(Failure::Input(format!("{init}: expected `label value` pairs")));
    }
    let mut x = vec![T::zero(); n];
    let mut seen = vec![false; n];
    for pair in tokens.chunks(2) {
        let v = g.vertex(pair[0]).map_err(|e| Failure::Input(format!("{init}: {e}")))?;
        if std::mem::replace(&mut seen[v], true) {
            return Err(Failure::Input(format!("{init}: vertex `{}` given twice", pair[0])));
        }
        let value = parse_rational(pair[1]).ok_or_else(|| {
            Failure::Input(format!(
                "{init}: value `{}` for vertex `{}` is not a number",
                pair[1], pair[0]
            ))
        })?;
        x[v] = T::from_rational(&value);
    }
    Ok(x)
}

fn simulate(cli: &Cli, args: &SimulateArgs, out: &mut dyn Write) -> CliResult<i32> {
    if cli.format == OutputFormat::Text {
        return Err(Failure::Usage("simulate writes csv or json".into()));
    }
    let g = read_graph(&args.input, cli.input_format)?;
    let process = match args.process {
        ProcessArg::Diffusion => Process::Diffusion,
        ProcessArg::Consensus => Process::Consensus,
    };
    let init = match (&args.init, process) {
        (Some(s), _) => s.as_str(),
        (None, Process::Diffusion) => "uniform",
        (None, Process::Consensus) => {
            return Err(Failure::Usage("consensus needs an explicit --init".into()));
        }
    };
    match args.mode {
        TimeArg::Continuous => {
            cli.require_float("continuous simulation")?;
            simulate_heat(cli, args, &g, process, init, out)
        }
        TimeArg::Discrete => match cli.mode_for(g.n()) {
            Mode::Rational => simulate_typed::<Rational>(cli, args, &g, process, init, out),
            Mode::Float => simulate_typed::<f64>(cli, args, &g, process, init, out),
        },
    }
}

fn limit_of<T: Scalar>(g: &Digraph, policy: DanglingPolicy, process: Process, x0: &[T]) -> CliResult<Vec<T>> {
    let kb = bases::<T>(g, policy)?;
    Ok(match process {
        Process::Diffusion => diffusion_limit(&Measure::new(x0.to_vec())?, &kb)?.into_inner(),
        Process::Consensus => consensus_limit(&StateVector::new(x0.to_vec())?, &kb)?.into_inner(),
    })
}

fn write_trajectory<T: Scalar>(
    cli: &Cli,
    g: &Digraph,
    trajectory: &Trajectory<T>,
    limit: &[T],
    extra: serde_json::Map<String, serde_json::Value>,
    out: &mut dyn Write,
) -> CliResult<i32> {
    if cli.format == OutputFormat::Csv {
        emit(out, &trajectory.to_csv(g.vertex_ids(), Some(limit))?)?;
    } else {
        let mut value = serde_json::Map::new();
        value.insert("trajectory".into(), trajectory.to_json(g.vertex_ids()));
        value.insert("limit".into(), vector_to_json(limit));
        value.extend(extra);
        emit_json(out, &serde_json::Value::Object(value))?;
    }
    Ok(0)
}

fn simulate_typed<T: Scalar>(
    cli: &Cli,
    args: &SimulateArgs,
    g: &Digraph,
    process: Process,
    init: &str,
    out: &mut dyn Write,
) -> CliResult<i32> {
    let policy: DanglingPolicy = cli.dangling.into();
    let x0: Vec<T> = read_init(g, init)?;
    let limit = limit_of(g, policy, process, &x0)?;
    let s = build_matrix::<T>(g, MatrixKind::Stochastic, Some(policy))?.into_data();
    let mut extra = serde_json::Map::new();
    if process == Process::Diffusion && args.steps > 0 {
        let p0 = Measure::new(x0.clone())?;
        let avg = cesaro_average(&p0, &s, args.steps)?;
        extra.insert("cesaro".into(), vector_to_json(avg.as_slice()));
        let flow = Digraph::from_matrix_pattern(g.vertex_ids().to_vec(), &s)?;
        let dec = decompose(&flow);
        let plain = plain_power_limit(&p0, &s, &flow, &dec, args.steps)?;
        extra.insert(
            "plain_power".into(),
            plain.map_or(serde_json::Value::Null, |m| vector_to_json(m.as_slice())),
        );
    }
    let trajectory = simulate_discrete(process, &x0, &s, args.steps)?;
    write_trajectory(cli, g, &trajectory, &limit, extra, out)
}

fn simulate_heat(
    cli: &Cli,
    args: &SimulateArgs,
    g: &Digraph,
    process: Process,
    init: &str,
    out: &mut dyn Write,
) -> CliResult<i32> {
    let policy: DanglingPolicy = cli.dangling.into();
    let x0: Vec<f64> = read_init(g, init)?;
    let limit = limit_of(g, policy, process, &x0)?;
    let l = build_matrix::<f64>(g, MatrixKind::RwLaplacian, Some(policy))?.into_data();
    let k = args.steps.max(1);
    let times: Vec<f64> = (0..=k).map(|j| args.time * j as f64 / k as f64).collect();
    let trajectory = simulate_continuous(process, &x0, &l, &times, args.tol)?;
    write_trajectory(cli, g, &trajectory, &limit, serde_json::Map::new(), out)
}
