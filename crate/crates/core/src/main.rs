use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rmnml::coding::{coding_summary, partition_ball};
use rmnml::complexity::{chart_gap, pc_hgd, rm_nml_codelength, CodeLengthReport};
use rmnml::io;
use rmnml::quad::configure_threads;
use rmnml::rgd::{pdf_vol, sample};
use rmnml::select::select_dimension;
use rmnml::validate::{run_all, ValidateConfig};
use rmnml::{Chart, Error, LorentzPoint, ParamDomain, QuadMethod, QuadSpec, RgdParams, RngSeed};

#[derive(Parser)]
#[command(name = "rmnml", version, about = "Rm-NML code-lengths and parametric complexity on hyperbolic space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Log parametric complexity of the hyperbolic Gaussian.
    Pc(PcArgs),
    /// Rm-NML code-length of a dataset.
    Codelength(CodelengthArgs),
    /// Draw a dataset from the hyperbolic Gaussian.
    Sample(SampleArgs),
    /// Pick the dimension whose dataset has the smallest code-length.
    SelectDim(SelectArgs),
    /// Run the oracle suites.
    Validate(ValidateArgs),
    /// Prefix-code lengths of a Gaussian on a polar partition of a disk.
    CodingDemo(CodingArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct DomainArgs {
    /// Radius of the geodesic ball holding the mean.
    #[arg(long, default_value_t = 3.0)]
    radius: f64,
    /// Scale range `min:max`.
    #[arg(long, default_value = "0.1:3", value_parser = parse_range)]
    sigma: (f64, f64),
}

impl DomainArgs {
    fn domain(&self) -> Result<ParamDomain, Error> {
        ParamDomain::new(self.radius, self.sigma.0, self.sigma.1)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    AdaptiveSimpson,
    FixedGaussLegendre,
}

#[derive(Args)]
struct QuadArgs {
    #[arg(long, value_enum, default_value = "adaptive-simpson")]
    method: Method,
    #[arg(long, default_value_t = QuadSpec::complexity().rel_tol)]
    rel_tol: f64,
    #[arg(long, default_value_t = QuadSpec::complexity().abs_tol)]
    abs_tol: f64,
    #[arg(long, default_value_t = QuadSpec::complexity().max_subdivisions)]
    max_subdivisions: usize,
}

impl QuadArgs {
    fn spec(&self) -> Result<QuadSpec, Error> {
        let method = match self.method {
            Method::AdaptiveSimpson => QuadMethod::AdaptiveSimpson,
            Method::FixedGaussLegendre => QuadMethod::FixedGaussLegendre,
        };
        QuadSpec::new(method, self.rel_tol, self.abs_tol, self.max_subdivisions)
    }
}

#[derive(Args)]
struct PcArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    domain: DomainArgs,
    #[command(flatten)]
    quad: QuadArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CodelengthArgs {
    /// Dataset file.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    domain: DomainArgs,
    #[command(flatten)]
    quad: QuadArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Spatial coordinates of the mean, comma separated; the origin by default.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    mu: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SelectArgs {
    /// Candidate `DIM=PATH`; repeat for each dimension.
    #[arg(long = "data", value_parser = parse_candidate, required = true)]
    data: Vec<(usize, PathBuf)>,
    #[command(flatten)]
    domain: DomainArgs,
    #[command(flatten)]
    quad: QuadArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ValidateArgs {
    /// Reduced Monte-Carlo budgets.
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value_t = ValidateConfig::default().seed)]
    seed: u64,
    /// Multiplies the closed-form normaliser before comparison.
    #[arg(long, default_value_t = 1.0, hide = true)]
    inject_xi_scale: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CodingArgs {
    #[arg(long, default_value_t = 3.0)]
    radius: f64,
    #[arg(long, default_value_t = 32)]
    n_r: usize,
    #[arg(long, default_value_t = 32)]
    n_angle: usize,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Spatial coordinates of the mean (two values), comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    mu: Option<Vec<f64>>,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected `min:max`, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn parse_candidate(s: &str) -> Result<(usize, PathBuf), String> {
    let (d, p) = s
        .split_once('=')
        .ok_or_else(|| format!("expected `DIM=PATH`, got `{s}`"))?;
    let dim = d.trim().parse::<usize>().map_err(|e| format!("`{d}`: {e}"))?;
    Ok((dim, PathBuf::from(p)))
}

#[derive(Serialize)]
struct CodelengthOutput {
    #[serde(flatten)]
    report: CodeLengthReport,
    chart_gap_lorentz_graph: f64,
    chart_gap_poincare: f64,
}

enum Failure {
    Input(String),
    Validation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn emit<T: Serialize>(value: &T, output: &OutputArgs) -> Result<(), Failure> {
    let text = match output.format {
        Format::Json => io::to_json(value),
        Format::Csv => io::to_csv(value)?,
    };
    match &output.out {
        Some(path) => io::write_text(path, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn mean_point(dim: usize, mu: &Option<Vec<f64>>) -> Result<LorentzPoint, Failure> {
    match mu {
        None => Ok(LorentzPoint::origin(dim)),
        Some(s) if s.len() == dim => Ok(LorentzPoint::from_spatial(s)),
        Some(s) => Err(Failure::Input(format!(
            "--mu has {} coordinates, expected {dim}",
            s.len()
        ))),
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Pc(a) => {
            let r = pc_hgd(a.dim, a.n, &a.domain.domain()?, &a.quad.spec()?)?;
            emit(&r, &a.output)
        }
        Command::Codelength(a) => {
            let data = io::read_dataset(&a.input)?;
            let report = rm_nml_codelength(&data, &a.domain.domain()?, &a.quad.spec()?)?;
            let out = CodelengthOutput {
                report,
                chart_gap_lorentz_graph: chart_gap(&data, Chart::LorentzGraph),
                chart_gap_poincare: chart_gap(&data, Chart::Poincare),
            };
            emit(&out, &a.output)
        }
        Command::Sample(a) => {
            if a.dim < 1 {
                return Err(Failure::Input("--dim must be >= 1".into()));
            }
            let params = RgdParams::new(mean_point(a.dim, &a.mu)?, a.sigma)?;
            let data = sample(a.n, &params, RngSeed(a.seed))?;
            let text = match a.output.format {
                Format::Json => io::dataset_to_json(&data),
                Format::Csv => io::dataset_to_csv(&data)?,
            };
            match &a.output.out {
                Some(p) => io::write_text(p, &text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::SelectDim(a) => {
            if a.data.len() < 2 {
                return Err(Failure::Input("select-dim needs at least two candidates".into()));
            }
            let mut candidates = Vec::new();
            for (dim, path) in &a.data {
                candidates.push((*dim, io::read_dataset(path)?));
            }
            let sel = select_dimension(&candidates, &a.domain.domain()?, &a.quad.spec()?)?;
            emit(&sel, &a.output)?;
            if sel.selected.is_none() {
                return Err(Failure::Input("every candidate failed".into()));
            }
            Ok(())
        }
        Command::Validate(a) => {
            let cfg = ValidateConfig {
                quick: a.quick,
                xi_scale: a.inject_xi_scale,
                seed: a.seed,
            };
            let results = run_all(&cfg);
            for r in &results {
                eprintln!(
                    "{:<28} {:<4} {:>4} checks {:>8.2}s",
                    r.name,
                    if r.passed { "PASS" } else { "FAIL" },
                    r.checks,
                    r.seconds
                );
                for f in &r.failures {
                    eprintln!("    {f}");
                }
            }
            emit(&results, &a.output)?;
            let failed = results.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                return Err(Failure::Validation(format!("{failed} suite(s) failed")));
            }
            Ok(())
        }
        Command::CodingDemo(a) => {
            let params = RgdParams::new(mean_point(2, &a.mu)?, a.sigma)?;
            let partition = partition_ball(2, a.radius, a.n_r, a.n_angle)?;
            let summary = coding_summary(&partition, |x| pdf_vol(x, &params).expect("dimension 2"));
            emit(&summary, &a.output)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("RM_NML_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = configure_threads(n) {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            _ => {
                eprintln!("error: RM_NML_THREADS must be a positive integer, got `{v}`");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Validation(m)) => {
            eprintln!("validation failed: {m}");
            ExitCode::from(1)
        }
    }
}
