//! Command-line interface: sequence generators, dimension and mutual
//! dimension estimators, entropy/mutual curves, machine tools, and the
//! verification suite.
//!
//! Exit codes:
//!   0  success (for `verify`: all selected checks passed)
//!   1  verification failure (`verify` with at least one failing check)
//!   2  usage or configuration error (bad flags, unknown check names)
//!   3  input or grid error (alphabet violations, length mismatches,
//!      block/grid bounds, empty inputs)
//!   4  machine format error (malformed machine files, symbol or state
//!      range violations)
//!   5  budget or instance-size error
//!   6  I/O error

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fsdim::alphabet::{
    gen_champernowne, gen_iid, gen_periodic, parse_symbols, ParseMode, ProbMeasure, SymbolString,
};
use fsdim::dimension::{
    default_n_grid, entropy_rate_curve, estimate_beta_dim, estimate_dim, estimate_mdim,
    joint_entropy_rate_curve, mdim_cross_check, mutual_info_rate_curve, normality_test,
    BetaDimEstimate, DimensionEstimate, DimParams, MdimCrossCheck, NormalityReport, RateGrid,
    DEFAULT_L_MAX, DEFAULT_TAIL_FRACTION,
};
use fsdim::fsc::{Fsc, IlVerdict};
use fsdim::ratios::{rho_beta, rho_c};
use fsdim::verify::run_suite;
use fsdim::{Error, SCHEMA_VERSION};

#[derive(Parser)]
#[command(
    name = "fsdim",
    version,
    about = "Finite-state dimension and mutual dimension estimation",
    after_help = "Exit codes: 0 success, 1 verification failure, 2 usage error, \
                  3 input/grid error, 4 machine format error, 5 budget error, 6 I/O error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a sequence file
    Gen(GenArgs),
    /// Estimate the finite-state dimension of one sequence
    Dim(DimArgs),
    /// Estimate the finite-state mutual dimension of two sequences
    Mdim(MdimArgs),
    /// Block entropy rate curve of one sequence
    Entropy(EntropyArgs),
    /// Block mutual information rate curve of two sequences
    Mutual(MutualArgs),
    /// Machine tools: compress, check-il, kraft
    Machine(MachineArgs),
    /// Run the inequality verification suite
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Champernowne,
    Iid,
    Periodic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    Digits,
    Raw,
    Bitpacked,
}

impl InputFormat {
    fn mode(self) -> ParseMode {
        match self {
            InputFormat::Digits => ParseMode::Digits,
            InputFormat::Raw => ParseMode::RawBytes,
            InputFormat::Bitpacked => ParseMode::BitPacked,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Pairing {
    Strict,
    Truncate,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    /// alphabet size
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// sequence length
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// comma-separated symbol probabilities (iid)
    #[arg(long)]
    measure: Option<String>,
    /// repeating pattern in digits (periodic)
    #[arg(long)]
    pattern: Option<String>,
    /// output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SequenceInput {
    /// sequence file
    #[arg(long)]
    input: PathBuf,
    /// alphabet size
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// input encoding
    #[arg(long, value_enum, default_value_t = InputFormat::Digits)]
    format_in: InputFormat,
}

impl SequenceInput {
    fn read(&self) -> Result<SymbolString, Error> {
        let bytes = fs::read(&self.input)?;
        parse_symbols(&bytes, self.k, self.format_in.mode())
    }
}

#[derive(Args)]
struct GridOptions {
    /// largest block length
    #[arg(long, default_value_t = DEFAULT_L_MAX)]
    l_max: usize,
    /// comma-separated prefix lengths; geometric grid when omitted
    #[arg(long)]
    n_grid: Option<String>,
    /// trailing fraction of the n grid used as the liminf/limsup window
    #[arg(long, default_value_t = DEFAULT_TAIL_FRACTION)]
    tail_fraction: f64,
}

impl GridOptions {
    fn params(&self, len: usize) -> Result<DimParams, Error> {
        if !(0.0 < self.tail_fraction && self.tail_fraction <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "tail fraction {} outside (0, 1]",
                self.tail_fraction
            )));
        }
        let n_grid = match &self.n_grid {
            Some(spec) => parse_usize_list(spec)?,
            None => default_n_grid(len),
        };
        if n_grid.is_empty() {
            return Err(Error::InvalidArgument("empty n grid".into()));
        }
        Ok(DimParams { l_max: self.l_max, n_grid, tail_fraction: self.tail_fraction })
    }
}

#[derive(Args)]
struct OutputOptions {
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// report path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DimArgs {
    #[command(flatten)]
    input: SequenceInput,
    #[command(flatten)]
    grid: GridOptions,
    /// also report the beta-dimension surrogate at this state budget
    #[arg(long)]
    beta_budget: Option<usize>,
    /// comma-separated symbol probabilities for the beta-dimension and
    /// normality reports
    #[arg(long)]
    measure: Option<String>,
    #[command(flatten)]
    output: OutputOptions,
}

#[derive(Args)]
struct MdimArgs {
    /// first sequence file
    #[arg(long)]
    input_a: PathBuf,
    /// second sequence file
    #[arg(long)]
    input_b: PathBuf,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, value_enum, default_value_t = InputFormat::Digits)]
    format_in: InputFormat,
    /// how to pair sequences of different lengths
    #[arg(long, value_enum, default_value_t = Pairing::Strict)]
    pairing: Pairing,
    #[command(flatten)]
    grid: GridOptions,
    /// joint state budget for the slack cross-check
    #[arg(long, default_value_t = 16)]
    r: usize,
    /// single state budget for the slack cross-check
    #[arg(long, default_value_t = 16)]
    t: usize,
    #[command(flatten)]
    output: OutputOptions,
}

#[derive(Args)]
struct EntropyArgs {
    #[command(flatten)]
    input: SequenceInput,
    /// comma-separated block lengths
    #[arg(long, default_value = "1,2,3,4,5,6")]
    l_values: String,
    /// comma-separated prefix lengths; geometric grid when omitted
    #[arg(long)]
    n_grid: Option<String>,
    /// report the joint curve of the sequence with itself
    #[arg(long, default_value_t = false)]
    joint: bool,
    #[command(flatten)]
    output: OutputOptions,
}

#[derive(Args)]
struct MutualArgs {
    #[arg(long)]
    input_a: PathBuf,
    #[arg(long)]
    input_b: PathBuf,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, value_enum, default_value_t = InputFormat::Digits)]
    format_in: InputFormat,
    #[arg(long, value_enum, default_value_t = Pairing::Strict)]
    pairing: Pairing,
    #[arg(long, default_value = "1,2,3,4,5,6")]
    l_values: String,
    #[arg(long)]
    n_grid: Option<String>,
    /// report the joint entropy curve instead of mutual information
    #[arg(long, default_value_t = false)]
    joint: bool,
    #[command(flatten)]
    output: OutputOptions,
}

#[derive(Args)]
struct MachineArgs {
    #[command(subcommand)]
    tool: MachineTool,
}

#[derive(Subcommand)]
enum MachineTool {
    /// Run a machine over a sequence and report its compression ratio
    Compress(CompressArgs),
    /// Check information losslessness
    CheckIl(CheckIlArgs),
    /// Audit the generalized Kraft inequality at one word length
    Kraft(KraftArgs),
}

#[derive(Args)]
struct CompressArgs {
    /// machine file (JSON)
    #[arg(long)]
    machine: PathBuf,
    #[command(flatten)]
    input: SequenceInput,
    /// comma-separated probabilities for the beta-ratio
    #[arg(long)]
    measure: Option<String>,
    #[command(flatten)]
    output: OutputOptions,
}

#[derive(Args)]
struct CheckIlArgs {
    #[arg(long)]
    machine: PathBuf,
    /// collision search node budget
    #[arg(long, default_value_t = 1 << 20)]
    budget: u64,
    #[command(flatten)]
    output: OutputOptions,
}

#[derive(Args)]
struct KraftArgs {
    #[arg(long)]
    machine: PathBuf,
    /// word length
    #[arg(long)]
    r: usize,
    /// word enumeration budget
    #[arg(long, default_value_t = u64::MAX)]
    budget: u64,
    #[command(flatten)]
    output: OutputOptions,
}

#[derive(Args)]
struct VerifyArgs {
    /// comma-separated check names, `all`, or `mcr.all`
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 10)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    output: OutputOptions,
}

fn parse_usize_list(spec: &str) -> Result<Vec<usize>, Error> {
    spec.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad list entry {p:?}")))
        })
        .collect()
}

fn parse_measure(spec: &str) -> Result<ProbMeasure, Error> {
    let weights = spec
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad probability {p:?}")))
        })
        .collect::<Result<Vec<f64>, Error>>()?;
    ProbMeasure::new(weights)
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => {
            fs::write(path, content)?;
            Ok(())
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| Error::Io(e.to_string()))
        }
    }
}

fn emit<T: Serialize>(
    output: &OutputOptions,
    report: &T,
    csv: Option<String>,
) -> Result<(), Error> {
    let content = match output.format {
        OutputFormat::Json => {
            let mut s =
                serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.to_string()))?;
            s.push('\n');
            s
        }
        OutputFormat::Csv => csv.ok_or_else(|| {
            Error::InvalidArgument("csv output is only available for grid reports".into())
        })?,
    };
    write_output(&output.out, &content)
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidArgument(_) | Error::UnknownCheck(_) => 2,
        Error::OutOfAlphabet(_)
        | Error::EmptyInput
        | Error::LengthMismatch(_, _)
        | Error::BlockTooLarge { .. }
        | Error::EmptyPattern
        | Error::NotMultiple { .. }
        | Error::NotNormalized(_)
        | Error::AbsoluteContinuityViolation(_)
        | Error::EmptySupport
        | Error::GridExceedsPrefix { .. }
        | Error::ZeroSelfInformation => 3,
        Error::MachineFormat(_)
        | Error::SymbolOutOfRange { .. }
        | Error::StateOutOfRange { .. }
        | Error::NotProductAlphabet(_) => 4,
        Error::BudgetExceeded(_, _) | Error::BudgetTooSmall { .. } | Error::InstanceTooLarge(_) => {
            5
        }
        Error::Io(_) => 6,
    }
}

#[derive(Serialize)]
struct DimReport {
    schema_version: u32,
    command: &'static str,
    input_len: usize,
    alphabet_size: usize,
    estimate: DimensionEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<BetaDimEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    normality: Option<NormalityReport>,
}

#[derive(Serialize)]
struct MdimReport {
    schema_version: u32,
    command: &'static str,
    input_len: usize,
    alphabet_size: usize,
    /// mutual information rates are normalized by log k; joint entropy
    /// curves under the same normalization range over [0, 2]
    estimate: DimensionEstimate,
    cross_check: MdimCrossCheck,
}

#[derive(Serialize)]
struct CurveReport {
    schema_version: u32,
    command: &'static str,
    input_len: usize,
    alphabet_size: usize,
    grid: RateGrid,
}

#[derive(Serialize)]
struct CompressReport {
    schema_version: u32,
    command: &'static str,
    machine_states: usize,
    machine_alphabet: usize,
    input_len: usize,
    output_bits: u64,
    rho: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho_beta: Option<f64>,
}

#[derive(Serialize)]
struct CheckIlReport {
    schema_version: u32,
    command: &'static str,
    states: usize,
    alphabet_size: usize,
    verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_u: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_w: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_end_state: Option<usize>,
}

fn load_machine(path: &PathBuf) -> Result<Fsc, Error> {
    let text = fs::read_to_string(path)?;
    Fsc::from_json_str(&text)
}

fn pair_inputs(
    a: SymbolString,
    b: SymbolString,
    pairing: Pairing,
) -> Result<(SymbolString, SymbolString), Error> {
    match pairing {
        Pairing::Strict => {
            if a.len() != b.len() {
                return Err(Error::LengthMismatch(a.len(), b.len()));
            }
            Ok((a, b))
        }
        Pairing::Truncate => {
            let n = a.len().min(b.len());
            Ok((a.prefix(n), b.prefix(n)))
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Gen(args) => {
            let seq = match args.kind {
                GenKind::Champernowne => gen_champernowne(args.k, args.n)?,
                GenKind::Iid => {
                    let spec = args.measure.as_deref().ok_or_else(|| {
                        Error::InvalidArgument("--measure is required for iid".into())
                    })?;
                    let m = parse_measure(spec)?;
                    if m.len() != args.k {
                        return Err(Error::LengthMismatch(m.len(), args.k));
                    }
                    gen_iid(&m, args.n, args.seed)
                }
                GenKind::Periodic => {
                    let spec = args.pattern.as_deref().ok_or_else(|| {
                        Error::InvalidArgument("--pattern is required for periodic".into())
                    })?;
                    let pat = SymbolString::from_digits(args.k, spec)?;
                    gen_periodic(&pat, args.n)?
                }
            };
            let kind = match args.kind {
                GenKind::Champernowne => "champernowne",
                GenKind::Iid => "iid",
                GenKind::Periodic => "periodic",
            };
            eprintln!("gen kind={kind} k={} n={} seed={}", args.k, seq.len(), args.seed);
            write_output(&args.out, &seq.to_digit_string())?;
            Ok(0)
        }
        Command::Dim(args) => {
            let u = args.input.read()?;
            let params = args.grid.params(u.len())?;
            let estimate = estimate_dim(&u, &params)?;
            let measure = args.measure.as_deref().map(parse_measure).transpose()?;
            let beta = match (args.beta_budget, &measure) {
                (Some(r), Some(m)) => Some(estimate_beta_dim(&u, m, r, &params)?),
                (Some(_), None) => {
                    return Err(Error::InvalidArgument(
                        "--beta-budget requires --measure".into(),
                    ))
                }
                _ => None,
            };
            let normality = measure
                .as_ref()
                .map(|m| {
                    normality_test(&u, m, params.l_max.min(3), *params.n_grid.last().unwrap())
                })
                .transpose()?;
            let csv = Some(estimate.grid.to_csv());
            let report = DimReport {
                schema_version: SCHEMA_VERSION,
                command: "dim",
                input_len: u.len(),
                alphabet_size: u.alphabet_size(),
                estimate,
                beta,
                normality,
            };
            emit(&args.output, &report, csv)?;
            Ok(0)
        }
        Command::Mdim(args) => {
            let a = parse_symbols(&fs::read(&args.input_a)?, args.k, args.format_in.mode())?;
            let b = parse_symbols(&fs::read(&args.input_b)?, args.k, args.format_in.mode())?;
            let (u, w) = pair_inputs(a, b, args.pairing)?;
            let params = args.grid.params(u.len())?;
            let estimate = estimate_mdim(&u, &w, &params)?;
            let cross_check = mdim_cross_check(&u, &w, args.r, args.t)?;
            let csv = Some(estimate.grid.to_csv());
            let report = MdimReport {
                schema_version: SCHEMA_VERSION,
                command: "mdim",
                input_len: u.len(),
                alphabet_size: u.alphabet_size(),
                estimate,
                cross_check,
            };
            emit(&args.output, &report, csv)?;
            Ok(0)
        }
        Command::Entropy(args) => {
            let u = args.input.read()?;
            let l_values = parse_usize_list(&args.l_values)?;
            let n_values = match &args.n_grid {
                Some(spec) => parse_usize_list(spec)?,
                None => default_n_grid(u.len()),
            };
            let grid = if args.joint {
                joint_entropy_rate_curve(&u, &u, &l_values, &n_values)?
            } else {
                entropy_rate_curve(&u, &l_values, &n_values)?
            };
            let csv = Some(grid.to_csv());
            let report = CurveReport {
                schema_version: SCHEMA_VERSION,
                command: "entropy",
                input_len: u.len(),
                alphabet_size: u.alphabet_size(),
                grid,
            };
            emit(&args.output, &report, csv)?;
            Ok(0)
        }
        Command::Mutual(args) => {
            let a = parse_symbols(&fs::read(&args.input_a)?, args.k, args.format_in.mode())?;
            let b = parse_symbols(&fs::read(&args.input_b)?, args.k, args.format_in.mode())?;
            let (u, w) = pair_inputs(a, b, args.pairing)?;
            let l_values = parse_usize_list(&args.l_values)?;
            let n_values = match &args.n_grid {
                Some(spec) => parse_usize_list(spec)?,
                None => default_n_grid(u.len()),
            };
            let grid = if args.joint {
                joint_entropy_rate_curve(&u, &w, &l_values, &n_values)?
            } else {
                mutual_info_rate_curve(&u, &w, &l_values, &n_values)?
            };
            let csv = Some(grid.to_csv());
            let report = CurveReport {
                schema_version: SCHEMA_VERSION,
                command: "mutual",
                input_len: u.len(),
                alphabet_size: u.alphabet_size(),
                grid,
            };
            emit(&args.output, &report, csv)?;
            Ok(0)
        }
        Command::Machine(args) => match args.tool {
            MachineTool::Compress(c) => {
                let fsc = load_machine(&c.machine)?;
                let u = SequenceInput {
                    input: c.input.input.clone(),
                    k: fsc.alphabet_size(),
                    format_in: c.input.format_in,
                }
                .read()?;
                let bits = fsc.run_len(&u)?;
                let rho = rho_c(&fsc, &u)?;
                let rho_b = c
                    .measure
                    .as_deref()
                    .map(|spec| -> Result<f64, Error> {
                        rho_beta(&fsc, &u, &parse_measure(spec)?)
                    })
                    .transpose()?;
                let report = CompressReport {
                    schema_version: SCHEMA_VERSION,
                    command: "machine.compress",
                    machine_states: fsc.state_count(),
                    machine_alphabet: fsc.alphabet_size(),
                    input_len: u.len(),
                    output_bits: bits,
                    rho,
                    rho_beta: rho_b,
                };
                emit(&c.output, &report, None)?;
                Ok(0)
            }
            MachineTool::CheckIl(c) => {
                let fsc = load_machine(&c.machine)?;
                let verdict = fsc.check_il(c.budget);
                let (name, wu, ww, wout, wend) = match &verdict {
                    IlVerdict::Verified => ("verified", None, None, None, None),
                    IlVerdict::Inconclusive => ("inconclusive", None, None, None, None),
                    IlVerdict::Collision(w) => (
                        "collision",
                        Some(w.u.to_digit_string()),
                        Some(w.w.to_digit_string()),
                        Some(w.output.clone()),
                        Some(w.end_state),
                    ),
                };
                let report = CheckIlReport {
                    schema_version: SCHEMA_VERSION,
                    command: "machine.check-il",
                    states: fsc.state_count(),
                    alphabet_size: fsc.alphabet_size(),
                    verdict: name.to_string(),
                    witness_u: wu,
                    witness_w: ww,
                    witness_output: wout,
                    witness_end_state: wend,
                };
                emit(&c.output, &report, None)?;
                Ok(0)
            }
            MachineTool::Kraft(c) => {
                let fsc = load_machine(&c.machine)?;
                let report = fsc.kraft_audit(c.r, c.budget)?;
                #[derive(Serialize)]
                struct KraftOut {
                    schema_version: u32,
                    command: &'static str,
                    #[serde(flatten)]
                    report: fsdim::fsc::KraftReport,
                }
                emit(
                    &c.output,
                    &KraftOut {
                        schema_version: SCHEMA_VERSION,
                        command: "machine.kraft",
                        report,
                    },
                    None,
                )?;
                Ok(0)
            }
        },
        Command::Verify(args) => {
            let selection: Vec<String> =
                args.suite.split(',').map(|s| s.trim().to_string()).collect();
            let report = run_suite(&selection, args.trials, args.seed)?;
            let passed = report.passed;
            let mut text = report.to_json_string();
            text.push('\n');
            write_output(&args.output.out, &text)?;
            Ok(if passed { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
