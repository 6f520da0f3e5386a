//! The `capsndp` command line: `solve`, `bench`, `gen`, `verify`, `exact`.
//!
//! [`run`] parses arguments, dispatches, writes the report to `--out` or the
//! given stdout, and returns the process exit code. Errors are reported as a
//! single JSON line on the given stderr.

pub mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use capsndp_core::generators::{self, RandomSpec, RequirementSpec};
use capsndp_core::kc::{self, FractionalSolution, Variant};
use capsndp_core::labelcover::{self, LabelCoverInstance};
use capsndp_core::oracle::{self, EXACT_EDGE_LIMIT, MULTICOPY_EDGE_LIMIT};
use capsndp_core::partition::EXACT_PARTITION_LIMIT;
use capsndp_core::rational::{self, Rational};
use capsndp_core::{multicopy, rounding, seeding, Instance, Requirements};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::report::{csv_table, summary_line, ReportRow, TRACE_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "capsndp", version, about = "Capacitated survivable network design solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance and print a report row.
    Solve(SolveArgs),
    /// Run a seeded sweep over random instances.
    Bench(BenchArgs),
    /// Write a generated instance.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Check the built-in gap instances and certificates, or a given solution.
    Verify(VerifyArgs),
    /// Exact optimum by branch and bound.
    Exact(ExactArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Alg {
    Uniform,
    Kway,
    NearUniform,
    Multicopy,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Fill the wall_ms column. Off by default so reports are reproducible.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub alg: Alg,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = parse_rational)]
    pub gamma: Option<Rational>,
    /// Exceed the oracle and k-way size caps.
    #[arg(long)]
    pub force: bool,
    /// Skip the exact oracle even when the instance is small.
    #[arg(long)]
    pub no_oracle: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct InstanceSpecArgs {
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 14)]
    pub m: usize,
    /// Inclusive capacity range `lo:hi`.
    #[arg(long, default_value = "1:4", value_parser = parse_range)]
    pub cap: (u64, u64),
    /// Inclusive integral cost range `lo:hi`.
    #[arg(long, default_value = "1:10", value_parser = parse_range)]
    pub cost: (u64, u64),
    /// Requirement levels for kway.
    #[arg(long, default_value_t = 2)]
    pub levels: usize,
    /// Demand pairs for multicopy and near-uniform.
    #[arg(long, default_value_t = 3)]
    pub pairs: usize,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub alg: Alg,
    #[arg(long)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_parser = parse_rational)]
    pub gamma: Option<Rational>,
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub no_oracle: bool,
    #[command(flatten)]
    pub spec: InstanceSpecArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Triangle whose standard LP optimum is `R` while every solution costs `C`.
    Example1 {
        #[arg(long, default_value_t = 10)]
        r: u64,
        #[arg(long, default_value = "100", value_parser = parse_rational)]
        c: Rational,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Single-pair instance with `R` parallel two-edge paths.
    Gap {
        #[arg(long, default_value_t = 4)]
        r: u64,
        /// Also write the reference fractional solution here.
        #[arg(long)]
        solution: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random feasible instance.
    Random {
        #[arg(long, value_enum)]
        alg: Alg,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_parser = parse_rational)]
        gamma: Option<Rational>,
        #[command(flatten)]
        spec: InstanceSpecArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random label cover with a satisfying labeling.
    LabelCover {
        #[arg(long, default_value_t = 2)]
        a: usize,
        #[arg(long, default_value_t = 2)]
        b: usize,
        #[arg(long, default_value_t = 1)]
        da: usize,
        #[arg(long, default_value_t = 1)]
        db: usize,
        #[arg(long, default_value_t = 2)]
        la: usize,
        #[arg(long, default_value_t = 2)]
        lb: usize,
        #[arg(long, default_value_t = 1)]
        extra: usize,
        #[arg(long)]
        seed: u64,
        /// Write the reduced network instance instead of the label cover.
        #[arg(long)]
        reduce: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Instance for a single solution check; without it the built-in suite runs.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// JSON `{"x": [...]}` checked against every KC inequality of the instance.
    #[arg(long, requires = "instance")]
    pub solution: Option<PathBuf>,
    /// Seed for the generated label covers of the built-in suite.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    pub instance: PathBuf,
    /// `multicopy` selects the multiple-copies oracle.
    #[arg(long, value_enum)]
    pub alg: Option<Alg>,
    #[arg(long)]
    pub force: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    rational::parse(s).ok_or_else(|| format!("`{s}` is not a rational number"))
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo = lo.trim().parse::<u64>().map_err(|e| e.to_string())?;
    let hi = hi.trim().parse::<u64>().map_err(|e| e.to_string())?;
    if lo > hi {
        return Err("lo exceeds hi".into());
    }
    Ok((lo, hi))
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] capsndp_core::Error),
    #[error("trial {trial} failed: {source}")]
    Trial { trial: usize, source: capsndp_core::Error },
    #[error("failed checks: {}", .0.join(", "))]
    Verify(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use capsndp_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::Trial { .. } => EXIT_INFEASIBLE,
            CliError::Verify(_) => EXIT_VERIFY,
            CliError::Core(e) if e.is_infeasibility() => EXIT_INFEASIBLE,
            CliError::Core(E::Disconnected { .. } | E::BoundViolated(_) | E::IterationCap { .. }) => EXIT_INFEASIBLE,
            CliError::Core(_) => EXIT_USAGE,
        }
    }

    fn kind(&self) -> &'static str {
        use capsndp_core::Error as E;
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Trial { .. } => "trial",
            CliError::Verify(_) => "verify",
            CliError::Core(e) => match e {
                E::InvalidInstance { .. } => "invalid-instance",
                E::Parse(_) => "parse",
                E::Infeasible { .. } => "infeasible",
                E::Disconnected { .. } => "disconnected",
                E::Capability(_) => "capability",
                E::Unsupported(_) => "unsupported",
                E::BoundViolated(_) => "bound-violated",
                E::IterationCap { .. } => "iteration-cap",
                E::RoundingFailed { .. } => "rounding-failed",
                E::LpInfeasible => "lp-infeasible",
                E::InconsistentLabeling(_) => "inconsistent-labeling",
                E::RejectionLimit(_) => "rejection-limit",
            },
        }
    }

    /// The single-line JSON diagnostic.
    pub fn to_json(&self) -> String {
        let mut v = json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit": self.exit_code(),
        });
        match self {
            CliError::Trial { trial, .. } => v["trial"] = json!(trial),
            CliError::Verify(failed) => v["failed"] = json!(failed),
            CliError::Core(capsndp_core::Error::Infeasible {
                witness: Some(cut), ..
            }) => {
                v["witness"] = json!({
                    "side": cut.side.to_vec(),
                    "crossing": cut.crossing,
                    "capacity": rational::format(&cut.capacity),
                })
            }
            _ => {}
        }
        v.to_string()
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let message = e.to_string();
            let first = message.lines().next().unwrap_or_default().trim_start_matches("error: ");
            let _ = writeln!(stderr, "{}", CliError::Usage(first.to_string()).to_json());
            return EXIT_USAGE;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.to_json());
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Solve(args) => cmd_solve(&args, stdout),
        Command::Bench(args) => cmd_bench(&args, stdout),
        Command::Gen(args) => cmd_gen(&args, stdout),
        Command::Verify(args) => cmd_verify(&args, stdout),
        Command::Exact(args) => cmd_exact(&args, stdout),
    }
}

fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_instance(path: &Path) -> CliResult<Instance> {
    Ok(capsndp_core::parse_instance(&read_file(path)?)?)
}

fn emit(out: &Option<PathBuf>, stdout: &mut dyn Write, bytes: &[u8]) -> CliResult<()> {
    let io = |path: &str, source| CliError::Io {
        path: path.to_string(),
        source,
    };
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| io(&path.display().to_string(), e)),
        None => stdout.write_all(bytes).and_then(|_| stdout.flush()).map_err(|e| io("<stdout>", e)),
    }
}

fn instance_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn gamma_for(gamma: &Option<Rational>) -> CliResult<Rational> {
    match gamma {
        None => Err(CliError::Usage("--alg near-uniform needs --gamma".into())),
        Some(g) if *g < rational::int(1) => Err(CliError::Usage("--gamma must be at least 1".into())),
        Some(g) => Ok(g.clone()),
    }
}

fn variant_for(alg: Alg, gamma: &Option<Rational>) -> CliResult<Option<Variant>> {
    Ok(match alg {
        Alg::Uniform => Some(Variant::Uniform),
        Alg::Kway => Some(Variant::KWay),
        Alg::NearUniform => Some(Variant::NearUniform {
            gamma: gamma_for(gamma)?,
        }),
        Alg::Multicopy => None,
    })
}

/// One solver run with its trace; shared by `solve` and `bench`.
struct Outcome {
    row: ReportRow,
    trace: Value,
}

/// Per-run settings shared by `solve` and each `bench` trial.
struct RunOptions<'a> {
    alg: Alg,
    gamma: &'a Option<Rational>,
    force: bool,
    oracle: bool,
    timing: bool,
}

fn solve_instance(inst: &Instance, id: String, seed: Option<u64>, opts: &RunOptions) -> CliResult<Outcome> {
    let RunOptions { alg, gamma, force, oracle, timing } = *opts;
    let start = Instant::now();
    let variant = variant_for(alg, gamma)?;
    let mut row = ReportRow {
        id,
        variant: match &variant {
            Some(v) => v.name().to_string(),
            None => "multicopy".to_string(),
        },
        n: inst.n,
        m: inst.m(),
        lp_cost: None,
        cost: Rational::default(),
        bound: None,
        oracle_cost: None,
        attempts: None,
        wall_ms: None,
        seed,
    };
    let mut trace = json!({ "version": TRACE_VERSION, "command": "solve" });
    match variant {
        Some(variant) => {
            if matches!(variant, Variant::KWay) && inst.n > EXACT_PARTITION_LIMIT && !force {
                return Err(CliError::Usage(format!(
                    "kway on {} vertices exceeds the cap of {EXACT_PARTITION_LIMIT}; pass --force",
                    inst.n
                )));
            }
            let seed = seed.ok_or_else(|| CliError::Usage("--seed is required for randomized algorithms".into()))?;
            let good = kc::solve_good(inst, &variant, seed)?;
            let report = rounding::round(inst, &good.solution, &variant, seed)?;
            row.lp_cost = Some(good.certificate.cost.clone());
            row.bound = Some(rounding::expected_cost_bound(inst, &good.solution));
            row.cost = report.cost.clone();
            row.attempts = Some(report.attempts);
            trace["certificate"] = serde_json::to_value(&good.certificate).expect("serializable");
            trace["rounding"] = serde_json::to_value(&report).expect("serializable");
            if oracle && (force || inst.m() <= EXACT_EDGE_LIMIT) {
                let exact = oracle::exact_optimum(inst, force)?;
                row.oracle_cost = Some(exact.cost.clone());
                trace["oracle"] = serde_json::to_value(&exact).expect("serializable");
            }
        }
        None => {
            let sol = multicopy::run(inst)?;
            row.cost = sol.cost.clone();
            row.bound = Some(rational::int(9) * &sol.sum_ell);
            trace["multicopy"] = serde_json::to_value(&sol).expect("serializable");
            if oracle && (force || inst.m() <= MULTICOPY_EDGE_LIMIT) {
                let exact = oracle::exact_optimum_multicopy(inst, force)?;
                row.oracle_cost = Some(exact.cost.clone());
                trace["oracle"] = serde_json::to_value(&exact).expect("serializable");
            }
        }
    }
    if timing {
        row.wall_ms = Some(start.elapsed().as_millis());
    }
    trace["row"] = serde_json::to_value(&row).expect("serializable");
    Ok(Outcome { row, trace })
}

pub fn cmd_solve(args: &SolveArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let inst = load_instance(&args.instance)?;
    let opts = RunOptions {
        alg: args.alg,
        gamma: &args.gamma,
        force: args.force,
        oracle: !args.no_oracle,
        timing: args.output.timing,
    };
    let outcome = solve_instance(&inst, instance_id(&args.instance), args.seed, &opts)?;
    let bytes = match args.output.format {
        Format::Csv => csv_table(std::slice::from_ref(&outcome.row)).into_bytes(),
        Format::Json => format!("{}\n", outcome.trace).into_bytes(),
    };
    emit(&args.output.out, stdout, &bytes)
}

fn random_spec(alg: Alg, gamma: &Option<Rational>, spec: &InstanceSpecArgs) -> CliResult<RandomSpec> {
    let requirements = match alg {
        Alg::Uniform => RequirementSpec::Uniform,
        Alg::Kway => RequirementSpec::Kway { levels: spec.levels },
        Alg::Multicopy => RequirementSpec::Pairs { pairs: spec.pairs },
        Alg::NearUniform => RequirementSpec::NearUniform {
            pairs: spec.pairs,
            gamma: gamma_for(gamma)?,
        },
    };
    Ok(RandomSpec {
        n: spec.n,
        m: spec.m,
        cap: spec.cap,
        cost: spec.cost,
        requirements,
    })
}

/// Trial `t` generates its instance with and runs on `derive_seed(seed, t)`,
/// the value logged in its `seed` column.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    seeding::derive_seed(seed, trial as u64)
}

pub fn cmd_bench(args: &BenchArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let spec = random_spec(args.alg, &args.gamma, &args.spec)?;
    if args.alg == Alg::Kway && spec.n > EXACT_PARTITION_LIMIT && !args.force {
        return Err(CliError::Usage(format!(
            "kway on {} vertices exceeds the cap of {EXACT_PARTITION_LIMIT}; pass --force",
            spec.n
        )));
    }
    let opts = RunOptions {
        alg: args.alg,
        gamma: &args.gamma,
        force: args.force,
        oracle: !args.no_oracle,
        timing: args.output.timing,
    };
    let results: Vec<CliResult<Outcome>> = (0..args.trials)
        .into_par_iter()
        .map(|t| {
            let seed = trial_seed(args.seed, t);
            let inst = generators::gen_random(&spec, seed)?;
            solve_instance(&inst, format!("trial-{t}"), Some(seed), &opts)
        })
        .collect();
    let variant = match args.alg {
        Alg::Uniform => "uniform",
        Alg::Kway => "kway",
        Alg::NearUniform => "near-uniform",
        Alg::Multicopy => "multicopy",
    };
    let (bytes, failure) = bench_report(variant, args.seed, args.output.format, results)?;
    emit(&args.output.out, stdout, &bytes)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Report for the trials before the first failure, plus that failure.
fn bench_report(
    variant: &str,
    seed: u64,
    format: Format,
    results: Vec<CliResult<Outcome>>,
) -> CliResult<(Vec<u8>, Option<CliError>)> {
    let mut rows = Vec::with_capacity(results.len());
    let mut traces = Vec::with_capacity(results.len());
    let mut failure = None;
    for (t, result) in results.into_iter().enumerate() {
        match result {
            Ok(o) => {
                rows.push(o.row);
                traces.push(o.trace);
            }
            Err(CliError::Core(source)) => {
                failure = Some(CliError::Trial { trial: t, source });
                break;
            }
            Err(other) => return Err(other),
        }
    }
    let bytes = match format {
        Format::Csv => {
            let mut text = csv_table(&rows);
            if failure.is_none() && !rows.is_empty() {
                text.push_str(&summary_line(variant, &rows));
            }
            text.into_bytes()
        }
        Format::Json => {
            let doc = json!({
                "version": TRACE_VERSION,
                "command": "bench",
                "seed": seed,
                "trials": traces,
                "complete": failure.is_none(),
            });
            format!("{doc}\n").into_bytes()
        }
    };
    Ok((bytes, failure))
}

pub fn cmd_gen(args: &GenCommand, stdout: &mut dyn Write) -> CliResult<()> {
    let (bytes, out) = match args {
        GenCommand::Example1 { r, c, out } => {
            (capsndp_core::serialize_instance(&generators::gen_example1(*r, c.clone())?)?, out)
        }
        GenCommand::Gap { r, solution, out } => {
            let (inst, sol) = generators::gen_single_pair_gap(*r)?;
            if let Some(path) = solution {
                emit(&Some(path.clone()), stdout, &solution_json(&sol.x).into_bytes())?;
            }
            (capsndp_core::serialize_instance(&inst)?, out)
        }
        GenCommand::Random {
            alg,
            seed,
            gamma,
            spec,
            out,
        } => {
            let spec = random_spec(*alg, gamma, spec)?;
            (capsndp_core::serialize_instance(&generators::gen_random(&spec, *seed)?)?, out)
        }
        GenCommand::LabelCover {
            a,
            b,
            da,
            db,
            la,
            lb,
            extra,
            seed,
            reduce,
            out,
        } => {
            let lc = labelcover::gen_yes_label_cover(*a, *da, *b, *db, *la, *lb, *extra, *seed)?;
            let bytes = if *reduce {
                capsndp_core::serialize_instance(&labelcover::gen_label_cover_reduction(&lc)?)?
            } else {
                lc.to_json()?
            };
            (bytes, out)
        }
    };
    emit(out, stdout, &bytes)
}

fn solution_json(x: &[Rational]) -> String {
    let x: Vec<String> = x.iter().map(rational::format).collect();
    format!("{}\n", json!({ "x": x }))
}

fn parse_solution(bytes: &[u8]) -> CliResult<Vec<Rational>> {
    #[derive(serde::Deserialize)]
    struct Raw {
        x: Vec<Value>,
    }
    let raw: Raw = serde_json::from_slice(bytes).map_err(|e| CliError::Usage(format!("solution: {e}")))?;
    raw.x
        .iter()
        .map(|v| {
            let text = match v {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                other => other.to_string(),
            };
            rational::parse(&text).ok_or_else(|| CliError::Usage(format!("solution: `{text}` is not a rational")))
        })
        .collect()
}

/// One named pass/fail check.
#[derive(Clone, Debug, serde::Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Gap instances with `R` in this list are checked by `verify`.
pub const GAP_SIZES: [u64; 3] = [4, 6, 8];

/// Label covers checked by `verify`: `(|A|, dA, |B|, dB)`.
pub const LABEL_COVER_SHAPES: [(usize, usize, usize, usize); 5] = [(1, 1, 1, 1), (2, 1, 2, 1), (2, 2, 2, 2), (3, 2, 2, 3), (2, 3, 3, 2)];

pub fn example1_checks() -> CliResult<Vec<Check>> {
    let inst = generators::gen_example1(10, rational::int(100))?;
    let std = kc::std_lp_optimum(&inst, &Variant::Uniform)?.certificate.cost;
    let good = kc::solve_good(&inst, &Variant::Uniform, 0)?.certificate.cost;
    let exact = oracle::exact_optimum(&inst, false)?.cost;
    let show = |q: &Rational| rational::format(q);
    Ok(vec![
        Check::new("example1-std-lp", std == rational::int(10), format!("std LP optimum {}", show(&std))),
        Check::new("example1-kc-lp", good == rational::int(100), format!("KC LP optimum {}", show(&good))),
        Check::new("example1-exact", exact == rational::int(100), format!("exact optimum {}", show(&exact))),
    ])
}

/// Reference cost, exhaustive KC feasibility and the integrality gap for
/// one gap instance, or for a caller-supplied solution of it.
pub fn gap_checks(r: u64, x: Option<Vec<Rational>>) -> CliResult<Vec<Check>> {
    let (inst, reference) = generators::gen_single_pair_gap(r)?;
    let sol = match x {
        Some(x) => FractionalSolution::new(&inst, &Variant::Pairs, x)?,
        None => reference,
    };
    let cost = sol.cost(&inst);
    let three_r = rational::uint(3 * r);
    let violation = kc::find_kc_violation(&inst, &Variant::Pairs, &sol.x)?;
    let exact = oracle::exact_optimum(&inst, false)?.cost;
    let half_square = rational::ratio((r * r) as i64, 2);
    let gap = &exact / &three_r;
    let sixth = rational::ratio(r as i64, 6);
    Ok(vec![
        Check::new(
            format!("gap-R{r}-reference-cost"),
            cost == three_r,
            format!("cost {}", rational::format(&cost)),
        ),
        kc_check(format!("gap-R{r}-kc"), violation),
        Check::new(
            format!("gap-R{r}-exact"),
            exact >= half_square && gap >= sixth,
            format!("exact optimum {}, ratio to 3R {}", rational::format(&exact), rational::format(&gap)),
        ),
    ])
}

fn kc_check(name: String, violation: Option<kc::KcViolation>) -> Check {
    match violation {
        None => Check::new(name, true, "every KC inequality holds"),
        Some(v) => Check::new(
            name,
            false,
            format!(
                "violated for A = {:?} on crossing set {:?}, slack {}",
                v.constraint.a,
                v.constraint.crossing,
                rational::format(&v.slack)
            ),
        ),
    }
}

pub fn label_cover_checks(seed: u64) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    for (i, &(a, da, b, db)) in LABEL_COVER_SHAPES.iter().enumerate() {
        let lc: LabelCoverInstance =
            labelcover::gen_yes_label_cover(a, da, b, db, 2, 2, 1, seeding::derive_seed(seed, i as u64))?;
        let inst = labelcover::gen_label_cover_reduction(&lc)?;
        let phi = lc.phi.clone().expect("generated with a labeling");
        let cert = labelcover::verify_yes_certificate(&inst, &lc, &phi)?;
        let m = lc.m() as i64;
        checks.push(Check::new(
            format!("label-cover-{i}-yes-certificate"),
            cert.cost == rational::int(2 * m) && cert.flow == rational::int(m),
            format!(
                "m {m}, cost {}, flow {}",
                rational::format(&cert.cost),
                rational::format(&cert.flow)
            ),
        ));
    }
    Ok(checks)
}

pub fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let checks = match &args.instance {
        None => {
            let mut checks = example1_checks()?;
            for r in GAP_SIZES {
                checks.extend(gap_checks(r, None)?);
            }
            checks.extend(label_cover_checks(args.seed)?);
            checks
        }
        Some(path) => {
            let inst = load_instance(path)?;
            match &args.solution {
                None => {
                    let all: Vec<usize> = (0..inst.m()).collect();
                    let report = capsndp_core::check_feasible(&inst, &all)?;
                    let detail = match &report.witness {
                        None => "all edges meet every requirement".to_string(),
                        Some(w) => w.describe(),
                    };
                    vec![Check::new("instance-feasible", report.feasible, detail)]
                }
                Some(sol_path) => {
                    let x = parse_solution(&read_file(sol_path)?)?;
                    let variant = match &inst.requirements {
                        Requirements::Uniform(_) => Variant::Uniform,
                        Requirements::KWay(_) => Variant::KWay,
                        Requirements::Pairs(_) => Variant::Pairs,
                    };
                    if x.len() != inst.m() {
                        return Err(CliError::Usage(format!(
                            "solution has {} values for {} edges",
                            x.len(),
                            inst.m()
                        )));
                    }
                    vec![kc_check("kc-feasibility".into(), kc::find_kc_violation(&inst, &variant, &x)?)]
                }
            }
        }
    };
    let bytes = match args.format {
        Format::Csv => {
            let mut text = String::new();
            for c in &checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                text.push_str(&format!("{status} {}: {}\n", c.name, c.detail));
            }
            text.into_bytes()
        }
        Format::Json => format!("{}\n", json!({ "version": TRACE_VERSION, "checks": checks })).into_bytes(),
    };
    emit(&args.out, stdout, &bytes)?;
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(failed))
    }
}

pub fn cmd_exact(args: &ExactArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let inst = load_instance(&args.instance)?;
    let start = Instant::now();
    let multi = args.alg == Some(Alg::Multicopy);
    let (cost, trace) = if multi {
        let exact = oracle::exact_optimum_multicopy(&inst, args.force)?;
        (exact.cost.clone(), serde_json::to_value(&exact).expect("serializable"))
    } else {
        let exact = oracle::exact_optimum(&inst, args.force)?;
        (exact.cost.clone(), serde_json::to_value(&exact).expect("serializable"))
    };
    let row = ReportRow {
        id: instance_id(&args.instance),
        variant: if multi { "exact-multicopy" } else { "exact" }.to_string(),
        n: inst.n,
        m: inst.m(),
        lp_cost: None,
        cost: cost.clone(),
        bound: None,
        oracle_cost: Some(cost),
        attempts: None,
        wall_ms: args.output.timing.then(|| start.elapsed().as_millis()),
        seed: None,
    };
    let bytes = match args.output.format {
        Format::Csv => csv_table(std::slice::from_ref(&row)).into_bytes(),
        Format::Json => {
            let doc = json!({ "version": TRACE_VERSION, "command": "exact", "row": row, "oracle": trace });
            format!("{doc}\n").into_bytes()
        }
    };
    emit(&args.output.out, stdout, &bytes)
}
