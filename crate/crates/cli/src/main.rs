//! `patchwork` command-line tool.

mod config;
mod error;
mod job;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use patchwork::export::{encode_csv, encode_pgm, encode_raw_rational, write_atomic, Format};
use patchwork::suite::{run_suite, Suite, SuiteConfig};
use patchwork::surface::coordinate_labels;
use patchwork::{
    bitwise_eval, format_decimal, pointwise_identity_field, q_sweep, roughness_exponent, Field, MagmaOp,
    RadixFixed, SurfaceGrid, SurfaceSpec, Workers,
};

use config::Config;
use error::{CliError, FlagContext};
use job::{GridArgs, GridSettings, JobSpec, OperatorArgs};

const SUMMARY_DIGITS: usize = 12;

#[derive(Parser, Debug)]
#[command(name = "patchwork", version, about = "Generalized bitwise operators and patchwork quilt surfaces")]
struct Cli {
    /// Flat key = value file; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for grid evaluation (capped by PATCHWORK_THREADS)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate b_q at one point
    Eval(EvalArgs),
    /// Render one surface grid to a file
    Surface(SurfaceArgs),
    /// Render one grid per q into a directory
    Sweep(SweepArgs),
    /// Run a randomized property suite
    Check(CheckArgs),
    /// Regenerate the figure data sets
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    op: OperatorArgs,
    /// Output radix (default: p)
    #[arg(long)]
    q: Option<u32>,
    /// Comma-separated decimal operands
    #[arg(long, allow_hyphen_values = true)]
    args: Option<String>,
    /// Fractional radix-p digits kept per operand
    #[arg(long)]
    frac: Option<u32>,
    /// Truncate the result to D fractional radix-q digits
    #[arg(long = "D", allow_negative_numbers = true)]
    depth: Option<i64>,
}

#[derive(Args, Debug)]
struct SurfaceArgs {
    #[command(flatten)]
    op: OperatorArgs,
    #[arg(long)]
    q: Option<u32>,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long = "D", allow_negative_numbers = true)]
    depth: Option<i64>,
    /// Output file
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    op: OperatorArgs,
    /// Output radices, `3..11` or `3,5,7`
    #[arg(long)]
    qs: Option<String>,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// decomposition, self-affinity, coarse-limit, mixed-radix or roundtrip
    suite: String,
    /// Restrict to one input radix
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    trials: Option<usize>,
    /// Operator literal `N:R:p`
    #[arg(long)]
    op: Option<String>,
    /// Largest q for the coarse-limit table
    #[arg(long)]
    qmax: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    frac: Option<u32>,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
enum Figure {
    Fig1,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    figure: Figure,
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let workers = job::resolve_workers(cli.threads, &cfg, std::env::var(job::THREADS_ENV).ok())?;
    match cli.command {
        Command::Eval(args) => cmd_eval(&args, &cfg),
        Command::Surface(args) => cmd_surface(&args, &cfg, workers),
        Command::Sweep(args) => cmd_sweep(&args, &cfg, workers),
        Command::Check(args) => cmd_check(&args, &cfg),
        Command::Reproduce(args) => cmd_reproduce(&args, &cfg, workers),
    }
}

fn cmd_eval(args: &EvalArgs, cfg: &Config) -> Result<(), CliError> {
    let op = job::require_operator(&args.op, cfg)?;
    let q = job::resolve_q(args.q, cfg, &op)?;
    let frac = job::resolve_frac(args.frac, cfg)?;
    let depth = job::resolve_depth(args.depth, cfg)?;
    let text = cfg
        .pick(args.args.clone(), "args")?
        .ok_or_else(|| CliError::flag("--args", "required"))?;
    let operands = text
        .split(',')
        .map(|s| RadixFixed::from_decimal_str(s.trim(), op.radix(), frac))
        .collect::<Result<Vec<_>, _>>()
        .flag("--args")?;
    if operands.len() != op.arity() {
        return Err(CliError::flag(
            "--args",
            format!("operator {op} takes {} operands, got {}", op.arity(), operands.len()),
        ));
    }
    let mut result = bitwise_eval(&op, &operands, q).flag("--q")?;
    if let Some(d) = depth {
        result = result.coarse_grain(d);
    }
    let value = result.value();
    println!("operator  {op}");
    println!("q         {q}");
    if let Some(d) = depth {
        println!("D         {d}");
    }
    match result.k_max() {
        Some(k) => println!("k_max     {k}"),
        None => println!("k_max     none"),
    }
    println!("coeffs    {}", result.coefficient_string());
    println!("value     {value}");
    println!("decimal   {}", format_decimal(&value, frac as usize));
    println!("H         {:.6}", roughness_exponent(op.radix(), q));
    Ok(())
}

fn cmd_surface(args: &SurfaceArgs, cfg: &Config, workers: Workers) -> Result<(), CliError> {
    let op = job::require_operator(&args.op, cfg)?;
    let q = job::resolve_q(args.q, cfg, &op)?;
    let grid = job::resolve_grid(&args.grid, cfg, None, None)?;
    let out: PathBuf = cfg
        .pick(args.out.clone(), "out")?
        .ok_or_else(|| CliError::flag("--out", "required"))?;
    let spec = job_spec(op, q, &grid, job::resolve_depth(args.depth, cfg)?, out);
    render(&spec, workers)
}

fn cmd_sweep(args: &SweepArgs, cfg: &Config, workers: Workers) -> Result<(), CliError> {
    let op = job::require_operator(&args.op, cfg)?;
    let qs = job::parse_q_list(
        &cfg.pick(args.qs.clone(), "qs")?
            .ok_or_else(|| CliError::flag("--qs", "required"))?,
    )?;
    let grid = job::resolve_grid(&args.grid, cfg, None, None)?;
    let dir = out_dir(args.out_dir.clone(), cfg)?;
    sweep_into(&op, &qs, &grid, &dir, "sweep", workers)
}

fn cmd_check(args: &CheckArgs, cfg: &Config) -> Result<(), CliError> {
    let suite: Suite = args.suite.parse().map_err(|e: String| CliError::flag("<suite>", e))?;
    let defaults = SuiteConfig::default();
    let op = match cfg.pick(args.op.clone(), "op")? {
        Some(text) => Some(job::check_cli_bounds(text.parse::<MagmaOp>().flag("--op")?, "--op")?),
        None => None,
    };
    let radix: Option<u32> = cfg.pick(args.p, "p")?;
    if let Some(p) = radix {
        if p < 2 {
            return Err(CliError::flag("--p", format!("radix must be at least 2, got {p}")));
        }
    }
    let config = SuiteConfig {
        trials: cfg.pick(args.trials, "trials")?.unwrap_or(defaults.trials),
        seed: cfg.pick(args.seed, "seed")?.unwrap_or(defaults.seed),
        radix,
        frac_digits: job::resolve_frac(args.frac, cfg)?,
        op,
        q_max: cfg.pick(args.qmax, "qmax")?.unwrap_or(defaults.q_max),
    };
    let report = run_suite(suite, &config).flag("--op")?;
    for w in &report.warnings {
        println!("warning: {w}");
    }
    for line in &report.table {
        println!("{line}");
    }
    let status = if report.passed() { "PASS" } else { "FAIL" };
    println!("{} {status}: {} checked, {} failed", report.suite, report.checked, report.failed);
    if let Some(input) = &report.counterexample {
        println!("counterexample: {input}");
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!("{} failed {} of {} cases", report.suite, report.failed, report.checked)))
    }
}

fn cmd_reproduce(args: &ReproduceArgs, cfg: &Config, workers: Workers) -> Result<(), CliError> {
    let dir = out_dir(args.out_dir.clone(), cfg)?;
    let literal = |s: &str| s.parse::<MagmaOp>().expect("built-in operator literal");
    let settings = |domain: &str| job::resolve_grid(&args.grid, cfg, Some(domain), Some("256"));
    match args.figure {
        Figure::Fig1 => {
            let grid = settings("0,1")?;
            let fields = pointwise_identity_field(&grid.domain, grid.resolution, 2, grid.frac_digits, workers)
                .flag("--res")?;
            if !fields.holds {
                return Err(CliError::CheckFailed("f = g + h failed on the grid".into()));
            }
            for (name, field) in [("sum", &fields.sum), ("mod", &fields.modular), ("carry", &fields.carries)] {
                let path = dir.join(format!("fig1_{name}.{}", grid.format.extension()));
                write_field(field, &grid, &path, "--out-dir")?;
                summarize(&path, field, None);
            }
            Ok(())
        }
        Figure::Fig3 => {
            let grid = settings("0,200")?;
            let spec = job_spec(literal("2:13903:3"), 3, &grid, None, dir.join(format!("fig3.{}", grid.format.extension())));
            render(&spec, workers)
        }
        Figure::Fig4 => {
            let grid = settings("0,100")?;
            for (lit, q) in [("2:6:2", 2), ("2:7417:3", 3), ("2:9407:3", 3), ("2:13427417:5", 5)] {
                let op = literal(lit);
                let name = format!("fig4_{}_q{q}.{}", file_stem(&op), grid.format.extension());
                render(&job_spec(op, q, &grid, None, dir.join(name)), workers)?;
            }
            Ok(())
        }
        Figure::Fig5 => {
            let grid = settings("0,100")?;
            let qs: Vec<u32> = (3..=11).collect();
            sweep_into(&literal("2:13903:3"), &qs, &grid, &dir, "fig5", workers)
        }
        Figure::Fig6 => {
            let grid = settings("0,100")?;
            for d in [0i64, -1, -2] {
                let name = format!("fig6_D{d}.{}", grid.format.extension());
                render(&job_spec(literal("2:9815:3"), 3, &grid, Some(d), dir.join(name)), workers)?;
            }
            Ok(())
        }
    }
}

fn job_spec(op: MagmaOp, q: u32, grid: &GridSettings, depth: Option<i64>, out: PathBuf) -> JobSpec {
    JobSpec {
        op,
        q,
        domain: grid.domain.clone(),
        resolution: grid.resolution,
        frac_digits: grid.frac_digits,
        depth,
        out,
        format: grid.format,
        csv_digits: grid.csv_digits,
    }
}

fn render(job: &JobSpec, workers: Workers) -> Result<(), CliError> {
    let grid = SurfaceSpec::new(job.op.clone(), job.q, job.domain.clone(), job.resolution, job.frac_digits)
        .with_truncation(job.depth)
        .sample(workers)
        .flag("--q")?;
    let bytes = encode(grid.field(), job.format, &job.domain, job.resolution, job.csv_digits);
    write_atomic(&job.out, &bytes).map_err(|e| CliError::output("--out", format!("{}: {e}", job.out.display())))?;
    summarize(&job.out, grid.field(), Some(&grid));
    Ok(())
}

fn sweep_into(
    op: &MagmaOp,
    qs: &[u32],
    grid: &GridSettings,
    dir: &Path,
    prefix: &str,
    workers: Workers,
) -> Result<(), CliError> {
    let grids = q_sweep(op, &grid.domain, grid.resolution, grid.frac_digits, qs, workers).flag("--qs")?;
    for g in &grids {
        let path = dir.join(format!("{prefix}_{}_q{}.{}", file_stem(op), g.q(), grid.format.extension()));
        write_field(g.field(), grid, &path, "--out-dir")?;
        summarize(&path, g.field(), Some(g));
    }
    Ok(())
}

fn write_field(field: &Field, grid: &GridSettings, path: &Path, flag: &str) -> Result<(), CliError> {
    let bytes = encode(field, grid.format, &grid.domain, grid.resolution, grid.csv_digits);
    write_atomic(path, &bytes).map_err(|e| CliError::output(flag, format!("{}: {e}", path.display())))
}

fn encode(
    field: &Field,
    format: Format,
    domain: &patchwork::Domain,
    resolution: patchwork::Resolution,
    csv_digits: usize,
) -> Vec<u8> {
    match format {
        Format::Pgm => encode_pgm(field),
        Format::Csv => {
            let (us, vs) = coordinate_labels(domain, resolution, csv_digits);
            encode_csv(field, &us, &vs, csv_digits)
        }
        Format::RawRational => {
            let (us, vs) = coordinate_labels(domain, resolution, csv_digits);
            encode_raw_rational(field, &us, &vs)
        }
    }
}

fn summarize(path: &Path, field: &Field, grid: Option<&SurfaceGrid>) {
    let (min, max) = field.range();
    let mut line = format!(
        "{}  {}x{}  min {}  max {}",
        path.display(),
        field.nu(),
        field.nv(),
        format_decimal(&min, SUMMARY_DIGITS),
        format_decimal(&max, SUMMARY_DIGITS)
    );
    if let Some(g) = grid {
        line.push_str(&format!("  H {:.6}", g.roughness_exponent()));
    }
    println!("{line}");
}

fn file_stem(op: &MagmaOp) -> String {
    op.to_string().replace(':', "-")
}

fn out_dir(flag: Option<PathBuf>, cfg: &Config) -> Result<PathBuf, CliError> {
    let dir: PathBuf = cfg
        .pick(flag, "out-dir")?
        .ok_or_else(|| CliError::flag("--out-dir", "required"))?;
    std::fs::create_dir_all(&dir).map_err(|e| CliError::output("--out-dir", format!("{}: {e}", dir.display())))?;
    Ok(dir)
}
