//! Resolution of flags and config entries into a checked [`JobSpec`].

use std::path::PathBuf;

use clap::Args;
use patchwork::export::{Format, DEFAULT_CSV_DIGITS};
use patchwork::{Domain, MagmaOp, Resolution, Workers, DEFAULT_FRAC_DIGITS};

use crate::config::Config;
use crate::error::{CliError, FlagContext};

pub const THREADS_ENV: &str = "PATCHWORK_THREADS";

/// Operators taken from the command line are kept enumerable.
pub const MAX_ARITY: usize = 4;
pub const MAX_TABLE: u64 = 4096;

#[derive(Args, Clone, Debug, Default)]
pub struct OperatorArgs {
    /// Operator literal `N:R:p`, e.g. 2:13903:3
    #[arg(long)]
    pub op: Option<String>,
    /// Named operator: modadd or carry (needs --p)
    #[arg(long)]
    pub builtin: Option<String>,
    /// Comma-separated table a_0,a_1,... (needs --p and --arity)
    #[arg(long)]
    pub table: Option<String>,
    /// Input radix for --builtin and --table
    #[arg(long)]
    pub p: Option<u32>,
    /// Arity for --table
    #[arg(long)]
    pub arity: Option<usize>,
}

#[derive(Args, Clone, Debug, Default)]
pub struct GridArgs {
    /// Sampling window `min,max` or `umin,umax,vmin,vmax`
    #[arg(long)]
    pub domain: Option<String>,
    /// Samples per axis, `N` or `NUxNV`
    #[arg(long)]
    pub res: Option<String>,
    /// Fractional radix-p digits kept per operand
    #[arg(long)]
    pub frac: Option<u32>,
    /// Output format: pgm, csv or raw-rational
    #[arg(long)]
    pub format: Option<String>,
    /// Fractional decimal digits in CSV output
    #[arg(long = "csv-digits")]
    pub csv_digits: Option<usize>,
}

/// One grid to render and write.
#[derive(Clone, Debug)]
pub struct JobSpec {
    pub op: MagmaOp,
    pub q: u32,
    pub domain: Domain,
    pub resolution: Resolution,
    pub frac_digits: u32,
    pub depth: Option<i64>,
    pub out: PathBuf,
    pub format: Format,
    pub csv_digits: usize,
}

pub fn check_cli_bounds(op: MagmaOp, flag: &str) -> Result<MagmaOp, CliError> {
    if op.arity() > MAX_ARITY {
        return Err(CliError::flag(flag, format!("arity {} exceeds {MAX_ARITY}", op.arity())));
    }
    let entries = u64::from(op.radix()).checked_pow(op.arity() as u32);
    if entries.is_none_or(|n| n > MAX_TABLE) {
        return Err(CliError::flag(
            flag,
            format!("table p^N = {}^{} exceeds {MAX_TABLE} entries", op.radix(), op.arity()),
        ));
    }
    Ok(op)
}

pub fn resolve_operator(args: &OperatorArgs, cfg: &Config) -> Result<Option<MagmaOp>, CliError> {
    let op = cfg.pick(args.op.clone(), "op")?;
    let builtin = cfg.pick(args.builtin.clone(), "builtin")?;
    let table = cfg.pick(args.table.clone(), "table")?;
    let p: Option<u32> = cfg.pick(args.p, "p")?;
    let arity: Option<usize> = cfg.pick(args.arity, "arity")?;

    let given = [op.is_some(), builtin.is_some(), table.is_some()];
    if given.iter().filter(|&&g| g).count() > 1 {
        return Err(CliError::flag("--op", "give only one of --op, --builtin, --table"));
    }
    if let Some(text) = op {
        let op: MagmaOp = text.parse().flag("--op")?;
        return check_cli_bounds(op, "--op").map(Some);
    }
    if let Some(name) = builtin {
        let p = p.ok_or_else(|| CliError::flag("--p", "required with --builtin"))?;
        let op = match name.as_str() {
            "modadd" | "mod-add" => MagmaOp::mod_add(p),
            "carry" => MagmaOp::carry(p),
            other => return Err(CliError::flag("--builtin", format!("unknown builtin {other:?} (modadd, carry)"))),
        }
        .flag("--p")?;
        return check_cli_bounds(op, "--p").map(Some);
    }
    if let Some(text) = table {
        let p = p.ok_or_else(|| CliError::flag("--p", "required with --table"))?;
        let arity = arity.unwrap_or(2);
        if arity > MAX_ARITY {
            return Err(CliError::flag("--arity", format!("arity {arity} exceeds {MAX_ARITY}")));
        }
        let op = MagmaOp::from_table_literal(&text, p, arity).flag("--table")?;
        return check_cli_bounds(op, "--table").map(Some);
    }
    Ok(None)
}

pub fn require_operator(args: &OperatorArgs, cfg: &Config) -> Result<MagmaOp, CliError> {
    resolve_operator(args, cfg)?.ok_or_else(|| CliError::flag("--op", "an operator is required (--op, --builtin or --table)"))
}

/// Output radix, defaulting to the input radix.
pub fn resolve_q(flag: Option<u32>, cfg: &Config, op: &MagmaOp) -> Result<u32, CliError> {
    let q = cfg.pick(flag, "q")?.unwrap_or(op.radix());
    if q < 2 {
        return Err(CliError::flag("--q", format!("q must be at least 2, got {q}")));
    }
    Ok(q)
}

pub fn resolve_frac(flag: Option<u32>, cfg: &Config) -> Result<u32, CliError> {
    Ok(cfg.pick(flag, "frac")?.unwrap_or(DEFAULT_FRAC_DIGITS))
}

pub fn resolve_depth(flag: Option<i64>, cfg: &Config) -> Result<Option<i64>, CliError> {
    cfg.pick(flag, "D")
}

pub struct GridSettings {
    pub domain: Domain,
    pub resolution: Resolution,
    pub frac_digits: u32,
    pub format: Format,
    pub csv_digits: usize,
}

pub fn resolve_grid(
    args: &GridArgs,
    cfg: &Config,
    default_domain: Option<&str>,
    default_res: Option<&str>,
) -> Result<GridSettings, CliError> {
    let domain = cfg
        .pick(args.domain.clone(), "domain")?
        .or(default_domain.map(str::to_string))
        .ok_or_else(|| CliError::flag("--domain", "required"))?;
    let domain = Domain::parse(&domain).flag("--domain")?;
    let res = cfg
        .pick(args.res.clone(), "res")?
        .or(default_res.map(str::to_string))
        .ok_or_else(|| CliError::flag("--res", "required"))?;
    let resolution = Resolution::parse(&res).flag("--res")?;
    let format = match cfg.pick(args.format.clone(), "format")? {
        Some(text) => text.parse::<Format>().flag("--format")?,
        None => Format::Pgm,
    };
    Ok(GridSettings {
        domain,
        resolution,
        frac_digits: resolve_frac(args.frac, cfg)?,
        format,
        csv_digits: cfg.pick(args.csv_digits, "csv-digits")?.unwrap_or(DEFAULT_CSV_DIGITS),
    })
}

/// `--threads` (or config) capped by `PATCHWORK_THREADS`.
pub fn resolve_workers(flag: Option<usize>, cfg: &Config, env: Option<String>) -> Result<Workers, CliError> {
    let requested: Option<usize> = cfg.pick(flag, "threads")?;
    if requested == Some(0) {
        return Err(CliError::flag("--threads", "must be at least 1"));
    }
    let cap = match env {
        None => None,
        Some(text) => match text.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Some(n),
            _ => return Err(CliError::flag(THREADS_ENV, format!("expected a positive integer, got {text:?}"))),
        },
    };
    Ok(match (requested, cap) {
        (None, None) => Workers::Auto,
        (Some(n), None) | (None, Some(n)) => Workers::Fixed(n),
        (Some(n), Some(c)) => Workers::Fixed(n.min(c)),
    })
}

/// `3..11` (inclusive) or `3,5,7`.
pub fn parse_q_list(text: &str) -> Result<Vec<u32>, CliError> {
    let bad = |m: String| CliError::flag("--qs", m);
    let qs: Vec<u32> = if let Some((a, b)) = text.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|e| bad(format!("{text:?}: {e}")))?;
        let b: u32 = b.trim().trim_start_matches('=').parse().map_err(|e| bad(format!("{text:?}: {e}")))?;
        if a > b {
            return Err(bad(format!("empty range {text:?}")));
        }
        (a..=b).collect()
    } else {
        text.split(',')
            .map(|s| s.trim().parse::<u32>().map_err(|e| bad(format!("{s:?}: {e}"))))
            .collect::<Result<_, _>>()?
    };
    if let Some(q) = qs.iter().find(|&&q| q < 2) {
        return Err(bad(format!("q must be at least 2, got {q}")));
    }
    if qs.is_empty() {
        return Err(bad("no values".into()));
    }
    Ok(qs)
}
