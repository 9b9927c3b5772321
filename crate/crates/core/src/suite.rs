//! Seeded randomized checks of the exact identities.
//!
//! Each suite first walks a small exhaustive family (when `trials > 0`), then
//! draws `trials` random cases. The first failing input is kept as the
//! counterexample, so failures tend to be reported on small inputs.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitwise::{bitwise_eval, check_coarse_limit, check_self_affinity, check_sum_decomposition};
use crate::error::Result;
use crate::magma::{table_len, to_code, MagmaOp};
use crate::radix::{format_decimal, mixed_radix_identity_check, radix_pow, RadixFixed};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Decomposition,
    SelfAffinity,
    CoarseLimit,
    MixedRadix,
    Roundtrip,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Decomposition,
        Suite::SelfAffinity,
        Suite::CoarseLimit,
        Suite::MixedRadix,
        Suite::Roundtrip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Decomposition => "decomposition",
            Suite::SelfAffinity => "self-affinity",
            Suite::CoarseLimit => "coarse-limit",
            Suite::MixedRadix => "mixed-radix",
            Suite::Roundtrip => "roundtrip",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
                format!("unknown suite {s:?}, expected one of {}", names.join(", "))
            })
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub trials: usize,
    pub seed: u64,
    /// Restricts the suite to one input radix.
    pub radix: Option<u32>,
    pub frac_digits: u32,
    /// Operator for the coarse-limit and self-affinity suites.
    pub op: Option<MagmaOp>,
    pub q_max: u32,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            seed: 0,
            radix: None,
            frac_digits: 12,
            op: None,
            q_max: 12,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub suite: String,
    pub checked: usize,
    pub failed: usize,
    /// First failing input.
    pub counterexample: Option<String>,
    pub warnings: Vec<String>,
    /// Extra per-suite lines, e.g. deviation per q.
    pub table: Vec<String>,
}

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        Self {
            suite: suite.name().to_string(),
            ..Self::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    fn record(&mut self, ok: bool, input: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(input());
            }
        }
    }
}

/// Random number with `frac` fractional radix-p digits and a number of
/// integer digits drawn from `int_digits`.
pub fn random_fixed(
    rng: &mut impl Rng,
    radix: u32,
    int_digits: std::ops::Range<usize>,
    frac: u32,
) -> RadixFixed {
    let int_digits = rng.random_range(int_digits);
    let digits = (0..int_digits + frac as usize)
        .map(|_| rng.random_range(0..radix))
        .collect();
    RadixFixed::from_digits(radix, -i64::from(frac), digits).expect("digits drawn below radix")
}

/// Random operator code in `[0, p^(p^N) - 1]`.
pub fn random_magma(rng: &mut impl Rng, radix: u32, arity: usize) -> MagmaOp {
    let len = table_len(radix, arity).expect("small table");
    let table = (0..len).map(|_| rng.random_range(0..radix)).collect();
    MagmaOp::from_table(table, radix, arity).expect("entries drawn below radix")
}

pub fn run_suite(suite: Suite, config: &SuiteConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(suite);
    if config.trials == 0 {
        report
            .warnings
            .push("no trials requested; nothing was checked".to_string());
        return Ok(report);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    match suite {
        Suite::Decomposition => decomposition(config, &mut rng, &mut report)?,
        Suite::SelfAffinity => self_affinity(config, &mut rng, &mut report)?,
        Suite::CoarseLimit => coarse_limit(config, &mut rng, &mut report)?,
        Suite::MixedRadix => mixed_radix(config, &mut rng, &mut report)?,
        Suite::Roundtrip => roundtrip(config, &mut rng, &mut report)?,
    }
    Ok(report)
}

fn decomposition(config: &SuiteConfig, rng: &mut ChaCha8Rng, report: &mut SuiteReport) -> Result<()> {
    let radices = config.radix.map_or(vec![2, 3, 10], |p| vec![p]);
    for &p in &radices {
        // Every pair of one-integer, one-fractional-digit numbers.
        let small = u64::from(p).pow(2);
        if small * small <= 10_000 {
            for x in 0..small {
                for y in 0..small {
                    let a = RadixFixed::from_scaled_integer(p, &BigUint::from(x), 1)?;
                    let b = RadixFixed::from_scaled_integer(p, &BigUint::from(y), 1)?;
                    let ok = check_sum_decomposition(&a, &b)?;
                    report.record(ok, || format!("p={p} a={a} b={b}"));
                }
            }
        }
        for _ in 0..config.trials {
            let a = random_fixed(rng, p, 0..6, config.frac_digits);
            let b = random_fixed(rng, p, 0..6, config.frac_digits);
            let ok = check_sum_decomposition(&a, &b)?;
            report.record(ok, || format!("p={p} a={a} b={b}"));
        }
    }
    Ok(())
}

fn self_affinity(config: &SuiteConfig, rng: &mut ChaCha8Rng, report: &mut SuiteReport) -> Result<()> {
    let radices = config.radix.map_or(vec![2, 3, 5], |p| vec![p]);
    // Every binary operator over {0, 1} on all operands below 4.
    if config.op.is_none() && radices.contains(&2) {
        for code in 0u32..16 {
            let op = MagmaOp::from_code(&BigUint::from(code), 2, 2)?;
            for x in 0..4u32 {
                for y in 0..4u32 {
                    let u = [
                        RadixFixed::from_scaled_integer(2, &BigUint::from(x), 1)?,
                        RadixFixed::from_scaled_integer(2, &BigUint::from(y), 1)?,
                    ];
                    for q in 2..5 {
                        let ok = check_self_affinity(&op, &u, q)?;
                        report.record(ok, || format!("op={op} u={} v={} q={q}", u[0], u[1]));
                    }
                }
            }
        }
    }
    for _ in 0..config.trials {
        let op = match &config.op {
            Some(op) => op.clone(),
            None => {
                let p = radices[rng.random_range(0..radices.len())];
                random_magma(rng, p, 2)
            }
        };
        let p = op.radix();
        let frac = rng.random_range(0..=config.frac_digits.min(8));
        let operands: Vec<RadixFixed> = (0..op.arity())
            .map(|_| random_fixed(rng, p, 0..5, frac))
            .collect();
        let q = rng.random_range(2..=12);
        let ok = check_self_affinity(&op, &operands, q)?;
        report.record(ok, || describe(&op, &operands, q));
    }
    Ok(())
}

fn coarse_limit(config: &SuiteConfig, rng: &mut ChaCha8Rng, report: &mut SuiteReport) -> Result<()> {
    let op = match &config.op {
        Some(op) => op.clone(),
        None => "2:13903:3".parse()?,
    };
    let p = op.radix();
    let frac = config.frac_digits.min(6);
    let mut samples = Vec::with_capacity(config.trials);
    let mut skipped = 0usize;
    while samples.len() < config.trials {
        let operands: Vec<RadixFixed> = (0..op.arity())
            .map(|_| random_fixed(rng, p, 1..5, frac))
            .collect();
        let r = bitwise_eval(&op, &operands, p)?;
        match r.k_max() {
            Some(k) if r.coeff(k) != 0 => samples.push(operands),
            _ => {
                skipped += 1;
                if skipped > 100 * config.trials.max(1) {
                    report.warnings.push(format!(
                        "operator {op} rarely yields a nonzero leading coefficient; stopped after {} samples",
                        samples.len()
                    ));
                    break;
                }
            }
        }
    }
    if skipped > 0 {
        report.warnings.push(format!(
            "{skipped} draws with a zero leading coefficient were redrawn"
        ));
    }

    let q_max = config.q_max.max(p);
    for q in p..=q_max {
        let bound = BigRational::new(BigInt::from(p), BigInt::from(q - 1));
        let mut worst = BigRational::zero();
        for operands in &samples {
            let limit = check_coarse_limit(&op, operands, q)?;
            let dev = limit.rel_deviation.clone().unwrap_or_default();
            let ok = limit.digit_match && limit.within_certified_bound(p, q);
            if dev > worst {
                worst = dev;
            }
            report.record(ok, || describe(&op, operands, q));
        }
        report.table.push(format!(
            "q={q:>4}  max rel_deviation={}  bound p/(q-1)={}",
            format_decimal(&worst, 8),
            format_decimal(&bound, 8)
        ));
    }
    Ok(())
}

fn mixed_radix(config: &SuiteConfig, rng: &mut ChaCha8Rng, report: &mut SuiteReport) -> Result<()> {
    let check = |n: u32, p: u32, k: i64, x: BigRational, report: &mut SuiteReport| -> Result<()> {
        let ok = mixed_radix_identity_check(n, p, k, &x)?;
        report.record(ok, || format!("n={n} p={p} k={k} x={x}"));
        Ok(())
    };
    let radices: Vec<u32> = config.radix.map_or((2..=5).collect(), |p| vec![p]);
    for n in 1..=4u32 {
        for &p in &radices {
            for k in -2..=2i64 {
                for x in 0..32i64 {
                    check(n, p, k, BigRational::new(x.into(), 4.into()), report)?;
                }
            }
        }
    }
    for _ in 0..config.trials {
        let n = rng.random_range(1..=12);
        let p = config.radix.unwrap_or_else(|| rng.random_range(2..=12));
        let k = rng.random_range(-6..=6);
        let x = BigRational::new(
            BigInt::from(rng.random_range(0..1_000_000u64)),
            BigInt::from(rng.random_range(1..=1000u64)),
        );
        check(n, p, k, x, report)?;
    }
    Ok(())
}

fn roundtrip(config: &SuiteConfig, rng: &mut ChaCha8Rng, report: &mut SuiteReport) -> Result<()> {
    for _ in 0..config.trials {
        let p = config.radix.unwrap_or_else(|| rng.random_range(2..=5));
        let arity = rng.random_range(1..=if p <= 3 { 3 } else { 2 });

        let op = random_magma(rng, p, arity);
        let back = MagmaOp::from_code(op.code(), p, arity)?;
        let ok = back == op && to_code(op.table(), p)? == *op.code();
        report.record(ok, || format!("table round trip {op}"));

        // Random code below p^(p^N).
        let bits = (table_len(p, arity)? as f64 * f64::from(p).log2()).floor() as u64;
        let code = random_biguint(rng, bits);
        let op = MagmaOp::from_code(&code, p, arity)?;
        report.record(*op.code() == to_code(op.table(), p)?, || {
            format!("code round trip {arity}:{code}:{p}")
        });

        let text = format!(
            "{}.{:06}",
            rng.random_range(0..100_000u32),
            rng.random_range(0..1_000_000u32)
        );
        let exact = crate::radix::parse_decimal(&text)?;
        let x = RadixFixed::from_decimal_str(&text, p, config.frac_digits)?;
        let err = &exact - x.to_rational();
        let ok = err >= BigRational::zero() && err < radix_pow(p, -i64::from(config.frac_digits));
        report.record(ok, || format!("decimal {text} in radix {p}"));
    }
    Ok(())
}

fn random_biguint(rng: &mut impl Rng, bits: u64) -> BigUint {
    let mut n = BigUint::zero();
    for _ in 0..bits {
        n <<= 1u32;
        if rng.random_bool(0.5) {
            n += BigUint::one();
        }
    }
    n
}

fn describe(op: &MagmaOp, operands: &[RadixFixed], q: u32) -> String {
    let args: Vec<String> = operands.iter().map(|u| u.to_string()).collect();
    format!("op={op} operands=[{}] q={q}", args.join(", "))
}
