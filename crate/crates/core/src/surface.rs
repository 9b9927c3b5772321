//! Sampling `b_q(op; u, v)` over rectangular domains.
//!
//! Coordinates are interpolated in exact rational arithmetic and truncated
//! to the working precision, so a grid is reproducible digit for digit.
//! Rows (fixed `u`) are evaluated independently and merged in order, so the
//! output does not depend on the number of workers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::bitwise::{bitwise_eval, carry_sum, mod_p_add, roughness_exponent, BitwiseResult};
use crate::error::{Error, Result};
use crate::magma::MagmaOp;
use crate::radix::{format_decimal, parse_decimal, RadixFixed};

/// A rectangle `[u_min, u_max] x [v_min, v_max]` with exact bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    u: (BigRational, BigRational),
    v: (BigRational, BigRational),
}

impl Domain {
    pub fn from_rationals(u: (BigRational, BigRational), v: (BigRational, BigRational)) -> Result<Self> {
        for (name, (lo, hi)) in [("u", &u), ("v", &v)] {
            if lo.is_negative() {
                return Err(Error::InvalidDomain(format!("{name} bounds must be nonnegative")));
            }
            if lo >= hi {
                return Err(Error::InvalidDomain(format!(
                    "{name}_min {lo} must be below {name}_max {hi}"
                )));
            }
        }
        Ok(Self { u, v })
    }

    pub fn new(u_min: &str, u_max: &str, v_min: &str, v_max: &str) -> Result<Self> {
        let p = |s: &str| parse_decimal(s).map_err(|e| Error::InvalidDomain(e.to_string()));
        Self::from_rationals((p(u_min)?, p(u_max)?), (p(v_min)?, p(v_max)?))
    }

    /// `[lo, hi]^2`.
    pub fn square(lo: &str, hi: &str) -> Result<Self> {
        Self::new(lo, hi, lo, hi)
    }

    /// Parses `u_min,u_max,v_min,v_max`, or `min,max` for a square.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        match parts.as_slice() {
            [lo, hi] => Self::square(lo, hi),
            [a, b, c, d] => Self::new(a, b, c, d),
            _ => Err(Error::InvalidDomain(format!(
                "{text:?}: expected min,max or u_min,u_max,v_min,v_max"
            ))),
        }
    }

    pub fn u_bounds(&self) -> &(BigRational, BigRational) {
        &self.u
    }

    pub fn v_bounds(&self) -> &(BigRational, BigRational) {
        &self.v
    }

    pub fn is_square(&self) -> bool {
        self.u == self.v
    }

    /// Every bound multiplied by `factor`.
    pub fn scaled(&self, factor: u32) -> Self {
        let f = BigRational::from_integer(BigInt::from(factor));
        Self {
            u: (&self.u.0 * &f, &self.u.1 * &f),
            v: (&self.v.0 * &f, &self.v.1 * &f),
        }
    }
}

/// Samples along `u` and `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Resolution {
    pub nu: usize,
    pub nv: usize,
}

impl Resolution {
    pub fn new(nu: usize, nv: usize) -> Result<Self> {
        if nu == 0 || nv == 0 {
            return Err(Error::InvalidResolution(format!("{nu}x{nv} has no samples")));
        }
        Ok(Self { nu, nv })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    /// Parses `N` or `NUxNV`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::InvalidResolution(format!("{text:?}: expected N or NUxNV"));
        let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
        match text.split_once(['x', 'X']) {
            Some((a, b)) => Self::new(parse(a)?, parse(b)?),
            None => Self::square(parse(text)?),
        }
    }
}

/// Worker count for grid evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Workers {
    /// Rayon's global pool.
    #[default]
    Auto,
    Fixed(usize),
}

impl Workers {
    fn run<T: Send>(self, job: impl FnOnce() -> T + Send) -> Result<T> {
        match self {
            Workers::Auto => Ok(job()),
            Workers::Fixed(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .map_err(|e| Error::Workers(e.to_string()))?;
                Ok(pool.install(job))
            }
        }
    }
}

/// `n` equally spaced exact coordinates from `lo` to `hi`; a single sample
/// sits at `lo`.
pub fn coordinates(lo: &BigRational, hi: &BigRational, n: usize) -> Vec<BigRational> {
    if n == 1 {
        return vec![lo.clone()];
    }
    let step = (hi - lo) / BigRational::from_integer(BigInt::from(n - 1));
    (0..n)
        .map(|i| lo + &step * BigRational::from_integer(BigInt::from(i)))
        .collect()
}

fn operand_coordinates(
    lo: &BigRational,
    hi: &BigRational,
    n: usize,
    radix: u32,
    frac_digits: i64,
) -> Result<Vec<RadixFixed>> {
    coordinates(lo, hi, n)
        .iter()
        .map(|x| RadixFixed::from_rational(x, radix, frac_digits))
        .collect()
}

/// Row-major exact heights, `index = i * nv + j` with `i` along `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    nu: usize,
    nv: usize,
    exact: Vec<BigRational>,
    values: Vec<f64>,
}

impl Field {
    pub fn from_exact(nu: usize, nv: usize, exact: Vec<BigRational>) -> Self {
        assert_eq!(exact.len(), nu * nv, "field size mismatch");
        let values = exact
            .iter()
            .map(|x| x.to_f64().unwrap_or(f64::INFINITY))
            .collect();
        Self {
            nu,
            nv,
            exact,
            values,
        }
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.nv + j]
    }

    pub fn exact(&self, i: usize, j: usize) -> &BigRational {
        &self.exact[i * self.nv + j]
    }

    pub fn exact_values(&self) -> &[BigRational] {
        &self.exact
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Exact minimum and maximum.
    pub fn range(&self) -> (BigRational, BigRational) {
        let min = self.exact.iter().min().expect("nonempty field").clone();
        let max = self.exact.iter().max().expect("nonempty field").clone();
        (min, max)
    }

    /// All samples equal.
    pub fn is_constant(&self) -> bool {
        self.exact.windows(2).all(|w| w[0] == w[1])
    }

    /// Row-sharded evaluation of `f(i, j)` in a deterministic order.
    fn evaluate<F>(nu: usize, nv: usize, workers: Workers, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Result<BigRational> + Sync,
    {
        let rows: Vec<Vec<BigRational>> = workers.run(|| {
            (0..nu)
                .into_par_iter()
                .map(|i| (0..nv).map(|j| f(i, j)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()
        })??;
        Ok(Self::from_exact(nu, nv, rows.into_iter().flatten().collect()))
    }
}

/// Everything needed to sample one surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceSpec {
    pub op: MagmaOp,
    pub q: u32,
    pub domain: Domain,
    pub resolution: Resolution,
    pub frac_digits: u32,
    /// Depth `D` of `q^(-D) floor(q^D b_q)`, applied per sample.
    pub truncation: Option<i64>,
}

impl SurfaceSpec {
    pub fn new(op: MagmaOp, q: u32, domain: Domain, resolution: Resolution, frac_digits: u32) -> Self {
        Self {
            op,
            q,
            domain,
            resolution,
            frac_digits,
            truncation: None,
        }
    }

    pub fn with_truncation(mut self, depth: Option<i64>) -> Self {
        self.truncation = depth;
        self
    }

    pub fn sample(&self, workers: Workers) -> Result<SurfaceGrid> {
        self.sample_with_frac(i64::from(self.frac_digits), workers)
    }

    fn sample_with_frac(&self, frac_digits: i64, workers: Workers) -> Result<SurfaceGrid> {
        let results = evaluate_results(
            &self.op,
            self.q,
            &self.domain,
            self.resolution,
            frac_digits,
            self.truncation,
            workers,
        )?;
        Ok(SurfaceGrid {
            spec: self.clone(),
            field: results,
        })
    }
}

fn evaluate_results(
    op: &MagmaOp,
    q: u32,
    domain: &Domain,
    resolution: Resolution,
    frac_digits: i64,
    truncation: Option<i64>,
    workers: Workers,
) -> Result<Field> {
    if op.arity() != 2 {
        return Err(Error::NotBinary(op.arity()));
    }
    let p = op.radix();
    let us = operand_coordinates(&domain.u.0, &domain.u.1, resolution.nu, p, frac_digits)?;
    let vs = operand_coordinates(&domain.v.0, &domain.v.1, resolution.nv, p, frac_digits)?;
    Field::evaluate(resolution.nu, resolution.nv, workers, |i, j| {
        let r = bitwise_eval(op, &[us[i].clone(), vs[j].clone()], q)?;
        Ok(match truncation {
            Some(depth) => r.coarse_grain(depth).value(),
            None => r.value(),
        })
    })
}

/// A sampled patchwork surface with its recipe.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceGrid {
    spec: SurfaceSpec,
    field: Field,
}

impl SurfaceGrid {
    pub fn spec(&self) -> &SurfaceSpec {
        &self.spec
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn op(&self) -> &MagmaOp {
        &self.spec.op
    }

    pub fn q(&self) -> u32 {
        self.spec.q
    }

    /// `H = log_p q`.
    pub fn roughness_exponent(&self) -> f64 {
        roughness_exponent(self.spec.op.radix(), self.spec.q)
    }
}

/// Samples `b_q(op; u, v)` on the rayon global pool.
pub fn sample_surface(
    op: &MagmaOp,
    q: u32,
    domain: &Domain,
    resolution: Resolution,
    frac_digits: u32,
    truncation: Option<i64>,
) -> Result<SurfaceGrid> {
    SurfaceSpec::new(op.clone(), q, domain.clone(), resolution, frac_digits)
        .with_truncation(truncation)
        .sample(Workers::Auto)
}

/// The three fields `f = x + y`, `g = x +_p y`, `h = x carry_p y`.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityField {
    pub sum: Field,
    pub modular: Field,
    pub carries: Field,
    /// `g + h = f` held exactly at every sample.
    pub holds: bool,
}

pub fn pointwise_identity_field(
    domain: &Domain,
    resolution: Resolution,
    p: u32,
    frac_digits: u32,
    workers: Workers,
) -> Result<IdentityField> {
    let frac = i64::from(frac_digits);
    let us = operand_coordinates(&domain.u.0, &domain.u.1, resolution.nu, p, frac)?;
    let vs = operand_coordinates(&domain.v.0, &domain.v.1, resolution.nv, p, frac)?;
    let triples: Vec<Vec<[BigRational; 3]>> = workers.run(|| {
        (0..resolution.nu)
            .into_par_iter()
            .map(|i| {
                vs.iter()
                    .map(|v| {
                        let u = &us[i];
                        Ok([
                            u.to_rational() + v.to_rational(),
                            mod_p_add(u, v)?.to_rational(),
                            carry_sum(u, v)?.to_rational(),
                        ])
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let flat: Vec<[BigRational; 3]> = triples.into_iter().flatten().collect();
    let holds = flat.iter().all(|[f, g, h]| *f == g + h);
    let (nu, nv) = (resolution.nu, resolution.nv);
    let column = |c: usize| Field::from_exact(nu, nv, flat.iter().map(|t| t[c].clone()).collect());
    Ok(IdentityField {
        sum: column(0),
        modular: column(1),
        carries: column(2),
        holds,
    })
}

/// `values[i][j] == values[j][i]` for all `i, j`, compared exactly.
pub fn symmetry_probe(grid: &SurfaceGrid) -> Result<bool> {
    let field = grid.field();
    let spec = grid.spec();
    if field.nu() != field.nv() || !spec.domain.is_square() {
        return Err(Error::NotSquare(format!(
            "{}x{} samples over u in [{}, {}], v in [{}, {}]",
            field.nu(),
            field.nv(),
            spec.domain.u.0,
            spec.domain.u.1,
            spec.domain.v.0,
            spec.domain.v.1
        )));
    }
    let n = field.nu();
    Ok((0..n).all(|i| (0..i).all(|j| field.exact(i, j) == field.exact(j, i))))
}

/// One grid per `q`, sharing the operator, domain and precision.
///
/// Coefficient strings are computed once and re-read in each `q`.
pub fn q_sweep(
    op: &MagmaOp,
    domain: &Domain,
    resolution: Resolution,
    frac_digits: u32,
    qs: &[u32],
    workers: Workers,
) -> Result<Vec<SurfaceGrid>> {
    if qs.is_empty() {
        return Err(Error::InvalidResolution("empty q list".into()));
    }
    if op.arity() != 2 {
        return Err(Error::NotBinary(op.arity()));
    }
    let p = op.radix();
    let frac = i64::from(frac_digits);
    let us = operand_coordinates(&domain.u.0, &domain.u.1, resolution.nu, p, frac)?;
    let vs = operand_coordinates(&domain.v.0, &domain.v.1, resolution.nv, p, frac)?;
    let rows: Vec<Vec<BitwiseResult>> = workers.run(|| {
        (0..resolution.nu)
            .into_par_iter()
            .map(|i| {
                vs.iter()
                    .map(|v| bitwise_eval(op, &[us[i].clone(), v.clone()], p))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let results: Vec<BitwiseResult> = rows.into_iter().flatten().collect();

    qs.iter()
        .map(|&q| {
            let exact = workers.run(|| {
                results
                    .par_iter()
                    .map(|r| r.with_out_radix(q).map(|r| r.value()))
                    .collect::<Result<Vec<_>>>()
            })??;
            Ok(SurfaceGrid {
                spec: SurfaceSpec::new(op.clone(), q, domain.clone(), resolution, frac_digits),
                field: Field::from_exact(resolution.nu, resolution.nv, exact),
            })
        })
        .collect()
}

/// Per-sample values never decrease as `q` grows (grids sorted by `q`).
pub fn is_nondecreasing_in_q(grids: &[SurfaceGrid]) -> bool {
    let mut sorted: Vec<&SurfaceGrid> = grids.iter().collect();
    sorted.sort_by_key(|g| g.q());
    sorted.windows(2).all(|w| {
        w[0].field()
            .exact_values()
            .iter()
            .zip(w[1].field().exact_values())
            .all(|(a, b)| a <= b)
    })
}

/// Grid form of self-affinity: samples over `p * domain` at `F - 1`
/// fractional digits equal `q` times the samples over `domain` at `F`
/// digits, exactly. Requires `F >= 1`.
pub fn check_grid_self_affinity(spec: &SurfaceSpec, workers: Workers) -> Result<bool> {
    if spec.frac_digits == 0 {
        return Err(Error::InvalidResolution(
            "grid self-affinity needs at least one fractional digit".into(),
        ));
    }
    let base = spec.sample(workers)?;
    let scaled_spec = SurfaceSpec {
        domain: spec.domain.scaled(spec.op.radix()),
        ..spec.clone()
    };
    let scaled = scaled_spec.sample_with_frac(i64::from(spec.frac_digits) - 1, workers)?;
    let q = BigRational::from_integer(BigInt::from(spec.q));
    Ok(base
        .field()
        .exact_values()
        .iter()
        .zip(scaled.field().exact_values())
        .all(|(a, b)| *b == a * &q))
}

/// Decimal rendering of the sample coordinates along `u` and `v`.
pub fn coordinate_labels(domain: &Domain, resolution: Resolution, digits: usize) -> (Vec<String>, Vec<String>) {
    let render = |lo: &BigRational, hi: &BigRational, n: usize| {
        coordinates(lo, hi, n)
            .iter()
            .map(|x| format_decimal(x, digits))
            .collect()
    };
    (
        render(&domain.u.0, &domain.u.1, resolution.nu),
        render(&domain.v.0, &domain.v.1, resolution.nv),
    )
}
