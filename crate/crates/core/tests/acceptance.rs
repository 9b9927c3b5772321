//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.
//!
//! Golden PGM panels live in `tests/golden/`. Regenerate them with
//! `PATCHWORK_BLESS=1 cargo test -p patchwork-core --test acceptance`.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use patchwork::export::{encode_csv, encode_pgm, write_atomic};
use patchwork::radix::radix_pow;
use patchwork::suite::{random_fixed, random_magma};
use patchwork::surface::{coordinate_labels, is_nondecreasing_in_q};
use patchwork::{
    bitwise_eval, carry_sum, check_coarse_limit, check_self_affinity, check_sum_decomposition, digit, mod_p_add,
    parse_decimal, pointwise_identity_field, q_sweep, symmetry_probe, Domain, MagmaOp, RadixFixed, Resolution,
    SurfaceSpec, Workers,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn op(literal: &str) -> MagmaOp {
    literal.parse().unwrap()
}

fn rat(s: &str) -> BigRational {
    parse_decimal(s).unwrap()
}

fn int(n: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn c1_sum_split() -> Outcome {
    let a = RadixFixed::from_decimal_str("5.6782", 10, 4).unwrap();
    let b = RadixFixed::from_decimal_str("3.6754", 10, 4).unwrap();
    let m = mod_p_add(&a, &b).unwrap();
    let c = carry_sum(&a, &b).unwrap();
    let ok = m.to_rational() == rat("8.2436")
        && c.to_rational() == rat("1.1100")
        && m.to_rational() + c.to_rational() == rat("9.3536")
        && a.to_rational() + b.to_rational() == rat("9.3536");
    outcome(ok, format!("mod {m}, carry {c}"))
}

fn c2_or_example() -> Outcome {
    let u = RadixFixed::from_decimal_str("5", 2, 0).unwrap();
    let v = RadixFixed::from_decimal_str("11", 2, 0).unwrap();
    let value = bitwise_eval(&op("2:14:2"), &[u, v], 2).unwrap().value();
    outcome(value == int(15), format!("b_2 = {value}"))
}

fn c3_pi_digits() -> Outcome {
    let x = rat("3.1415");
    let digits: Vec<u32> = (-4..=0).rev().map(|k| digit(10, k, &x).unwrap()).collect();
    outcome(digits == [3, 1, 4, 1, 5], format!("digits {digits:?}"))
}

fn c4_decomposition() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = 0usize;
    let mut checked = 0usize;
    for p in [2u32, 3, 10] {
        for _ in 0..10_000 {
            let a = random_fixed(&mut rng, p, 0..10, 12);
            let b = random_fixed(&mut rng, p, 0..10, 12);
            checked += 1;
            if !check_sum_decomposition(&a, &b).unwrap() {
                failures += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && elapsed < Duration::from_secs(10),
        format!("{checked} pairs, {failures} failures, {:.2}s", elapsed.as_secs_f64()),
    )
}

fn c5_self_affinity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = 0usize;
    for trial in 0..200 {
        let p = [2u32, 3, 5][trial % 3];
        let m = random_magma(&mut rng, p, 2);
        let u = random_fixed(&mut rng, p, 0..6, 8);
        let v = random_fixed(&mut rng, p, 0..6, 8);
        let q = rng.random_range(2..20);
        let base = bitwise_eval(&m, &[u.clone(), v.clone()], q).unwrap();
        let scaled = bitwise_eval(&m, &[u.scale_by_radix_power(1), v.scale_by_radix_power(1)], q).unwrap();
        let top = base.k_max().unwrap_or(0);
        let shift = (-8..=top + 1).all(|k| scaled.coeff(k + 1) == base.coeff(k));
        let value = scaled.value() == base.value() * int(q);
        let library = check_self_affinity(&m, &[u, v], q).unwrap();
        if !(shift && value && library) {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("200 triples, {failures} failures"))
}

/// Coefficient string, value in radix q and asymptote, straight from digits.
fn coarse_oracle(m: &MagmaOp, u: &BigRational, v: &BigRational, lo: i64, q: u32) -> (Vec<u32>, i64, BigRational, BigRational) {
    let p = m.radix();
    let top = [u, v]
        .iter()
        .filter_map(|x| (lo..64).rev().find(|&k| digit(p, k, x).unwrap() != 0))
        .max()
        .unwrap();
    let coeffs: Vec<u32> = (lo..=top)
        .map(|k| m.table()[(digit(p, k, u).unwrap() + p * digit(p, k, v).unwrap()) as usize])
        .collect();
    let value = coeffs
        .iter()
        .zip(lo..)
        .fold(BigRational::zero(), |acc, (&c, k)| acc + int(c) * radix_pow(q, k));
    let asymptote = int(*coeffs.last().unwrap()) * radix_pow(q, top);
    (coeffs, top, value, asymptote)
}

fn c6_coarse_limit() -> Outcome {
    let start = Instant::now();
    let m = op("2:13903:3");
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut pairs = Vec::new();
    while pairs.len() < 20 {
        let u = random_fixed(&mut rng, 3, 1..6, 12);
        let v = random_fixed(&mut rng, 3, 1..6, 12);
        let r = bitwise_eval(&m, &[u.clone(), v.clone()], 3).unwrap();
        if r.k_max().is_some_and(|k| r.coeff(k) != 0) {
            pairs.push((u, v));
        }
    }
    let mut digit_fail = 0;
    let mut bound_fail = 0;
    let mut oracle_fail = 0;
    let mut worst_301 = BigRational::zero();
    for (u, v) in &pairs {
        let (ur, vr) = (u.to_rational(), v.to_rational());
        for q in 3..=301u32 {
            let got = check_coarse_limit(&m, &[u.clone(), v.clone()], q).unwrap();
            let (coeffs, top, value, asymptote) = coarse_oracle(&m, &ur, &vr, -12, q);
            let rel = (&value - &asymptote) / &asymptote;
            if got.rel_deviation.as_ref() != Some(&rel) {
                oracle_fail += 1;
            }
            if q <= 12 {
                let digits_ok = (-12..=top + 1)
                    .all(|k| digit(q, k, &value).unwrap() == coeffs.get((k + 12) as usize).copied().unwrap_or(0));
                if !(got.digit_match && digits_ok) {
                    digit_fail += 1;
                }
            }
            if rel.is_negative() || rel > BigRational::new(3.into(), (q - 1).into()) {
                bound_fail += 1;
            }
            if q == 301 && rel > worst_301 {
                worst_301 = rel;
            }
        }
    }
    let elapsed = start.elapsed();
    let limit = BigRational::new(1.into(), 100.into());
    outcome(
        digit_fail == 0
            && bound_fail == 0
            && oracle_fail == 0
            && worst_301 < limit
            && elapsed < Duration::from_secs(30),
        format!(
            "20 pairs: digit mismatches {digit_fail}, bound violations {bound_fail}, oracle mismatches {oracle_fail}, \
             max rel at q=301 {:.6}, {:.2}s",
            rational_f64(&worst_301),
            elapsed.as_secs_f64()
        ),
    )
}

fn rational_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

fn c7_truncation() -> Outcome {
    let m = op("2:9815:3");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = 0usize;
    for _ in 0..1000 {
        let u = random_fixed(&mut rng, 3, 0..6, 12);
        let v = random_fixed(&mut rng, 3, 0..6, 12);
        let r = bitwise_eval(&m, &[u, v], 3).unwrap();
        for depth in [0i64, -1, -2] {
            let t = r.coarse_grain(depth);
            let diff = r.value() - t.value();
            let oracle = (r.value() * radix_pow(3, depth)).floor() * radix_pow(3, -depth);
            let ok = !diff.is_negative()
                && diff < radix_pow(3, -depth)
                && t.value() == oracle
                && t.coarse_grain(depth) == t;
            if !ok {
                failures += 1;
            }
        }
    }
    outcome(failures == 0, format!("1000 points x 3 depths, {failures} failures"))
}

fn c8_identity_field() -> Outcome {
    let domain = Domain::square("0", "1").unwrap();
    let res = Resolution::square(256).unwrap();
    let f = pointwise_identity_field(&domain, res, 2, 12, Workers::Auto).unwrap();
    let exact = f
        .sum
        .exact_values()
        .iter()
        .zip(f.modular.exact_values())
        .zip(f.carries.exact_values())
        .all(|((s, g), h)| *s == g + h);
    let g_varies = !f.modular.is_constant();
    let h_varies = !f.carries.is_constant();
    outcome(
        f.holds && exact && g_varies && h_varies,
        format!("256x256: f = g + h {exact}, g non-constant {g_varies}, h non-constant {h_varies}"),
    )
}

fn c9_symmetry() -> Outcome {
    let domain = Domain::square("0", "100").unwrap();
    let res = Resolution::square(128).unwrap();
    let sample = |literal: &str| {
        let m = op(literal);
        let q = m.radix();
        SurfaceSpec::new(m, q, domain.clone(), res, 12).sample(Workers::Auto).unwrap()
    };
    let sym = symmetry_probe(&sample("2:6:2")).unwrap();
    // Table [0,0,1,0]: a(1,0) = 0 but a(0,1) = 1.
    let skew = op("2:4:2");
    let skew_sym = symmetry_probe(&sample("2:4:2")).unwrap();
    outcome(
        sym && !skew_sym && !skew.is_commutative().unwrap(),
        format!("2:6:2 symmetric {sym}, 2:4:2 symmetric {skew_sym}"),
    )
}

fn fig5_grids() -> Vec<patchwork::SurfaceGrid> {
    let domain = Domain::square("0", "100").unwrap();
    let qs: Vec<u32> = (3..=11).collect();
    q_sweep(&op("2:13903:3"), &domain, Resolution::square(64).unwrap(), 12, &qs, Workers::Auto).unwrap()
}

fn c10a_monotone_in_q() -> Outcome {
    let grids = fig5_grids();
    let ok = is_nondecreasing_in_q(&grids);
    let mut violations = 0usize;
    let mut first = None;
    for w in grids.windows(2) {
        for (n, (a, b)) in w[0].field().exact_values().iter().zip(w[1].field().exact_values()).enumerate() {
            if a > b {
                violations += 1;
                first.get_or_insert((n, w[0].q(), a.clone(), b.clone()));
            }
        }
    }
    let detail = match first {
        None => "64x64, q = 3..11, no decreases".to_string(),
        Some((n, q, a, b)) => format!(
            "64x64, q = 3..11, F = 12: {violations} decreasing (sample, q) steps; first at sample ({}, {}): \
             q={q} gives {:.6}, q={} gives {:.6}",
            n / 64,
            n % 64,
            rational_f64(&a),
            q + 1,
            rational_f64(&b)
        ),
    };
    outcome(ok, detail)
}

fn c10b_golden_panels() -> Outcome {
    let dir = golden_dir();
    let bless = std::env::var_os("PATCHWORK_BLESS").is_some();
    let mut mismatched = Vec::new();
    for g in fig5_grids() {
        let bytes = encode_pgm(g.field());
        let path = dir.join(format!("fig5_q{}.pgm", g.q()));
        if bless {
            write_atomic(&path, &bytes).unwrap();
            continue;
        }
        match std::fs::read(&path) {
            Ok(stored) if stored == bytes => {}
            _ => mismatched.push(g.q()),
        }
    }
    if bless {
        return outcome(true, format!("blessed 9 panels into {}", dir.display()));
    }
    outcome(mismatched.is_empty(), format!("9 panels, mismatched q {mismatched:?}"))
}

fn c11_determinism() -> Outcome {
    let domain = Domain::square("0", "100").unwrap();
    let res = Resolution::square(64).unwrap();
    let spec = SurfaceSpec::new(op("2:13903:3"), 3, domain.clone(), res, 12).with_truncation(Some(-1));
    let (us, vs) = coordinate_labels(&domain, res, 12);
    let render = |workers| {
        let grid = spec.sample(workers).unwrap();
        let mut bytes = encode_pgm(grid.field());
        bytes.extend(encode_csv(grid.field(), &us, &vs, 12));
        bytes
    };
    let tmp = tempfile::tempdir().unwrap();
    let write = |name: &str, workers| {
        let path = tmp.path().join(name);
        write_atomic(&path, &render(workers)).unwrap();
        std::fs::read(path).unwrap()
    };
    let one = write("one.out", Workers::Fixed(1));
    let eight = write("eight.out", Workers::Fixed(8));
    let again = write("again.out", Workers::Fixed(8));
    let auto = write("auto.out", Workers::Auto);
    let ok = one == eight && eight == again && again == auto;
    outcome(ok, format!("1 vs 8 workers, repeated run, default pool: identical {ok} ({} bytes)", one.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("1  sum split p=10 F=4", c1_sum_split),
        ("2  OR of 5 and 11", c2_or_example),
        ("3  digits of 3.1415", c3_pi_digits),
        ("4  decomposition, 10000 pairs per p", c4_decomposition),
        ("5  self-affinity, 200 triples", c5_self_affinity),
        ("6  coarse limit of 2:13903:3", c6_coarse_limit),
        ("7  truncation of 2:9815:3", c7_truncation),
        ("8  f = g + h on 256x256", c8_identity_field),
        ("9  symmetry probe", c9_symmetry),
        ("10a per-sample monotone in q", c10a_monotone_in_q),
        ("10b golden q-sweep panels", c10b_golden_panels),
        ("11 determinism", c11_determinism),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let tag = if result.ok { "PASS" } else { "FAIL" };
        println!("{tag} {name}: {} [{:.2}s]", result.detail, start.elapsed().as_secs_f64());
        if !result.ok {
            failed.push(name);
        }
    }
    println!("acceptance: {} of 12 passed", 12 - failed.len());
    if !failed.is_empty() {
        println!("failed: {}", failed.join("; "));
        std::process::exit(1);
    }
}
