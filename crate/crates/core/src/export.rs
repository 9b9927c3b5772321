//! Heightmap and table export.
//!
//! All encoders are pure functions of the field, so identical grids give
//! identical bytes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::radix::format_decimal;
use crate::surface::Field;

/// Largest PGM sample value.
pub const PGM_MAXVAL: u32 = 65535;

/// Default fractional digits for decimal CSV output.
pub const DEFAULT_CSV_DIGITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Pgm,
    Csv,
    RawRational,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Pgm => "pgm",
            Format::Csv | Format::RawRational => "csv",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "pgm" => Ok(Format::Pgm),
            "csv" => Ok(Format::Csv),
            "raw-rational" | "raw" => Ok(Format::RawRational),
            other => Err(format!("unknown format {other:?} (pgm, csv, raw-rational)")),
        }
    }
}

/// Affine map of `[min, max]` onto `[0, 65535]`, rounded half up in exact
/// arithmetic. A constant field maps to zero.
pub fn normalize_u16(field: &Field) -> Vec<u16> {
    let (min, max) = field.range();
    let span = &max - &min;
    if span.is_zero() {
        return vec![0; field.exact_values().len()];
    }
    let scale = BigRational::from_integer(BigInt::from(PGM_MAXVAL));
    let half = BigRational::new(1.into(), 2.into());
    field
        .exact_values()
        .iter()
        .map(|x| {
            let level = ((x - &min) * &scale / &span + &half).floor().to_integer();
            level.to_u16().expect("level within maxval")
        })
        .collect()
}

/// ASCII P2 with maxval 65535. Columns run along `u`; the first row is
/// `v_max` so that `v` grows upward.
pub fn encode_pgm(field: &Field) -> Vec<u8> {
    let levels = normalize_u16(field);
    let (nu, nv) = (field.nu(), field.nv());
    let mut out = String::with_capacity(nu * nv * 6 + 32);
    let _ = writeln!(out, "P2\n{nu} {nv}\n{PGM_MAXVAL}");
    for j in (0..nv).rev() {
        for i in 0..nu {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", levels[i * nv + j]);
        }
        out.push('\n');
    }
    out.into_bytes()
}

/// `u,v,value` rows with decimal values truncated to `digits` places.
/// `us` and `vs` are the rendered coordinate labels.
pub fn encode_csv(field: &Field, us: &[String], vs: &[String], digits: usize) -> Vec<u8> {
    encode_table(field, us, vs, |x| format_decimal(x, digits))
}

/// `u,v,value` rows with values as exact `n/d` fractions.
pub fn encode_raw_rational(field: &Field, us: &[String], vs: &[String]) -> Vec<u8> {
    encode_table(field, us, vs, |x| format!("{}/{}", x.numer(), x.denom()))
}

fn encode_table(field: &Field, us: &[String], vs: &[String], render: impl Fn(&BigRational) -> String) -> Vec<u8> {
    assert_eq!(us.len(), field.nu());
    assert_eq!(vs.len(), field.nv());
    let mut out = String::from("u,v,value\n");
    for (i, u) in us.iter().enumerate() {
        for (j, v) in vs.iter().enumerate() {
            let _ = writeln!(out, "{u},{v},{}", render(field.exact(i, j)));
        }
    }
    out.into_bytes()
}

/// Writes to a temporary file beside `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
