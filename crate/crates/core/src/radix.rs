//! Exact fixed-point numbers stored as radix-p digits, and the digit function.
//!
//! A [`RadixFixed`] holds the digits of a nonnegative number over a finite
//! index window `[lo, k_hi]`. Digits outside the window are zero. All
//! conversions go through exact rationals, so digit extraction never sees
//! binary floating-point error.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Fractional digits used when the caller does not choose a precision.
pub const DEFAULT_FRAC_DIGITS: u32 = 12;

/// `base^exp` as an exact rational; negative exponents give `1 / base^|exp|`.
pub fn radix_pow(base: u32, exp: i64) -> BigRational {
    let exp_abs = u32::try_from(exp.unsigned_abs()).expect("radix exponent fits in u32");
    let mag = BigInt::from(base).pow(exp_abs);
    if exp >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

/// The k-th radix-p digit of `x`: `floor(x / p^k) - p * floor(x / p^(k+1))`.
///
/// `p = 1` is accepted and always yields 0.
pub fn digit(p: u32, k: i64, x: &BigRational) -> Result<u32> {
    if p == 0 {
        return Err(Error::InvalidRadix { got: 0, min: 1 });
    }
    if x.is_negative() {
        return Err(Error::Negative(x.to_string()));
    }
    if p == 1 {
        return Ok(0);
    }
    let upper = (x / radix_pow(p, k)).floor().to_integer();
    let next = (x / radix_pow(p, k + 1)).floor().to_integer();
    let d = upper - next * BigInt::from(p);
    Ok(d.to_u32().expect("digit lies in [0, p-1]"))
}

/// Checks `d_np(k,x) = d_p(k, x/n^k) + p d_n(k, x/p^(k+1))` and the
/// symmetric form with `n` and `p` exchanged, in exact arithmetic.
pub fn mixed_radix_identity_check(n: u32, p: u32, k: i64, x: &BigRational) -> Result<bool> {
    if n == 0 {
        return Err(Error::InvalidRadix { got: 0, min: 1 });
    }
    if p < 2 {
        return Err(Error::InvalidRadix { got: p, min: 2 });
    }
    let np = n.checked_mul(p).ok_or(Error::InvalidRadix { got: u32::MAX, min: 2 })?;
    let lhs = u64::from(digit(np, k, x)?);

    let first = u64::from(digit(p, k, &(x / radix_pow(n, k)))?)
        + u64::from(p) * u64::from(digit(n, k, &(x / radix_pow(p, k + 1)))?);
    let second = u64::from(digit(n, k, &(x / radix_pow(p, k)))?)
        + u64::from(n) * u64::from(digit(p, k, &(x / radix_pow(n, k + 1)))?);

    Ok(lhs == first && lhs == second)
}

/// Parses plain decimal text (`[+-]digits[.digits]`) into an exact rational.
pub fn parse_decimal(text: &str) -> Result<BigRational> {
    let malformed = || Error::MalformedDecimal(text.to_string());
    let s = text.trim();
    let (negative, body) = match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(malformed());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(malformed());
    }
    let mut all_digits = String::with_capacity(int_part.len() + frac_part.len());
    all_digits.push_str(int_part);
    all_digits.push_str(frac_part);
    let numer: BigInt = all_digits.parse().map_err(|_| malformed())?;
    let numer = if negative { -numer } else { numer };
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    Ok(BigRational::new(numer, denom))
}

/// Renders `x` in decimal with exactly `frac` fractional digits, truncating
/// toward zero.
pub fn format_decimal(x: &BigRational, frac: usize) -> String {
    let scale = BigInt::from(10u32).pow(frac as u32);
    let scaled = (x.abs() * BigRational::from_integer(scale.clone()))
        .floor()
        .to_integer();
    let (int, rem) = scaled.div_rem(&scale);
    let sign = if x.is_negative() && !scaled.is_zero() {
        "-"
    } else {
        ""
    };
    if frac == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{:0>width$}", rem.to_string(), width = frac)
    }
}

/// Little-endian base-p digits of `n`; empty for zero.
pub(crate) fn base_digits(n: &BigUint, p: u32) -> Vec<u32> {
    debug_assert!(p >= 2);
    if n.is_zero() {
        return Vec::new();
    }
    if let Some(mut v) = n.to_u128() {
        let p = u128::from(p);
        let mut out = Vec::new();
        while v > 0 {
            out.push((v % p) as u32);
            v /= p;
        }
        return out;
    }
    if p <= 256 {
        return n.to_radix_le(p).into_iter().map(u32::from).collect();
    }
    let base = BigUint::from(p);
    let mut rest = n.clone();
    let mut out = Vec::new();
    while !rest.is_zero() {
        let (q, r) = rest.div_rem(&base);
        out.push(r.to_u32().expect("remainder below radix"));
        rest = q;
    }
    out
}

/// Horner evaluation of little-endian coefficients in base `base`.
pub(crate) fn horner(coeffs: &[u32], base: u32) -> BigUint {
    let base = BigUint::from(base);
    coeffs
        .iter()
        .rev()
        .fold(BigUint::zero(), |acc, &c| acc * &base + BigUint::from(c))
}

/// An exact nonnegative number held as radix-p digits over an index window.
///
/// The window starts at index `lo` (so the number carries `-lo` fractional
/// digits) and ends at the most significant nonzero digit. Zero is the empty
/// digit sequence; its window start is still recorded so that zero operands
/// share precision with their neighbours.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RadixFixed {
    radix: u32,
    lo: i64,
    digits: Vec<u32>,
}

impl RadixFixed {
    /// Builds a number from little-endian digits starting at index `lo`.
    pub fn from_digits(radix: u32, lo: i64, digits: Vec<u32>) -> Result<Self> {
        check_radix(radix)?;
        if let Some(&bad) = digits.iter().find(|&&d| d >= radix) {
            return Err(Error::DigitOutOfRange { digit: bad, radix });
        }
        let mut out = Self { radix, lo, digits };
        out.trim();
        Ok(out)
    }

    pub fn zero(radix: u32, frac_digits: i64) -> Result<Self> {
        Self::from_digits(radix, -frac_digits, Vec::new())
    }

    /// The number `n * p^(-frac_digits)`.
    pub fn from_scaled_integer(radix: u32, n: &BigUint, frac_digits: i64) -> Result<Self> {
        check_radix(radix)?;
        Ok(Self {
            radix,
            lo: -frac_digits,
            digits: base_digits(n, radix),
        })
    }

    /// Truncates `x` to `frac_digits` radix-p fractional digits:
    /// `p^(-F) * floor(p^F * x)`.
    pub fn from_rational(x: &BigRational, radix: u32, frac_digits: i64) -> Result<Self> {
        check_radix(radix)?;
        if x.is_negative() {
            return Err(Error::Negative(x.to_string()));
        }
        let scaled = (x * radix_pow(radix, frac_digits)).floor().to_integer();
        let n = scaled.to_biguint().expect("nonnegative after floor");
        Self::from_scaled_integer(radix, &n, frac_digits)
    }

    /// Parses decimal text exactly and truncates it to `frac_digits`
    /// fractional digits in radix `radix`.
    pub fn from_decimal_str(text: &str, radix: u32, frac_digits: u32) -> Result<Self> {
        check_radix(radix)?;
        let x = parse_decimal(text)?;
        if x.is_negative() {
            return Err(Error::Negative(text.trim().to_string()));
        }
        Self::from_rational(&x, radix, i64::from(frac_digits))
    }

    pub fn radix(&self) -> u32 {
        self.radix
    }

    /// Number of fractional digits carried, `-lo`. Negative after scaling
    /// up past the radix point.
    pub fn frac_digits(&self) -> i64 {
        -self.lo
    }

    /// Lowest index of the stored window.
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Index of the most significant nonzero digit, `floor(log_p x)`.
    pub fn top_index(&self) -> Option<i64> {
        if self.digits.is_empty() {
            None
        } else {
            Some(self.lo + self.digits.len() as i64 - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    /// Digit at index `k`; zero outside the stored window.
    pub fn digit(&self, k: i64) -> u32 {
        if k < self.lo {
            return 0;
        }
        usize::try_from(k - self.lo)
            .ok()
            .and_then(|i| self.digits.get(i).copied())
            .unwrap_or(0)
    }

    /// Stored digits, little-endian from [`lo`](Self::lo).
    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Exact value `sum p^k d_k`.
    pub fn to_rational(&self) -> BigRational {
        let n = BigInt::from(horner(&self.digits, self.radix));
        BigRational::from_integer(n) * radix_pow(self.radix, self.lo)
    }

    /// `sum_{k=0}^{k_hi} p^k d_k`, the integer part.
    pub fn integer_part(&self) -> BigUint {
        let start = usize::try_from(-self.lo).unwrap_or(0);
        if start >= self.digits.len() {
            return BigUint::zero();
        }
        let n = horner(&self.digits[start..], self.radix);
        if self.lo > 0 {
            n * BigUint::from(self.radix).pow(self.lo as u32)
        } else {
            n
        }
    }

    /// The coarse graining operator `p^(-D) floor(p^D x)`: every digit below
    /// index `-D` is zeroed. The window is kept.
    pub fn coarse_grain(&self, depth: i64) -> Self {
        let cut = -depth;
        let mut out = self.clone();
        if cut > self.lo {
            let n = usize::try_from(cut - self.lo)
                .unwrap_or(usize::MAX)
                .min(out.digits.len());
            out.digits[..n].iter_mut().for_each(|d| *d = 0);
            out.trim();
        }
        out
    }

    /// `p^m x`, as a pure index shift: digit k of the result is digit k-m of x.
    pub fn scale_by_radix_power(&self, m: i64) -> Self {
        Self {
            radix: self.radix,
            lo: self.lo + m,
            digits: self.digits.clone(),
        }
    }

    /// Moves the window start to `-frac_digits`, padding with zeros or
    /// truncating low digits.
    pub fn with_frac_digits(&self, frac_digits: i64) -> Self {
        let new_lo = -frac_digits;
        let mut digits = Vec::new();
        if new_lo <= self.lo {
            if !self.digits.is_empty() {
                digits.resize((self.lo - new_lo) as usize, 0);
                digits.extend_from_slice(&self.digits);
            }
        } else {
            let drop = (new_lo - self.lo) as usize;
            if drop < self.digits.len() {
                digits.extend_from_slice(&self.digits[drop..]);
            }
        }
        let mut out = Self {
            radix: self.radix,
            lo: new_lo,
            digits,
        };
        out.trim();
        out
    }

    fn trim(&mut self) {
        while self.digits.last() == Some(&0) {
            self.digits.pop();
        }
    }
}

/// Alias for [`RadixFixed::to_rational`].
pub fn reconstruct(x: &RadixFixed) -> BigRational {
    x.to_rational()
}

fn check_radix(radix: u32) -> Result<()> {
    if radix < 2 {
        Err(Error::InvalidRadix { got: radix, min: 2 })
    } else {
        Ok(())
    }
}

fn write_digit(f: &mut fmt::Formatter<'_>, radix: u32, d: u32) -> fmt::Result {
    if radix <= 36 {
        let c = char::from_digit(d, radix).expect("digit below radix");
        write!(f, "{c}")
    } else {
        write!(f, "[{d}]")
    }
}

/// Prints `d_khi ... d_0 . d_-1 ... d_lo` followed by `_(p)`.
impl fmt::Display for RadixFixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hi = self.top_index().unwrap_or(0).max(0);
        let mut k = hi;
        while k >= 0 {
            write_digit(f, self.radix, self.digit(k))?;
            k -= 1;
        }
        if self.lo < 0 {
            f.write_str(".")?;
            while k >= self.lo {
                write_digit(f, self.radix, self.digit(k))?;
                k -= 1;
            }
        }
        write!(f, "_({})", self.radix)
    }
}
