//! N-ary operators over the alphabet `{0, .., p-1}`.
//!
//! An operator is a table of `p^N` entries. Entry `n` is the result for the
//! argument tuple whose base-p expansion is `n = x_0 + p x_1 + ...`. The
//! table packs into a single code `R = sum a_n p^n`, so `a_n` is the n-th
//! base-p digit of `R`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::radix::{base_digits, horner};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MagmaOp {
    radix: u32,
    arity: usize,
    table: Vec<u32>,
    code: BigUint,
}

/// `p^N`, the number of table entries.
pub fn table_len(radix: u32, arity: usize) -> Result<usize> {
    if radix < 2 {
        return Err(Error::InvalidRadix { got: radix, min: 2 });
    }
    let arity_u32 = u32::try_from(arity).map_err(|_| Error::TableTooLarge { radix, arity })?;
    (radix as usize)
        .checked_pow(arity_u32)
        .filter(|&n| n <= isize::MAX as usize / 8)
        .ok_or(Error::TableTooLarge { radix, arity })
}

/// Packs a table into its code `R = sum a_n p^n`.
pub fn to_code(table: &[u32], radix: u32) -> Result<BigUint> {
    if radix < 2 {
        return Err(Error::InvalidRadix { got: radix, min: 2 });
    }
    if let Some(&bad) = table.iter().find(|&&a| a >= radix) {
        return Err(Error::DigitOutOfRange { digit: bad, radix });
    }
    Ok(horner(table, radix))
}

impl MagmaOp {
    /// Reads the table off the base-p digits of `code`.
    pub fn from_code(code: &BigUint, radix: u32, arity: usize) -> Result<Self> {
        let len = table_len(radix, arity)?;
        let mut table = base_digits(code, radix);
        if table.len() > len {
            return Err(Error::CodeOutOfRange {
                code: code.to_string(),
                radix,
                arity,
            });
        }
        table.resize(len, 0);
        Ok(Self {
            radix,
            arity,
            table,
            code: code.clone(),
        })
    }

    pub fn from_table(table: Vec<u32>, radix: u32, arity: usize) -> Result<Self> {
        let len = table_len(radix, arity)?;
        if table.len() != len {
            return Err(Error::TableLength {
                got: table.len(),
                expected: len,
            });
        }
        let code = to_code(&table, radix)?;
        Ok(Self {
            radix,
            arity,
            table,
            code,
        })
    }

    /// Parses a comma-separated table literal such as `0,1,1,1`.
    pub fn from_table_literal(text: &str, radix: u32, arity: usize) -> Result<Self> {
        let table = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::MalformedOperator(text.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_table(table, radix, arity)
    }

    /// Addition modulo p: `a_n = d_p(0, d_p(0,n) + d_p(1,n))`.
    pub fn mod_add(radix: u32) -> Result<Self> {
        Self::binary_from_fn(radix, |x, y| (x + y) % radix)
    }

    /// Carry out of a digit-pair sum: `a_n = d_p(1, d_p(0,n) + d_p(1,n))`.
    pub fn carry(radix: u32) -> Result<Self> {
        Self::binary_from_fn(radix, |x, y| (x + y) / radix)
    }

    fn binary_from_fn(radix: u32, f: impl Fn(u32, u32) -> u32) -> Result<Self> {
        let len = table_len(radix, 2)?;
        let table = (0..len)
            .map(|n| {
                let n = n as u32;
                f(n % radix, n / radix)
            })
            .collect();
        Self::from_table(table, radix, 2)
    }

    pub fn radix(&self) -> u32 {
        self.radix
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn code(&self) -> &BigUint {
        &self.code
    }

    /// Applies the operator to one digit per argument.
    pub fn apply(&self, args: &[u32]) -> Result<u32> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: args.len(),
            });
        }
        if let Some(&bad) = args.iter().find(|&&x| x >= self.radix) {
            return Err(Error::DigitOutOfRange {
                digit: bad,
                radix: self.radix,
            });
        }
        Ok(self.apply_unchecked(args))
    }

    /// `a[x_0 + p x_1 + ...]`; arguments must already be in range.
    #[inline]
    pub(crate) fn apply_unchecked(&self, args: &[u32]) -> u32 {
        let p = self.radix as usize;
        let index = args.iter().rev().fold(0usize, |acc, &x| acc * p + x as usize);
        self.table[index]
    }

    /// `a_{x+py} = a_{y+px}` for every digit pair.
    pub fn is_commutative(&self) -> Result<bool> {
        if self.arity != 2 {
            return Err(Error::NotBinary(self.arity));
        }
        let p = self.radix as usize;
        Ok((0..p).all(|x| (0..x).all(|y| self.table[x + p * y] == self.table[y + p * x])))
    }
}

/// `N:R:p`, e.g. `2:13903:3`.
impl fmt::Display for MagmaOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.arity, self.code, self.radix)
    }
}

impl FromStr for MagmaOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let malformed = || Error::MalformedOperator(s.to_string());
        let mut parts = s.trim().split(':');
        let (Some(n), Some(r), Some(p), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(malformed());
        };
        let arity: usize = n.trim().parse().map_err(|_| malformed())?;
        let code: BigUint = r.trim().parse().map_err(|_| malformed())?;
        let radix: u32 = p.trim().parse().map_err(|_| malformed())?;
        if arity == 0 {
            return Err(malformed());
        }
        Self::from_code(&code, radix, arity)
    }
}
