//! The generalized bitwise operator and its exact verifiers.
//!
//! `b_q(op; u_0, .., u_{N-1}) = sum_k q^k op(d_p(k,u_0), .., d_p(k,u_{N-1}))`
//! for `k` from the operands' lowest stored index up to `k_max`, the index of
//! the most significant nonzero operand digit.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::magma::MagmaOp;
use crate::radix::{digit, horner, radix_pow, RadixFixed};

/// Coefficient string produced by [`bitwise_eval`], read in powers of `q`.
///
/// Coefficients lie in `[0, p-1]`, not `[0, q-1]`: for `q < p` the value is
/// a polynomial in `q` rather than a radix-q numeral.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitwiseResult {
    in_radix: u32,
    out_radix: u32,
    lo: i64,
    coeffs: Vec<u32>,
}

impl BitwiseResult {
    pub fn in_radix(&self) -> u32 {
        self.in_radix
    }

    pub fn out_radix(&self) -> u32 {
        self.out_radix
    }

    /// Lowest summed index, `-F`.
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// `None` when every operand is zero and the sum is empty.
    pub fn k_max(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.lo + self.coeffs.len() as i64 - 1)
        }
    }

    /// Coefficient of `q^k`; zero outside the summed window.
    pub fn coeff(&self, k: i64) -> u32 {
        if k < self.lo {
            return 0;
        }
        usize::try_from(k - self.lo)
            .ok()
            .and_then(|i| self.coeffs.get(i).copied())
            .unwrap_or(0)
    }

    /// Little-endian coefficients starting at [`lo`](Self::lo).
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// Exact value `sum q^k c_k`.
    pub fn value(&self) -> BigRational {
        let n = BigInt::from(horner(&self.coeffs, self.out_radix));
        BigRational::from_integer(n) * radix_pow(self.out_radix, self.lo)
    }

    /// Nearest double to the exact value.
    pub fn to_f64(&self) -> f64 {
        self.value().to_f64().unwrap_or(f64::INFINITY)
    }

    /// `H = log_p q`.
    pub fn roughness_exponent(&self) -> f64 {
        roughness_exponent(self.in_radix, self.out_radix)
    }

    /// The same coefficients read in powers of another radix. Coefficients
    /// do not depend on `q`.
    pub fn with_out_radix(&self, q: u32) -> Result<Self> {
        check_out_radix(q)?;
        Ok(Self {
            out_radix: q,
            ..self.clone()
        })
    }

    /// The coefficients as radix-p digits, i.e. the value of `b_p`.
    pub fn to_radix_fixed(&self) -> RadixFixed {
        RadixFixed::from_digits(self.in_radix, self.lo, self.coeffs.clone())
            .expect("coefficients lie in the operator alphabet")
    }

    /// Coefficients from `k_max` down to `lo`, with a point between indices
    /// 0 and -1. Coefficients above 9 are bracketed. Empty sums print `0`.
    pub fn coefficient_string(&self) -> String {
        let Some(k_max) = self.k_max() else {
            return "0".to_string();
        };
        let mut out = String::new();
        let mut k = k_max.max(0);
        while k >= self.lo.min(0) {
            if k == -1 {
                out.push('.');
            }
            match self.coeff(k) {
                c @ 0..=9 => out.push(char::from(b'0' + c as u8)),
                c => out.push_str(&format!("[{c}]")),
            }
            k -= 1;
        }
        out
    }

    /// `q^(-D) floor(q^D b_q)`: zeroes every coefficient below index `-D`.
    pub fn coarse_grain(&self, depth: i64) -> Self {
        let cut = -depth;
        let mut out = self.clone();
        if cut > self.lo {
            let n = usize::try_from(cut - self.lo)
                .unwrap_or(usize::MAX)
                .min(out.coeffs.len());
            out.coeffs[..n].iter_mut().for_each(|c| *c = 0);
        }
        out
    }
}

/// `H = ln q / ln p`.
pub fn roughness_exponent(p: u32, q: u32) -> f64 {
    f64::from(q).ln() / f64::from(p).ln()
}

fn check_out_radix(q: u32) -> Result<()> {
    if q < 2 {
        Err(Error::InvalidRadix { got: q, min: 2 })
    } else {
        Ok(())
    }
}

fn check_operands(op: &MagmaOp, operands: &[RadixFixed]) -> Result<i64> {
    if operands.len() != op.arity() {
        return Err(Error::ArityMismatch {
            expected: op.arity(),
            got: operands.len(),
        });
    }
    if let Some(bad) = operands.iter().find(|u| u.radix() != op.radix()) {
        return Err(Error::RadixMismatch {
            expected: op.radix(),
            got: bad.radix(),
        });
    }
    let lo = operands.first().map(RadixFixed::lo).unwrap_or(0);
    if let Some(bad) = operands.iter().find(|u| u.lo() != lo) {
        return Err(Error::WindowMismatch(-lo, bad.frac_digits()));
    }
    Ok(lo)
}

/// Evaluates `b_q(op; operands)` exactly.
///
/// All operands must be in the operator's radix and share one precision
/// window. Zero operands do not contribute to `k_max`; if all are zero the
/// coefficient string is empty.
pub fn bitwise_eval(op: &MagmaOp, operands: &[RadixFixed], q: u32) -> Result<BitwiseResult> {
    check_out_radix(q)?;
    let lo = check_operands(op, operands)?;
    let k_max = operands.iter().filter_map(RadixFixed::top_index).max();
    let mut coeffs = Vec::new();
    if let Some(k_max) = k_max {
        let mut args = vec![0u32; operands.len()];
        coeffs.reserve((k_max - lo + 1) as usize);
        for k in lo..=k_max {
            for (slot, u) in args.iter_mut().zip(operands) {
                *slot = u.digit(k);
            }
            coeffs.push(op.apply_unchecked(&args));
        }
    }
    Ok(BitwiseResult {
        in_radix: op.radix(),
        out_radix: q,
        lo,
        coeffs,
    })
}

fn check_pair(a: &RadixFixed, b: &RadixFixed) -> Result<()> {
    if a.radix() != b.radix() {
        return Err(Error::RadixMismatch {
            expected: a.radix(),
            got: b.radix(),
        });
    }
    Ok(())
}

/// Digitwise addition modulo p, with no carries: `a +_p b`.
pub fn mod_p_add(a: &RadixFixed, b: &RadixFixed) -> Result<RadixFixed> {
    check_pair(a, b)?;
    let op = MagmaOp::mod_add(a.radix())?;
    Ok(bitwise_eval(&op, &[a.clone(), b.clone()], a.radix())?.to_radix_fixed())
}

/// Total carry contribution `sum p^(k+1) d_p(1, d_p(k,a) + d_p(k,b))`.
///
/// Carries do not cascade. The result keeps the operands' window.
pub fn carry_sum(a: &RadixFixed, b: &RadixFixed) -> Result<RadixFixed> {
    check_pair(a, b)?;
    let op = MagmaOp::carry(a.radix())?;
    let carries = bitwise_eval(&op, &[a.clone(), b.clone()], a.radix())?.to_radix_fixed();
    Ok(carries
        .scale_by_radix_power(1)
        .with_frac_digits(a.frac_digits()))
}

/// `a + b == (a +_p b) + (a carry_p b)` in exact arithmetic.
pub fn check_sum_decomposition(a: &RadixFixed, b: &RadixFixed) -> Result<bool> {
    let modular = mod_p_add(a, b)?;
    let carries = carry_sum(a, b)?;
    Ok(a.to_rational() + b.to_rational() == modular.to_rational() + carries.to_rational())
}

/// Self-affinity under scaling every operand by p.
///
/// Checks that the coefficient string of `b_q(op; p u)` is that of
/// `b_q(op; u)` shifted up by one index, and that `b_q(op; p u) = q b_q(op; u)`
/// exactly. Both must hold.
pub fn check_self_affinity(op: &MagmaOp, operands: &[RadixFixed], q: u32) -> Result<bool> {
    let base = bitwise_eval(op, operands, q)?;
    let scaled_operands: Vec<RadixFixed> = operands
        .iter()
        .map(|u| u.scale_by_radix_power(1))
        .collect();
    let scaled = bitwise_eval(op, &scaled_operands, q)?;

    let shifted = scaled.lo() == base.lo() + 1
        && scaled.k_max() == base.k_max().map(|k| k + 1)
        && (scaled.lo()..=scaled.k_max().unwrap_or(scaled.lo()))
            .all(|k| scaled.coeff(k) == base.coeff(k - 1));
    let value = scaled.value() == base.value() * BigRational::from_integer(q.into());
    Ok(shifted && value)
}

/// Outcome of [`check_coarse_limit`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoarseLimit {
    /// Radix-q digits of `b_q` equal the coefficient string.
    pub digit_match: bool,
    /// `(b_q - L) / L` with `L = floor(b_p / p^k_max) q^k_max`; `None` when
    /// the result is all zero or its leading coefficient is zero.
    pub rel_deviation: Option<BigRational>,
}

impl CoarseLimit {
    /// `0 <= rel_deviation < p / (q - 1)`; vacuously true when undefined.
    pub fn within_certified_bound(&self, p: u32, q: u32) -> bool {
        match &self.rel_deviation {
            None => true,
            Some(r) => {
                let bound = BigRational::new(p.into(), (q - 1).into());
                !r.is_negative() && *r < bound
            }
        }
    }
}

/// Compares `b_q` against its large-q asymptote `floor(b_p / p^k_max) q^k_max`.
pub fn check_coarse_limit(op: &MagmaOp, operands: &[RadixFixed], q: u32) -> Result<CoarseLimit> {
    if q < op.radix() {
        return Err(Error::OutputRadixTooSmall { p: op.radix(), q });
    }
    let b_q = bitwise_eval(op, operands, q)?;
    let value = b_q.value();

    let mut digit_match = true;
    if let Some(k_max) = b_q.k_max() {
        for k in b_q.lo()..=k_max + 1 {
            if digit(q, k, &value)? != b_q.coeff(k) {
                digit_match = false;
                break;
            }
        }
    }

    let rel_deviation = match b_q.k_max() {
        None => None,
        Some(k_max) => {
            let p = op.radix();
            let b_p = b_q.with_out_radix(p)?.value();
            let leading = (b_p / radix_pow(p, k_max)).floor();
            if leading.is_zero() {
                None
            } else {
                let asymptote = leading * radix_pow(q, k_max);
                Some((value - &asymptote) / asymptote)
            }
        }
    };

    Ok(CoarseLimit {
        digit_match,
        rel_deviation,
    })
}

/// Some `x` with `q^(-D) floor(q^D x) != floor(q^(-D) q^D x)`, i.e. showing
/// that scaling and flooring do not commute at this depth. `None` for
/// `D = 0`, where both sides are `floor(x)`.
pub fn noncommutation_witness(q: u32, depth: i64) -> Option<BigRational> {
    match depth {
        0 => None,
        d if d > 0 => Some(radix_pow(q, -d)),
        d => Some(radix_pow(q, -d - 1)),
    }
}

/// Returns `(q^(-D) floor(q^D x), floor(x))`.
pub fn scale_floor_pair(q: u32, depth: i64, x: &BigRational) -> (BigRational, BigRational) {
    let truncated = (x * radix_pow(q, depth)).floor() * radix_pow(q, -depth);
    let floored = (x * radix_pow(q, depth) * radix_pow(q, -depth)).floor();
    (truncated, floored)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn op(code: u64, p: u32) -> MagmaOp {
        MagmaOp::from_code(&BigUint::from(code), p, 2).unwrap()
    }

    fn int(p: u32, n: u64) -> RadixFixed {
        RadixFixed::from_scaled_integer(p, &BigUint::from(n), 0).unwrap()
    }

    fn dec(s: &str, p: u32, f: u32) -> RadixFixed {
        RadixFixed::from_decimal_str(s, p, f).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn or_of_five_and_eleven() {
        let r = bitwise_eval(&op(14, 2), &[int(2, 5), int(2, 11)], 2).unwrap();
        assert_eq!(r.coeffs(), &[1, 1, 1, 1]);
        assert_eq!(r.k_max(), Some(3));
        assert_eq!(r.value(), rat(15, 1));
        let r3 = bitwise_eval(&op(14, 2), &[int(2, 5), int(2, 11)], 3).unwrap();
        assert_eq!(r3.value(), rat(40, 1));
        assert_eq!(r3.coefficient_string(), "1111");
        let frac = bitwise_eval(&op(14, 2), &[dec("0.25", 2, 3), dec("0", 2, 3)], 2).unwrap();
        assert_eq!(frac.coefficient_string(), "0.010");
        assert_eq!(r3.roughness_exponent(), 3f64.ln() / 2f64.ln());
    }

    #[test]
    fn zero_operands_give_empty_sum() {
        // a_0 = 1 here; still zero because the sum is empty.
        let m = op(13903, 3);
        let zero = RadixFixed::zero(3, 4).unwrap();
        let r = bitwise_eval(&m, &[zero.clone(), zero], 3).unwrap();
        assert_eq!(r.k_max(), None);
        assert!(r.value().is_zero());
    }

    #[test]
    fn operand_validation() {
        let m = op(14, 2);
        assert!(matches!(
            bitwise_eval(&m, &[int(2, 1)], 2),
            Err(Error::ArityMismatch { expected: 2, got: 1 })
        ));
        assert!(matches!(
            bitwise_eval(&m, &[int(2, 1), int(3, 1)], 2),
            Err(Error::RadixMismatch { expected: 2, got: 3 })
        ));
        assert!(matches!(
            bitwise_eval(&m, &[dec("1", 2, 2), dec("1", 2, 3)], 2),
            Err(Error::WindowMismatch(..))
        ));
        assert!(matches!(
            bitwise_eval(&m, &[int(2, 1), int(2, 1)], 1),
            Err(Error::InvalidRadix { .. })
        ));
    }

    #[test]
    fn decimal_split_of_a_sum() {
        let a = dec("5.6782", 10, 4);
        let b = dec("3.6754", 10, 4);
        let m = mod_p_add(&a, &b).unwrap();
        let c = carry_sum(&a, &b).unwrap();
        assert_eq!(m.to_string(), "8.2436_(10)");
        assert_eq!(c.to_string(), "1.1100_(10)");
        assert_eq!(m.to_rational() + c.to_rational(), rat(93536, 10000));
        assert!(check_sum_decomposition(&a, &b).unwrap());
    }

    #[test]
    fn sum_split_edge_cases() {
        let a = dec("7.25", 10, 4);
        let zero = RadixFixed::zero(10, 4).unwrap();
        assert_eq!(mod_p_add(&a, &zero).unwrap().to_rational(), a.to_rational());
        assert!(carry_sum(&a, &zero).unwrap().is_zero());

        let half = dec("0.5", 10, 4);
        assert_eq!(carry_sum(&half, &half).unwrap().to_rational(), rat(1, 1));
        assert!(mod_p_add(&half, &half).unwrap().is_zero());

        let tenth = dec("0.1", 2, 8);
        assert!(mod_p_add(&tenth, &tenth).unwrap().is_zero());
        assert!(check_sum_decomposition(&zero, &zero).unwrap());
        assert!(matches!(
            mod_p_add(&a, &tenth),
            Err(Error::RadixMismatch { .. })
        ));
    }

    #[test]
    fn self_affinity_examples() {
        let m = op(14, 2);
        let u = [int(2, 5), int(2, 11)];
        assert!(check_self_affinity(&m, &u, 2).unwrap());
        let scaled = [int(2, 10), int(2, 22)];
        assert_eq!(bitwise_eval(&m, &scaled, 2).unwrap().value(), rat(30, 1));

        let zero = RadixFixed::zero(3, 2).unwrap();
        assert!(check_self_affinity(&op(13903, 3), &[zero.clone(), zero], 3).unwrap());

        // a_0 != 0 and fractional operands: the window travels with the shift.
        let frac = [dec("0.4", 3, 6), dec("2.7", 3, 6)];
        assert!(check_self_affinity(&op(13903, 3), &frac, 5).unwrap());
    }

    #[test]
    fn coarse_limit_single_digit() {
        let m = op(13903, 3);
        let r = check_coarse_limit(&m, &[int(3, 1), int(3, 0)], 7).unwrap();
        assert!(r.digit_match);
        assert_eq!(r.rel_deviation, Some(BigRational::zero()));
        assert!(matches!(
            check_coarse_limit(&m, &[int(3, 1), int(3, 0)], 2),
            Err(Error::OutputRadixTooSmall { p: 3, q: 2 })
        ));
    }

    #[test]
    fn coarse_limit_undefined_cases() {
        let m = op(13903, 3);
        let zero = RadixFixed::zero(3, 0).unwrap();
        let r = check_coarse_limit(&m, &[zero.clone(), zero], 3).unwrap();
        assert!(r.digit_match);
        assert_eq!(r.rel_deviation, None);
        // (1,1) maps to a_4 = 0, so the leading coefficient vanishes.
        let r = check_coarse_limit(&m, &[int(3, 1), int(3, 1)], 3).unwrap();
        assert_eq!(r.rel_deviation, None);
        assert!(r.within_certified_bound(3, 3));
    }

    #[test]
    fn coarse_limit_hand_computed() {
        // u = 5 = 12_3, v = 1 = 01_3: k=0 (2,1)->a_5=0, k=1 (1,0)->a_1=2.
        let m = op(13903, 3);
        let r = check_coarse_limit(&m, &[int(3, 5), int(3, 1)], 4).unwrap();
        assert!(r.digit_match);
        assert_eq!(r.rel_deviation, Some(BigRational::zero()));
        // u = 4 = 11_3, v = 0: k=0 (1,0)->2, k=1 (1,0)->2 => b_q = 2q + 2.
        let r = check_coarse_limit(&m, &[int(3, 4), int(3, 0)], 5).unwrap();
        assert_eq!(r.rel_deviation, Some(rat(2, 10)));
    }

    #[test]
    fn result_coarse_graining() {
        let m = op(9815, 3);
        let u = [dec("17.3", 3, 8), dec("42.9", 3, 8)];
        let r = bitwise_eval(&m, &u, 3).unwrap();
        assert_eq!(r.coarse_grain(8), r);
        assert_eq!(r.coarse_grain(20), r);
        let t = r.coarse_grain(0);
        let diff = r.value() - t.value();
        assert!(diff >= BigRational::zero() && diff < rat(1, 1));
        assert_eq!(t.value(), t.value().floor());
    }

    #[test]
    fn witnesses_break_commutation() {
        for q in [2u32, 3, 10] {
            assert_eq!(noncommutation_witness(q, 0), None);
            for depth in [-3i64, -2, -1, 1, 2, 3] {
                let x = noncommutation_witness(q, depth).unwrap();
                let (truncated, floored) = scale_floor_pair(q, depth, &x);
                assert_ne!(truncated, floored, "q={q} D={depth}");
            }
            let x = rat(7, 3);
            let (t, f) = scale_floor_pair(q, 0, &x);
            assert_eq!(t, f);
        }
    }

    #[test]
    fn coefficients_come_from_the_table() {
        let m = op(13903, 3);
        let u = [dec("123.456", 3, 7), dec("98.01", 3, 7)];
        let r = bitwise_eval(&m, &u, 11).unwrap();
        for k in r.lo()..=r.k_max().unwrap() {
            assert_eq!(r.coeff(k), m.apply(&[u[0].digit(k), u[1].digit(k)]).unwrap());
        }
    }
}
