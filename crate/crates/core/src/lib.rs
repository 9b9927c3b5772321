//! Exact digit calculus and generalized bitwise operators on real numbers.
//!
//! Numbers are held as exact radix-p digit strings ([`RadixFixed`]). An
//! N-ary operator on the digit alphabet ([`MagmaOp`]) is applied to every
//! digit position of its operands independently, and the resulting
//! coefficient string is read in powers of a second radix q
//! ([`bitwise_eval`]). Over the plane this gives self-affine "patchwork
//! quilt" surfaces with roughness exponent `H = log_p q` ([`surface`]).
//!
//! ```
//! use patchwork::{bitwise_eval, BigRational, MagmaOp, RadixFixed};
//!
//! let or: MagmaOp = "2:14:2".parse().unwrap();
//! let u = RadixFixed::from_decimal_str("5", 2, 0).unwrap();
//! let v = RadixFixed::from_decimal_str("11", 2, 0).unwrap();
//! let b = bitwise_eval(&or, &[u, v], 2).unwrap();
//! assert_eq!(b.value(), BigRational::from_integer(15.into()));
//! ```

pub mod bitwise;
pub mod error;
pub mod export;
pub mod magma;
pub mod radix;
pub mod suite;
pub mod surface;

pub use bitwise::{
    bitwise_eval, carry_sum, check_coarse_limit, check_self_affinity, check_sum_decomposition,
    mod_p_add, noncommutation_witness, roughness_exponent, BitwiseResult, CoarseLimit,
};
pub use error::{Error, Result};
pub use magma::{to_code, MagmaOp};
pub use radix::{
    digit, format_decimal, mixed_radix_identity_check, parse_decimal, reconstruct, RadixFixed,
    DEFAULT_FRAC_DIGITS,
};
pub use surface::{
    pointwise_identity_field, q_sweep, sample_surface, symmetry_probe, Domain, Field, Resolution,
    SurfaceGrid, SurfaceSpec, Workers,
};

pub use num_bigint::BigUint;
pub use num_rational::BigRational;
