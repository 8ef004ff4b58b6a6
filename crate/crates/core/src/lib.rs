//! Finite-scale verification of bi-invariant norms on groups.
//!
//! The crate provides:
//!
//! * a [`GroupAdapter`] abstraction over finite normed groups, with
//!   [`Enumerated`] as the indexed view every exhaustive check runs on;
//! * concrete groups: permutations with the Hamming norm ([`perm`]),
//!   cyclic groups with the Lee norm ([`norms`]), `SL_n(F_p)` with the
//!   Jordan length ([`linear`]) and rational interval exchange
//!   transformations ([`iet`]);
//! * conjugate balls `C_N(g, G)`, normal generation numbers and the
//!   covering / bigness / uniformity scans built on them ([`coverage`]);
//! * finite-stage profiles of element sequences ([`ultraseq`]).
//!
//! Norm values are exact. Every rational-valued norm is generic over the
//! integer type backing [`num_rational::Ratio`]; the aliases below fix the
//! common choices.

pub mod cert;
pub mod coverage;
pub mod error;
pub mod group;
pub mod iet;
pub mod linear;
pub mod norms;
pub mod perm;
pub mod scalar;
pub mod ultraseq;

pub use cert::{ConjProductCert, Factor};
pub use error::{Error, Result};
pub use group::{Enumerated, GroupAdapter};
pub use scalar::{LogRatio, NormValue, Scalar};

/// Default exact rational used for thresholds and norm values.
pub type Q = num_rational::Ratio<i64>;
/// Arbitrary-precision rational.
pub type BigQ = num_rational::BigRational;

/// Symmetric or alternating group with `i64`-backed rational norms.
pub type SymGroup = perm::PermGroup<i64>;
/// `Z_m` with the Lee norm.
pub type LeeGroup = norms::CyclicLee<i64>;
/// `SL_n(F_p)` with the Jordan length.
pub type SlGroup = linear::SlGroup<i64>;
/// Interval exchange transformation with `i64` rationals.
pub type Iet = iet::IetMap<i64>;
/// Interval exchange transformation with arbitrary-precision rationals.
pub type BigIet = iet::IetMap<num_bigint::BigInt>;
/// Grid interval exchanges at a fixed resolution.
pub type GridIetGroup = iet::GridIet<i64>;
