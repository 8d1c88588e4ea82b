//! Local testing, plurality self-correction and extension of polynomial-like
//! functions on subsets and subvarieties of `F_q^n`.
//!
//! The crate is `no_std` (with `alloc`). Everything here is exact arithmetic
//! over small finite fields plus exhaustive or seeded Monte-Carlo enumeration;
//! file formats, reports and the command-line front end live in the
//! `polyspline` companion crate.
//!
//! ## Layout
//!
//! - [`field`] and [`space`]: `F_q = F_{p^l}`, its trace and additive
//!   character, and integer-encoded points of `V = F_q^n`.
//! - [`poly`], [`rank`]: reduced polynomial functions, interpolation,
//!   polarized multilinear forms, bias, and the `Q*R` rank.
//! - [`groupfun`]: `Z/N`-valued functions on subsets of `V`.
//! - [`cube`]: cubes, almost cubes, alternating sums, cube enumeration and
//!   rejection sampling, bad-cube statistics.
//! - [`variety`]: level sets of polynomial families and the line / solution
//!   counts that guarantee they contain many cubes.
//! - [`gowers`]: exact and Monte-Carlo `U_m` norms and set uniformity.
//! - [`linforms`]: Cauchy–Schwarz complexity of systems of linear forms and
//!   pattern counting.
//! - [`spline`]: the completion vote, splining on `X`, extension to `V`,
//!   and the affine-subspace tester.
#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bits;
pub mod cube;
pub mod error;
pub mod field;
pub mod gowers;
pub mod groupfun;
pub mod linforms;
pub mod par;
pub mod poly;
pub mod rank;
pub mod rng;
pub mod space;
pub mod spline;
pub mod stats;
pub mod variety;

pub use error::{Error, Result};
pub use field::{Elem, Field};
pub use groupfun::GroupFun;
pub use poly::PolyFun;
pub use space::{Point, Space};

/// Default cap on the number of elementary steps of any exhaustive operation.
pub const DEFAULT_BUDGET: u64 = 1 << 28;
