//! Exact-arithmetic toolkit for shuffle algebras over ordered alphabets and
//! the unitriangular groups that probe them.
//!
//! The crate has three layers:
//!
//! * combinatorics of words: Lyndon words, Chen-Fox-Lyndon factorization,
//!   necklace counts ([`words`], [`arith`]);
//! * the shuffle algebra itself: exact integer word polynomials, shuffle and
//!   infiltration products, Radford's triangular basis, and the mod-p
//!   indecomposable quotient ([`poly`], [`indec`]);
//! * unitriangular groups over Z/p^k with their lower p-central series, and
//!   the truncated Magnus expansion connecting free-group words to those
//!   groups ([`unipotent`], [`magnus`]).
//!
//! Everything is computed in exact integer or residue arithmetic; there are
//! no floats anywhere. [`verify`] bundles the cross-checks the CLI exposes as
//! `shuffle-lab verify`.

pub mod arith;
pub mod indec;
pub mod magnus;
pub mod poly;
pub mod unipotent;
pub mod verify;
pub mod words;

mod error;

pub use error::Error;
pub use indec::{IndecReport, IntMatrix, LyndonBasisReport, ModPVector};
pub use magnus::{GroupWord, TruncSeries};
pub use poly::WordPoly;
pub use unipotent::{FiniteGroupSet, Modulus, QuotientGroup, UniMatrix};
pub use words::{Alphabet, CflFactorization, Word};

/// Default seed for every randomized check; reports echo whatever seed ran.
pub const DEFAULT_SEED: u64 = 42;

pub type Result<T> = std::result::Result<T, Error>;
