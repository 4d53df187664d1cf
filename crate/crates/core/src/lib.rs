//! Exact analysis of one-dimensional primitive substitution subshifts and the
//! tiling spaces obtained by suspending them under a tile-length function.
//!
//! The crate is organised bottom-up:
//!
//! - [`subst`]: substitution rules, matrices, fixed points, languages,
//!   recurrence and population vectors.
//! - [`algebra`]: exact linear algebra over the rationals and real number
//!   fields (characteristic polynomials, factorization, certified root
//!   classification by modulus, Perron data, rational block decomposition,
//!   membership in the small-eigenvalue subspace).
//! - [`spectrum`]: point-spectrum classification of the translation flow and
//!   eigenvalue-candidate verification.
//! - [`conjugacy`]: certificates and obstructions for topological conjugacy
//!   between tiling spaces with different tile lengths.
//! - [`io`]: the request file format, JSON reports, segment rendering and the
//!   analysis driver used by the `subtile` binary.
//!
//! Matrix convention: entry `(i, j)` of the substitution matrix counts the
//! occurrences of letter `i` in the image of letter `j`. Population vectors
//! are columns and transform as `v -> M v`; length vectors are rows, so the
//! length of an order-`m` supertile of letter `j` is `L M^m e_j`.

pub mod algebra;
pub mod conjugacy;
pub mod error;
pub mod io;
pub mod spectrum;
pub mod subst;

pub use algebra::{NumberField, Scalar};
pub use error::{Error, Result};
pub use spectrum::LengthVector;
pub use subst::{PopulationVector, Substitution};
