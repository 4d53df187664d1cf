//! Exact linear algebra over the rationals and real number fields.

pub mod eigenspace;
pub mod factor;
pub mod field;
pub mod interval;
pub mod intpoly;
pub mod matrix;
pub mod numfield;
pub mod poly;
pub mod roots;
pub mod spectral;

pub use eigenspace::{large_component, LargeComponent};
pub use factor::{factor_int_poly, Factor};
pub use field::{Field, Q};
pub use interval::Interval;
pub use intpoly::IntPolynomial;
pub use matrix::{IntMatrix, Matrix};
pub use numfield::{NumberField, Scalar};
pub use poly::{Poly, QPoly};
pub use roots::{classify_roots, RootClass};
pub use spectral::{block_decomposition, perron_data, Block, BlockDecomposition, PerronData, Spectral};
