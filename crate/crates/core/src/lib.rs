//! Exact arithmetic for Carlitz-module special functions over F_{q^e}((pi)),
//! t-motive presentations, and finite-precision linear-relation search.

pub mod acceptance;
pub mod carlitz;
pub mod cli;
pub mod error;
pub mod expr;
pub mod field;
pub mod motive;
pub mod poly;
pub mod relations;
pub mod tate;

pub use error::{Error, ExtensionReason, Result};
pub use field::{Field, FieldConfig, LocalElement, EXACT};
pub use motive::{MotivePresentation, TPolyMatrix, TateMatrix};
pub use poly::{FqPoly, RatFun, TPoly};
pub use tate::{TailBound, TailKind, TailModel, TateSeries};
