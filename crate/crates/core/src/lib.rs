//! Exact-arithmetic toolkit for Coxeter groups with edge labels in
//! {2, 3, infinity}: growth series of groups, parabolic quotients, and
//! reflection-subgroup quotients, plus a constructive certificate of
//! exponential growth built from an embedded universal reflection subgroup
//! on three generators.
//!
//! All computation is exact: group elements are integer matrices in the
//! geometric representation (which is faithful, so deduplication by matrix
//! is deduplication by group element), the bilinear form is stored doubled
//! so it is integral, growth counts are big integers, and every rank,
//! kernel, or classification question is settled by exact rational
//! elimination rather than floating point.
//!
//! ```
//! use coxgrowth_core::diagram::Diagram;
//! use coxgrowth_core::elements::standard_generators;
//! use coxgrowth_core::growth::enumerate_ball;
//!
//! // The universal Coxeter group on three generators grows like 3 * 2^k - 2.
//! let d = Diagram::universal(3);
//! let gens = standard_generators(&d).unwrap();
//! let table = enumerate_ball(&d, &gens, 6, 10_000).unwrap();
//! assert_eq!(table.gamma(6).to_string(), "190");
//! ```

pub mod diagram;
pub mod elements;
pub mod embed;
pub mod error;
pub mod growth;
mod linalg;
pub mod reflquot;
pub mod rootspace;

pub use diagram::{Diagram, DiagramClass, EdgeLabel};
pub use elements::Element;
pub use error::{Error, Result};
pub use growth::GrowthTable;
pub use rootspace::RootVector;
