//! Exact quadratic spaces over fields of characteristic 2.
//!
//! The crate covers GF(2^m) (m <= 16) and GF(2)(t): forms and their Witt
//! decomposition, orthogonal groups and their enumeration at small size,
//! classification and conjugacy of involutions, and the structure of their
//! fixed-point groups.

pub mod compact;
pub mod error;
pub mod field;
pub mod fixedpoints;
pub mod involutions;
pub mod linalg;
pub mod orthogroup;
pub mod quadspace;

pub use error::{Error, Result};
pub use field::{FieldElement, FieldSpec};
pub use linalg::{Mat, Subspace, Vector};
pub use quadspace::QuadForm;
