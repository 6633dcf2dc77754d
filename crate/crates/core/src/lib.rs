//! Exact computational homological algebra over small commutative rings.
//!
//! The crate materializes Koszul-complex models of Čech (co-)homology,
//! derived completion and local cohomology at finite truncation levels, and
//! checks the structural statements relating them against a brute-force
//! finite-ring Čech oracle.  All arithmetic is exact: arbitrary-precision
//! integers and rationals, residues mod N, and finite commutative algebras
//! presented by structure constants.
//!
//! Module map:
//! - [`ring`]: the five supported coefficient rings and element arithmetic;
//! - [`linalg`]: normal forms (Smith, Howell), f.p. modules, classification;
//! - [`complex`]: bounded chain complexes, cone/fibre/tensor/Hom, homology;
//! - [`koszul`]: Koszul chain/cochain complexes, transitions, change of sequence;
//! - [`adic`]: truncated polynomial / inverse polynomial coefficients, the
//!   `x - U` Koszul avatars, directed systems, lim/lim¹/colim, telescopes;
//! - [`cech`]: finite-ring localization and the Čech oracle, the avatar
//!   computations of local cohomology and derived completion, pro-regularity;
//! - [`verify`]: the named machine checks and the suite runner.

pub mod arith;
pub mod error;
pub mod ring;
pub mod linalg;
pub mod complex;
pub mod koszul;
pub mod adic;
pub mod cech;
pub mod verify;

pub use error::{Error, Result};
pub use ring::{Ring, RingElem, RingSpec};
pub use linalg::{FpModule, Matrix, ModuleClassification};
pub use complex::{ChainComplex, ChainMap};
pub use koszul::SequenceContext;
