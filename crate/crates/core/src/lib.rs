//! Counting integral ideals in abelian number fields.
//!
//! The field is presented by a modulus and a unit subgroup; everything else
//! is derived from the attached group of primitive Dirichlet characters:
//! exact coefficient tables and the counting function via a segmented
//! multiplicative sieve, the zeta residue and special values from Dirichlet
//! L-functions, error-term scans against the classical exponent menagerie,
//! jointly coprime ideal-tuple counts via Möbius inversion, and the integer
//! program certifying the optimal moment split behind the error exponent.

pub mod arith;
pub mod config;
pub mod error;
pub mod field;
pub mod sieve;
pub mod special;

mod unitgroup;

pub use config::ComputeConfig;
pub use error::{Error, Result};
pub use field::{DirichletCharacter, FieldDescriptor, RootOfUnity, SplittingData};
pub use sieve::{ideal_count, sieve, sieve_streamed, CoefficientKind, CoefficientTable};
