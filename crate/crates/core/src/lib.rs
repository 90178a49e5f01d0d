//! Exact symbolic computation for Poisson pseudoalgebra structures over
//! concrete cocommutative Hopf kernels.
//!
//! The crate builds up in layers:
//!
//! * [`scalar`]: arbitrary-precision rationals; the only scalar type.
//! * [`hopf`]: the two kernel families (polynomial with primitive generators,
//!   group algebras of finite abelian groups) and their Hopf operations.
//! * [`linalg`]: exact dense and sparse linear algebra over the rationals.
//! * [`module`]: modules over a kernel (free or finite-dimensional with
//!   explicit action matrices), module maps and gradings.
//! * [`polytensor`]: straightened tensors with outer Hopf coefficients, the
//!   normal form all bracket values live in, and the slot calculus on them.
//! * [`structure`]: bracket/product tables, law checking, and the suite
//!   runner producing [`report`] records.
//! * [`ore`]: one-variable extensions twisted by a derivation pair.
//! * [`current`]: current-type structures over a base Lie or Poisson algebra.
//! * [`annihilate`]: the dual algebra of a group kernel and the classical
//!   algebra obtained by tensoring it over the kernel.
//! * [`dg`]: graded combinators (opposite, tensor, quotient, cohomology,
//!   homomorphism checking, transport along isomorphisms).
//! * [`envelope`]: the truncated word-space model of the universal
//!   associative envelope of a bracket/product structure, with generator
//!   triples and induced maps.
//! * [`model`]: the text model language (parser and canonical printer).
//! * [`run`]: the verb dispatcher shared by the command-line front end.
//! * [`samples`]: deterministic sample model files used by tests and demos.

pub mod annihilate;
pub mod current;
pub mod dg;
pub mod envelope;
pub mod error;
pub mod hopf;
pub mod linalg;
pub mod model;
pub mod module;
pub mod ore;
pub mod polytensor;
pub mod report;
pub mod run;
pub mod samples;
pub mod scalar;
pub mod structure;
pub mod upoly;

pub use error::{Error, Result};
pub use scalar::Rat;
