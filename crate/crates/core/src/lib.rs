//! Separability testing for small bipartite quantum states through a single,
//! explicitly constructed entanglement witness.
//!
//! The pipeline runs state -> pure-state decomposition -> biconcurrence matrix
//! `B` -> structured operator `A` -> symmetrized `Y` -> witness
//! `W = Y + C * P_asym`. A state is separable exactly when `W` vanishes on some
//! product vector; the optimizers in [`optimize`] search for such a vector and,
//! when one is found, turn it into a product decomposition of the state that
//! [`biconcurrence::verify_certificate`] checks independently.
//!
//! Modules:
//! - [`tensor`]: dense kernels, leg permutations, partial trace/transpose and
//!   dense or matrix-free spectral routines.
//! - [`states`]: states, decompositions, reference families, random ensembles
//!   and the PPT oracle.
//! - [`biconcurrence`]: the matrix `B`, the penalty forms and certificates.
//! - [`witness`]: structured operators `A`, `Y`, `W` and their contractions.
//! - [`optimize`]: minimizers and the separability verdict.
//! - [`choi`]: witness-to-map conversion and the fully-mixing probe.
//! - [`io`]: JSON formats shared with the command-line tool.

pub mod biconcurrence;
pub mod choi;
pub mod error;
pub mod io;
pub mod optimize;
pub mod rng;
pub mod states;
pub mod tensor;
pub mod witness;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;
/// Dense complex matrix (row-major index convention, see [`tensor`]).
pub type ComplexMatrix = nalgebra::DMatrix<C64>;
/// Column vector in a finite-dimensional Hilbert space.
pub type Ket = nalgebra::DVector<C64>;
