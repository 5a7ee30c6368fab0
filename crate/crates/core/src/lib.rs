//! Finite-dimensional operator algebra for time-reversal symmetry.
//!
//! The crate represents antiunitary operators as a unitary followed by
//! entrywise complex conjugation, computes commutants and double commutants
//! of matrix sets through superoperator nullspaces, and certifies
//! (Kramers) degeneracy both pointwise on eigenvectors and algebraically
//! through the dimension gap between `{H}'` and `{H}''`.
//!
//! Module map:
//!
//! * [`linop`]: dense complex matrices, Hilbert–Schmidt geometry, Hermitian
//!   eigendecomposition with multiplicity clustering.
//! * [`antilinear`]: antiunitary operators, involution classes, the
//!   conjugation operator of a Hamiltonian's eigenbasis, `T = U K` splits.
//! * [`commutant`]: commutant/bicommutant bases and degeneracy certificates.
//! * [`kramers`]: time-reversal-invariant ensembles and the verification
//!   harness built on top of the previous three.
//! * [`spin`]: Pauli generators, slot-local spin representations and the
//!   antilinear intertwiner solver.
//! * [`cli`]: the `kramers-lab` command-line surface.

pub mod antilinear;
pub mod cli;
pub mod commutant;
pub mod error;
pub mod kramers;
pub mod linop;
pub mod sampling;
pub mod spin;

pub use antilinear::{AntiunitaryOp, InvolutionClass};
pub use commutant::{AlgebraBasis, DegeneracyCertificate};
pub use error::{Error, Premise, Result};
pub use linop::{ComplexMatrix, SpectrumReport, StateVector, ToleranceConfig};

pub use num_complex::Complex64;
