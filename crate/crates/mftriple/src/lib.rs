//! Harmonic analysis for multiplicity-free induced representations of finite
//! groups: exact finite-field tables, generalized Kloosterman sums, the
//! representation theory of `GL(2,F_q)`, a generic Hecke-algebra engine with
//! spherical functions and a spherical Fourier transform, the normal-subgroup
//! (cocycle) specialization, and fully worked triples on `GL(2)` cross-checked
//! against brute-force oracles.

pub mod cli;
pub mod ff;
pub mod gl2;
pub mod group;
pub mod hecke;
pub mod kloosterman;
pub mod linalg;
pub mod normal;
pub mod oracle;
pub mod par;
pub mod reps;
pub mod tol;
pub mod triples;

pub use num_complex::Complex64;
