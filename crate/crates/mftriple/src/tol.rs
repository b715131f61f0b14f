//! Central tolerance constants. Group orders stay below 6000 and every value
//! entering a sum has modulus O(1), so accumulated f64 roundoff is far below
//! these thresholds.

/// Default absolute tolerance for complex equality.
pub const ABS: f64 = 1e-8;

/// Idempotence and self-adjointness of the primitive idempotent `psi`.
pub const PSI: f64 = 1e-9;

/// Rank decision threshold on singular values of intertwining systems.
pub const RANK: f64 = 1e-7;

/// Commutator sup-norm threshold is `COMMUTATOR_PER_ELEM * |G|`
/// (convolution sums accumulate `|G|` terms).
pub const COMMUTATOR_PER_ELEM: f64 = 1e-7;

/// Spherical Fourier inversion / Plancherel / convolution formula.
pub const FOURIER: f64 = 1e-7;

/// Residual above which a character inner product is rejected as non-integral.
pub const MULTIPLICITY: f64 = 1e-6;

/// Frobenius-Schur indicators must land this close to {1,-1,0}.
pub const FROBENIUS_SCHUR: f64 = 1e-6;

/// Closed-form spherical functions vs. matrix coefficients, first triple.
pub const SPHERICAL_T1: f64 = 1e-7;

/// Closed-form spherical functions vs. the engine, second triple.
pub const SPHERICAL_T2: f64 = 1e-6;

/// Second singular value bound certifying a rank-1 Gram factorization.
pub const RANK_ONE: f64 = 1e-6;

/// Normal-subgroup module checks (cocycle identities, functional equation).
pub const NORMAL: f64 = 1e-9;

/// Oracle (definitional brute force) vs. fast path agreement.
pub const ORACLE: f64 = 1e-8;

/// Kloosterman summation identities.
pub const KLOOSTERMAN: f64 = 1e-8;

/// Returns true when two complex numbers agree within `tol` absolutely.
pub fn close(a: num_complex::Complex64, b: num_complex::Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}
