//! Numerical tolerances shared by the library, its checks and the CLI verdicts.

/// Relative Frobenius residual for eigendecomposition reconstruction.
pub const RECONSTRUCTION: f64 = 1e-10;
/// Absolute tolerance for Hermiticity checks.
pub const HERMITICITY: f64 = 1e-12;
/// Eigenvalue floor used before taking logarithms of states.
pub const EIG_CLIP: f64 = 1e-14;
/// Eigenvector condition estimate above which a matrix is treated as defective.
pub const NEAR_DEFECTIVE: f64 = 1e8;
/// Below this condition estimate the propagator may be assembled from an eigenbasis.
pub const EIG_FAST_PATH: f64 = 1e6;

/// Relative distance of `|r|` from `s` treated as the exceptional point.
pub const EXCEPTIONAL: f64 = 1e-12;
/// Tolerance for `psi = pi/2`.
pub const PSI: f64 = 1e-12;

/// Anticommutator, ladder and F-basis identities.
pub const ALGEBRA: f64 = 1e-12;
/// Biorthonormality, pseudo-Hermiticity and eigen-equation residuals.
pub const BIORTHO: f64 = 1e-10;

/// Unit trace of coefficient matrices.
pub const COEFF_TRACE: f64 = 1e-12;
/// Positivity slack for coefficient matrices.
pub const COEFF_POSITIVITY: f64 = 1e-12;
/// Unit trace of generalized density matrices.
pub const STATE_TRACE: f64 = 1e-10;
/// Imaginary part above which an eigenvalue of a state is rejected.
pub const IMAG_EIGENVALUE: f64 = 1e-9;
/// Agreement between closed-form and numerical state eigenvalues.
pub const LAMBDA_AGREEMENT: f64 = 1e-10;
/// Tolerance for re-projecting evolved states onto the biorthonormal basis.
pub const REPROJECTION: f64 = 1e-9;

/// Ergotropy non-negativity slack.
pub const ERGOTROPY_FLOOR: f64 = 1e-10;
/// Agreement between closed-form and numerical ergotropy.
pub const ERGOTROPY_AGREEMENT: f64 = 1e-10;
/// Hermiticity required of a reconstructed coefficient matrix for the closed-form cross-check.
pub const CROSS_CHECK_HERMITIAN: f64 = 1e-8;

/// Trace preservation along trajectories.
pub const TRAJECTORY_TRACE: f64 = 1e-9;
/// Residual bound on `U‡U - I` in the unbroken phase.
pub const ETA_UNITARITY: f64 = 1e-8;
/// Bath tail mass above which a truncation warning is emitted.
pub const TAIL_MASS_WARNING: f64 = 0.01;

/// First-law balance `|dU - dW + dQ_B|`.
pub const FIRST_LAW: f64 = 1e-8;
/// Entropy production floor.
pub const SECOND_LAW: f64 = 1e-10;
/// Imaginary residue tolerated (and discarded) in energy traces.
pub const ENERGY_IMAG_DISCARD: f64 = 1e-9;
/// Imaginary residue above which an energy is rejected.
pub const ENERGY_IMAG_ERROR: f64 = 1e-8;
/// Negative eigenvalue tolerated in entropy evaluation.
pub const ENTROPY_NEGATIVITY: f64 = 1e-8;
/// Skew-Hermitian residue tolerated after rotating a state into its metric frame.
pub const FRAME_HERMITICITY: f64 = 1e-9;
/// Weight outside the reference support that makes a relative entropy infinite.
pub const SUPPORT: f64 = 1e-10;
/// Entropy bounds slack.
pub const ENTROPY_BOUNDS: f64 = 1e-10;
/// Weak-coupling third-law bound on `max_t S` at the lowest temperature.
pub const THIRD_LAW_BOUND: f64 = 0.05;
