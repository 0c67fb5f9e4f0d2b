//! Numeric tolerances shared across the crate.

/// Amplitudes with magnitude below this are pruned from sparse vectors.
pub const PRUNE_TOL: f64 = 1e-12;

/// `inner(a, a)` at or below this marks a null-norm vector.
pub const NULL_NORM_TOL: f64 = PRUNE_TOL;

/// Hermiticity of one- and two-body matrix elements.
pub const MATRIX_ELEMENT_HERMITIAN_TOL: f64 = 1e-12;

/// Hermiticity required of a dense matrix handed to the eigensolver.
pub const SPECTRUM_HERMITIAN_TOL: f64 = 1e-10;

/// Per-pair eigen residual `|Hv - λv|` promised by [`crate::second_quant::spectrum`].
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-9;

/// Normalization of an initial state handed to time evolution.
pub const INITIAL_NORM_TOL: f64 = 1e-10;

/// Allowed norm drift during time evolution.
pub const EVOLUTION_NORM_TOL: f64 = 1e-9;

/// Residual of the projection onto the (anti)symmetric subspace.
pub const SYMMETRIZED_TOL: f64 = 1e-10;

/// Column norm below which Gram-Schmidt treats a projector column as dependent.
pub const ORTHOGONALIZATION_TOL: f64 = 1e-8;

/// Smallest tolerance a command-line override may request.
pub const MIN_TOL_OVERRIDE: f64 = 1e-14;
