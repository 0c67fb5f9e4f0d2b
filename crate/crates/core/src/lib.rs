//! Occupation-number Fock spaces built without particle labels.
//!
//! States are occupation assignments ([`OccupationState`]) and sparse complex
//! combinations of them ([`FockVector`]). Bosons use the symmetric product
//! `∘` and fermions the antisymmetric product `•`, both evaluated as
//! permutation sums of Kronecker deltas ([`inner`]). Ladder operators
//! ([`ladder`]) act on these states and their (anti)commutation relations are
//! checked numerically rather than assumed. The [`oracle`] module rebuilds the
//! same physics the conventional way, with labeled tensor products and
//! explicit (anti)symmetrizers, for cross-checking.

pub mod acceptance;
pub mod basis;
pub mod doc;
pub mod error;
pub mod fock;
pub mod inner;
pub mod ladder;
pub mod oracle;
pub mod sampling;
pub mod second_quant;
pub mod tolerance;

pub use basis::{Selector, TruncatedBasis};
pub use error::{QSpaceError, Result};
pub use fock::{
    modes, vec_add, vec_scale, Amplitude, FockSpace, FockVector, MadeState, ModeIndex,
    OccupationState, Sign, Statistics,
};
pub use inner::{basis_product, inner, is_null_norm, similar, OrderedVector, ProductKind};
pub use ladder::{
    apply, apply_boson, apply_expr, apply_fermion, commutator_check, Action, CommutatorReport,
    LadderOp, OperatorExpr,
};
pub use num_complex::Complex64;
pub use oracle::LabeledTensor;
pub use second_quant::{
    build_hamiltonian, evolve, matrix_in_basis, spectrum, CMatrix, CVector, MatrixElements,
    Spectrum,
};
