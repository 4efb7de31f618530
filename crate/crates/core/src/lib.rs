//! Two-qubit entanglement detection through Partial Lorentz Transformations.
//!
//! A two-qubit density matrix is mapped to a real 4×4 tensor on Minkowski
//! space. Local SL(2,C) filtering on either qubit acts on that tensor as a
//! proper orthochronous Lorentz transformation, so every state can be brought
//! to a canonical form (the Lorentzian singular value decomposition). The
//! canonical singular values decide separability through the strong energy
//! condition, and the canonical frames give an explicit separable
//! decomposition whenever one exists.
//!
//! Module map:
//!
//! * [`spacetime`]: four-vectors, Lorentz transformations and tetrads.
//! * [`qubit_map`]: density matrices and their spacetime tensors.
//! * [`lsvd`]: Lorentzian singular value decomposition.
//! * [`classify`]: energy conditions, state conditions and the verdict.
//! * [`separate`]: explicit separable decompositions.
//! * [`oracle`]: partial transpose ground truth and test-state generation.
//! * [`io`]: density matrix file formats.

// `!(x <= y)` is how NaN inputs get rejected; tensor loops index by μ, ν.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod classify;
pub mod error;
pub mod io;
pub mod jacobi;
pub mod lsvd;
pub mod oracle;
pub mod qubit_map;
pub mod quartic;
pub mod region;
pub mod separate;
pub mod spacetime;
pub mod tolerance;

pub use classify::{
    energy_conditions, partial_transpose_mu, state_conditions, verdict, EnergyReport, Status,
    Verdict,
};
pub use error::{Error, Result};
pub use lsvd::{lsvd, reconstruct_a, LsvdResult, SignClass, StateType};
pub use oracle::{make_state, partial_transpose, ppt_verdict, PptVerdict, StateRecipe};
pub use qubit_map::{a_to_rho, rho_to_a, DensityMatrix, IndexPosition, MinkowskiMap};
pub use separate::{separable_decomposition, verify_decomposition, SeparableDecomposition};
pub use spacetime::{CausalClass, FourVector, LorentzTransform, Tetrad};
pub use tolerance::Tolerances;

/// Complex scalar used for density matrix entries.
pub type C64 = num_complex::Complex64;
