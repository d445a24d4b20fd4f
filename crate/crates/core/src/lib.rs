//! Fermionic descriptors: the Heisenberg-picture ontic state space of a
//! system of fermionic modes under parity superselection.
//!
//! Conventions shared by every module:
//! - modes are `0..N`, annihilators use the Jordan–Wigner form
//!   `f_i = Z^{⊗i} ⊗ σ⁻ ⊗ I` with `Z = diag(1, -1)`;
//! - the Fock basis index is `b = Σ n_i 2^{N-1-i}`, so mode 0 is the most
//!   significant bit and `|n⟩ = f†_{i_1} ⋯ f†_{i_k} |Ω⟩` with `i_1 < ⋯ < i_k`
//!   is exactly the basis vector `e_b`;
//! - a state or operator on a subsystem `S` lives on `S`'s own Fock space,
//!   its modes relabelled `0..|S|` in increasing order.

pub mod algebra;
pub mod descriptors;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod serial;
pub mod states;
pub mod transformations;
pub mod verification;

pub use algebra::{Grade, LadderFamily, MonomialBasis, Pauli};
pub use descriptors::{
    compatible, equivalent_at, evolve_descriptors, join, ontic_apply, ontic_project, phenomenal_of,
    reconstruct_unitary, Compatibility, DescriptorSet,
};
pub use error::{Error, Result};
pub use fock::{FockOperator, FockSpace, FockVector, LadderKind, ModeSet, DEFAULT_MODE_CAP};
pub use linalg::{CMatrix, CVector};
pub use num_complex::Complex64;
pub use states::{partial_trace, PhenomenalState};
pub use transformations::{exp_hamiltonian, named_gate, random_ps_unitary, NamedGate, PSUnitary};
pub use verification::{CheckResult, ControlMode, Instance, SweepConfig};
