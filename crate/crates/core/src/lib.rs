//! Non-stabilizerness of pure qudit chain states through the discrete Wigner
//! function.
//!
//! The crate is `no_std` (it needs `alloc`). It covers:
//!
//! * [`qudit`]: generalized Pauli strings `T_u` and phase-space point
//!   operators `A_u` acting on computational-basis amplitudes,
//! * [`chain`]: the three-state quantum Potts Hamiltonian (and its self-dual
//!   extension) applied matrix-free, plus a Lanczos ground-state solver,
//! * [`wigner`]: Wigner values `Tr(A_u rho)` of a state and of its reduced
//!   states, point-wise and as full tables,
//! * [`measures`]: mana, mana entropies, stabilizer entropies, nullity and
//!   the min-relative entropy of magic,
//! * [`sampler`]: Metropolis sampling of `|W|^beta`, thermodynamic
//!   integration of mana and the mutual-mana ratio estimator.
//!
//! Enable the `rayon` feature to parallelise the heavy loops. Results do not
//! depend on the thread count: all reductions use fixed chunking.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod chain;
pub mod error;
pub mod measures;
pub mod qudit;
pub mod sampler;
pub mod state;
pub mod wigner;

mod par;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use qudit::{PhaseExponent, PhasePoint, PrimeDim};
pub use state::StateVector;
