//! Maximal quantum Fisher information of a two-mode interferometer.
//!
//! N atoms in a double well realize a collective spin J = N/2. The crate
//! builds the two-site Hamiltonian K = -tau Jx + eps Jz + (u/N) Jz^2, finds
//! the hermitian generator L of small shifts in the well asymmetry `eps`,
//! and reports the largest quantum Fisher information any input state can
//! attain after evolving under K for unit time:
//!
//! ```text
//!     F_M = (ell_max - ell_min)^2,      f_M = F_M / N^2 <= 1,
//! ```
//!
//! where `ell_max`, `ell_min` bound the spectrum of L. The interferometer is
//! nonlinear (the interaction term is quadratic in Jz), yet f_M never exceeds
//! the Heisenberg scaling set by the range of Jz.

pub mod eig;
pub mod error;
pub mod limits;
pub mod matrix;
pub mod oracles;
pub mod qfi;
pub mod spin;
pub mod sweep;

pub use eig::{
    default_degeneracy_tol, eigen_system, eigh, matrix_exponential, resolve_degeneracies,
    EigenSystem, RawEigen,
};
pub use error::{QfiError, Result, SweepPointFailure};
pub use limits::{
    fisher_eps_zero, fisher_limit_no_interaction, fisher_limit_strong_interaction,
    local_generator_large_scaling, noon_ground_state_overlap, TiltedFrame,
};
pub use matrix::HermitianMatrix;
pub use oracles::{
    derivative_state_fd, derivative_state_fd_forward, quadrature_local_generator,
    random_state_fisher_sample, spectrum_respects_generator_bounds, BoundsReport,
};
pub use qfi::{
    derivative_state_pt, evaluate_point, evaluate_point_with, fisher_for_state, local_generator,
    local_generator_via_psi, max_fisher, optimal_input_state, perturbation_data, phase_weight,
    DegeneracyHandling, LocalGenerator, OptimalInput, PerturbationData, QfiPoint, StateVector,
};
pub use spin::{
    build_hamiltonian, build_jx, build_jy, build_jz, build_kprime, HamiltonianParams, SpinBasis,
};
pub use sweep::{
    richardson_extrapolate, sweep, u_sign_symmetry_report, ExtrapolationResult, SweepCell,
    SweepGrid,
};
