//! Independent checks for the perturbative pipeline.
//!
//! Everything here recomputes a pipeline quantity by a method that shares no
//! code with the primary path: the state derivative by finite differences of
//! the exact evolution, the generator by numerical quadrature of its integral
//! representation, and the Fisher optimum by random-state sampling. They are
//! slower and less accurate by design; their job is to catch sign and
//! convention mistakes, not to be fast.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::eig::{eigen_system, matrix_exponential, EigenSystem};
use crate::error::{QfiError, Result};
use crate::matrix::{max_abs_entry, HermitianMatrix};
use crate::qfi::{local_generator, local_generator_via_psi, LocalGenerator, StateVector};
use crate::spin::{build_hamiltonian, build_kprime, HamiltonianParams};

fn evolution_at(params: &HamiltonianParams, eps: f64) -> Result<DMatrix<Complex64>> {
    let shifted = HamiltonianParams::new(params.tau, eps, params.u, params.n_atoms)?;
    let k = build_hamiltonian(&shifted)?;
    let kprime = build_kprime(&shifted.basis());
    let eig = eigen_system(&k, &kprime)?;
    Ok(matrix_exponential(&eig, Complex64::new(0.0, -1.0)))
}

/// Central finite difference of the evolved state:
/// (psi(eps + h) - psi(eps - h)) / (2h), with each endpoint evolved exactly.
///
/// `dtheta` must lie in [1e-8, 1e-2]: larger steps leave the O(h^2) regime,
/// smaller ones drown in cancellation.
pub fn derivative_state_fd(
    params: &HamiltonianParams,
    psi0: &StateVector,
    dtheta: f64,
) -> Result<DVector<Complex64>> {
    assert!(
        (1e-8..=1e-2).contains(&dtheta),
        "dtheta = {dtheta} outside [1e-8, 1e-2]"
    );
    params.validate()?;
    if psi0.dim() != params.n_atoms + 1 {
        return Err(QfiError::DimensionMismatch {
            expected: params.n_atoms + 1,
            got: psi0.dim(),
        });
    }
    let plus = evolution_at(params, params.eps + dtheta)? * psi0.amplitudes();
    let minus = evolution_at(params, params.eps - dtheta)? * psi0.amplitudes();
    Ok((plus - minus) / Complex64::new(2.0 * dtheta, 0.0))
}

/// Forward finite difference (psi(eps + h) - psi(eps)) / h. Only first-order
/// accurate; kept as the literal transcription of the derivative definition,
/// with the same step-range contract as the central form.
pub fn derivative_state_fd_forward(
    params: &HamiltonianParams,
    psi0: &StateVector,
    dtheta: f64,
) -> Result<DVector<Complex64>> {
    assert!(
        (1e-8..=1e-2).contains(&dtheta),
        "dtheta = {dtheta} outside [1e-8, 1e-2]"
    );
    params.validate()?;
    if psi0.dim() != params.n_atoms + 1 {
        return Err(QfiError::DimensionMismatch {
            expected: params.n_atoms + 1,
            got: psi0.dim(),
        });
    }
    let plus = evolution_at(params, params.eps + dtheta)? * psi0.amplitudes();
    let base = evolution_at(params, params.eps)? * psi0.amplitudes();
    Ok((plus - base) / Complex64::new(dtheta, 0.0))
}

/// Composite Simpson approximation of L = integral_0^1 U(x) K' U(x)^H dx
/// with U(x) = exp(-i x K). `nodes` must be odd and at least 3; the error
/// falls off as (nodes - 1)^-4.
pub fn quadrature_local_generator(
    eig: &EigenSystem,
    kprime: &HermitianMatrix,
    nodes: usize,
) -> Result<HermitianMatrix> {
    if nodes < 3 || nodes.is_multiple_of(2) {
        return Err(QfiError::BadNodeCount { nodes });
    }
    if kprime.dim() != eig.dim() {
        return Err(QfiError::DimensionMismatch {
            expected: eig.dim(),
            got: kprime.dim(),
        });
    }
    let dim = eig.dim();
    let h = 1.0 / (nodes - 1) as f64;
    let mut sum = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for i in 0..nodes {
        let x = i as f64 * h;
        let weight = if i == 0 || i == nodes - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let forward = matrix_exponential(eig, Complex64::new(0.0, -x));
        let term = &forward * kprime.as_matrix() * forward.adjoint();
        sum += term * Complex64::new(weight * h / 3.0, 0.0);
    }
    HermitianMatrix::from_upper(sum, max_abs_entry(kprime.as_matrix()))
}

/// Containment report: the generator spectrum against [-N/2, N/2].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub half_range: f64,
    pub ell_max: f64,
    pub ell_min: f64,
    /// half_range - ell_max: negative means the top of the spectrum pokes out.
    pub upper_margin: f64,
    /// ell_min + half_range: negative means the bottom pokes out.
    pub lower_margin: f64,
    /// Both margins within the 1e-8 slack.
    pub pass: bool,
}

pub fn spectrum_respects_generator_bounds(gen: &LocalGenerator, n_atoms: usize) -> BoundsReport {
    let half_range = n_atoms as f64 / 2.0;
    let upper_margin = half_range - gen.ell_max();
    let lower_margin = gen.ell_min() + half_range;
    BoundsReport {
        half_range,
        ell_max: gen.ell_max(),
        ell_min: gen.ell_min(),
        upper_margin,
        lower_margin,
        pass: upper_margin >= -1e-8 && lower_margin >= -1e-8,
    }
}

/// Draws `n_samples` Haar-like states (standard complex normal amplitudes,
/// normalized), evaluates each one's Fisher information under the generator,
/// and returns the largest value seen. Never exceeds F_M.
pub fn random_state_fisher_sample(
    params: &HamiltonianParams,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    assert!(n_samples >= 1, "need at least one sample");
    params.validate()?;
    if params.n_atoms == 0 {
        return Err(QfiError::AtomsRequired);
    }
    let k = build_hamiltonian(params)?;
    let kprime = build_kprime(&params.basis());
    let eig = eigen_system(&k, &kprime)?;
    let gen = local_generator(&eig, &kprime)?;

    let dim = params.n_atoms + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut best = f64::NEG_INFINITY;
    for _ in 0..n_samples {
        let raw = DVector::from_iterator(
            dim,
            (0..dim).map(|_| {
                let re: f64 = normal.sample(&mut rng);
                let im: f64 = normal.sample(&mut rng);
                Complex64::new(re, im)
            }),
        );
        let psi = StateVector::normalized(raw)?;
        best = best.max(local_generator_via_psi(&psi, &gen));
    }
    Ok(best)
}
