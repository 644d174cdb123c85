//! Closed-form limiting cases of the maximal Fisher information.
//!
//! Each function here evaluates an analytic limit that the full pipeline must
//! approach when driven into the corresponding parameter regime. They share
//! no code with the generator construction, so agreement is evidence that the
//! pipeline has the right physics, not just the right linear algebra.

use num_complex::Complex64;

use crate::eig::{eigen_system, eigh, EigenSystem};
use crate::error::{QfiError, Result};
use crate::matrix::{max_abs_entry, HermitianMatrix};
use crate::qfi::{evaluate_point, QfiPoint};
use crate::spin::{build_hamiltonian, HamiltonianParams, SpinBasis};

/// Rotated frame for the noninteracting Hamiltonian: with u = 0,
///
/// ```text
///     -tau Jx + eps Jz = T (cos(phi) Jz + sin(phi) Jx),
///     T = sqrt(tau^2 + eps^2),  cos(phi) = eps / T,  sin(phi) = -tau / T,
/// ```
///
/// i.e. a spin precessing about a tilted axis at rate T.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltedFrame {
    pub big_t: f64,
    pub cos_phi: f64,
    pub sin_phi: f64,
}

impl TiltedFrame {
    pub fn new(tau: f64, eps: f64) -> Result<Self> {
        for (name, value) in [("tau", tau), ("eps", eps)] {
            if !value.is_finite() {
                return Err(QfiError::NonFiniteParam { name });
            }
        }
        let big_t = tau.hypot(eps);
        if big_t == 0.0 {
            return Err(QfiError::UndefinedFrame);
        }
        Ok(Self {
            big_t,
            cos_phi: eps / big_t,
            sin_phi: -tau / big_t,
        })
    }
}

/// Tilt law: without interaction and for long precession (T >> 1) the best
/// Fisher information saturates at
///
/// ```text
///     F_M -> N^2 eps^2 / (tau^2 + eps^2) = N^2 cos^2(phi).
/// ```
///
/// Only the Jz component of the tilted axis accumulates phase that survives
/// the average over the drive, so the Heisenberg term is weighted by the
/// squared projection onto Jz.
///
/// Only defined for the noninteracting well, so params.u must be exactly 0.
pub fn fisher_limit_no_interaction(params: &HamiltonianParams) -> Result<f64> {
    params.validate()?;
    if params.u != 0.0 {
        return Err(QfiError::NoninteractingRequired { u: params.u });
    }
    if params.n_atoms == 0 {
        return Err(QfiError::AtomsRequired);
    }
    let frame = TiltedFrame::new(params.tau, params.eps)?;
    let n = params.n_atoms as f64;
    Ok(n * n * frame.cos_phi * frame.cos_phi)
}

/// Strong interaction |u| -> infinity: the eigenbasis collapses onto the Jz
/// basis, the generator becomes Jz itself, and F_M -> N^2.
pub fn fisher_limit_strong_interaction(n_atoms: usize) -> Result<f64> {
    if n_atoms == 0 {
        return Err(QfiError::AtomsRequired);
    }
    let n = n_atoms as f64;
    Ok(n * n)
}

/// Limit of the generator when every energy scale is blown up, K -> x K with
/// x -> infinity: the weight w(x delta) dies off for delta != 0 and only
/// matrix elements of K' inside degenerate manifolds survive,
///
/// ```text
///     L_inf = sum_{manifold(m) = manifold(n)} |m><m|K'|n><n|.
/// ```
pub fn local_generator_large_scaling(
    eig: &EigenSystem,
    kprime: &HermitianMatrix,
) -> Result<HermitianMatrix> {
    let dim = eig.dim();
    if kprime.dim() != dim {
        return Err(QfiError::DimensionMismatch {
            expected: dim,
            got: kprime.dim(),
        });
    }
    let v = eig.eigenvectors();
    let mut m = v.adjoint() * kprime.as_matrix() * v;
    for row in 0..dim {
        for col in 0..dim {
            if eig.manifold_of(row) != eig.manifold_of(col) {
                m[(row, col)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    let lab = v * m * v.adjoint();
    HermitianMatrix::from_upper(lab, max_abs_entry(kprime.as_matrix()))
}

/// Overlap between the ground level of K and the NOON doublet
/// (|m = J> + e^{i phase} |m = -J>) / sqrt(2), maximized over the phase and
/// over states inside the (possibly degenerate) ground manifold:
///
/// ```text
///     max = (|P e_J|^2 + |P e_{-J}|^2) / 2 + |<P e_J | P e_{-J}>|,
/// ```
///
/// with P the ground-manifold projector. Working with the projector keeps
/// the answer stable when attraction splits the cat doublet only by an
/// exponentially small tunneling gap and the solver returns an arbitrary
/// mixture of the two cats.
///
/// Defined for the attractive symmetric well only: eps = 0 and u < 0.
pub fn noon_ground_state_overlap(params: &HamiltonianParams) -> Result<f64> {
    params.validate()?;
    if params.eps != 0.0 || params.u >= 0.0 {
        return Err(QfiError::AttractiveRegimeRequired {
            eps: params.eps,
            u: params.u,
        });
    }
    if params.n_atoms == 0 {
        return Err(QfiError::AtomsRequired);
    }
    let k = build_hamiltonian(params)?;
    let raw = eigh(&k)?;
    let tol = crate::eig::default_degeneracy_tol(&raw.eigenvalues);

    // Members of the ground manifold: chain gaps from the bottom.
    let mut ground = vec![0usize];
    for i in 1..raw.eigenvalues.len() {
        if raw.eigenvalues[i] - raw.eigenvalues[i - 1] <= tol {
            ground.push(i);
        } else {
            break;
        }
    }

    let dim = raw.eigenvalues.len();
    let top = 0; // basis index of |m = +J>
    let bottom = dim - 1; // basis index of |m = -J>
    let mut a2 = 0.0; // |P e_J|^2
    let mut b2 = 0.0; // |P e_-J|^2
    let mut cross = Complex64::new(0.0, 0.0); // <P e_J | P e_-J>
    for &g in &ground {
        let col = raw.eigenvectors.column(g);
        let ca = col[top].conj(); // <g|e_J>^* = <e_J|g>^H ... amplitude <g|e_J>
        let cb = col[bottom].conj();
        a2 += ca.norm_sqr();
        b2 += cb.norm_sqr();
        // <P e_J|P e_-J> = sum_g <e_J|g><g|e_-J>
        cross += ca.conj() * cb;
    }
    Ok(0.5 * (a2 + b2) + cross.norm())
}

/// Maximal Fisher information on the eps = 0 line. The symmetric well has
/// parity-degenerate levels; building the eigensystem with degeneracy
/// resolution against Jz is exactly what makes this line well defined, so
/// this is the pipeline evaluated at eps = 0 rather than a one-sided limit.
pub fn fisher_eps_zero(tau: f64, u: f64, n_atoms: usize) -> Result<QfiPoint> {
    let params = HamiltonianParams::new(tau, 0.0, u, n_atoms)?;
    evaluate_point(&params)
}

/// Convenience: the pipeline eigensystem for params (K resolved against Jz).
pub fn eigen_system_for(params: &HamiltonianParams) -> Result<EigenSystem> {
    let k = build_hamiltonian(params)?;
    let kprime = crate::spin::build_kprime(&SpinBasis::new(params.n_atoms));
    eigen_system(&k, &kprime)
}
