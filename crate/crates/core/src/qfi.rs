//! Quantum Fisher information of the interferometer.
//!
//! The probe evolves for unit time under K(eps), and the quantity measured is
//! the sensitivity of the output state to the well asymmetry. For a pure
//! state psi(eps) = exp(-i K(eps)) psi0 the Fisher information is
//!
//! ```text
//!     F = 4 [ <dpsi|dpsi> - |<psi|dpsi>|^2 ].
//! ```
//!
//! All the dependence on eps is carried by the Hermitian generator
//! L = i (dU/deps) U^H, which in the K eigenbasis reads
//!
//! ```text
//!     <m|L|n> = w(lambda_n - lambda_m) <m|K'|n>,
//!     w(delta) = (1 - exp(i delta)) / (-i delta) = exp(i delta/2) sinc(delta/2),
//! ```
//!
//! so that dpsi = -i L psi and F = 4 Var_psi(L). The best input state is an
//! equal superposition of the extremal eigenvectors of L, pulled back through
//! the evolution, and it reaches F_M = (ell_max - ell_min)^2. Since the
//! entries of K' = Jz lie in [-N/2, N/2], so does the spectrum of L, which
//! caps the scaled Fisher information f_M = F_M / N^2 at 1.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::eig::{eigen_system, eigh, matrix_exponential, resolve_degeneracies, EigenSystem};
use crate::error::{QfiError, Result};
use crate::matrix::{max_abs_entry, HermitianMatrix};
use crate::spin::{build_hamiltonian, build_kprime, HamiltonianParams};

/// Normalized pure state in the |J, m> basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    /// Accepts `amplitudes` already normalized to 1 within 1e-12.
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(QfiError::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes `raw`; a numerically zero vector is rejected.
    pub fn normalized(raw: DVector<Complex64>) -> Result<Self> {
        let norm = raw.norm();
        if norm <= 1e-300 {
            return Err(QfiError::ZeroNorm);
        }
        Ok(Self {
            amplitudes: raw / Complex64::new(norm, 0.0),
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    /// <self|other>.
    pub fn overlap(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// Spectral weight w(delta) = (1 - e^{i delta}) / (-i delta), the average of
/// e^{i x delta} over x in [0, 1]. w(0) = 1 exactly; |w| <= 1; conjugate
/// symmetric under delta -> -delta, which keeps the generator Hermitian.
pub fn phase_weight(delta: f64) -> Complex64 {
    let half = 0.5 * delta;
    let sinc = if half.abs() < 1e-6 {
        // sin(h)/h = 1 - h^2/6 + O(h^4); the quartic term is below 1e-25 here.
        1.0 - half * half / 6.0
    } else {
        half.sin() / half
    };
    Complex64::new(0.0, half).exp() * sinc
}

/// First-order response of the eigensystem to a shift in eps.
///
/// `xi[n] = <n|K'|n>` is the eigenvalue slope; column n of `phi` is the
/// eigenvector derivative `|phi_n> = sum_m |m><m|K'|n> / (lambda_n -
/// lambda_m)` over states m outside the manifold of n. Inside a resolved
/// manifold K' has no off-diagonal matrix elements, so nothing is lost by
/// skipping those terms, and the division never sees a near-zero gap.
#[derive(Debug, Clone)]
pub struct PerturbationData {
    xi: DVector<f64>,
    phi: DMatrix<Complex64>,
}

impl PerturbationData {
    pub fn xi(&self) -> &DVector<f64> {
        &self.xi
    }

    /// Eigenvector derivatives in the lab basis, one column per eigenstate.
    pub fn phi(&self) -> &DMatrix<Complex64> {
        &self.phi
    }
}

pub fn perturbation_data(eig: &EigenSystem, kprime: &HermitianMatrix) -> Result<PerturbationData> {
    let dim = eig.dim();
    if kprime.dim() != dim {
        return Err(QfiError::DimensionMismatch {
            expected: dim,
            got: kprime.dim(),
        });
    }
    let v = eig.eigenvectors();
    let m = v.adjoint() * kprime.as_matrix() * v;

    let xi = DVector::from_iterator(dim, (0..dim).map(|n| m[(n, n)].re));

    let mut coeffs = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for n in 0..dim {
        for row in 0..dim {
            if eig.manifold_of(row) == eig.manifold_of(n) {
                continue;
            }
            let gap = eig.eigenvalues()[n] - eig.eigenvalues()[row];
            coeffs[(row, n)] = m[(row, n)] / Complex64::new(gap, 0.0);
        }
    }
    let phi = v * coeffs;
    Ok(PerturbationData { xi, phi })
}

/// Hermitian generator of eps shifts, with its spectral range.
#[derive(Debug, Clone)]
pub struct LocalGenerator {
    matrix: HermitianMatrix,
    ell_max: f64,
    ell_min: f64,
    eigvec_max: DVector<Complex64>,
    eigvec_min: DVector<Complex64>,
}

impl LocalGenerator {
    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn ell_max(&self) -> f64 {
        self.ell_max
    }

    pub fn ell_min(&self) -> f64 {
        self.ell_min
    }

    /// Eigenvector of the largest generator eigenvalue (lab basis).
    pub fn eigvec_max(&self) -> &DVector<Complex64> {
        &self.eigvec_max
    }

    pub fn eigvec_min(&self) -> &DVector<Complex64> {
        &self.eigvec_min
    }

    /// Spectral range ell_max - ell_min.
    pub fn range(&self) -> f64 {
        self.ell_max - self.ell_min
    }

    /// True when the range collapses to roundoff: every state is equally
    /// (in)sensitive and there is no superposition to prepare.
    pub fn is_degenerate(&self) -> bool {
        let scale = self.ell_max.abs().max(self.ell_min.abs()).max(1.0);
        self.range() <= 1e-12 * scale
    }
}

/// Builds L = V [w(lambda_n - lambda_m) . (V^H K' V)] V^H and decomposes it.
pub fn local_generator(eig: &EigenSystem, kprime: &HermitianMatrix) -> Result<LocalGenerator> {
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
            let delta = eig.eigenvalues()[col] - eig.eigenvalues()[row];
            m[(row, col)] *= phase_weight(delta);
        }
    }
    let lab = v * m * v.adjoint();
    let matrix = HermitianMatrix::from_upper(lab, max_abs_entry(kprime.as_matrix()))?;

    let spectrum = eigh(&matrix)?;
    let ell_min = spectrum.eigenvalues[0];
    let ell_max = spectrum.eigenvalues[dim - 1];
    Ok(LocalGenerator {
        matrix,
        ell_max,
        ell_min,
        eigvec_max: spectrum.eigenvectors.column(dim - 1).into_owned(),
        eigvec_min: spectrum.eigenvectors.column(0).into_owned(),
    })
}

/// (F_M, f_M) = ((ell_max - ell_min)^2, F_M / N^2), with the spectral-range
/// bound f_M <= 1 + 1e-8 enforced.
pub fn max_fisher(gen: &LocalGenerator, n_atoms: usize) -> Result<(f64, f64)> {
    if n_atoms == 0 {
        return Err(QfiError::AtomsRequired);
    }
    let range = gen.range();
    let fisher_max = range * range;
    let n = n_atoms as f64;
    let fisher_scaled = fisher_max / (n * n);
    if fisher_scaled > 1.0 + 1e-8 {
        return Err(QfiError::BoundExceeded {
            value: fisher_scaled,
        });
    }
    Ok((fisher_max, fisher_scaled))
}

/// Optimal probe state, plus a flag for the degenerate-generator corner.
#[derive(Debug, Clone)]
pub struct OptimalInput {
    pub state: StateVector,
    /// Set when the generator range is zero to roundoff; the returned state
    /// is then a single extremal eigenvector and carries no sensitivity.
    pub degenerate_generator: bool,
}

/// Input state whose evolved image is the balanced superposition
/// (|ell_max> + e^{i rel_phase} |ell_min>) / sqrt(2): the state is pulled
/// back through exp(+i K) so that the interferometer maps it onto the
/// extremal superposition at readout.
pub fn optimal_input_state(
    eig: &EigenSystem,
    gen: &LocalGenerator,
    rel_phase: f64,
) -> Result<OptimalInput> {
    let degenerate = gen.is_degenerate();
    let target = if degenerate {
        gen.eigvec_max().clone()
    } else {
        let phase = Complex64::new(0.0, rel_phase).exp();
        let sum = gen.eigvec_max() + gen.eigvec_min() * phase;
        sum / Complex64::new(std::f64::consts::SQRT_2, 0.0)
    };
    let backward = matrix_exponential(eig, Complex64::new(0.0, 1.0));
    let state = StateVector::normalized(backward * target)?;
    Ok(OptimalInput {
        state,
        degenerate_generator: degenerate,
    })
}

/// d psi / d eps by first-order perturbation theory:
///
/// ```text
///   dpsi = sum_n e^{-i lambda_n} [ (c_n (-i xi_n) + <phi_n|psi0>) |n> + c_n |phi_n> ],
/// ```
///
/// with c_n = <n|psi0>. `psi0` is the input state, and the result is the
/// derivative of the evolved state exp(-i K(eps)) psi0.
pub fn derivative_state_pt(
    eig: &EigenSystem,
    kprime: &HermitianMatrix,
    psi0: &StateVector,
) -> Result<DVector<Complex64>> {
    let dim = eig.dim();
    if psi0.dim() != dim {
        return Err(QfiError::DimensionMismatch {
            expected: dim,
            got: psi0.dim(),
        });
    }
    let pd = perturbation_data(eig, kprime)?;
    let v = eig.eigenvectors();
    let c = v.adjoint() * psi0.amplitudes();
    let d = pd.phi().adjoint() * psi0.amplitudes();

    let mut in_basis = DVector::from_element(dim, Complex64::new(0.0, 0.0));
    let mut phi_weights = DVector::from_element(dim, Complex64::new(0.0, 0.0));
    for n in 0..dim {
        let evo = Complex64::new(0.0, -eig.eigenvalues()[n]).exp();
        in_basis[n] = evo * (c[n] * Complex64::new(0.0, -pd.xi()[n]) + d[n]);
        phi_weights[n] = evo * c[n];
    }
    Ok(v * in_basis + pd.phi() * phi_weights)
}

/// F = 4 [ <dpsi|dpsi> - |<psi|dpsi>|^2 ] for the evolved state `psi` and its
/// parameter derivative `psi_prime`. Roundoff can push the variance a hair
/// negative; anything below -1e-12 is treated as a real inconsistency.
pub fn fisher_for_state(psi: &StateVector, psi_prime: &DVector<Complex64>) -> Result<f64> {
    if psi.dim() != psi_prime.len() {
        return Err(QfiError::DimensionMismatch {
            expected: psi.dim(),
            got: psi_prime.len(),
        });
    }
    let norm2 = psi_prime.norm_squared();
    let overlap = psi.amplitudes().dotc(psi_prime);
    let fisher = 4.0 * (norm2 - overlap.norm_sqr());
    if fisher < -1e-12 {
        return Err(QfiError::NegativeFisher { value: fisher });
    }
    Ok(fisher.max(0.0))
}

/// 4 Var_psi(L) for an evolved state `psi`: the same Fisher information
/// without forming the derivative vector.
pub fn local_generator_via_psi(psi: &StateVector, gen: &LocalGenerator) -> f64 {
    let l_psi = gen.matrix().as_matrix() * psi.amplitudes();
    let mean = psi.amplitudes().dotc(&l_psi).re;
    let var = l_psi.norm_squared() - mean * mean;
    4.0 * var.max(0.0)
}

/// How exact eigenvalue crossings are treated in the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegeneracyHandling {
    /// Rotate degenerate manifolds so K' is diagonal inside them (default).
    Resolve,
    /// Cross-check mode: split crossings by shifting eps by 1e-10 and treat
    /// every level as isolated. Useful to confirm that explicit resolution
    /// and a tiny symmetry-breaking shift agree away from the splitting.
    Jitter,
}

/// eps shift used by [`DegeneracyHandling::Jitter`].
pub const JITTER_EPS: f64 = 1e-10;

/// Everything the sweep and the CLI report for one parameter point.
#[derive(Debug, Clone)]
pub struct QfiPoint {
    pub params: HamiltonianParams,
    pub fisher_max: f64,
    pub fisher_scaled: f64,
    pub ell_max: f64,
    pub ell_min: f64,
    pub optimal_state: StateVector,
    pub degenerate_generator: bool,
}

/// Full pipeline at one parameter point with the default degeneracy handling.
pub fn evaluate_point(params: &HamiltonianParams) -> Result<QfiPoint> {
    evaluate_point_with(params, DegeneracyHandling::Resolve)
}

pub fn evaluate_point_with(
    params: &HamiltonianParams,
    handling: DegeneracyHandling,
) -> Result<QfiPoint> {
    params.validate()?;
    if params.n_atoms == 0 {
        return Err(QfiError::AtomsRequired);
    }
    let kprime = build_kprime(&params.basis());
    let eig = match handling {
        DegeneracyHandling::Resolve => {
            let k = build_hamiltonian(params)?;
            eigen_system(&k, &kprime)?
        }
        DegeneracyHandling::Jitter => {
            let shifted = HamiltonianParams::new(
                params.tau,
                params.eps + JITTER_EPS,
                params.u,
                params.n_atoms,
            )?;
            let k = build_hamiltonian(&shifted)?;
            let raw = eigh(&k)?;
            let scale = raw.eigenvalues.iter().fold(1.0f64, |a, &l| a.max(l.abs()));
            resolve_degeneracies(raw, &kprime, 1e-14 * scale)?
        }
    };
    let gen = local_generator(&eig, &kprime)?;
    let (fisher_max, fisher_scaled) = max_fisher(&gen, params.n_atoms)?;
    let optimal = optimal_input_state(&eig, &gen, 0.0)?;
    Ok(QfiPoint {
        params: params.clone(),
        fisher_max,
        fisher_scaled,
        ell_max: gen.ell_max(),
        ell_min: gen.ell_min(),
        optimal_state: optimal.state,
        degenerate_generator: optimal.degenerate_generator,
    })
}

#[cfg(test)]
// Frozen oracle outputs keep their full 17-digit round-trip form.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::spin::{build_jz, SpinBasis};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn evolved(eig: &EigenSystem, psi0: &StateVector) -> StateVector {
        let u = matrix_exponential(eig, Complex64::new(0.0, -1.0));
        StateVector::normalized(u * psi0.amplitudes()).unwrap()
    }

    fn pipeline(params: &HamiltonianParams) -> (EigenSystem, HermitianMatrix) {
        let k = build_hamiltonian(params).unwrap();
        let kprime = build_kprime(&params.basis());
        (eigen_system(&k, &kprime).unwrap(), kprime)
    }

    #[test]
    fn phase_weight_at_zero_is_one_exactly() {
        assert_eq!(phase_weight(0.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn phase_weight_at_pi() {
        let w = phase_weight(PI);
        let want = Complex64::new(0.0, 2.0 / PI);
        assert!((w - want).norm() <= 1e-15);
    }

    #[test]
    fn phase_weight_vanishes_at_full_winding() {
        assert!(phase_weight(2.0 * PI).norm() <= 1e-15);
    }

    #[test]
    fn phase_weight_conjugate_symmetry_and_unit_bound() {
        for k in 0..2000 {
            let delta = -40.0 + 0.04 * k as f64;
            let w = phase_weight(delta);
            let wm = phase_weight(-delta);
            assert!((wm - w.conj()).norm() <= 1e-16, "delta = {delta}");
            assert!(w.norm() <= 1.0 + 1e-15, "delta = {delta}");
        }
        // Series branch boundary.
        for delta in [1.9e-6, 2.1e-6, -1.9e-6, -2.1e-6] {
            let w = phase_weight(delta);
            assert!((w.norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn single_atom_pure_tilt_is_heisenberg_exact() {
        // tau = 0: K = eps Jz commutes with Jz, so L = Jz and f_M = 1.
        let params = HamiltonianParams::new(0.0, 1.0, 0.0, 1).unwrap();
        let point = evaluate_point(&params).unwrap();
        assert_eq!(point.fisher_max, 1.0);
        assert_eq!(point.fisher_scaled, 1.0);
        assert_eq!(point.ell_max, 0.5);
        assert_eq!(point.ell_min, -0.5);
    }

    #[test]
    fn commuting_case_collapses_to_jz_exactly() {
        for (eps, u, n) in [
            (1.0, 0.0, 2usize),
            (1.0, 2.0, 2),
            (0.5, -3.0, 5),
            (0.0, 1.0, 4),
            (-2.0, 0.7, 8),
        ] {
            let params = HamiltonianParams::new(0.0, eps, u, n).unwrap();
            let (eig, kprime) = pipeline(&params);
            let gen = local_generator(&eig, &kprime).unwrap();
            let jz = build_jz(&SpinBasis::new(n));
            assert_eq!(
                gen.matrix().as_matrix(),
                jz.as_matrix(),
                "L != Jz at eps={eps}, u={u}, N={n}"
            );
            let (_, f) = max_fisher(&gen, n).unwrap();
            assert_eq!(f, 1.0, "f_M != 1 at eps={eps}, u={u}, N={n}");
        }
    }

    #[test]
    fn strong_interaction_surrogate_keeps_jz() {
        // tau = eps = 0, u = 1e6: K = (u/N) Jz^2 still commutes with Jz, so
        // the huge interaction cannot rotate the generator away from Jz.
        let params = HamiltonianParams::new(0.0, 0.0, 1e6, 4).unwrap();
        let (eig, kprime) = pipeline(&params);
        let gen = local_generator(&eig, &kprime).unwrap();
        let jz = build_jz(&SpinBasis::new(4));
        let diff = (gen.matrix().as_matrix() - jz.as_matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff <= 1e-8, "max entry diff {diff}");
    }

    #[test]
    fn reference_point_values_are_frozen() {
        // (tau, eps, u, N) = (1, 1, 1, 2). The literals below were produced
        // by this pipeline and cross-checked against the Simpson quadrature
        // oracle at 10001 nodes (max entry difference 2.7e-15); they pin the
        // basis ordering and weight conventions against regressions.
        let params = HamiltonianParams::new(1.0, 1.0, 1.0, 2).unwrap();
        let (eig, kprime) = pipeline(&params);
        let gen = local_generator(&eig, &kprime).unwrap();
        assert!((gen.ell_max() - 9.6183742805105132e-1).abs() <= 1e-12);
        assert!((gen.ell_min() - -9.5921681349747789e-1).abs() <= 1e-12);

        let quad = crate::oracles::quadrature_local_generator(&eig, &kprime, 10_001).unwrap();
        let diff = (gen.matrix().as_matrix() - quad.as_matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff <= 1e-8, "quadrature disagrees by {diff}");

        let point = evaluate_point(&params).unwrap();
        assert!((point.fisher_max - 3.6904493989715950e0).abs() <= 1e-12);
        assert!((point.fisher_scaled - 9.2261234974289874e-1).abs() <= 1e-12);
    }

    #[test]
    fn max_fisher_closed_forms() {
        // tau = 0 wells: L = Jz exactly, so F_M = N^2 on the nose.
        for n in [2usize, 8] {
            let params = HamiltonianParams::new(0.0, 1.0, 0.0, n).unwrap();
            let (eig, kprime) = pipeline(&params);
            let gen = local_generator(&eig, &kprime).unwrap();
            let (fisher, scaled) = max_fisher(&gen, n).unwrap();
            assert_eq!(fisher, (n * n) as f64);
            assert_eq!(scaled, 1.0);
        }
    }

    #[test]
    fn flat_generator_carries_no_information() {
        // K' = identity: L = identity, the spectral range collapses, F_M = 0,
        // and the optimal input is flagged as arbitrary.
        let params = HamiltonianParams::new(1.0, 1.0, 1.0, 3).unwrap();
        let k = build_hamiltonian(&params).unwrap();
        let identity = HermitianMatrix::new(DMatrix::from_diagonal_element(
            4,
            4,
            Complex64::new(1.0, 0.0),
        ))
        .unwrap();
        let eig = eigen_system(&k, &identity).unwrap();
        let gen = local_generator(&eig, &identity).unwrap();
        assert!(gen.is_degenerate());
        let (fisher, scaled) = max_fisher(&gen, 3).unwrap();
        assert!(fisher.abs() <= 1e-12);
        assert!(scaled.abs() <= 1e-12);
        let opt = optimal_input_state(&eig, &gen, 0.0).unwrap();
        assert!(opt.degenerate_generator);
        assert!((opt.state.amplitudes().norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn optimal_state_of_a_pure_drive_is_the_rotated_cat() {
        // K = eps Jz, N = 2: the pullback through e^{+iK} puts the phases
        // e^{+i eps m} on the cat components.
        let eps = 0.7;
        let params = HamiltonianParams::new(0.0, eps, 0.0, 2).unwrap();
        let (eig, kprime) = pipeline(&params);
        let gen = local_generator(&eig, &kprime).unwrap();
        let opt = optimal_input_state(&eig, &gen, 0.0).unwrap();
        assert!(!opt.degenerate_generator);
        let amp = opt.state.amplitudes();
        let inv = 0.5f64.sqrt();
        let i = Complex64::new(0.0, 1.0);
        let expected = [
            (i * eps).exp() * inv,
            Complex64::new(0.0, 0.0),
            (-i * eps).exp() * inv,
        ];
        for (idx, want) in expected.iter().enumerate() {
            assert!(
                (amp[idx] - want).norm() <= 1e-12,
                "component {idx}: {} vs {want}",
                amp[idx]
            );
        }
    }

    #[test]
    fn optimal_state_at_vanishing_hamiltonian_is_the_bare_cat() {
        // All couplings at 1e-12: e^{iK} is the identity to that order and
        // the input is the unrotated cat (up to eigenvector phases).
        let params = HamiltonianParams::new(1e-12, 1e-12, 1e-12, 2).unwrap();
        let (eig, kprime) = pipeline(&params);
        let gen = local_generator(&eig, &kprime).unwrap();
        let opt = optimal_input_state(&eig, &gen, 0.0).unwrap();
        let amp = opt.state.amplitudes();
        let inv = 0.5f64.sqrt();
        assert!((amp[0].norm() - inv).abs() <= 1e-9);
        assert!(amp[1].norm() <= 1e-9);
        assert!((amp[2].norm() - inv).abs() <= 1e-9);
    }

    #[test]
    fn derivative_of_a_pure_drive_matches_the_rotation_formula() {
        // K = eps Jz on the cat input: psi' = -i Jz e^{-i eps Jz} psi0
        // componentwise, and the resulting Fisher value is N^2 = 4.
        let eps = 0.7;
        let params = HamiltonianParams::new(0.0, eps, 0.0, 2).unwrap();
        let (eig, kprime) = pipeline(&params);
        let inv = 0.5f64.sqrt();
        let psi0 = StateVector::new(DVector::from_vec(vec![
            Complex64::new(inv, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(inv, 0.0),
        ]))
        .unwrap();
        let psip = derivative_state_pt(&eig, &kprime, &psi0).unwrap();
        let i = Complex64::new(0.0, 1.0);
        let expected = [
            -i * (-i * eps).exp() * inv,
            Complex64::new(0.0, 0.0),
            i * (i * eps).exp() * inv,
        ];
        for (idx, want) in expected.iter().enumerate() {
            assert!(
                (psip[idx] - want).norm() <= 1e-12,
                "component {idx}: {} vs {want}",
                psip[idx]
            );
        }
        let psi = evolved(&eig, &psi0);
        let fisher = fisher_for_state(&psi, &psip).unwrap();
        assert!((fisher - 4.0).abs() <= 1e-12);
    }

    #[test]
    fn derivative_vanishes_for_a_frozen_generator() {
        // K' = 0: nothing in the output depends on the phase.
        let params = HamiltonianParams::new(1.0, 1.0, 1.0, 3).unwrap();
        let k = build_hamiltonian(&params).unwrap();
        let zero =
            HermitianMatrix::new(DMatrix::from_element(4, 4, Complex64::new(0.0, 0.0))).unwrap();
        let eig = eigen_system(&k, &zero).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let raw = DVector::from_iterator(
            4,
            (0..4).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
        );
        let psi0 = StateVector::normalized(raw).unwrap();
        let psip = derivative_state_pt(&eig, &zero, &psi0).unwrap();
        assert!(psip.norm() <= 1e-14);
    }

    #[test]
    fn fisher_for_state_closed_forms() {
        // Two-level generator diag(0, 1) on the balanced state: F = 1.
        let inv = 0.5f64.sqrt();
        let i = Complex64::new(0.0, 1.0);
        let psi = StateVector::new(DVector::from_vec(vec![
            Complex64::new(inv, 0.0),
            Complex64::new(inv, 0.0),
        ]))
        .unwrap();
        let psip = DVector::from_vec(vec![Complex64::new(0.0, 0.0), -i * inv]);
        let f = fisher_for_state(&psi, &psip).unwrap();
        assert!((f - 1.0).abs() <= 1e-15);

        // No derivative, no information.
        let zero = DVector::from_element(2, Complex64::new(0.0, 0.0));
        assert_eq!(fisher_for_state(&psi, &zero).unwrap(), 0.0);

        // -i Jz on a cat state: F = N^2 for any N.
        for n in [2usize, 3, 8] {
            let dim = n + 1;
            let jz = build_jz(&SpinBasis::new(n));
            let mut cat = DVector::from_element(dim, Complex64::new(0.0, 0.0));
            cat[0] = Complex64::new(inv, 0.0);
            cat[dim - 1] = Complex64::new(inv, 0.0);
            let cat = StateVector::new(cat).unwrap();
            let psip = (jz.as_matrix() * cat.amplitudes()) * (-i);
            let f = fisher_for_state(&cat, &psip).unwrap();
            let want = (n * n) as f64;
            assert!((f - want).abs() <= 1e-12 * want, "N = {n}: {f}");
        }
    }

    #[test]
    fn via_psi_matches_the_explicit_path_and_extremes() {
        let params = HamiltonianParams::new(1.0, 1.0, 1.0, 4).unwrap();
        let (eig, kprime) = pipeline(&params);
        let gen = local_generator(&eig, &kprime).unwrap();

        // An extremal eigenstate carries zero variance.
        let top = StateVector::new(gen.eigvec_max().clone()).unwrap();
        assert!(local_generator_via_psi(&top, &gen).abs() <= 1e-10);

        // The balanced extremal superposition reaches F_M.
        let cat = StateVector::normalized(
            (gen.eigvec_max() + gen.eigvec_min()) * Complex64::new(0.5f64.sqrt(), 0.0),
        )
        .unwrap();
        let (fisher_max, _) = max_fisher(&gen, 4).unwrap();
        let f = local_generator_via_psi(&cat, &gen);
        assert!((f - fisher_max).abs() <= 1e-10 * fisher_max);

        // Random states: the convenience path equals the explicit formula
        // with psi' = -i L psi.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let raw = DVector::from_iterator(
                5,
                (0..5).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
            );
            let psi = StateVector::normalized(raw).unwrap();
            let psip = (gen.matrix().as_matrix() * psi.amplitudes()) * Complex64::new(0.0, -1.0);
            let explicit = fisher_for_state(&psi, &psip).unwrap();
            let quick = local_generator_via_psi(&psi, &gen);
            assert!((quick - explicit).abs() <= 1e-10 * explicit.max(1.0));
        }
    }

    #[test]
    fn generator_spectrum_contained_in_jz_range() {
        let mut checked = 0usize;
        for n in [1usize, 2, 3, 8, 16] {
            let half = n as f64 / 2.0;
            for tau in [0.0, 0.5, 1.0, 2.0, 4.0] {
                for u in [0.0, 0.5, -0.5, 2.0, -2.0, 10.0, -10.0] {
                    for eps in [0.0, 0.3, 1.0] {
                        let params = HamiltonianParams::new(tau, eps, u, n).unwrap();
                        let point = evaluate_point(&params).unwrap();
                        assert!(
                            point.ell_max <= half + 1e-8 && point.ell_min >= -half - 1e-8,
                            "range violation at tau={tau}, eps={eps}, u={u}, N={n}: \
                             [{}, {}]",
                            point.ell_min,
                            point.ell_max
                        );
                        assert!(point.fisher_scaled <= 1.0 + 1e-8);
                        assert!(point.fisher_scaled >= 0.0);
                        checked += 1;
                    }
                }
            }
        }
        assert_eq!(checked, 525);
    }

    #[test]
    fn optimal_state_attains_max_fisher_end_to_end() {
        for (tau, eps, u, n) in [
            (1.0, 1.0, 1.0, 2usize),
            (1.0, 0.3, 2.0, 8),
            (2.0, 0.0, -1.5, 5),
            (0.7, 1.0, 0.0, 12),
        ] {
            let params = HamiltonianParams::new(tau, eps, u, n).unwrap();
            let point = evaluate_point(&params).unwrap();
            let (eig, kprime) = pipeline(&params);

            let dpsi = derivative_state_pt(&eig, &kprime, &point.optimal_state).unwrap();
            let psi = evolved(&eig, &point.optimal_state);
            let fisher = fisher_for_state(&psi, &dpsi).unwrap();
            let tol = 1e-8 * point.fisher_max.max(1.0);
            assert!(
                (fisher - point.fisher_max).abs() <= tol,
                "tau={tau}, eps={eps}, u={u}, N={n}: {fisher} vs {}",
                point.fisher_max
            );
        }
    }

    #[test]
    fn evolved_optimal_state_is_extremal_superposition() {
        let params = HamiltonianParams::new(1.0, 1.0, 1.0, 4).unwrap();
        let (eig, kprime) = pipeline(&params);
        let gen = local_generator(&eig, &kprime).unwrap();
        let opt = optimal_input_state(&eig, &gen, 0.0).unwrap();
        assert!(!opt.degenerate_generator);

        let psi = evolved(&eig, &opt.state);
        let want = StateVector::normalized(
            (gen.eigvec_max() + gen.eigvec_min()) / Complex64::new(std::f64::consts::SQRT_2, 0.0),
        )
        .unwrap();
        // Agreement up to a global phase.
        assert!((psi.overlap(&want).norm() - 1.0).abs() <= 1e-12);

        let via_gen = local_generator_via_psi(&psi, &gen);
        assert!((via_gen - gen.range() * gen.range()).abs() <= 1e-10 * gen.range().powi(2));
    }

    #[test]
    fn relative_phase_does_not_change_fisher() {
        let params = HamiltonianParams::new(1.3, 0.4, -2.0, 6).unwrap();
        let (eig, kprime) = pipeline(&params);
        let gen = local_generator(&eig, &kprime).unwrap();
        let f0 = {
            let opt = optimal_input_state(&eig, &gen, 0.0).unwrap();
            local_generator_via_psi(&evolved(&eig, &opt.state), &gen)
        };
        for phase in [0.5, PI / 2.0, PI, 4.0] {
            let opt = optimal_input_state(&eig, &gen, phase).unwrap();
            let f = local_generator_via_psi(&evolved(&eig, &opt.state), &gen);
            assert!((f - f0).abs() <= 1e-9 * f0.max(1.0), "phase = {phase}");
        }
    }

    #[test]
    fn no_random_state_beats_the_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..10 {
            let n = rng.gen_range(1..=8usize);
            let params = HamiltonianParams::new(
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-5.0..5.0),
                n,
            )
            .unwrap();
            let point = evaluate_point(&params).unwrap();
            let (eig, kprime) = pipeline(&params);
            let tol = 1e-8 * point.fisher_max.max(1.0);
            for _ in 0..100 {
                let raw = DVector::from_iterator(
                    n + 1,
                    (0..n + 1).map(|_| {
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                    }),
                );
                let psi0 = StateVector::normalized(raw).unwrap();
                let dpsi = derivative_state_pt(&eig, &kprime, &psi0).unwrap();
                let psi = evolved(&eig, &psi0);
                let fisher = fisher_for_state(&psi, &dpsi).unwrap();
                assert!(
                    fisher <= point.fisher_max + tol,
                    "random state beat the optimum: {fisher} > {}",
                    point.fisher_max
                );
            }
        }
    }

    #[test]
    fn perturbation_data_orthogonality() {
        // <n|phi_n> = 0 exactly by construction, including at degeneracies.
        for params in [
            HamiltonianParams::new(1.0, 1.0, 1.0, 6).unwrap(),
            HamiltonianParams::new(0.0, 0.0, 4.0, 4).unwrap(),
        ] {
            let (eig, kprime) = pipeline(&params);
            let pd = perturbation_data(&eig, &kprime).unwrap();
            for n in 0..eig.dim() {
                let col = pd.phi().column(n);
                let overlap = eig.eigenvectors().column(n).dotc(&col);
                assert!(overlap.norm() <= 1e-14, "n = {n}: {overlap}");
            }
        }
    }

    #[test]
    fn derivative_finite_at_exact_degeneracy() {
        // Spectrum (0, 0, 2) at this point; the resolved basis keeps the
        // perturbation sum finite.
        let params = HamiltonianParams::new(0.0, 1.0, 2.0, 2).unwrap();
        let (eig, kprime) = pipeline(&params);
        let psi0 =
            StateVector::normalized(DVector::from_element(3, Complex64::new(1.0, 0.0))).unwrap();
        let dpsi = derivative_state_pt(&eig, &kprime, &psi0).unwrap();
        assert!(dpsi.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        let psi = evolved(&eig, &psi0);
        let fisher = fisher_for_state(&psi, &dpsi).unwrap();
        assert!(fisher.is_finite() && fisher >= 0.0);
    }

    #[test]
    fn jitter_mode_agrees_away_from_crossings() {
        let params = HamiltonianParams::new(1.0, 0.7, 1.5, 6).unwrap();
        let a = evaluate_point_with(&params, DegeneracyHandling::Resolve).unwrap();
        let b = evaluate_point_with(&params, DegeneracyHandling::Jitter).unwrap();
        assert!((a.fisher_scaled - b.fisher_scaled).abs() <= 1e-7);
    }

    #[test]
    fn jitter_mode_handles_exact_crossing() {
        // tau = 0, u != 0 has an exact level crossing; both handlings give
        // the commuting-case answer f_M = 1.
        let params = HamiltonianParams::new(0.0, 1.0, 2.0, 2).unwrap();
        let a = evaluate_point_with(&params, DegeneracyHandling::Resolve).unwrap();
        let b = evaluate_point_with(&params, DegeneracyHandling::Jitter).unwrap();
        assert_eq!(a.fisher_scaled, 1.0);
        assert!((b.fisher_scaled - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn state_vector_normalization_contract() {
        let ok = DVector::from_row_slice(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert!(StateVector::new(ok).is_ok());
        let bad = DVector::from_row_slice(&[Complex64::new(0.9, 0.0), Complex64::new(0.0, 0.0)]);
        assert!(matches!(
            StateVector::new(bad),
            Err(QfiError::NotNormalized { .. })
        ));
        let zero = DVector::from_element(3, Complex64::new(0.0, 0.0));
        assert!(matches!(
            StateVector::normalized(zero),
            Err(QfiError::ZeroNorm)
        ));
    }

    #[test]
    fn zero_atoms_rejected() {
        let params = HamiltonianParams::new(1.0, 1.0, 0.0, 0).unwrap();
        assert!(matches!(
            evaluate_point(&params),
            Err(QfiError::AtomsRequired)
        ));
    }
}
