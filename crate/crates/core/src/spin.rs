//! Collective spin operators for N two-mode atoms.
//!
//! N indistinguishable atoms on two sites map onto a single spin J = N/2.
//! The basis is |J, m> with m listed in descending order m = J, J-1, ..., -J,
//! so index i corresponds to m = J - i and the matrices have dimension N + 1.
//!
//! The model Hamiltonian in this basis is
//!
//! ```text
//!     K = -tau Jx + eps Jz + U Jz^2,      U = u / N,
//! ```
//!
//! with tunneling rate `tau`, well asymmetry `eps`, and scaled on-site
//! interaction `u`. The estimated parameter is `eps`, so dK/d(eps) = Jz.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QfiError, Result};
use crate::matrix::HermitianMatrix;

/// Index bookkeeping for the |J, m> basis of N atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinBasis {
    n_atoms: usize,
    j: f64,
    dim: usize,
    m_values: Vec<f64>,
}

impl SpinBasis {
    pub fn new(n_atoms: usize) -> Self {
        let j = n_atoms as f64 / 2.0;
        let dim = n_atoms + 1;
        let m_values = (0..dim).map(|i| j - i as f64).collect();
        Self {
            n_atoms,
            j,
            dim,
            m_values,
        }
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    /// Total spin J = N/2.
    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Magnetic quantum numbers, descending: m[i] = J - i.
    pub fn m_values(&self) -> &[f64] {
        &self.m_values
    }

    /// Ladder coefficients c[i] = sqrt(J(J+1) - m(m+1)) with m = m[i+1],
    /// coupling neighbouring basis states i and i+1.
    fn ladder_coefficients(&self) -> Vec<f64> {
        let jj = self.j * (self.j + 1.0);
        (0..self.dim.saturating_sub(1))
            .map(|i| {
                let m = self.m_values[i + 1];
                (jj - m * (m + 1.0)).sqrt()
            })
            .collect()
    }
}

/// Model parameters. `u` is the interaction already scaled by atom number,
/// u = N U; the bare per-pair strength U is recovered on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianParams {
    pub tau: f64,
    pub eps: f64,
    pub u: f64,
    pub n_atoms: usize,
}

impl HamiltonianParams {
    pub fn new(tau: f64, eps: f64, u: f64, n_atoms: usize) -> Result<Self> {
        let p = Self {
            tau,
            eps,
            u,
            n_atoms,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("tau", self.tau), ("eps", self.eps), ("u", self.u)] {
            if !value.is_finite() {
                return Err(QfiError::NonFiniteParam { name });
            }
        }
        if self.u != 0.0 && self.n_atoms == 0 {
            return Err(QfiError::InteractionWithoutAtoms { u: self.u });
        }
        Ok(())
    }

    /// Bare interaction U = u / N (0 when N = 0, where u must be 0 too).
    pub fn bare_interaction(&self) -> f64 {
        if self.n_atoms == 0 {
            0.0
        } else {
            self.u / self.n_atoms as f64
        }
    }

    pub fn basis(&self) -> SpinBasis {
        SpinBasis::new(self.n_atoms)
    }
}

fn real_matrix(dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0))
}

/// Jx = (J+ + J-)/2: real symmetric, couples m to m +- 1.
pub fn build_jx(basis: &SpinBasis) -> HermitianMatrix {
    let mut m = real_matrix(basis.dim());
    for (i, c) in basis.ladder_coefficients().iter().enumerate() {
        let half = Complex64::new(0.5 * c, 0.0);
        m[(i, i + 1)] = half;
        m[(i + 1, i)] = half;
    }
    HermitianMatrix::new(m).expect("constructed symmetric")
}

/// Jy = (J+ - J-)/(2i): purely imaginary off-diagonals.
pub fn build_jy(basis: &SpinBasis) -> HermitianMatrix {
    let mut m = real_matrix(basis.dim());
    for (i, c) in basis.ladder_coefficients().iter().enumerate() {
        m[(i, i + 1)] = Complex64::new(0.0, -0.5 * c);
        m[(i + 1, i)] = Complex64::new(0.0, 0.5 * c);
    }
    HermitianMatrix::new(m).expect("constructed anti-symmetric imaginary")
}

/// Jz: diagonal with entries m = J, J-1, ..., -J.
pub fn build_jz(basis: &SpinBasis) -> HermitianMatrix {
    let mut m = real_matrix(basis.dim());
    for (i, &mv) in basis.m_values().iter().enumerate() {
        m[(i, i)] = Complex64::new(mv, 0.0);
    }
    HermitianMatrix::new(m).expect("constructed diagonal real")
}

/// K = -tau Jx + eps Jz + (u/N) Jz^2, built entry by entry: the diagonal is
/// eps m + U m^2 and the off-diagonals scale the Jx couplings by -tau.
pub fn build_hamiltonian(params: &HamiltonianParams) -> Result<HermitianMatrix> {
    params.validate()?;
    let basis = params.basis();
    let uu = params.bare_interaction();
    let mut m = real_matrix(basis.dim());
    for (i, &mv) in basis.m_values().iter().enumerate() {
        m[(i, i)] = Complex64::new(params.eps * mv + uu * (mv * mv), 0.0);
    }
    for (i, c) in basis.ladder_coefficients().iter().enumerate() {
        let hop = Complex64::new(-params.tau * (0.5 * c), 0.0);
        m[(i, i + 1)] = hop;
        m[(i + 1, i)] = hop;
    }
    HermitianMatrix::new(m)
}

/// dK/d(eps) = Jz: the generator of the estimated rotation.
pub fn build_kprime(basis: &SpinBasis) -> HermitianMatrix {
    build_jz(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn re(m: &HermitianMatrix, i: usize, j: usize) -> f64 {
        m.as_matrix()[(i, j)].re
    }

    #[test]
    fn jx_single_atom() {
        let jx = build_jx(&SpinBasis::new(1));
        assert_eq!(jx.dim(), 2);
        assert_eq!(re(&jx, 0, 0), 0.0);
        assert_eq!(re(&jx, 0, 1), 0.5);
        assert_eq!(re(&jx, 1, 0), 0.5);
        assert_eq!(re(&jx, 1, 1), 0.0);
    }

    #[test]
    fn jz_two_atoms() {
        let jz = build_jz(&SpinBasis::new(2));
        assert_eq!(jz.dim(), 3);
        for (i, want) in [1.0, 0.0, -1.0].into_iter().enumerate() {
            assert_eq!(re(&jz, i, i), want);
        }
        assert_eq!(re(&jz, 0, 1), 0.0);
    }

    #[test]
    fn hamiltonian_pure_tunneling_single_atom() {
        let p = HamiltonianParams::new(1.0, 0.0, 0.0, 1).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        assert_eq!(re(&h, 0, 0), 0.0);
        assert_eq!(re(&h, 0, 1), -0.5);
        assert_eq!(re(&h, 1, 0), -0.5);
        assert_eq!(re(&h, 1, 1), 0.0);
    }

    #[test]
    fn hamiltonian_diagonal_case() {
        // tau = 0, eps = 1, u = 2, N = 2: U = 1, diag(eps m + m^2) = (2, 0, 0).
        let p = HamiltonianParams::new(0.0, 1.0, 2.0, 2).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        for (i, want) in [2.0, 0.0, 0.0].into_iter().enumerate() {
            assert_eq!(re(&h, i, i), want);
        }
        assert_eq!(re(&h, 0, 1), 0.0);
        assert_eq!(re(&h, 1, 2), 0.0);
    }

    #[test]
    fn kprime_is_jz() {
        let basis = SpinBasis::new(5);
        assert_eq!(build_kprime(&basis), build_jz(&basis));
    }

    #[test]
    fn interaction_without_atoms_rejected() {
        assert!(matches!(
            HamiltonianParams::new(0.0, 0.0, 1.0, 0),
            Err(QfiError::InteractionWithoutAtoms { .. })
        ));
        assert!(HamiltonianParams::new(0.3, -0.2, 0.0, 0).is_ok());
    }

    #[test]
    fn non_finite_params_rejected() {
        assert!(HamiltonianParams::new(f64::NAN, 0.0, 0.0, 2).is_err());
        assert!(HamiltonianParams::new(0.0, f64::INFINITY, 0.0, 2).is_err());
    }

    fn commutator(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        a * b - b * a
    }

    #[test]
    fn angular_momentum_algebra() {
        // [Jx, Jy] = i Jz and Jx^2 + Jy^2 + Jz^2 = J(J+1) I, up to roundoff.
        for n in [1usize, 2, 3, 8, 33, 64] {
            let basis = SpinBasis::new(n);
            let jx = build_jx(&basis);
            let jy = build_jy(&basis);
            let jz = build_jz(&basis);
            let scale = basis.j() * (basis.j() + 1.0);

            let comm = commutator(jx.as_matrix(), jy.as_matrix());
            let i_jz = jz.as_matrix() * Complex64::new(0.0, 1.0);
            let comm_err = (&comm - &i_jz).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(
                comm_err <= 1e-13 * scale,
                "N = {n}: [Jx,Jy] error {comm_err}"
            );

            let casimir = jx.as_matrix() * jx.as_matrix()
                + jy.as_matrix() * jy.as_matrix()
                + jz.as_matrix() * jz.as_matrix();
            let target = DMatrix::from_diagonal_element(
                basis.dim(),
                basis.dim(),
                Complex64::new(scale, 0.0),
            );
            let cas_err = (&casimir - &target)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(cas_err <= 1e-12 * scale, "N = {n}: Casimir error {cas_err}");
        }
    }

    #[test]
    fn hamiltonian_matches_operator_sum() {
        for (tau, eps, u, n) in [
            (1.0, 1.0, 1.0, 2usize),
            (0.7, -0.3, 2.5, 5),
            (-1.2, 0.0, -4.0, 16),
            (3.0, 2.0, 0.0, 0),
        ] {
            let p = HamiltonianParams::new(tau, eps, u, n).unwrap();
            let h = build_hamiltonian(&p).unwrap();
            let basis = p.basis();
            let jx = build_jx(&basis);
            let jz = build_jz(&basis);
            let uu = p.bare_interaction();
            let assembled = jx.as_matrix() * Complex64::new(-tau, 0.0)
                + jz.as_matrix() * Complex64::new(eps, 0.0)
                + jz.as_matrix() * jz.as_matrix() * Complex64::new(uu, 0.0);
            let err = (h.as_matrix() - &assembled)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            let scale = crate::matrix::max_abs_entry(h.as_matrix()).max(1.0);
            assert!(err <= 1e-14 * scale, "N = {n}: assembly error {err}");
        }
    }

    #[test]
    fn zero_atoms_gives_scalar_zero() {
        let p = HamiltonianParams::new(2.0, 3.0, 0.0, 0).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        assert_eq!(h.dim(), 1);
        assert_eq!(re(&h, 0, 0), 0.0);
    }
}
