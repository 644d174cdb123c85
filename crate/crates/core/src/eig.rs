//! Hermitian eigendecomposition with explicit degeneracy handling.
//!
//! [`eigh`] returns eigenvalues sorted ascending (ties keep the solver's
//! column order) and verifies the decomposition before handing it out: the
//! eigen-residual and the orthonormality of the eigenvector columns must both
//! sit at roundoff level, so solver trouble surfaces as an error instead of
//! silently wrong numbers downstream.
//!
//! [`resolve_degeneracies`] turns the raw decomposition into an
//! [`EigenSystem`]: eigenvalues closer than `degeneracy_tol` are chained into
//! manifolds, and inside each manifold the eigenvectors are rotated so that a
//! second observable `K'` becomes diagonal there. That rotation is exactly
//! the freedom a degenerate subspace leaves, and fixing it this way is what
//! makes perturbative derivatives in `K'` well defined at degeneracies.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{QfiError, Result};
use crate::matrix::{max_abs_entry, HermitianMatrix};

/// Residual and orthonormality bound, relative to max(|lambda|, 1).
pub const EIGEN_RTOL: f64 = 1e-10;

/// Sorted eigendecomposition before any degeneracy handling.
#[derive(Debug, Clone)]
pub struct RawEigen {
    /// Ascending eigenvalues.
    pub eigenvalues: DVector<f64>,
    /// Matching eigenvector columns.
    pub eigenvectors: DMatrix<Complex64>,
}

/// Eigendecomposition with degenerate manifolds identified and each manifold
/// basis rotated to diagonalize the reference observable used to build it.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<Complex64>,
    degeneracy_tol: f64,
    manifolds: Vec<Vec<usize>>,
    manifold_id: Vec<usize>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Orthonormal eigenvector columns, same order as the eigenvalues.
    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    pub fn degeneracy_tol(&self) -> f64 {
        self.degeneracy_tol
    }

    /// Partition of 0..dim into maximal runs of near-equal eigenvalues.
    pub fn manifolds(&self) -> &[Vec<usize>] {
        &self.manifolds
    }

    /// Index of the manifold containing eigenstate `index`.
    pub fn manifold_of(&self, index: usize) -> usize {
        self.manifold_id[index]
    }
}

/// Default manifold grouping tolerance: 1e-8 relative to the spectral scale.
pub fn default_degeneracy_tol(eigenvalues: &DVector<f64>) -> f64 {
    let scale = eigenvalues.iter().fold(1.0f64, |acc, &l| acc.max(l.abs()));
    1e-8 * scale
}

/// Decomposes a Hermitian matrix; eigenvalues come back ascending with a
/// stable tie-break on the solver's column order.
pub fn eigh(matrix: &HermitianMatrix) -> Result<RawEigen> {
    let dim = matrix.dim();
    let se = matrix.as_matrix().clone().symmetric_eigen();

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[a]
            .partial_cmp(&se.eigenvalues[b])
            .expect("finite eigenvalues")
    });

    let eigenvalues = DVector::from_iterator(dim, order.iter().map(|&i| se.eigenvalues[i]));
    let mut eigenvectors = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &se.eigenvectors.column(src));
    }

    verify_decomposition(matrix, &eigenvalues, &eigenvectors)?;
    Ok(RawEigen {
        eigenvalues,
        eigenvectors,
    })
}

fn verify_decomposition(
    matrix: &HermitianMatrix,
    eigenvalues: &DVector<f64>,
    eigenvectors: &DMatrix<Complex64>,
) -> Result<()> {
    let dim = eigenvalues.len();
    let scale = eigenvalues.iter().fold(1.0f64, |acc, &l| acc.max(l.abs()));
    let bound = EIGEN_RTOL * scale;

    let mut worst_residual = 0.0f64;
    for k in 0..dim {
        let v = eigenvectors.column(k);
        let r = matrix.as_matrix() * v - v * Complex64::new(eigenvalues[k], 0.0);
        worst_residual = worst_residual.max(r.norm());
    }
    if worst_residual > bound {
        return Err(QfiError::EigenResidual {
            residual: worst_residual,
            bound,
        });
    }

    let gram = eigenvectors.adjoint() * eigenvectors;
    let mut worst_ortho = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let want = if i == j { 1.0 } else { 0.0 };
            worst_ortho = worst_ortho.max((gram[(i, j)] - Complex64::new(want, 0.0)).norm());
        }
    }
    if worst_ortho > EIGEN_RTOL {
        return Err(QfiError::NotOrthonormal {
            deviation: worst_ortho,
        });
    }
    Ok(())
}

/// Groups eigenvalues into manifolds by chaining gaps at or below
/// `degeneracy_tol`, then rotates each manifold's eigenvectors so `kprime`
/// is diagonal inside it. Rotations act only within manifolds, so
/// orthonormality and the eigen-residual of the original matrix survive.
pub fn resolve_degeneracies(
    raw: RawEigen,
    kprime: &HermitianMatrix,
    degeneracy_tol: f64,
) -> Result<EigenSystem> {
    if degeneracy_tol.is_nan() || degeneracy_tol <= 0.0 {
        return Err(QfiError::NonPositiveTolerance {
            tol: degeneracy_tol,
        });
    }
    let dim = raw.eigenvalues.len();
    if kprime.dim() != dim {
        return Err(QfiError::DimensionMismatch {
            expected: dim,
            got: kprime.dim(),
        });
    }

    let mut manifolds: Vec<Vec<usize>> = Vec::new();
    for i in 0..dim {
        let chained = i > 0 && raw.eigenvalues[i] - raw.eigenvalues[i - 1] <= degeneracy_tol;
        if chained {
            manifolds.last_mut().expect("nonempty after i > 0").push(i);
        } else {
            manifolds.push(vec![i]);
        }
    }

    let mut eigenvectors = raw.eigenvectors;
    for manifold in &manifolds {
        let k = manifold.len();
        if k < 2 {
            continue;
        }
        let first = manifold[0];
        let block = eigenvectors.columns(first, k).into_owned();

        // K' restricted to the manifold; mirror the upper triangle so the
        // small solver sees an exactly Hermitian block.
        let product = block.adjoint() * kprime.as_matrix() * &block;
        let sub = HermitianMatrix::from_upper(product, max_abs_entry(kprime.as_matrix()))?;
        let se = sub.as_matrix().clone().symmetric_eigen();

        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| {
            se.eigenvalues[a]
                .partial_cmp(&se.eigenvalues[b])
                .expect("finite eigenvalues")
        });

        let mut rotation = DMatrix::from_element(k, k, Complex64::new(0.0, 0.0));
        for (dst, &src) in order.iter().enumerate() {
            rotation.set_column(dst, &se.eigenvectors.column(src));
        }
        let rotated = block * rotation;
        for (offset, col) in rotated.column_iter().enumerate() {
            eigenvectors.set_column(first + offset, &col);
        }
    }

    let mut manifold_id = vec![0usize; dim];
    for (mid, members) in manifolds.iter().enumerate() {
        for &i in members {
            manifold_id[i] = mid;
        }
    }

    Ok(EigenSystem {
        eigenvalues: raw.eigenvalues,
        eigenvectors,
        degeneracy_tol,
        manifolds,
        manifold_id,
    })
}

/// Full pipeline: decompose `k`, group manifolds at the default tolerance,
/// and fix the degenerate bases against `kprime`.
pub fn eigen_system(k: &HermitianMatrix, kprime: &HermitianMatrix) -> Result<EigenSystem> {
    let raw = eigh(k)?;
    let tol = default_degeneracy_tol(&raw.eigenvalues);
    resolve_degeneracies(raw, kprime, tol)
}

/// V diag(exp(scale * lambda)) V^H. With `scale = -i` this is the unitary
/// evolution exp(-i K) over unit time.
pub fn matrix_exponential(eig: &EigenSystem, scale: Complex64) -> DMatrix<Complex64> {
    let phases = DVector::from_iterator(
        eig.dim(),
        eig.eigenvalues().iter().map(|&l| (scale * l).exp()),
    );
    let scaled = eig.eigenvectors() * DMatrix::from_diagonal(&phases);
    scaled * eig.eigenvectors().adjoint()
}
