//! Hermitian matrix carrier.
//!
//! [`HermitianMatrix`] wraps a square `DMatrix<Complex64>` whose entries
//! satisfy `A[i][j] == conj(A[j][i])` up to `1e-12` relative to the largest
//! entry magnitude. Builders in this crate construct both triangles from
//! closed-form expressions (or mirror the upper triangle exactly), so the
//! check is a guard against construction bugs rather than a cleanup step:
//! nothing is ever averaged into shape.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QfiError, Result};

/// Relative Hermiticity tolerance for [`HermitianMatrix::new`].
pub const HERMITICITY_RTOL: f64 = 1e-12;

/// Square complex matrix with verified Hermitian symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    matrix: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// Wraps `matrix` after checking squareness and Hermitian symmetry.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(QfiError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let deviation = hermiticity_deviation(&matrix);
        let tolerance = HERMITICITY_RTOL * max_abs_entry(&matrix);
        if deviation > tolerance {
            return Err(QfiError::NotHermitian {
                deviation,
                tolerance,
            });
        }
        Ok(Self { matrix })
    }

    /// Takes the upper triangle (and real diagonal parts) of `matrix` as
    /// constructed and mirrors it conjugate-symmetrically into the lower
    /// triangle, so the result is Hermitian to the bit.
    ///
    /// The pre-mirror asymmetry must already be roundoff-small relative to
    /// `scale` (the magnitude of the operators that produced the product);
    /// anything larger is a construction bug and comes back as an error.
    pub fn from_upper(mut matrix: DMatrix<Complex64>, scale: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(QfiError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let deviation = hermiticity_deviation(&matrix);
        let tolerance = 1e-10 * scale.max(1.0);
        if deviation > tolerance {
            return Err(QfiError::NotHermitian {
                deviation,
                tolerance,
            });
        }
        let n = matrix.nrows();
        for i in 0..n {
            matrix[(i, i)] = Complex64::new(matrix[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                matrix[(j, i)] = matrix[(i, j)].conj();
            }
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }
}

/// Largest `|A[i][j] - conj(A[j][i])|` over all entry pairs.
pub fn hermiticity_deviation(matrix: &DMatrix<Complex64>) -> f64 {
    let n = matrix.nrows().min(matrix.ncols());
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (matrix[(i, j)] - matrix[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// Largest entry magnitude; 0 for an empty matrix.
pub fn max_abs_entry(matrix: &DMatrix<Complex64>) -> f64 {
    matrix.iter().map(|z| z.norm()).fold(0.0f64, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn accepts_hermitian_input() {
        let m =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, -2.0), c(0.0, 2.0), c(3.0, 0.0)]);
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(h.dim(), 2);
    }

    #[test]
    fn rejects_non_square() {
        let m = DMatrix::from_element(2, 3, c(0.0, 0.0));
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(QfiError::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn rejects_asymmetric_entries() {
        let m =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.5, 0.0), c(0.4, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(QfiError::NotHermitian { .. })
        ));
    }

    #[test]
    fn tolerance_scales_with_entries() {
        // Deviation 1e-9 passes when entries are ~1e4 (tol 1e-8), fails at ~1 (tol 1e-12).
        let big = DMatrix::from_row_slice(
            2,
            2,
            &[c(1e4, 0.0), c(1e4, 0.0), c(1e4 + 1e-9, 0.0), c(1e4, 0.0)],
        );
        assert!(HermitianMatrix::new(big).is_ok());
        let small = DMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(1.0, 0.0), c(1.0 + 1e-9, 0.0), c(1.0, 0.0)],
        );
        assert!(HermitianMatrix::new(small).is_err());
    }

    #[test]
    fn from_upper_mirrors_exactly() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                c(1.0, 1e-13),
                c(0.25, 0.5),
                c(0.25 + 1e-13, -0.5),
                c(2.0, 0.0),
            ],
        );
        let h = HermitianMatrix::from_upper(m, 1.0).unwrap();
        assert_eq!(h.as_matrix()[(1, 0)], h.as_matrix()[(0, 1)].conj());
        assert_eq!(h.as_matrix()[(0, 0)].im, 0.0);
        assert_eq!(hermiticity_deviation(h.as_matrix()), 0.0);
    }

    #[test]
    fn from_upper_rejects_gross_asymmetry() {
        let m =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(HermitianMatrix::from_upper(m, 1.0).is_err());
    }
}
