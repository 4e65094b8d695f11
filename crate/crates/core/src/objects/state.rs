use serde::{Deserialize, Serialize};

use super::ObjectError;
use crate::linalg::{eigvalsh, re, ComplexMatrix, C64};

/// Tolerance on positivity and unit trace of a density matrix.
pub const STATE_TOL: f64 = 1e-10;

/// Positive, unit-trace Hermitian operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates positivity, Hermiticity and unit trace at [`STATE_TOL`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self, ObjectError> {
        Self::with_tolerance(matrix, STATE_TOL)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self, ObjectError> {
        if !matrix.is_square() {
            return Err(ObjectError::invalid(
                "square",
                format!("{}x{}", matrix.rows(), matrix.cols()),
            ));
        }
        let defect = matrix.hermitian_defect();
        if defect > tol {
            return Err(ObjectError::invalid("hermitian", format!("defect {defect:e}")));
        }
        let tr = matrix.trace();
        if (tr - re(1.0)).norm() > tol {
            return Err(ObjectError::invalid("unit_trace", format!("trace {tr}")));
        }
        let matrix = matrix.hermitian_part();
        let min = eigvalsh(&matrix)?.last().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(ObjectError::invalid(
                "positive",
                format!("min eigenvalue {min:e}"),
            ));
        }
        Ok(Self { matrix })
    }

    /// `|ψ><ψ|` for a (not necessarily normalized) nonzero vector.
    pub fn pure(psi: &[C64]) -> Self {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm > 0.0, "zero state vector");
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Self {
            matrix: ComplexMatrix::outer(&v, &v),
        }
    }

    /// `|i><i|`
    pub fn basis(d: usize, i: usize) -> Self {
        Self {
            matrix: ComplexMatrix::unit(d, i, i),
        }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(d).scale(1.0 / d as f64),
        }
    }

    /// `|+><+|` in dimension `d`: uniform superposition of the basis.
    pub fn maximally_coherent(d: usize) -> Self {
        Self::pure(&vec![re(1.0); d])
    }

    pub fn plus() -> Self {
        Self::maximally_coherent(2)
    }

    /// Incoherent state with the given populations.
    pub fn diagonal(probs: &[f64]) -> Result<Self, ObjectError> {
        Self::new(ComplexMatrix::from_real_diagonal(probs))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Convex mixture `p·self + (1-p)·other`.
    pub fn mix(&self, other: &Self, p: f64) -> Self {
        Self {
            matrix: &self.matrix.scale(p) + &other.matrix.scale(1.0 - p),
        }
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            matrix: crate::linalg::kron(&self.matrix, &other.matrix),
        }
    }

    /// Whether the state is diagonal in the reference basis.
    pub fn is_incoherent(&self, tol: f64) -> bool {
        self.matrix.max_off_diagonal() <= tol
    }

    /// Diagonal populations.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.real_diagonal()
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn rejects_invalid_states() {
        let not_unit = ComplexMatrix::identity(2);
        let err = DensityMatrix::new(not_unit).unwrap_err();
        assert_eq!(err.invariant(), Some("unit_trace"));

        let negative = ComplexMatrix::from_real_diagonal(&[1.5, -0.5]);
        let err = DensityMatrix::new(negative).unwrap_err();
        assert_eq!(err.invariant(), Some("positive"));

        let mut skew = ComplexMatrix::identity(2).scale(0.5);
        skew[(0, 1)] = c(0.1, 0.0);
        let err = DensityMatrix::new(skew).unwrap_err();
        assert_eq!(err.invariant(), Some("hermitian"));
    }

    #[test]
    fn named_constructors() {
        let plus = DensityMatrix::plus();
        assert!((plus.matrix()[(0, 1)] - re(0.5)).norm() < 1e-15);
        assert!(DensityMatrix::basis(3, 1).is_incoherent(0.0));
        assert!(!plus.is_incoherent(1e-3));
        let mc = DensityMatrix::maximally_coherent(4);
        assert!((mc.matrix()[(2, 3)] - re(0.25)).norm() < 1e-15);
        assert!(DensityMatrix::new(mc.matrix().clone()).is_ok());
    }
}
