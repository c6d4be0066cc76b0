use super::{min_spectral_gap, ComplexMatrix, Lu};
use crate::error::{Error, Result};

/// Minimum eigenvalue separation for treating σ(A1) and σ(A2) as disjoint.
pub const SPECTRAL_GAP_TOLERANCE: f64 = 1e-10;

/// Solver for `A1 S - S A2 = C` with the Kronecker-lifted operator
/// `I ⊗ A1 - A2ᵀ ⊗ I` factored once (column-major vectorization).
#[derive(Clone, Debug)]
pub struct SylvesterSolver {
    n: usize,
    lu: Lu,
}

impl SylvesterSolver {
    pub fn new(a1: &ComplexMatrix, a2: &ComplexMatrix) -> Result<Self> {
        if !a1.is_square() || !a2.is_square() || a1.rows() != a2.rows() {
            return Err(Error::Shape(format!(
                "Sylvester operands {}x{} and {}x{}",
                a1.rows(),
                a1.cols(),
                a2.rows(),
                a2.cols()
            )));
        }
        let gap = min_spectral_gap(a1, a2);
        if gap <= SPECTRAL_GAP_TOLERANCE {
            return Err(Error::SpectraOverlap { gap });
        }
        let n = a1.rows();
        let id = ComplexMatrix::identity(n);
        let op = &id.kron(a1) - &a2.transpose().kron(&id);
        let lu = Lu::factor(&op).map_err(|_| Error::SpectraOverlap { gap })?;
        Ok(Self { n, lu })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, c: &ComplexMatrix) -> ComplexMatrix {
        let n = self.n;
        assert_eq!((c.rows(), c.cols()), (n, n), "Sylvester right-hand side shape");
        let mut rhs = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                rhs.push(c[(i, j)]);
            }
        }
        let x = self.lu.solve_vec(&rhs);
        let mut s = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                s[(i, j)] = x[j * n + i];
            }
        }
        s
    }
}

/// Unique solution of `A1 S - S A2 = C` for disjoint spectra.
pub fn sylvester_solve(a1: &ComplexMatrix, a2: &ComplexMatrix, c: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(SylvesterSolver::new(a1, a2)?.solve(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c, I, ONE, ZERO};

    fn residual(a1: &ComplexMatrix, a2: &ComplexMatrix, s: &ComplexMatrix, rhs: &ComplexMatrix) -> f64 {
        (&(&(a1 * s) - &(s * a2)) - rhs).max_norm()
    }

    #[test]
    fn scalar_case() {
        let a1 = ComplexMatrix::scalar(1, c(2.0, 0.0));
        let a2 = ComplexMatrix::scalar(1, ONE);
        let rhs = ComplexMatrix::scalar(1, c(std::f64::consts::PI, 0.0));
        let s = sylvester_solve(&a1, &a2, &rhs).unwrap();
        assert!((s[(0, 0)] - c(std::f64::consts::PI, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_rhs() {
        let a1 = ComplexMatrix::from_diag(&[ONE, c(2.0, 0.0)]);
        let a2 = ComplexMatrix::from_diag(&[c(3.0, 0.0), c(4.0, 0.0)]);
        let s = sylvester_solve(&a1, &a2, &ComplexMatrix::zeros(2, 2)).unwrap();
        assert_eq!(s.max_norm(), 0.0);
    }

    #[test]
    fn jordan_nonlocal_shape() {
        let a = c(1.0, 1.0);
        let a1 = ComplexMatrix::from_rows(&[vec![a, ONE], vec![ZERO, a]]).unwrap();
        let a2 = -a1.adjoint();
        let pi = ComplexMatrix::from_rows(&[vec![I, ONE], vec![ONE, I]]).unwrap();
        let j = ComplexMatrix::from_diag(&[ONE, -ONE]);
        let rhs = (&(&pi * &j) * &pi.adjoint()).scale(I);
        let s = sylvester_solve(&a1, &a2, &rhs).unwrap();
        assert!(residual(&a1, &a2, &s, &rhs) <= 1e-11 * rhs.max_norm().max(1.0));
    }

    #[test]
    fn overlapping_spectra() {
        let a = ComplexMatrix::from_diag(&[ONE, c(2.0, 0.0)]);
        let b = ComplexMatrix::from_diag(&[c(2.0, 0.0), c(5.0, 0.0)]);
        assert!(matches!(
            sylvester_solve(&a, &b, &ComplexMatrix::identity(2)),
            Err(Error::SpectraOverlap { .. })
        ));
    }
}
