use super::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Relative pivot threshold below which a matrix is reported singular.
pub const PIVOT_TOLERANCE: f64 = 1e-14;

/// LU factorization with partial pivoting, `P M = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    sign: f64,
    scale: f64,
}

impl Lu {
    /// Factor without any singularity test; zero pivots are kept as-is.
    pub fn factor_unchecked(m: &ComplexMatrix) -> Self {
        assert!(m.is_square(), "LU of a non-square matrix");
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&a, &b| lu[(a, k)].norm().total_cmp(&lu[(b, k)].norm()))
                .unwrap_or(k);
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            if pivot == ZERO {
                continue;
            }
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Self {
            lu,
            perm,
            sign,
            scale: m.max_norm(),
        }
    }

    /// Factor and reject matrices whose smallest pivot falls below
    /// `PIVOT_TOLERANCE * ‖M‖_max`.
    pub fn factor(m: &ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let f = Self::factor_unchecked(m);
        let threshold = PIVOT_TOLERANCE * f.scale;
        for k in 0..f.dim() {
            let mag = f.lu[(k, k)].norm();
            if mag <= threshold || mag == 0.0 {
                return Err(Error::SingularMatrix {
                    pivot: k,
                    magnitude: mag,
                });
            }
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn det(&self) -> C64 {
        (0..self.dim()).fold(C64::new(self.sign, 0.0), |acc, k| acc * self.lu[(k, k)])
    }

    pub fn solve_vec(&self, rhs: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(rhs.len(), n);
        let mut y: Vec<C64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * y[j];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * y[j];
            }
            y[i] = s / self.lu[(i, i)];
        }
        y
    }

    pub fn solve(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(rhs.rows(), rhs.cols());
        for j in 0..rhs.cols() {
            let x = self.solve_vec(&rhs.col(j));
            out.set_col(j, &x);
        }
        out
    }

    pub fn inverse(&self) -> ComplexMatrix {
        self.solve(&ComplexMatrix::identity(self.dim()))
    }
}

pub fn lu_inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(Lu::factor(m)?.inverse())
}

/// Inverse together with the determinant obtained from the same factorization.
pub fn lu_inverse_with_det(m: &ComplexMatrix) -> Result<(ComplexMatrix, C64)> {
    let f = Lu::factor(m)?;
    Ok((f.inverse(), f.det()))
}

/// Determinant; exactly singular input yields zero.
pub fn determinant(m: &ComplexMatrix) -> C64 {
    if m.rows() == 1 {
        return m[(0, 0)];
    }
    if m.rows() == 2 {
        return m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    }
    let f = Lu::factor_unchecked(m);
    if (0..f.dim()).any(|k| f.lu[(k, k)] == ZERO) {
        return ZERO;
    }
    f.det() * ONE
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c, I};

    fn m(rows: &[&[C64]]) -> ComplexMatrix {
        ComplexMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_inverse() {
        let id = ComplexMatrix::identity(2);
        assert_eq!(lu_inverse(&id).unwrap(), id);
    }

    #[test]
    fn diagonal_inverse() {
        let d = ComplexMatrix::from_diag(&[c(2.0, 0.0), I]);
        let inv = lu_inverse(&d).unwrap();
        assert!((inv[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((inv[(1, 1)] + I).norm() < 1e-15);
        assert_eq!(inv[(0, 1)], ZERO);
    }

    #[test]
    fn unipotent_inverse_multiplies_back() {
        let a = m(&[&[ONE, ONE], &[ZERO, ONE]]);
        let inv = lu_inverse(&a).unwrap();
        let expected = m(&[&[ONE, -ONE], &[ZERO, ONE]]);
        assert!(inv.dist(&expected) < 1e-15);
        assert!((&a * &inv).dist(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn singular_is_rejected() {
        let a = m(&[&[ONE, c(2.0, 0.0)], &[c(2.0, 0.0), c(4.0, 0.0)]]);
        assert!(matches!(lu_inverse(&a), Err(Error::SingularMatrix { .. })));
        assert_eq!(determinant(&a), ZERO);
    }

    #[test]
    fn det_with_pivoting() {
        let a = m(&[
            &[ZERO, ONE, ZERO],
            &[c(2.0, 0.0), ZERO, ZERO],
            &[ZERO, ZERO, I],
        ]);
        let (_, det) = lu_inverse_with_det(&a).unwrap();
        assert!((det - c(0.0, -2.0)).norm() < 1e-15);
        assert!((determinant(&a) - det).norm() < 1e-15);
    }
}
