use super::{ComplexMatrix, C64};

/// Taylor order used after scaling to ‖M‖₁ ≤ 1/2.
const TAYLOR_ORDER: usize = 20;

/// Splits `M = a·I + N` with `N` strictly upper triangular, if `M` has
/// exactly that structure (exact zeros below the diagonal, constant diagonal).
pub fn shifted_nilpotent_split(m: &ComplexMatrix) -> Option<(C64, ComplexMatrix)> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows();
    let a = m[(0, 0)];
    for i in 0..n {
        if m[(i, i)] != a {
            return None;
        }
        for j in 0..i {
            if m[(i, j)].re != 0.0 || m[(i, j)].im != 0.0 {
                return None;
            }
        }
    }
    let mut nil = m.clone();
    for i in 0..n {
        nil[(i, i)] = super::ZERO;
    }
    Some((a, nil))
}

/// Matrix exponential.
///
/// Shifted-nilpotent inputs (Jordan-type blocks) are summed exactly as
/// `e^a Σ_{k<n} N^k / k!`. Everything else goes through scaling and squaring
/// with a truncated Taylor series.
pub fn mat_exp(m: &ComplexMatrix) -> ComplexMatrix {
    assert!(m.is_square(), "exp of a non-square matrix");
    let n = m.rows();
    if let Some((a, nil)) = shifted_nilpotent_split(m) {
        let mut term = ComplexMatrix::identity(n);
        let mut sum = term.clone();
        for k in 1..n {
            term = (&term * &nil).scale(C64::new(1.0 / k as f64, 0.0));
            sum += &term;
        }
        return sum.scale(a.exp());
    }

    let norm = m.one_norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = m.scale(C64::new(2f64.powi(-squarings), 0.0));
    let mut term = ComplexMatrix::identity(n);
    let mut sum = term.clone();
    for k in 1..=TAYLOR_ORDER {
        term = (&term * &scaled).scale(C64::new(1.0 / k as f64, 0.0));
        sum += &term;
        if term.max_norm() <= 1e-18 * sum.max_norm() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c, ONE, ZERO};

    #[test]
    fn zero_gives_identity() {
        let e = mat_exp(&ComplexMatrix::zeros(3, 3));
        assert_eq!(e, ComplexMatrix::identity(3));
    }

    #[test]
    fn diagonal_case() {
        let d = [c(0.3, -1.2), c(-2.0, 0.5), c(1.5, 0.0)];
        let e = mat_exp(&ComplexMatrix::from_diag(&d));
        for (i, di) in d.iter().enumerate() {
            assert!((e[(i, i)] - di.exp()).norm() <= 1e-13 * di.exp().norm());
        }
        assert!(e[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn jordan_block_is_exact() {
        let a = c(0.5, 1.0 / 3.0);
        let xi = c(-1.7, 0.4);
        let m = ComplexMatrix::from_rows(&[vec![a * xi, xi], vec![ZERO, a * xi]]).unwrap();
        let e = mat_exp(&m);
        let ea = (xi * a).exp();
        assert_eq!(e[(0, 0)], ea);
        assert_eq!(e[(1, 1)], ea);
        assert!((e[(0, 1)] - ea * xi).norm() < 1e-15 * ea.norm().max(1.0));
        assert_eq!(e[(1, 0)], ZERO);
    }

    #[test]
    fn general_agrees_with_structured_path() {
        // Perturbing the diagonal by an exact zero keeps the structure; a
        // permuted similar matrix forces the series path.
        let a = c(0.2, -0.7);
        let jordan = ComplexMatrix::from_rows(&[vec![a, ONE], vec![ZERO, a]]).unwrap();
        let p = ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap();
        let lower = &(&p * &jordan) * &p;
        assert!(shifted_nilpotent_split(&lower).is_none());
        let e1 = &(&p * &mat_exp(&jordan)) * &p;
        let e2 = mat_exp(&lower);
        assert!(e1.dist(&e2) < 1e-14);
    }
}
