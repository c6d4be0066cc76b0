//! Eigenvalues of small dense complex matrices.
//!
//! Only needed for disjointness and definiteness tests, so there are no
//! eigenvectors. n ≤ 4 goes through the characteristic polynomial
//! (Faddeev–LeVerrier coefficients, closed-form or Aberth roots); larger
//! inputs use shifted QR on the Hessenberg form.

use super::{ComplexMatrix, C64, ONE, ZERO};

pub fn eigenvalues(m: &ComplexMatrix) -> Vec<C64> {
    assert!(m.is_square(), "eigenvalues of a non-square matrix");
    match m.rows() {
        0 => Vec::new(),
        1 => vec![m[(0, 0)]],
        n if n <= 4 => poly_roots(&char_poly(m)),
        _ => qr_eigenvalues(m),
    }
}

/// Real eigenvalues of the Hermitian part `(M + M*)/2`, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let h = (m + &m.adjoint()).scale(C64::new(0.5, 0.0));
    let mut ev: Vec<f64> = eigenvalues(&h).into_iter().map(|z| z.re).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `min |λ - μ|` over λ ∈ σ(a), μ ∈ σ(b).
pub fn min_spectral_gap(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let ea = eigenvalues(a);
    let eb = eigenvalues(b);
    ea.iter()
        .flat_map(|x| eb.iter().map(move |y| (x - y).norm()))
        .fold(f64::INFINITY, f64::min)
}

/// Monic characteristic polynomial coefficients, lowest degree first.
fn char_poly(a: &ComplexMatrix) -> Vec<C64> {
    let n = a.rows();
    let mut coeffs = vec![ZERO; n + 1];
    coeffs[n] = ONE;
    let mut mk = ComplexMatrix::zeros(n, n);
    for k in 1..=n {
        mk = &(a * &mk) + &ComplexMatrix::scalar(n, coeffs[n - k + 1]);
        coeffs[n - k] = -(a * &mk).trace() / k as f64;
    }
    coeffs
}

fn horner(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn poly_roots(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len() - 1;
    if n == 1 {
        return vec![-coeffs[0]];
    }
    if n == 2 {
        let b = coeffs[1];
        let c = coeffs[0];
        let disc = (b * b - 4.0 * c).sqrt();
        let q = if (b + disc).norm() >= (b - disc).norm() {
            -(b + disc) / 2.0
        } else {
            -(b - disc) / 2.0
        };
        if q == ZERO {
            return vec![ZERO, ZERO];
        }
        return vec![q, c / q];
    }

    // Aberth–Ehrlich from a tilted circle enclosing all roots.
    let radius = 1.0
        + coeffs[..n]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            C64::from_polar(0.5 * radius, theta)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = horner(coeffs, z[i]);
            if p == ZERO {
                continue;
            }
            let ratio = p / dp;
            let repulsion: C64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d == ZERO {
                        ZERO
                    } else {
                        ONE / d
                    }
                })
                .sum();
            let denom = ONE - ratio * repulsion;
            let step = if denom == ZERO { ratio } else { ratio / denom };
            z[i] -= step;
            max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

fn qr_eigenvalues(m: &ComplexMatrix) -> Vec<C64> {
    let mut h = hessenberg(m);
    let mut active = h.rows();
    let mut out = Vec::with_capacity(active);
    let mut iterations = 0usize;
    while active > 0 {
        if active == 1 {
            out.push(h[(0, 0)]);
            break;
        }
        let k = active - 1;
        let sub = h[(k, k - 1)].norm();
        if sub <= f64::EPSILON * (h[(k, k)].norm() + h[(k - 1, k - 1)].norm()) || iterations > 10_000 {
            out.push(h[(k, k)]);
            active -= 1;
            iterations = 0;
            continue;
        }
        iterations += 1;
        let shift = if iterations % 11 == 0 {
            h[(k, k)] + C64::new(sub, 0.0)
        } else {
            wilkinson_shift(h[(k - 1, k - 1)], h[(k - 1, k)], h[(k, k - 1)], h[(k, k)])
        };
        qr_step(&mut h, active, shift);
    }
    out
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - 4.0 * det).sqrt();
    let l1 = (tr + disc) / 2.0;
    let l2 = (tr - disc) / 2.0;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One shifted QR sweep on the leading `active`×`active` block via Givens
/// rotations.
fn qr_step(h: &mut ComplexMatrix, active: usize, shift: C64) {
    let n = h.rows();
    for i in 0..active {
        h[(i, i)] -= shift;
    }
    let mut rotations = Vec::with_capacity(active - 1);
    for k in 0..active - 1 {
        let a = h[(k, k)];
        let b = h[(k + 1, k)];
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (cs, sn) = if r == 0.0 { (ONE, ZERO) } else { (a / r, b / r) };
        // [c* s*; -s c] applied to rows k, k+1
        for j in 0..n {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = cs.conj() * x + sn.conj() * y;
            h[(k + 1, j)] = -sn * x + cs * y;
        }
        rotations.push((cs, sn));
    }
    for (k, (cs, sn)) in rotations.into_iter().enumerate() {
        for i in 0..n {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * cs + y * sn;
            h[(i, k + 1)] = -x * sn.conj() + y * cs.conj();
        }
    }
    for i in 0..active {
        h[(i, i)] += shift;
    }
}

fn hessenberg(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let alpha = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let phase = if x[0] == ZERO { ONE } else { x[0] / x[0].norm() };
        let mut v = x.clone();
        v[0] += phase * alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= vnorm;
        }
        // H <- (I - 2vv*) H (I - 2vv*)
        for j in 0..n {
            let dot: C64 = (0..v.len()).map(|i| v[i].conj() * h[(k + 1 + i, j)]).sum();
            for i in 0..v.len() {
                h[(k + 1 + i, j)] -= 2.0 * v[i] * dot;
            }
        }
        for i in 0..n {
            let dot: C64 = (0..v.len()).map(|j| h[(i, k + 1 + j)] * v[j]).sum();
            for j in 0..v.len() {
                h[(i, k + 1 + j)] -= 2.0 * dot * v[j].conj();
            }
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn triangular_eigenvalues() {
        let d = [c(1.0, 0.5), c(-2.0, 0.0), c(0.0, 3.0), c(4.0, -1.0)];
        let mut m = ComplexMatrix::from_diag(&d);
        m[(0, 3)] = c(2.0, 1.0);
        m[(1, 2)] = c(-1.0, 0.0);
        let ev = sorted(eigenvalues(&m));
        let ex = sorted(d.to_vec());
        for (a, b) in ev.iter().zip(&ex) {
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn jordan_double_root() {
        let a = c(0.5, 1.0 / 3.0);
        let m = ComplexMatrix::from_rows(&[vec![a, ONE], vec![ZERO, a]]).unwrap();
        for z in eigenvalues(&m) {
            assert!((z - a).norm() < 1e-7);
        }
    }

    #[test]
    fn qr_path_matches_char_poly_on_similarity() {
        // 6x6 similarity transform of a known diagonal.
        let n = 6;
        let d: Vec<C64> = (0..n).map(|k| c(k as f64 - 2.5, 0.3 * k as f64)).collect();
        let mut t = ComplexMatrix::identity(n);
        for i in 0..n {
            for j in i + 1..n {
                t[(i, j)] = c(0.1 * (i + j) as f64, -0.05 * j as f64);
            }
        }
        let tinv = crate::matrix::lu_inverse(&t).unwrap();
        let m = &(&t * &ComplexMatrix::from_diag(&d)) * &tinv;
        let ev = sorted(eigenvalues(&m));
        for (a, b) in ev.iter().zip(sorted(d.clone()).iter()) {
            assert!((a - b).norm() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn hermitian_spectrum() {
        let m = ComplexMatrix::from_rows(&[vec![c(2.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(2.0, 0.0)]])
            .unwrap();
        let ev = hermitian_eigenvalues(&m);
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
    }
}
