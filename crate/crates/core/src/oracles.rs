//! Closed-form solutions transcribed term by term, kept apart from the
//! generic engine so that agreement between the two means something.
//!
//! Only `C64` arithmetic and local 2×2 helpers are used here.

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);

fn sign(p: u8) -> f64 {
    if p % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check(x: f64, t: f64, den: C64, values: &[C64]) -> Result<()> {
    if den.norm() == 0.0 || !den.is_finite() || values.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularPoint {
            x,
            t,
            indicator: den.norm(),
        });
    }
    Ok(())
}

/// Scalar n = 1 data with V = 0, R = diag(d1, d2), m1 = m2 = 1.
#[derive(Clone, Copy, Debug)]
pub struct Example24Params {
    pub p: u8,
    pub a1: C64,
    pub a2: C64,
    pub d1: C64,
    pub d2: C64,
    pub phi1: C64,
    pub phi2: C64,
    pub psi1: C64,
    pub psi2: C64,
}

#[derive(Clone, Copy, Debug)]
pub struct Example24Fields {
    pub s: C64,
    pub v1: C64,
    pub v2: C64,
    pub rho1: C64,
}

pub fn example24_fields(q: &Example24Params, x: f64, t: f64) -> Result<Example24Fields> {
    if q.a1 == q.a2 {
        return Err(Error::PreconditionViolated("a1 = a2".into()));
    }
    let (a1, a2, d1, d2) = (q.a1, q.a2, q.d1, q.d2);
    let phi1 = q.phi1 * (-I * (x / 4.0 * a1 - t / a1 * d1)).exp();
    let phi2 = q.phi2 * (I * (x / 4.0 * a1 - t / a1 * d2)).exp();
    let psi1 = q.psi1 * (-I * (x / 4.0 * a2.conj() - t / a2.conj() * d1.conj())).exp();
    let psi2 = q.psi2 * (I * (x / 4.0 * a2.conj() - t / a2.conj() * d2.conj())).exp();

    let p11 = q.phi1 * (-I * (x / 4.0 * (a1 - a2) - (t / a1 - t / a2) * d1)).exp() * q.psi1.conj();
    let p22 = q.phi2 * (I * (x / 4.0 * (a1 - a2) - (t / a1 - t / a2) * d2)).exp() * q.psi2.conj();
    let s = (p11 + p22) / (a1 - a2);

    let v1 = psi1.conj() * phi2 / s;
    let v2 = sign(q.p) * psi2.conj() * phi1 / s;

    let u0 = ONE - psi1.conj() * phi1 / (a1 * s);
    let u1 = -psi1.conj() * phi2 / (a1 * s);
    let w0 = ONE + psi1.conj() * phi1 / (a2 * s);
    let w1 = psi2.conj() * phi1 / (a2 * s);
    let rho1 = u0 * d1 * w0 - u1 * d2 * w1;

    check(x, t, s, &[v1, v2, rho1])?;
    Ok(Example24Fields { s, v1, v2, rho1 })
}

/// CCDE example: n = 1, a₁ = a, a₂ = ā, d real, Φᵢ(0,0) = cᵢ.
#[derive(Clone, Copy, Debug)]
pub struct Example42Params {
    pub p: u8,
    pub a: C64,
    pub d: f64,
    pub c1: C64,
    pub c2: C64,
}

#[derive(Clone, Copy, Debug)]
pub struct Example42Fields {
    pub s: C64,
    pub v: C64,
    pub rho: C64,
}

/// The S-term carries `−(−1)^p|c₂|²`, which is what the identity
/// `aS − Sā = iΠ j^{p+1} Π*` forces for these initial values.
pub fn example42_fields(q: &Example42Params, x: f64, t: f64) -> Result<Example42Fields> {
    let a = q.a;
    let ab = a.conj();
    let d = C64::new(q.d, 0.0);
    let phase = (a - ab) * (x / 4.0) - d * (t / a - t / ab);
    let e_minus = (-I * phase).exp();
    let e_plus = (I * phase).exp();
    let s = I / (a - ab) * (q.c1.norm_sqr() * e_minus - sign(q.p) * q.c2.norm_sqr() * e_plus);
    let v = I * q.c1.conj() * q.c2 / s * (I * ((a + ab) * (x / 4.0) - d * (t / a + t / ab))).exp();
    let rho = d * (ONE - I * q.c1.norm_sqr() * e_minus / (a * s)) * (ONE + I * q.c1.norm_sqr() * e_minus / (ab * s))
        + sign(q.p) * d * (v * v).norm() / a.norm_sqr();
    check(x, t, s, &[v, rho])?;
    Ok(Example42Fields { s, v, rho })
}

/// Jordan A = [[a,1],[0,a]], R = iI₂, C₁ = [c11, 0]ᵀ, C₂ = [0, c22]ᵀ.
#[derive(Clone, Copy, Debug)]
pub struct Case1Params {
    pub p: u8,
    pub a: C64,
    pub c11: C64,
    pub c22: C64,
}

pub fn case1_fields(q: &Case1Params, x: f64, t: f64) -> Result<(C64, C64)> {
    let a1 = q.a.re;
    let a2 = q.a.im;
    let abs2 = q.a.norm_sqr();
    let arg = C64::new(x, -4.0 * t / abs2);
    let den = 4.0 * a1 * a1 * q.c11.norm_sqr() * (-I * a1 * arg / 2.0).exp()
        + sign(q.p) * q.c22.norm_sqr() * (I * a1 * arg / 2.0).exp();
    let v = 4.0 * a1 * a1 * q.c11.conj() * q.c22 * (-a2 * C64::new(x, 4.0 * t / abs2) / 2.0).exp() / den;
    let rho = I
        - 32.0 * I * sign(q.p) * a1.powi(4) * q.c11.norm_sqr() * q.c22.norm_sqr() / abs2 / (den * den);
    check(x, t, den, &[v, rho])?;
    Ok((v, rho))
}

/// p = 1, real c11, c12, c22, C₁ = [c11, c12]ᵀ, C₂ = [0, c22]ᵀ.
#[derive(Clone, Copy, Debug)]
pub struct Case2Params {
    pub a: C64,
    pub c11: f64,
    pub c12: f64,
    pub c22: f64,
}

pub fn case2_gammas(q: &Case2Params, x: f64, t: f64) -> (C64, C64) {
    let base = I * q.c12 * x - 2.0 * q.c11;
    let ab = q.a.conj();
    (base - 4.0 * q.c12 * t / (ab * ab), base - 4.0 * q.c12 * t / (q.a * q.a))
}

pub fn case2_fields(q: &Case2Params, x: f64, t: f64) -> Result<(C64, C64)> {
    let a = q.a;
    let ab = a.conj();
    let a1 = a.re;
    let a2 = a.im;
    let abs2 = a.norm_sqr();
    let (c11, c12, c22) = (q.c11, q.c12, q.c22);
    let (g1, g2) = case2_gammas(q, x, t);
    let ep = (I * a1 * x + 4.0 * a1 * t / abs2).exp();
    let em = (-I * a1 * x - 4.0 * a1 * t / abs2).exp();
    let den = c22.powi(4) * ep + c12.powi(4) * em - 2.0 * c12 * c12 * c22 * c22 - a1 * a1 * c22 * c22 * g1 * g2;

    let v = 2.0 * a1 * c22
        * (c22 * c22 * (a1 * g1 - 2.0 * c12) * (I * a * x / 2.0 + 2.0 * t / a).exp()
            + c12 * c12 * (a1 * g2 + 2.0 * c12) * (-I * ab * x / 2.0 - 2.0 * t / ab).exp())
        / den;

    let bracket = c22.powi(4) * (a1 * ab * g1 + 2.0 * I * a2 * c12) * (a1 * a * g2 - 2.0 * I * a2 * c12) * ep
        + c12.powi(4) * (a1 * ab * g1 - 2.0 * I * a2 * c12) * (a1 * a * g2 + 2.0 * I * a2 * c12) * em
        + 2.0 * c12 * c12 * c22 * c22
            * (-a1 * a1 * (a1 * a1 - a2 * a2) * g1 * g2
                + 32.0 * (I * c12 * x - 2.0 * c11) * c12 * a2 * a2 * a1.powi(4) / (abs2 * abs2) * t
                - 4.0 * a2 * a2 * c12 * c12);
    let rho = I + 8.0 * I * a1 * a1 * c22 * c22 / (abs2 * abs2 * den * den) * bracket;
    check(x, t, den, &[v, rho])?;
    Ok((v, rho))
}

/// Jordan A = [[a,1],[0,a]], R = iI₂, arbitrary C₁, C₂ ∈ ℂ².
#[derive(Clone, Copy, Debug)]
pub struct JordanParams {
    pub p: u8,
    pub a: C64,
    pub c1: [C64; 2],
    pub c2: [C64; 2],
}

type M2 = [[C64; 2]; 2];
type V2 = [C64; 2];

fn mv(m: &M2, v: &V2) -> V2 {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

fn vm(u: &V2, m: &M2) -> V2 {
    [u[0] * m[0][0] + u[1] * m[1][0], u[0] * m[0][1] + u[1] * m[1][1]]
}

fn dot(u: &V2, v: &V2) -> C64 {
    u[0] * v[0] + u[1] * v[1]
}

fn conj_row(v: &V2) -> V2 {
    [v[0].conj(), v[1].conj()]
}

fn outer(u: &V2, v: &V2) -> M2 {
    [[u[0] * v[0].conj(), u[0] * v[1].conj()], [u[1] * v[0].conj(), u[1] * v[1].conj()]]
}

fn inv2(m: &M2) -> (M2, C64) {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    (
        [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]],
        det,
    )
}

impl JordanParams {
    /// `Φ₁(x,t) = e^{−((i/4)ax + t/a)}(I − (i/4)xA₀ + (t/a²)A₀)C₁`.
    pub fn phi1(&self, x: f64, t: f64) -> V2 {
        let a = self.a;
        let e = (-(I / 4.0 * a * x + t / a)).exp();
        let off = -I / 4.0 * x + t / (a * a);
        [e * (self.c1[0] + off * self.c1[1]), e * self.c1[1]]
    }

    /// `Φ₂(x,t) = e^{(i/4)ax + t/a}(I + (i/4)xA₀ − (t/a²)A₀)C₂`.
    pub fn phi2(&self, x: f64, t: f64) -> V2 {
        let a = self.a;
        let e = (I / 4.0 * a * x + t / a).exp();
        let off = I / 4.0 * x - t / (a * a);
        [e * (self.c2[0] + off * self.c2[1]), e * self.c2[1]]
    }
}

/// `K = i(Φ₁(x)Φ₁(−x)* + (−1)^p Φ₂(x)Φ₂(−x)*)` and S by back-substitution.
pub fn jordan_ks(q: &JordanParams, x: f64, t: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (k, s) = jordan_ks_raw(q, x, t)?;
    let to = |m: M2| ComplexMatrix::from_rows(&[m[0].to_vec(), m[1].to_vec()]).expect("2x2");
    Ok((to(k), to(s)))
}

fn jordan_ks_raw(q: &JordanParams, x: f64, t: f64) -> Result<(M2, M2)> {
    let sum = q.a + q.a.conj();
    if sum.norm() == 0.0 {
        return Err(Error::PreconditionViolated("a + ā = 0".into()));
    }
    let o1 = outer(&q.phi1(x, t), &q.phi1(-x, t));
    let o2 = outer(&q.phi2(x, t), &q.phi2(-x, t));
    let sg = sign(q.p);
    let mut k = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for l in 0..2 {
            k[i][l] = I * (o1[i][l] + sg * o2[i][l]);
        }
    }
    let s22 = k[1][1] / sum;
    let s12 = (k[0][1] - s22) / sum;
    let s21 = (k[1][0] - s22) / sum;
    let s11 = (k[0][0] - s12 - s21) / sum;
    Ok((k, [[s11, s12], [s21, s22]]))
}

/// ṽ and ρ̃ for arbitrary C₁, C₂ from the nonlocal scalar formulas.
pub fn jordan_fields(q: &JordanParams, x: f64, t: f64) -> Result<(C64, C64)> {
    let (_, s) = jordan_ks_raw(q, x, t)?;
    let (si, det) = inv2(&s);
    let a = q.a;
    let ai: M2 = [[ONE / a, -ONE / (a * a)], [C64::new(0.0, 0.0), ONE / a]];
    let ai_adj: M2 = [[ai[0][0].conj(), ai[1][0].conj()], [ai[0][1].conj(), ai[1][1].conj()]];
    let sg = sign(q.p);
    let f1 = q.phi1(x, t);
    let f2 = q.phi2(x, t);
    let f1m = conj_row(&q.phi1(-x, t));
    let f2m = conj_row(&q.phi2(-x, t));

    let v = I * dot(&vm(&f1m, &si), &f2);

    let t1 = ONE - I * sg * dot(&vm(&vm(&f2m, &si), &ai), &f2);
    let t2 = ONE - I * sg * dot(&vm(&vm(&f2m, &ai_adj), &si), &f2);
    let t3 = dot(&vm(&vm(&f2m, &si), &ai), &f1);
    let t4 = dot(&vm(&f1m, &ai_adj), &mv(&si, &f2));
    let rho = I * t1 * t2 + I * sg * t3 * t4;
    check(x, t, det, &[v, rho])?;
    Ok((v, rho))
}

/// Tagged oracle parameters.
#[derive(Clone, Copy, Debug)]
pub enum OracleParams {
    Example24(Example24Params),
    Example42(Example42Params),
    Case1(Case1Params),
    Case2(Case2Params),
    JordanKS(JordanParams),
}

impl OracleParams {
    pub fn name(&self) -> &'static str {
        match self {
            OracleParams::Example24(_) => "example24",
            OracleParams::Example42(_) => "example42",
            OracleParams::Case1(_) => "case1",
            OracleParams::Case2(_) => "case2",
            OracleParams::JordanKS(_) => "jordan",
        }
    }

    /// `(ṽ, ρ̃)` at (x,t); for Example 2.4 these are ṽ₁ and ρ̃₁.
    pub fn v_rho(&self, x: f64, t: f64) -> Result<(C64, C64)> {
        match self {
            OracleParams::Example24(q) => example24_fields(q, x, t).map(|f| (f.v1, f.rho1)),
            OracleParams::Example42(q) => example42_fields(q, x, t).map(|f| (f.v, f.rho)),
            OracleParams::Case1(q) => case1_fields(q, x, t),
            OracleParams::Case2(q) => case2_fields(q, x, t),
            OracleParams::JordanKS(q) => jordan_fields(q, x, t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case1_origin_value() {
        let q = Case1Params {
            p: 1,
            a: C64::new(0.5, 1.0 / 3.0),
            c11: C64::new(1.0, 2.0),
            c22: C64::new(4.0, 3.0),
        };
        let (v, _) = case1_fields(&q, 0.0, 0.0).unwrap();
        assert!((v - C64::new(-0.5, 0.25)).norm() < 1e-14);
    }

    #[test]
    fn case1_without_c22_is_undressed() {
        let q = Case1Params {
            p: 1,
            a: C64::new(0.5, 1.0 / 3.0),
            c11: C64::new(1.0, 2.0),
            c22: C64::new(0.0, 0.0),
        };
        let (v, rho) = case1_fields(&q, 1.3, -0.4).unwrap();
        assert_eq!(v, C64::new(0.0, 0.0));
        assert_eq!(rho, I);
    }

    #[test]
    fn case2_gammas_at_origin() {
        let q = Case2Params {
            a: C64::new(1.0 / 3.0, 0.2),
            c11: 3.0,
            c12: 1.0,
            c22: 0.5,
        };
        let (g1, g2) = case2_gammas(&q, 0.0, 0.0);
        assert_eq!(g1, C64::new(-6.0, 0.0));
        assert_eq!(g2, C64::new(-6.0, 0.0));
    }

    #[test]
    fn jordan_k_at_origin() {
        let q = JordanParams {
            p: 1,
            a: C64::new(0.5, 1.0 / 3.0),
            c1: [C64::new(1.0, 2.0), C64::new(0.0, 0.0)],
            c2: [C64::new(0.0, 0.0), C64::new(4.0, 3.0)],
        };
        let (k, _) = jordan_ks(&q, 0.0, 0.0).unwrap();
        assert!((k[(0, 0)] - I * 5.0).norm() < 1e-14);
        assert!((k[(1, 1)] + I * 25.0).norm() < 1e-14);
        assert_eq!(k[(0, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn example42_without_c1() {
        let q = Example42Params {
            p: 0,
            a: C64::new(0.7, -0.4),
            d: 1.3,
            c1: C64::new(0.0, 0.0),
            c2: C64::new(0.3, -0.8),
        };
        let f = example42_fields(&q, 0.4, 0.9).unwrap();
        assert_eq!(f.v, C64::new(0.0, 0.0));
        assert!((f.rho - C64::new(1.3, 0.0)).norm() < 1e-15);
    }
}
