//! Trivial seeds (V = 0, constant diagonal R) together with their exact
//! Π-propagators and wave functions.

use crate::error::{Error, Result};
use crate::matrix::{lu_inverse, mat_exp, ComplexMatrix, C64, I, ONE, ZERO};

/// Block sizes `m1`, `m2` and the sign exponent `p ∈ {0, 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockStructure {
    pub m1: usize,
    pub m2: usize,
    pub p: u8,
}

impl BlockStructure {
    pub fn new(m1: usize, m2: usize, p: u8) -> Result<Self> {
        if m1 == 0 || m2 == 0 {
            return Err(Error::Shape(format!("block sizes must be positive, got m1={m1}, m2={m2}")));
        }
        if p > 1 {
            return Err(Error::PreconditionViolated(format!("p must be 0 or 1, got {p}")));
        }
        Ok(Self { m1, m2, p })
    }

    /// m1 = m2 = 1.
    pub fn scalar(p: u8) -> Self {
        Self { m1: 1, m2: 1, p: p.min(1) }
    }

    pub fn m(&self) -> usize {
        self.m1 + self.m2
    }

    /// Diagonal entry `k` of `j`.
    pub fn j_entry(&self, k: usize) -> f64 {
        if k < self.m1 {
            1.0
        } else {
            -1.0
        }
    }

    /// `j = diag(I_{m1}, -I_{m2})`.
    pub fn j(&self) -> ComplexMatrix {
        let d: Vec<C64> = (0..self.m()).map(|k| C64::new(self.j_entry(k), 0.0)).collect();
        ComplexMatrix::from_diag(&d)
    }

    /// `j^k`, which is `I` for even `k` and `j` for odd `k`.
    pub fn j_pow(&self, k: u32) -> ComplexMatrix {
        if k % 2 == 0 {
            ComplexMatrix::identity(self.m())
        } else {
            self.j()
        }
    }

    /// `(-1)^p`.
    pub fn sign(&self) -> f64 {
        if self.p == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn p(&self) -> u32 {
        self.p as u32
    }

    /// Block-diagonal part `(M + j M j)/2`.
    pub fn diag_part(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let j = self.j();
        (m + &(&(&j * m) * &j)).scale(C64::new(0.5, 0.0))
    }

    /// Block anti-diagonal part `(M - j M j)/2`.
    pub fn offdiag_part(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let j = self.j();
        (m - &(&(&j * m) * &j)).scale(C64::new(0.5, 0.0))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SeedKind {
    /// `V = 0`, `R = diag(d_1, …, d_m)`.
    ConstDiag(Vec<C64>),
    /// `V = 0`, `R = ρ0 · I_m`.
    Scalar(C64),
}

/// Coefficients of `G = -λ q1 - q0`, `F = -Q_{-1}/λ`.
#[derive(Clone, Debug)]
pub struct Coefficients {
    pub q1: ComplexMatrix,
    pub q0: ComplexMatrix,
    pub qm1: ComplexMatrix,
}

#[derive(Clone, Debug)]
pub struct SeedSolution {
    structure: BlockStructure,
    kind: SeedKind,
}

impl SeedSolution {
    pub fn new(structure: BlockStructure, kind: SeedKind) -> Result<Self> {
        if let SeedKind::ConstDiag(d) = &kind {
            if d.len() != structure.m() {
                return Err(Error::Shape(format!(
                    "seed diagonal has {} entries, expected m = {}",
                    d.len(),
                    structure.m()
                )));
            }
        }
        let seed = Self { structure, kind };
        if seed.diag().iter().any(|d| !d.is_finite()) {
            return Err(Error::PreconditionViolated("seed R has non-finite entries".into()));
        }
        Ok(seed)
    }

    pub fn const_diag(structure: BlockStructure, d: Vec<C64>) -> Result<Self> {
        Self::new(structure, SeedKind::ConstDiag(d))
    }

    pub fn scalar(structure: BlockStructure, rho: C64) -> Self {
        Self {
            structure,
            kind: SeedKind::Scalar(rho),
        }
    }

    pub fn structure(&self) -> BlockStructure {
        self.structure
    }

    pub fn kind(&self) -> &SeedKind {
        &self.kind
    }

    /// Diagonal of R.
    pub fn diag(&self) -> Vec<C64> {
        match &self.kind {
            SeedKind::ConstDiag(d) => d.clone(),
            SeedKind::Scalar(r) => vec![*r; self.structure.m()],
        }
    }

    pub fn v(&self, _x: f64, _t: f64) -> ComplexMatrix {
        let m = self.structure.m();
        ComplexMatrix::zeros(m, m)
    }

    pub fn r(&self, _x: f64, _t: f64) -> ComplexMatrix {
        ComplexMatrix::from_diag(&self.diag())
    }

    /// `q1 = -(i/4) j`, `q0 = (i/2) j^{p+1} V`, `Q_{-1} = i j R - j^p V_t`.
    pub fn coefficients(&self, x: f64, t: f64) -> Coefficients {
        let s = self.structure;
        let j = s.j();
        let q1 = j.scale(C64::new(0.0, -0.25));
        let q0 = (&s.j_pow(s.p() + 1) * &self.v(x, t)).scale(C64::new(0.0, 0.5));
        // V_t = 0 for every built-in seed.
        let qm1 = (&j * &self.r(x, t)).scale(I);
        Coefficients { q1, q0, qm1 }
    }

    /// `G(x,t,λ) = (i/4) λ j - (i/2) j^{p+1} V`.
    pub fn g(&self, x: f64, t: f64, lambda: C64) -> ComplexMatrix {
        let k = self.coefficients(x, t);
        -&(&k.q1.scale(lambda) + &k.q0)
    }

    /// `F(x,t,λ) = (-i j R + j^p V_t)/λ`.
    pub fn f(&self, x: f64, t: f64, lambda: C64) -> Result<ComplexMatrix> {
        if lambda == ZERO {
            return Err(Error::LambdaZero);
        }
        Ok(self.coefficients(x, t).qm1.scale(-ONE / lambda))
    }

    /// Seed wave function `w = exp{(i/4) λ x j - (i t/λ) j R}`, normalized to
    /// `w(0,0,λ) = I`.
    pub fn wave(&self, x: f64, t: f64, lambda: C64) -> Result<ComplexMatrix> {
        if lambda == ZERO {
            return Err(Error::LambdaZero);
        }
        let s = self.structure;
        let d: Vec<C64> = self
            .diag()
            .iter()
            .enumerate()
            .map(|(k, dk)| {
                let jk = s.j_entry(k);
                (I * 0.25 * lambda * x * jk - I * t / lambda * jk * dk).exp()
            })
            .collect();
        Ok(ComplexMatrix::from_diag(&d))
    }
}

/// Which of the two propagations the Π-blocks follow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Π₁: `Π_x = A Π q1 + Π q0`, `Π_t = A⁻¹ Π Q_{-1}`.
    Direct,
    /// Π₂: `Π_x = -A₂* Π q1* - Π q0*`, `Π_t = -(A₂*)⁻¹ Π Q_{-1}*`.
    Adjoint,
}

/// Exact closed-form propagation of Π-blocks over a trivial seed.
///
/// For V = 0 and R = diag(d) the system decouples by columns: column `k`
/// evolves as `exp{j_k(-(i/4) x M + i t d_k M⁻¹)}` where `M = A₁` on the
/// direct side and `M = A₂*` with `d_k` conjugated on the adjoint side.
#[derive(Clone, Debug)]
pub struct Propagator {
    structure: BlockStructure,
    side: Side,
    m: ComplexMatrix,
    m_inv: ComplexMatrix,
    d: Vec<C64>,
}

impl Propagator {
    /// `a` is A₁ for the direct side and A₂ for the adjoint side.
    pub fn new(seed: &SeedSolution, a: &ComplexMatrix, side: Side) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let (m, d) = match side {
            Side::Direct => (a.clone(), seed.diag()),
            Side::Adjoint => (a.adjoint(), seed.diag().iter().map(|z| z.conj()).collect()),
        };
        let m_inv = lu_inverse(&m).map_err(|_| Error::SingularA)?;
        Ok(Self {
            structure: seed.structure(),
            side,
            m,
            m_inv,
            d,
        })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn n(&self) -> usize {
        self.m.rows()
    }

    /// Propagator acting on column `k`.
    pub fn column_exp(&self, k: usize, x: f64, t: f64) -> ComplexMatrix {
        let jk = self.structure.j_entry(k);
        let gen = &self.m.scale(C64::new(0.0, -0.25 * x * jk)) + &self.m_inv.scale(I * t * self.d[k] * jk);
        mat_exp(&gen)
    }

    /// Π(x,t) from Π(0,0).
    pub fn propagate(&self, pi0: &ComplexMatrix, x: f64, t: f64) -> ComplexMatrix {
        assert_eq!(pi0.cols(), self.structure.m(), "Π has m columns");
        let mut out = ComplexMatrix::zeros(pi0.rows(), pi0.cols());
        let mut cache: Vec<(f64, C64, ComplexMatrix)> = Vec::new();
        for k in 0..pi0.cols() {
            let jk = self.structure.j_entry(k);
            let dk = self.d[k];
            let e = match cache.iter().find(|(j, d, _)| *j == jk && *d == dk) {
                Some((_, _, e)) => e.clone(),
                None => {
                    let e = self.column_exp(k, x, t);
                    cache.push((jk, dk, e.clone()));
                    e
                }
            };
            out.set_col(k, &e.mat_vec(&pi0.col(k)));
        }
        out
    }
}

/// Closed-form Φ-blocks: returns `(Φ₁, Φ₂)` (or `(Ψ₁, Ψ₂)` on the adjoint
/// side), i.e. the first `m1` and last `m2` columns of the propagated Π.
pub fn propagate_phi(
    seed: &SeedSolution,
    a: &ComplexMatrix,
    c1: &ComplexMatrix,
    c2: &ComplexMatrix,
    x: f64,
    t: f64,
    side: Side,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let s = seed.structure();
    if c1.cols() != s.m1 || c2.cols() != s.m2 || c1.rows() != a.rows() || c2.rows() != a.rows() {
        return Err(Error::Shape("Φ blocks must be n×m1 and n×m2".into()));
    }
    let prop = Propagator::new(seed, a, side)?;
    let pi = prop.propagate(&c1.hcat(c2), x, t);
    Ok((pi.block(0, 0, a.rows(), s.m1), pi.block(0, s.m1, a.rows(), s.m2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    #[test]
    fn coefficients_for_identity_seed() {
        let s = BlockStructure::scalar(0);
        let seed = SeedSolution::const_diag(s, vec![ONE, ONE]).unwrap();
        let k = seed.coefficients(0.3, -1.0);
        assert_eq!(k.q1, ComplexMatrix::from_diag(&[c(0.0, -0.25), c(0.0, 0.25)]));
        assert_eq!(k.q0.max_norm(), 0.0);
        assert_eq!(k.qm1, ComplexMatrix::from_diag(&[I, -I]));
    }

    #[test]
    fn scalar_i_seed_gives_minus_j() {
        let seed = SeedSolution::scalar(BlockStructure::scalar(1), I);
        let k = seed.coefficients(0.0, 0.0);
        assert_eq!(k.qm1, ComplexMatrix::from_diag(&[-ONE, ONE]));
    }

    #[test]
    fn q1_ignores_p() {
        let a = SeedSolution::scalar(BlockStructure::scalar(0), I).coefficients(1.0, 2.0);
        let b = SeedSolution::scalar(BlockStructure::scalar(1), I).coefficients(1.0, 2.0);
        assert_eq!(a.q1, b.q1);
    }

    #[test]
    fn wave_example() {
        let seed = SeedSolution::scalar(BlockStructure::scalar(1), I);
        let w = seed.wave(4.0, 0.0, c(2.0, 0.0)).unwrap();
        assert!((w[(0, 0)] - c(0.0, 2.0).exp()).norm() < 1e-15);
        assert!((w[(1, 1)] - c(0.0, -2.0).exp()).norm() < 1e-15);
        assert!(matches!(seed.wave(0.0, 0.0, ZERO), Err(Error::LambdaZero)));
    }

    #[test]
    fn singular_a_rejected() {
        let seed = SeedSolution::scalar(BlockStructure::scalar(1), I);
        let a = ComplexMatrix::zeros(2, 2);
        assert!(matches!(Propagator::new(&seed, &a, Side::Direct), Err(Error::SingularA)));
    }
}
