//! Darboux matrix w_A, dressed wave functions, the large-x block χ(t,λ)
//! and the reflection coefficient.

use crate::error::{Error, Result};
use crate::gbdt::{FaultTarget, PointEval, TransformedSolution};
use crate::matrix::{eigenvalues, hermitian_eigenvalues, lu_inverse, mat_exp, ComplexMatrix, C64, I};

/// Minimum distance from λ to σ(A₁) (or σ(θ)).
pub const SPECTRUM_TOLERANCE: f64 = 1e-10;
/// Successive κ iterates must agree to this (relative to max(1, ‖κ‖)).
pub const KAPPA_TOLERANCE: f64 = 1e-8;
/// First sample point of the κ doubling.
pub const KAPPA_START: f64 = 8.0;
const KAPPA_MAX_X: f64 = 2048.0;

pub struct DarbouxEvaluator<'a> {
    sol: &'a TransformedSolution,
    spectrum: Vec<C64>,
}

/// Converged κ(t) with the iterates that produced it.
#[derive(Clone, Debug)]
pub struct KappaEstimate {
    pub kappa: ComplexMatrix,
    /// `(X, M(X))` for every sample point visited.
    pub iterates: Vec<(f64, ComplexMatrix)>,
    pub last_difference: f64,
}

#[derive(Clone, Debug)]
pub struct Asymptotics {
    pub chi: ComplexMatrix,
    pub kappa: KappaEstimate,
}

impl<'a> DarbouxEvaluator<'a> {
    pub fn new(sol: &'a TransformedSolution) -> Self {
        Self {
            sol,
            spectrum: eigenvalues(&sol.params().a1),
        }
    }

    pub fn solution(&self) -> &TransformedSolution {
        self.sol
    }

    pub fn spectrum(&self) -> &[C64] {
        &self.spectrum
    }

    fn check_lambda(&self, lambda: C64) -> Result<()> {
        for &e in &self.spectrum {
            if (lambda - e).norm() < SPECTRUM_TOLERANCE {
                return Err(Error::LambdaOnSpectrum { lambda, eigenvalue: e });
            }
        }
        Ok(())
    }

    /// `w_A = I − Π₂* S⁻¹ (A₁ − λ)⁻¹ Π₁` at (x,t).
    pub fn darboux(&self, x: f64, t: f64, lambda: C64) -> Result<ComplexMatrix> {
        self.check_lambda(lambda)?;
        let p = self.sol.point(x, t)?;
        self.darboux_at(&p, lambda)
    }

    /// Same as [`darboux`](Self::darboux) reusing a point evaluation.
    pub fn darboux_at(&self, p: &PointEval, lambda: C64) -> Result<ComplexMatrix> {
        self.check_lambda(lambda)?;
        let a1 = &self.sol.params().a1;
        let n = a1.rows();
        let resolvent = lu_inverse(&(a1 - &ComplexMatrix::scalar(n, lambda))).map_err(|_| Error::LambdaOnSpectrum {
            lambda,
            eigenvalue: lambda,
        })?;
        let m = p.pi1.cols();
        let mut w = &ComplexMatrix::identity(m) - &(&(&(&p.pi2.adjoint() * &p.s_inv) * &resolvent) * &p.pi1);
        if let Some(f) = self.sol.fault().filter(|f| f.target == FaultTarget::Darboux) {
            f.perturb_additive(&mut w);
        }
        Ok(w)
    }

    /// `w̃ = w_A · w`.
    pub fn dressed_wave(&self, x: f64, t: f64, lambda: C64) -> Result<ComplexMatrix> {
        let w = self.sol.seed().wave(x, t, lambda)?;
        Ok(&self.darboux(x, t, lambda)? * &w)
    }

    fn require_local_p0(&self) -> Result<()> {
        let params = self.sol.params();
        if !params.case.is_local() {
            return Err(Error::PreconditionViolated(format!(
                "asymptotics need the local reduction, got {}",
                params.case
            )));
        }
        if params.structure.p != 0 {
            return Err(Error::PreconditionViolated("asymptotics are only available for p = 0".into()));
        }
        Ok(())
    }

    /// Checks `S(0,t) > 0` and `sgn(t) R ≥ 0`.
    fn check_positivity(&self, t: f64) -> Result<PointEval> {
        let p0 = self.sol.point(0.0, t)?;
        let min_s = hermitian_eigenvalues(&p0.s)[0];
        if !(min_s > 0.0) {
            return Err(Error::PreconditionViolated(format!("S(0,{t}) is not positive (min eigenvalue {min_s:e})")));
        }
        let r = self.sol.seed().r(0.0, t);
        let sgn = if t > 0.0 {
            1.0
        } else if t < 0.0 {
            -1.0
        } else {
            0.0
        };
        let min_r = hermitian_eigenvalues(&r.scale(C64::new(sgn, 0.0)))[0];
        if min_r < -1e-14 {
            return Err(Error::PreconditionViolated(format!("sgn(t) R is not nonnegative at t = {t}")));
        }
        Ok(p0)
    }

    /// κ(t) = lim_{x→∞} (e^{−ixA/4} S(x,t) e^{ixA*/4})⁻¹ by doubling from
    /// `KAPPA_START`.
    pub fn kappa(&self, t: f64) -> Result<KappaEstimate> {
        self.require_local_p0()?;
        self.check_positivity(t)?;
        let a = &self.sol.params().a1;
        if self.spectrum.iter().any(|z| z.im > 1e-12) {
            return Err(Error::PreconditionViolated("σ(A) must lie in the closed lower half-plane".into()));
        }
        let sample = |x: f64| -> Result<ComplexMatrix> {
            let st = self.sol.evaluate_pi_s(x, t)?;
            let left = mat_exp(&a.scale(C64::new(0.0, -0.25 * x)));
            let right = mat_exp(&a.adjoint().scale(C64::new(0.0, 0.25 * x)));
            lu_inverse(&(&(&left * &st.s) * &right)).map_err(|_| Error::SingularPoint { x, t, indicator: 0.0 })
        };
        let mut x = KAPPA_START;
        let mut prev = sample(x)?;
        let mut iterates = vec![(x, prev.clone())];
        let mut diff = f64::INFINITY;
        while x < KAPPA_MAX_X {
            x *= 2.0;
            let next = match sample(x) {
                Ok(m) if m.is_finite() => m,
                _ => break,
            };
            diff = next.dist(&prev) / next.max_norm().max(1.0);
            iterates.push((x, next.clone()));
            prev = next;
            if diff <= KAPPA_TOLERANCE {
                return Ok(KappaEstimate {
                    kappa: prev,
                    iterates,
                    last_difference: diff,
                });
            }
        }
        let n = iterates.len();
        let (a, b) = if n >= 2 {
            (iterates[n - 2].1.clone(), iterates[n - 1].1.clone())
        } else {
            (prev.clone(), prev)
        };
        Err(Error::NotConverged {
            difference: diff,
            iterates: Box::new((a, b)),
        })
    }

    /// `χ(t,λ) = I + iΦ₂(0,t)* κ(t) (A − λ)⁻¹ Φ₂(0,t)`.
    pub fn asymptotic_chi(&self, t: f64, lambda: C64) -> Result<Asymptotics> {
        self.check_lambda(lambda)?;
        let kappa = self.kappa(t)?;
        let s = self.sol.params().structure;
        let n = self.sol.params().n();
        let pi = self.sol.pi1(0.0, t);
        let phi2 = pi.block(0, s.m1, n, s.m2);
        let resolvent = lu_inverse(&(&self.sol.params().a1 - &ComplexMatrix::scalar(n, lambda)))?;
        let chi = &ComplexMatrix::identity(s.m2)
            + &(&(&(&phi2.adjoint() * &kappa.kappa) * &resolvent) * &phi2).scale(I);
        Ok(Asymptotics { chi, kappa })
    }

    /// `diag(I_{m1}, χ)`, the x → ∞ limit of w_A.
    pub fn asymptotic_limit(&self, t: f64, lambda: C64) -> Result<ComplexMatrix> {
        let chi = self.asymptotic_chi(t, lambda)?.chi;
        let s = self.sol.params().structure;
        let mut out = ComplexMatrix::identity(s.m());
        out.set_block(s.m1, s.m1, &chi);
        Ok(out)
    }

    /// `θ = A − iΦ₁Φ₁*S⁻¹` at (0,t).
    pub fn theta(&self, t: f64) -> Result<ComplexMatrix> {
        self.require_local_p0()?;
        let p0 = self.check_positivity(t)?;
        let s = self.sol.params().structure;
        let n = self.sol.params().n();
        let phi1 = p0.pi1.block(0, 0, n, s.m1);
        Ok(&self.sol.params().a1 - &(&(&phi1 * &phi1.adjoint()) * &p0.s_inv).scale(I))
    }

    /// `R_L(t,λ) = −iΦ₂(0,t)* S(0,t)⁻¹ (λ − θ)⁻¹ Φ₁(0,t)`.
    pub fn reflection_coefficient(&self, t: f64, lambda: C64) -> Result<ComplexMatrix> {
        let theta = self.theta(t)?;
        for e in eigenvalues(&theta) {
            if (lambda - e).norm() < SPECTRUM_TOLERANCE {
                return Err(Error::LambdaOnThetaSpectrum { lambda, eigenvalue: e });
            }
        }
        let p0 = self.sol.point(0.0, t)?;
        let s = self.sol.params().structure;
        let n = self.sol.params().n();
        let phi1 = p0.pi1.block(0, 0, n, s.m1);
        let phi2 = p0.pi1.block(0, s.m1, n, s.m2);
        let res = lu_inverse(&(&ComplexMatrix::scalar(n, lambda) - &theta))?;
        Ok((&(&(&phi2.adjoint() * &p0.s_inv) * &res) * &phi1).scale(-I))
    }

    /// Real λ samples on `[lo, hi]` keeping clear of σ(A₁).
    pub fn lambda_grid(&self, lo: f64, hi: f64, count: usize) -> Vec<C64> {
        lambda_grid(lo, hi, count, &self.spectrum, LAMBDA_EXCLUSION)
    }

    /// As [`lambda_grid`](Self::lambda_grid), also avoiding σ(θ(t)).
    pub fn reflection_lambda_grid(&self, t: f64, lo: f64, hi: f64, count: usize) -> Result<Vec<C64>> {
        let theta = self.theta(t)?;
        let mut excl = self.spectrum.clone();
        excl.extend(eigenvalues(&theta));
        Ok(lambda_grid(lo, hi, count, &excl, LAMBDA_EXCLUSION))
    }
}

/// Exclusion radius used by the λ-grid helpers.
pub const LAMBDA_EXCLUSION: f64 = 1e-6;

/// `count` equispaced real λ in `[lo, hi]`, dropping any within `radius` of
/// an excluded point.
pub fn lambda_grid(lo: f64, hi: f64, count: usize, exclude: &[C64], radius: f64) -> Vec<C64> {
    let step = if count > 1 { (hi - lo) / (count - 1) as f64 } else { 0.0 };
    (0..count)
        .map(|k| C64::new(lo + k as f64 * step, 0.0))
        .filter(|l| exclude.iter().all(|e| (l - e).norm() >= radius))
        .collect()
}

/// `det w_A` helper used by invariance checks.
pub fn det(m: &ComplexMatrix) -> C64 {
    crate::matrix::determinant(m)
}
