//! GBDT dressing: parameter validation, Π(x,t) and S(x,t), the blocks
//! X₀, X₋₁, Y₋₁ and the transformed fields Ṽ, R̃.

mod ode;
mod params;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{min_spectral_gap, ComplexMatrix, Lu, SPECTRAL_GAP_TOLERANCE, SylvesterSolver, C64, I, ONE};
use crate::seed::{Propagator, SeedSolution, Side};

pub use ode::{OdeState, DEFAULT_MAX_STEP};
pub use params::{
    jordan_back_substitution, min_hermitian_eigenvalue, solve_s0, validate_params, GbdtParameters,
    ReductionCase, ValidationEntry, ValidationReport, DET_TOLERANCE, PARAM_TOLERANCE,
};

/// A point is singular when its [`PointEval::indicator`] is below this.
pub const SINGULAR_TOLERANCE: f64 = 1e-12;

/// How S(x,t) is obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SMode {
    /// Solve `A₁S − SA₂ = Π₁Π₂*` at each point.
    SylvesterPointwise,
    /// Integrate the Π/S system with RK4 along (0,0) → (x,0) → (x,t).
    OdePropagated { max_step: f64 },
}

impl SMode {
    pub fn ode() -> Self {
        SMode::OdePropagated {
            max_step: DEFAULT_MAX_STEP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaultTarget {
    S,
    V,
    R,
    Darboux,
}

/// Deliberate perturbation used to confirm that checks have teeth.
///
/// `S` and `Darboux` get `ε‖·‖_max E₁₁` added; `V` and `R` are scaled by
/// `1 + ε`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fault {
    pub target: FaultTarget,
    pub eps: f64,
}

impl Fault {
    pub(crate) fn perturb_additive(&self, m: &mut ComplexMatrix) {
        let bump = self.eps * m.max_norm().max(f64::MIN_POSITIVE);
        m[(0, 0)] += C64::new(bump, 0.0);
    }
}

/// Π₁, Π₂ and S at one point.
#[derive(Clone, Debug)]
pub struct PiS {
    pub pi1: ComplexMatrix,
    pub pi2: ComplexMatrix,
    pub s: ComplexMatrix,
}

/// Everything derived at one regular point.
#[derive(Clone, Debug)]
pub struct PointEval {
    pub x: f64,
    pub t: f64,
    pub pi1: ComplexMatrix,
    pub pi2: ComplexMatrix,
    pub s: ComplexMatrix,
    pub s_inv: ComplexMatrix,
    /// `|det S| / ∏ᵢ rᵢ` with `rᵢ = max(‖Sᵢ·‖, ‖(Π₁)ᵢ·‖ ‖Π₂‖_F / gap)`, where
    /// gap separates σ(A₁) and σ(A₂). In [0, 1]; the second term catches
    /// cancellation in S that a pure Hadamard ratio misses (always 1 for
    /// n = 1).
    pub indicator: f64,
    pub x0: ComplexMatrix,
    pub xm1: ComplexMatrix,
    pub ym1: ComplexMatrix,
    pub q: ComplexMatrix,
    pub q_tilde: ComplexMatrix,
    pub v_tilde: ComplexMatrix,
    /// Ṽ_t from the block anti-diagonal part of Q̃₋₁.
    pub vt_tilde: ComplexMatrix,
    pub r_tilde: ComplexMatrix,
    m1: usize,
}

impl PointEval {
    /// Top-right entry of Ṽ (ṽ, or ṽ₁ in the scalar cases).
    pub fn v(&self) -> C64 {
        self.v_tilde[(0, self.m1)]
    }

    /// Bottom-left entry of Ṽ (ṽ₂).
    pub fn v2(&self) -> C64 {
        self.v_tilde[(self.m1, 0)]
    }

    /// `ρ̃ = i [0 1] Q̃₋₁ [0 1]ᵀ`, the last diagonal entry of R̃.
    pub fn rho(&self) -> C64 {
        let m = self.r_tilde.rows();
        self.r_tilde[(m - 1, m - 1)]
    }

    /// First diagonal entry of R̃.
    pub fn rho1(&self) -> C64 {
        self.r_tilde[(0, 0)]
    }

    pub fn v1_block(&self) -> ComplexMatrix {
        let m = self.v_tilde.rows();
        self.v_tilde.block(0, self.m1, self.m1, m - self.m1)
    }
}

/// A seed dressed by one set of GBDT parameters.
#[derive(Clone, Debug)]
pub struct TransformedSolution {
    params: GbdtParameters,
    seed: SeedSolution,
    mode: SMode,
    fault: Option<Fault>,
    prop1: Propagator,
    prop2: Propagator,
    a1_inv: ComplexMatrix,
    a2_inv: ComplexMatrix,
    gap: f64,
    sylvester: Option<SylvesterSolver>,
}

impl TransformedSolution {
    /// Validates the parameters against the seed and prepares evaluators.
    pub fn new(params: GbdtParameters, seed: SeedSolution, mode: SMode) -> Result<Self> {
        params.validate_with_seed(&seed).into_result()?;
        let prop1 = Propagator::new(&seed, &params.a1, Side::Direct)?;
        let prop2 = Propagator::new(&seed, &params.a2, Side::Adjoint)?;
        let a1_inv = params::invert_a(&params.a1)?;
        let a2_inv = params::invert_a(&params.a2)?;
        let gap = min_spectral_gap(&params.a1, &params.a2);
        let sylvester = match mode {
            SMode::SylvesterPointwise => Some(SylvesterSolver::new(&params.a1, &params.a2)?),
            SMode::OdePropagated { max_step } => {
                if params.case.is_nonlocal() {
                    return Err(Error::OdeUnsupported(
                        "nonlocal cases couple x and -x; use Sylvester mode",
                    ));
                }
                if !(max_step > 0.0 && max_step.is_finite()) {
                    return Err(Error::PreconditionViolated(format!("ODE step must be positive, got {max_step}")));
                }
                None
            }
        };
        Ok(Self {
            params,
            seed,
            mode,
            fault: None,
            prop1,
            prop2,
            a1_inv,
            a2_inv,
            gap,
            sylvester,
        })
    }

    pub fn with_fault(mut self, fault: Fault) -> Self {
        self.fault = Some(fault);
        self
    }

    pub fn fault(&self) -> Option<Fault> {
        self.fault
    }

    pub fn params(&self) -> &GbdtParameters {
        &self.params
    }

    pub fn seed(&self) -> &SeedSolution {
        &self.seed
    }

    pub fn mode(&self) -> SMode {
        self.mode
    }

    pub fn case(&self) -> ReductionCase {
        self.params.case
    }

    pub fn a1_inv(&self) -> &ComplexMatrix {
        &self.a1_inv
    }

    pub fn a2_inv(&self) -> &ComplexMatrix {
        &self.a2_inv
    }

    /// Π₁(x,t) in closed form.
    pub fn pi1(&self, x: f64, t: f64) -> ComplexMatrix {
        self.prop1.propagate(&self.params.pi1_0, x, t)
    }

    /// Π₂(x,t); the nonlocal cases use the mirror `-iΠ(-x,t) j^p`.
    pub fn pi2(&self, x: f64, t: f64) -> ComplexMatrix {
        if self.params.case.is_nonlocal() {
            let s = self.params.structure;
            (&self.pi1(-x, t) * &s.j_pow(s.p())).scale(-I)
        } else {
            self.pi2_propagated(x, t)
        }
    }

    /// Π₂(x,t) from its own propagation, whatever the case.
    pub fn pi2_propagated(&self, x: f64, t: f64) -> ComplexMatrix {
        self.prop2.propagate(&self.params.pi2_0, x, t)
    }

    /// Π₁, Π₂ and S at (x,t), before any singularity test.
    pub fn evaluate_pi_s(&self, x: f64, t: f64) -> Result<PiS> {
        let mut st = match self.mode {
            SMode::SylvesterPointwise => {
                let pi1 = self.pi1(x, t);
                let pi2 = self.pi2(x, t);
                let s = self
                    .sylvester
                    .as_ref()
                    .expect("Sylvester solver present in pointwise mode")
                    .solve(&(&pi1 * &pi2.adjoint()));
                PiS { pi1, pi2, s }
            }
            SMode::OdePropagated { max_step } => ode::integrate_to(self, x, t, max_step)?.into(),
        };
        if let Some(f) = self.fault.filter(|f| f.target == FaultTarget::S) {
            f.perturb_additive(&mut st.s);
        }
        Ok(st)
    }

    /// See [`PointEval::indicator`].
    pub fn singularity_indicator(&self, x: f64, t: f64) -> Result<f64> {
        let st = self.evaluate_pi_s(x, t)?;
        Ok(indicator(&st, crate::matrix::determinant(&st.s), self.gap))
    }

    pub fn is_regular(&self, x: f64, t: f64) -> bool {
        self.point(x, t).is_ok()
    }

    /// Full evaluation at a regular point.
    pub fn point(&self, x: f64, t: f64) -> Result<PointEval> {
        let st = self.evaluate_pi_s(x, t)?;
        self.point_from_state(x, t, st)
    }

    pub(crate) fn point_from_state(&self, x: f64, t: f64, st: PiS) -> Result<PointEval> {
        let singular = |indicator| Error::SingularPoint { x, t, indicator };
        if !st.s.is_finite() || !st.pi1.is_finite() || !st.pi2.is_finite() {
            return Err(singular(f64::NAN));
        }
        let lu = Lu::factor_unchecked(&st.s);
        let ind = indicator(&st, lu.det(), self.gap);
        if !(ind >= SINGULAR_TOLERANCE) {
            return Err(singular(ind));
        }
        let s_inv = lu.inverse();
        let PiS { pi1, pi2, s } = st;
        let structure = self.params.structure;
        let m = structure.m();
        let id = ComplexMatrix::identity(m);
        let pi2_adj = pi2.adjoint();
        let p2s = &pi2_adj * &s_inv;
        let x0 = &p2s * &pi1;
        let xm1 = &(&p2s * &self.a1_inv) * &pi1;
        let ym1 = &(&(&pi2_adj * &self.a2_inv) * &s_inv) * &pi1;

        let jp = structure.j_pow(structure.p());
        let mut v_tilde = &self.seed.v(x, t) + &(&jp * &structure.offdiag_part(&x0));
        let q = self.seed.coefficients(x, t).qm1;
        let q_tilde = &(&(&id - &xm1) * &q) * &(&id + &ym1);
        let vt_tilde = -&(&jp * &structure.offdiag_part(&q_tilde));
        // R̃ = (Q̃j + jQ̃)/(2i) = -i · blockdiag(Q̃) · j
        let mut r_tilde = (&structure.diag_part(&q_tilde) * &structure.j()).scale(-I);

        if let Some(f) = self.fault {
            match f.target {
                FaultTarget::V => v_tilde = v_tilde.scale(ONE + f.eps),
                FaultTarget::R => r_tilde = r_tilde.scale(ONE + f.eps),
                _ => {}
            }
        }
        if !v_tilde.is_finite() || !r_tilde.is_finite() {
            return Err(singular(ind));
        }
        Ok(PointEval {
            x,
            t,
            pi1,
            pi2,
            s,
            s_inv,
            indicator: ind,
            x0,
            xm1,
            ym1,
            q,
            q_tilde,
            v_tilde,
            vt_tilde,
            r_tilde,
            m1: structure.m1,
        })
    }

    /// `(X₀, X₋₁, Y₋₁)` at a regular point.
    pub fn dressing_blocks(&self, x: f64, t: f64) -> Result<(ComplexMatrix, ComplexMatrix, ComplexMatrix)> {
        let p = self.point(x, t)?;
        Ok((p.x0, p.xm1, p.ym1))
    }

    pub fn transformed_v(&self, x: f64, t: f64) -> Result<ComplexMatrix> {
        Ok(self.point(x, t)?.v_tilde)
    }

    pub fn transformed_r(&self, x: f64, t: f64) -> Result<ComplexMatrix> {
        Ok(self.point(x, t)?.r_tilde)
    }

    /// `G̃ = (i/4) λ j − (i/2) j^{p+1} Ṽ`.
    pub fn g_tilde(&self, p: &PointEval, lambda: C64) -> ComplexMatrix {
        let s = self.params.structure;
        &s.j().scale(I * 0.25 * lambda) - &(&s.j_pow(s.p() + 1) * &p.v_tilde).scale(I * 0.5)
    }

    /// `F̃ = (−i j R̃ + j^p Ṽ_t)/λ`.
    pub fn f_tilde(&self, p: &PointEval, lambda: C64) -> Result<ComplexMatrix> {
        if lambda == C64::new(0.0, 0.0) {
            return Err(Error::LambdaZero);
        }
        let s = self.params.structure;
        let num = &(&s.j() * &p.r_tilde).scale(-I) + &(&s.j_pow(s.p()) * &p.vt_tilde);
        Ok(num.scale(ONE / lambda))
    }

    /// Evaluates a rectangular grid, outer index over `ts`, inner over `xs`.
    /// Singular points come back as `Err(SingularPoint)`.
    pub fn evaluate_grid(&self, xs: &[f64], ts: &[f64]) -> Result<Vec<Vec<Result<PointEval>>>> {
        match self.mode {
            SMode::SylvesterPointwise => Ok(ts
                .par_iter()
                .map(|&t| xs.iter().map(|&x| self.point(x, t)).collect())
                .collect()),
            SMode::OdePropagated { max_step } => {
                let states = ode::march_grid(self, xs, ts, max_step)?;
                Ok(states
                    .into_iter()
                    .enumerate()
                    .map(|(it, row)| {
                        row.into_iter()
                            .enumerate()
                            .map(|(ix, st)| {
                                let mut st: PiS = st.into();
                                if let Some(f) = self.fault.filter(|f| f.target == FaultTarget::S) {
                                    f.perturb_additive(&mut st.s);
                                }
                                self.point_from_state(xs[ix], ts[it], st)
                            })
                            .collect()
                    })
                    .collect())
            }
        }
    }
}

fn indicator(st: &PiS, det: C64, gap: f64) -> f64 {
    let row = |m: &ComplexMatrix, i: usize| (0..m.cols()).map(|j| m[(i, j)].norm_sqr()).sum::<f64>().sqrt();
    let natural = if gap > SPECTRAL_GAP_TOLERANCE {
        st.pi2.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / gap
    } else {
        0.0
    };
    let mut denom = 1.0;
    for i in 0..st.s.rows() {
        denom *= row(&st.s, i).max(row(&st.pi1, i) * natural);
    }
    if denom == 0.0 {
        return 0.0;
    }
    (det.norm() / denom).min(1.0)
}
