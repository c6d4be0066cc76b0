//! RK4 integration of the Π₁/Π₂/S system, the fallback when σ(A₁) and
//! σ(A₂) overlap and a cross-check of the pointwise Sylvester solve.

use super::{PiS, TransformedSolution};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

pub const DEFAULT_MAX_STEP: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct OdeState {
    pub pi1: ComplexMatrix,
    pub pi2: ComplexMatrix,
    pub s: ComplexMatrix,
}

impl From<OdeState> for PiS {
    fn from(o: OdeState) -> Self {
        PiS {
            pi1: o.pi1,
            pi2: o.pi2,
            s: o.s,
        }
    }
}

impl OdeState {
    fn axpy(&self, h: f64, d: &OdeState) -> OdeState {
        let hc = crate::matrix::c(h, 0.0);
        OdeState {
            pi1: &self.pi1 + &d.pi1.scale(hc),
            pi2: &self.pi2 + &d.pi2.scale(hc),
            s: &self.s + &d.s.scale(hc),
        }
    }

    fn is_finite(&self) -> bool {
        self.pi1.is_finite() && self.pi2.is_finite() && self.s.is_finite()
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Axis {
    X,
    T,
}

fn rhs(sol: &TransformedSolution, axis: Axis, x: f64, t: f64, st: &OdeState) -> OdeState {
    let p = sol.params();
    let k = sol.seed().coefficients(x, t);
    match axis {
        Axis::X => {
            // Π₁' = A₁Π₁q₁ + Π₁q₀, Π₂' = −A₂*Π₂q₁* − Π₂q₀*, S' = Π₁q₁Π₂*
            let pi1 = &(&(&p.a1 * &st.pi1) * &k.q1) + &(&st.pi1 * &k.q0);
            let pi2 = -&(&(&(&p.a2.adjoint() * &st.pi2) * &k.q1.adjoint()) + &(&st.pi2 * &k.q0.adjoint()));
            let s = &(&st.pi1 * &k.q1) * &st.pi2.adjoint();
            OdeState { pi1, pi2, s }
        }
        Axis::T => {
            // Π₁' = A₁⁻¹Π₁Q, Π₂' = −(A₂*)⁻¹Π₂Q*, S' = −A₁⁻¹Π₁QΠ₂*A₂⁻¹
            let a1i = sol.a1_inv();
            let a2i = sol.a2_inv();
            let pi1 = &(a1i * &st.pi1) * &k.qm1;
            let pi2 = -&(&(&a2i.adjoint() * &st.pi2) * &k.qm1.adjoint());
            let s = -&(&(&(&(a1i * &st.pi1) * &k.qm1) * &st.pi2.adjoint()) * a2i);
            OdeState { pi1, pi2, s }
        }
    }
}

/// Integrates along one axis from `from` to `to` with steps of at most
/// `max_step`; the other coordinate is `fixed`.
fn segment(sol: &TransformedSolution, axis: Axis, fixed: f64, from: f64, to: f64, max_step: f64, mut st: OdeState) -> Result<OdeState> {
    let span = to - from;
    if span == 0.0 {
        return Ok(st);
    }
    let steps = (span.abs() / max_step).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let at = |s: f64| match axis {
        Axis::X => (s, fixed),
        Axis::T => (fixed, s),
    };
    for i in 0..steps {
        let s0 = from + i as f64 * h;
        let (x0, t0) = at(s0);
        let (xm, tm) = at(s0 + 0.5 * h);
        let (x1, t1) = at(s0 + h);
        let k1 = rhs(sol, axis, x0, t0, &st);
        let k2 = rhs(sol, axis, xm, tm, &st.axpy(0.5 * h, &k1));
        let k3 = rhs(sol, axis, xm, tm, &st.axpy(0.5 * h, &k2));
        let k4 = rhs(sol, axis, x1, t1, &st.axpy(h, &k3));
        st = st
            .axpy(h / 6.0, &k1)
            .axpy(h / 3.0, &k2)
            .axpy(h / 3.0, &k3)
            .axpy(h / 6.0, &k4);
        if !st.is_finite() {
            let (x, t) = at(s0 + h);
            return Err(Error::OdeStepFailure(format!("state became non-finite at (x, t) = ({x}, {t})")));
        }
    }
    Ok(st)
}

fn initial(sol: &TransformedSolution) -> OdeState {
    let p = sol.params();
    OdeState {
        pi1: p.pi1_0.clone(),
        pi2: p.pi2_0.clone(),
        s: p.s0.clone(),
    }
}

/// State at (x,t) along (0,0) → (x,0) → (x,t).
pub fn integrate_to(sol: &TransformedSolution, x: f64, t: f64, max_step: f64) -> Result<OdeState> {
    let st = segment(sol, Axis::X, 0.0, 0.0, x, max_step, initial(sol))?;
    segment(sol, Axis::T, x, 0.0, t, max_step, st)
}

/// States on a grid, indexed `[it][ix]`. The x-axis at t = 0 is swept once in
/// each direction, then every column is swept in t both ways from t = 0.
pub fn march_grid(sol: &TransformedSolution, xs: &[f64], ts: &[f64], max_step: f64) -> Result<Vec<Vec<OdeState>>> {
    use rayon::prelude::*;

    let base = sweep(sol, Axis::X, 0.0, xs, max_step, initial(sol))?;
    let columns: Vec<Vec<OdeState>> = xs
        .par_iter()
        .zip(base.into_par_iter())
        .map(|(&x, st)| sweep(sol, Axis::T, x, ts, max_step, st))
        .collect::<Result<_>>()?;
    Ok((0..ts.len())
        .map(|it| columns.iter().map(|col| col[it].clone()).collect())
        .collect())
}

/// States at every value of `targets`, integrating outward from 0.
fn sweep(sol: &TransformedSolution, axis: Axis, fixed: f64, targets: &[f64], max_step: f64, start: OdeState) -> Result<Vec<OdeState>> {
    let mut out: Vec<Option<OdeState>> = vec![None; targets.len()];
    let mut order: Vec<usize> = (0..targets.len()).collect();
    order.sort_by(|&a, &b| targets[a].total_cmp(&targets[b]));
    let (neg, pos): (Vec<usize>, Vec<usize>) = order.into_iter().partition(|&i| targets[i] < 0.0);
    for (list, reverse) in [(pos, false), (neg, true)] {
        let mut st = start.clone();
        let mut at = 0.0;
        let iter: Box<dyn Iterator<Item = &usize>> = if reverse {
            Box::new(list.iter().rev())
        } else {
            Box::new(list.iter())
        };
        for &i in iter {
            st = segment(sol, axis, fixed, at, targets[i], max_step, st)?;
            at = targets[i];
            out[i] = Some(st.clone());
        }
    }
    Ok(out.into_iter().map(|s| s.expect("every target visited")).collect())
}
