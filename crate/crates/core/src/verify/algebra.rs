use super::{relative_diff, too_coarse, GridEval, ResidualReport, IDENTITY_TOLERANCE};
use crate::error::{Error, Result};
use crate::gbdt::{PointEval, SMode, TransformedSolution, DEFAULT_MAX_STEP};
use crate::matrix::{hermitian_eigenvalues, mat_exp, ComplexMatrix, C64};

/// Looser bound for the Sylvester identity when S comes from the ODE.
pub const ODE_DRIFT_TOLERANCE: f64 = 1e-7;
/// Bound on the wrong-sign eigenvalue of the conjugated S derivative.
pub const MONOTONE_TOLERANCE: f64 = 1e-8;
/// Required decay `|ṽ(x_last)| / |ṽ(x_first)|`.
pub const DECAY_FACTOR: f64 = 1e-6;
/// Mode agreement bound on S.
pub const MODE_TOLERANCE: f64 = 1e-7;

fn sylvester_residual(sol: &TransformedSolution, p: &PointEval) -> f64 {
    let params = sol.params();
    let a1s = &params.a1 * &p.s;
    let sa2 = &p.s * &params.a2;
    let rhs = &p.pi1 * &p.pi2.adjoint();
    let scale = 1f64.max(a1s.max_norm()).max(sa2.max_norm()).max(rhs.max_norm());
    (&(&a1s - &sa2) - &rhs).max_norm() / scale
}

/// Sylvester identity for S, `(I − X₋₁)(I + Y₋₁) = I`, `tr Q̃ = tr Q` and,
/// for the nonlocal cases, the mirror formula for Π₂ against its own
/// propagation.
pub fn identity_residuals(sol: &TransformedSolution, grid: &GridEval) -> Result<Vec<ResidualReport>> {
    let dom = grid.describe();
    let masked = grid.masked();
    let points: Vec<&PointEval> = grid.regular().collect();
    if points.is_empty() {
        return Err(too_coarse(0));
    }
    let n = points.len();
    let ode = matches!(sol.mode(), SMode::OdePropagated { .. });

    let syl = points.iter().map(|p| sylvester_residual(sol, p)).fold(0.0, f64::max);
    let (tol, note) = if ode {
        (ODE_DRIFT_TOLERANCE, "ODE drift")
    } else {
        (IDENTITY_TOLERANCE, "")
    };
    let mut out = vec![ResidualReport::algebraic("identity: A1 S - S A2 = Pi1 Pi2*", dom.clone(), syl, tol, n)
        .with_masked(masked.clone())
        .with_note(note)];

    let mut prod: f64 = 0.0;
    let mut trace: f64 = 0.0;
    for p in &points {
        let id = ComplexMatrix::identity(p.xm1.rows());
        let left = &id - &p.xm1;
        let right = &id + &p.ym1;
        let scale = 1f64.max(left.max_norm() * right.max_norm());
        prod = prod.max((&(&left * &right) - &id).max_norm() / scale);
        let qscale = scale * 1f64.max(p.q.max_norm());
        trace = trace.max((p.q_tilde.trace() - p.q.trace()).norm() / qscale);
    }
    out.push(
        ResidualReport::algebraic("identity: (I - X_-1)(I + Y_-1) = I", dom.clone(), prod, IDENTITY_TOLERANCE, n)
            .with_masked(masked.clone()),
    );
    out.push(
        ResidualReport::algebraic("identity: tr Q~ = tr Q", dom.clone(), trace, IDENTITY_TOLERANCE, n)
            .with_masked(masked.clone()),
    );

    if sol.case().is_nonlocal() {
        let mirror = points
            .iter()
            .map(|p| relative_diff(&p.pi2, &sol.pi2_propagated(p.x, p.t)))
            .fold(0.0, f64::max);
        out.push(
            ResidualReport::algebraic("identity: Pi2 mirror", dom, mirror, IDENTITY_TOLERANCE, n).with_masked(masked),
        );
    }
    Ok(out)
}

/// Symmetries implied by the reduction: Hermitian S, Ṽ, R̃ for the local
/// cases, the x ↦ −x reflections for the nonlocal ones.
pub fn symmetry_residuals(sol: &TransformedSolution, grid: &GridEval) -> Result<Vec<ResidualReport>> {
    let dom = grid.describe();
    let case = sol.case();
    if case.is_local() {
        let mut r: f64 = 0.0;
        let mut v: f64 = 0.0;
        let mut s: f64 = 0.0;
        let mut n = 0;
        for p in grid.regular() {
            n += 1;
            r = r.max(relative_diff(&p.r_tilde, &p.r_tilde.adjoint()));
            v = v.max(relative_diff(&p.v_tilde, &p.v_tilde.adjoint()));
            s = s.max(relative_diff(&p.s, &p.s.adjoint()));
        }
        if n == 0 {
            return Err(too_coarse(0));
        }
        let masked = grid.masked();
        return Ok(vec![
            ResidualReport::algebraic("symmetry: R~ = R~*", dom.clone(), r, IDENTITY_TOLERANCE, n).with_masked(masked.clone()),
            ResidualReport::algebraic("symmetry: V~ = V~*", dom.clone(), v, IDENTITY_TOLERANCE, n).with_masked(masked.clone()),
            ResidualReport::algebraic("symmetry: S = S*", dom, s, IDENTITY_TOLERANCE, n).with_masked(masked),
        ]);
    }
    if case.is_nonlocal() {
        if !grid.spec.x_symmetric() {
            return Err(Error::PreconditionViolated(
                "nonlocal symmetry checks need an x-grid symmetric about 0".into(),
            ));
        }
        let mut r: f64 = 0.0;
        let mut v: f64 = 0.0;
        let mut s: f64 = 0.0;
        let mut n = 0;
        for (it, row) in grid.points.iter().enumerate() {
            for (ix, p) in row.iter().enumerate() {
                let (Ok(p), Ok(m)) = (p, grid.mirror(ix, it)) else { continue };
                n += 1;
                r = r.max(relative_diff(&p.r_tilde, &-&m.r_tilde.adjoint()));
                v = v.max(relative_diff(&p.v_tilde, &m.v_tilde.adjoint()));
                s = s.max(relative_diff(&p.s, &-&m.s.adjoint()));
            }
        }
        if n == 0 {
            return Err(too_coarse(0));
        }
        let masked = grid.masked();
        return Ok(vec![
            ResidualReport::algebraic("symmetry: R~(x) = -R~(-x)*", dom.clone(), r, IDENTITY_TOLERANCE, n)
                .with_masked(masked.clone()),
            ResidualReport::algebraic("symmetry: V~(x) = V~(-x)*", dom.clone(), v, IDENTITY_TOLERANCE, n)
                .with_masked(masked.clone()),
            ResidualReport::algebraic("symmetry: S(x) = -S(-x)*", dom, s, IDENTITY_TOLERANCE, n).with_masked(masked),
        ]);
    }
    Ok(vec![ResidualReport::algebraic("symmetry", dom, 0.0, IDENTITY_TOLERANCE, 0)
        .with_note(format!("no reduction symmetry for case {case}"))])
}

fn conjugated_s(sol: &TransformedSolution, x: f64, t: f64, sign: f64) -> Result<ComplexMatrix> {
    let a = &sol.params().a1;
    let s = sol.evaluate_pi_s(x, t)?.s;
    let left = mat_exp(&a.scale(C64::new(0.0, 0.25 * sign * x)));
    let right = mat_exp(&a.adjoint().scale(C64::new(0.0, -0.25 * sign * x)));
    Ok(&(&left * &s) * &right)
}

/// Positivity of S for p = 0 (x ≥ 0) and monotonicity of the conjugated S
/// for p = 1, under the local reduction with `sgn(t) j^p R ≥ 0`.
pub fn definiteness_checks(sol: &TransformedSolution, grid: &GridEval) -> Result<Vec<ResidualReport>> {
    let params = sol.params();
    if !params.case.is_local() {
        return Err(Error::PreconditionViolated(format!(
            "definiteness needs the local reduction, got {}",
            params.case
        )));
    }
    let structure = params.structure;
    let jp = structure.j_pow(structure.p());
    for &t in &grid.ts {
        let r = sol.seed().r(0.0, t);
        let sgn = if t > 0.0 { 1.0 } else if t < 0.0 { -1.0 } else { 0.0 };
        let lo = hermitian_eigenvalues(&(&jp * &r).scale(C64::new(sgn, 0.0)))[0];
        if lo < -1e-14 {
            return Err(Error::PreconditionViolated(format!("sgn(t) j^p R is not nonnegative at t = {t}")));
        }
    }
    let dom = grid.describe();
    let neg_part = |s: &ComplexMatrix| {
        let min = hermitian_eigenvalues(s)[0];
        (-min / 1f64.max(s.max_norm())).max(0.0)
    };

    let mut out = Vec::new();
    let mut at_zero: f64 = 0.0;
    for &t in &grid.ts {
        at_zero = at_zero.max(neg_part(&sol.evaluate_pi_s(0.0, t)?.s));
    }
    out.push(
        ResidualReport::algebraic("definiteness: S(0,t) > 0", dom.clone(), at_zero, 0.0, grid.ts.len())
            .with_note("residual = -min eig / max(1, |S|)"),
    );
    if structure.p == 0 {
        let mut worst: f64 = 0.0;
        let mut n = 0;
        for &t in &grid.ts {
            for &x in grid.xs.iter().filter(|&&x| x >= 0.0) {
                n += 1;
                worst = worst.max(neg_part(&sol.evaluate_pi_s(x, t)?.s));
            }
        }
        out.push(ResidualReport::algebraic("definiteness: S(x,t) > 0 for x >= 0", dom, worst, 0.0, n));
    } else {
        let h = 1e-3;
        for (sign, name) in [(1.0, "definiteness: (e^{ixA/4} S e^{-ixA*/4})' <= 0"), (-1.0, "definiteness: (e^{-ixA/4} S e^{ixA*/4})' >= 0")] {
            let mut worst: f64 = 0.0;
            let mut n = 0;
            for &t in &grid.ts {
                for &x in &grid.xs {
                    let d = |h: f64| -> Result<ComplexMatrix> {
                        let a = conjugated_s(sol, x + h, t, sign)?;
                        let b = conjugated_s(sol, x - h, t, sign)?;
                        Ok((&a - &b).scale(C64::new(0.5 / h, 0.0)))
                    };
                    let d1 = d(h)?;
                    let d2 = d(0.5 * h)?;
                    let der = (&d2.scale(C64::new(4.0, 0.0)) - &d1).scale(C64::new(1.0 / 3.0, 0.0));
                    // Wrong-sign part: positive eigenvalues of M' (sign +), negative of M' (sign −).
                    let ev = hermitian_eigenvalues(&der.scale(C64::new(sign, 0.0)));
                    let bad = ev[ev.len() - 1] / 1f64.max(der.max_norm());
                    worst = worst.max(bad.max(0.0));
                    n += 1;
                }
            }
            out.push(ResidualReport::algebraic(name, dom.clone(), worst, MONOTONE_TOLERANCE, n));
        }
    }
    Ok(out)
}

/// Decay of |ṽ(x, t)| along increasing x: the tail (second half of `xs`)
/// must be non-increasing and the last value at most `DECAY_FACTOR` times
/// the first.
pub fn decay_check(sol: &TransformedSolution, t: f64, xs: &[f64]) -> ResidualReport {
    let dom = format!("t = {t}, x in [{}, {}] ({} samples)", xs.first().unwrap_or(&0.0), xs.last().unwrap_or(&0.0), xs.len());
    let base = ResidualReport::algebraic("decay: |v~(x,t)| -> 0", dom, 0.0, DECAY_FACTOR, xs.len());
    if xs.len() < 2 || xs.windows(2).any(|w| !(w[0] < w[1])) {
        return base.fail("x samples must be strictly increasing");
    }
    let mut norms = Vec::with_capacity(xs.len());
    for &x in xs {
        match sol.point(x, t) {
            Ok(p) => norms.push(p.v1_block().max_norm()),
            Err(e) => return base.fail(format!("evaluation failed at x = {x}: {e}")),
        }
    }
    let first = norms[0];
    let last = norms[norms.len() - 1];
    let ratio = if first > 0.0 { last / first } else if last == 0.0 { 0.0 } else { f64::INFINITY };
    let mut report = base;
    report.max_residual = ratio;
    report.pass = ratio <= DECAY_FACTOR;
    let tail = &norms[norms.len() / 2..];
    let slack = 1e-12 * first.max(f64::MIN_POSITIVE);
    if tail.windows(2).any(|w| w[1] > w[0] + slack) {
        return report.fail("tail is not monotonically decreasing");
    }
    if !report.pass {
        report.note = format!("NotConverged: |v~| ratio {ratio:.3e} after {} samples", xs.len());
    }
    report
}

/// Points along (0,0) → (x_end, 0) → (x_end, t_end), `count` per leg.
pub fn l_path(x_end: f64, t_end: f64, count: usize) -> Vec<(f64, f64)> {
    let count = count.max(1);
    let mut out = Vec::with_capacity(2 * count);
    for k in 1..=count {
        out.push((x_end * k as f64 / count as f64, 0.0));
    }
    for k in 1..=count {
        out.push((x_end, t_end * k as f64 / count as f64));
    }
    out
}

/// Compares S from the Sylvester solve with S integrated by the ODEs at
/// each point of `path`.
pub fn mode_agreement(sol: &TransformedSolution, path: &[(f64, f64)]) -> Result<ResidualReport> {
    let mk = |mode| TransformedSolution::new(sol.params().clone(), sol.seed().clone(), mode);
    let pointwise = mk(SMode::SylvesterPointwise)?;
    let ode = mk(SMode::OdePropagated {
        max_step: DEFAULT_MAX_STEP,
    })?;
    let (pointwise, ode) = match sol.fault() {
        Some(f) => (pointwise.with_fault(f), ode),
        None => (pointwise, ode),
    };
    let mut worst: f64 = 0.0;
    let mut drift: f64 = 0.0;
    for &(x, t) in path {
        let a = pointwise.evaluate_pi_s(x, t)?;
        let b = ode.evaluate_pi_s(x, t)?;
        worst = worst.max(relative_diff(&a.s, &b.s));
        if let Ok(p) = ode.point(x, t) {
            drift = drift.max(sylvester_residual(&ode, &p));
        }
    }
    let length = path
        .iter()
        .fold(((0.0, 0.0), 0.0), |((px, pt), acc), &(x, t)| ((x, t), acc + (x - px).abs() + (t - pt).abs()))
        .1;
    Ok(
        ResidualReport::algebraic("mode: Sylvester vs ODE S", format!("path of length {length:.3}"), worst, MODE_TOLERANCE, path.len())
            .with_note(format!("ODE identity drift {drift:.2e}")),
    )
}
