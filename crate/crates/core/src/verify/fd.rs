use rayon::prelude::*;

use super::{relative_diff, too_coarse, FdOptions, ResidualReport, FD_TOLERANCE, IDENTITY_TOLERANCE, MIN_REGULAR_POINTS, RATIO_FLOOR, RATIO_RANGE};
use crate::darboux::{det, DarbouxEvaluator};
use crate::error::{Error, Result};
use crate::gbdt::{PointEval, ReductionCase, TransformedSolution};
use crate::grid::GridSpec;
use crate::matrix::{ComplexMatrix, C64, ONE};

type Eqs = Vec<(ComplexMatrix, ComplexMatrix)>;

fn eval(sol: &TransformedSolution, x: f64, t: f64, min: f64) -> Result<PointEval> {
    let p = sol.point(x, t)?;
    if p.indicator < min {
        return Err(Error::SingularPoint {
            x,
            t,
            indicator: p.indicator,
        });
    }
    Ok(p)
}

/// Centre plus the eight neighbours at distance h.
struct Stencil {
    h: f64,
    c: PointEval,
    xp: PointEval,
    xm: PointEval,
    tp: PointEval,
    tm: PointEval,
    pp: PointEval,
    pm: PointEval,
    mp: PointEval,
    mm: PointEval,
}

impl Stencil {
    fn new(sol: &TransformedSolution, x: f64, t: f64, h: f64, min: f64) -> Result<Self> {
        let e = |dx: f64, dt: f64| eval(sol, x + dx, t + dt, min);
        Ok(Self {
            h,
            c: e(0.0, 0.0)?,
            xp: e(h, 0.0)?,
            xm: e(-h, 0.0)?,
            tp: e(0.0, h)?,
            tm: e(0.0, -h)?,
            pp: e(h, h)?,
            pm: e(h, -h)?,
            mp: e(-h, h)?,
            mm: e(-h, -h)?,
        })
    }

    fn dx<F: Fn(&PointEval) -> ComplexMatrix>(&self, f: F) -> ComplexMatrix {
        (&f(&self.xp) - &f(&self.xm)).scale(C64::new(0.5 / self.h, 0.0))
    }

    fn dt<F: Fn(&PointEval) -> ComplexMatrix>(&self, f: F) -> ComplexMatrix {
        (&f(&self.tp) - &f(&self.tm)).scale(C64::new(0.5 / self.h, 0.0))
    }

    /// Largest relative second difference of Ṽ and R̃ across the stencil,
    /// about (h/d)² at distance d from a pole.
    fn curvature(&self) -> f64 {
        let rel = |a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix| {
            let d2 = &(a + b) - &c.scale(C64::new(2.0, 0.0));
            d2.max_norm() / 1f64.max(c.max_norm())
        };
        let mut worst: f64 = 0.0;
        fn v(p: &PointEval) -> &ComplexMatrix {
            &p.v_tilde
        }
        fn r(p: &PointEval) -> &ComplexMatrix {
            &p.r_tilde
        }
        for f in [v as fn(&PointEval) -> &ComplexMatrix, r] {
            let c = f(&self.c);
            for (a, b) in [(&self.xp, &self.xm), (&self.tp, &self.tm), (&self.pp, &self.mm), (&self.pm, &self.mp)] {
                worst = worst.max(rel(f(a), f(b), c));
            }
        }
        worst
    }

    fn resolved(self, max: f64) -> Result<Self> {
        let k = self.curvature();
        if k > max {
            return Err(Error::SingularPoint {
                x: self.c.x,
                t: self.c.t,
                indicator: self.c.indicator,
            });
        }
        Ok(self)
    }

    /// Four-point cross stencil for ∂ₜ∂ₓ.
    fn dxt<F: Fn(&PointEval) -> ComplexMatrix>(&self, f: F) -> ComplexMatrix {
        let s = &(&f(&self.pp) - &f(&self.pm)) - &(&f(&self.mp) - &f(&self.mm));
        s.scale(C64::new(0.25 / (self.h * self.h), 0.0))
    }
}

pub(crate) fn usable(sol: &TransformedSolution, x: f64, t: f64, h: f64, opts: &FdOptions) -> bool {
    Stencil::new(sol, x, t, h, opts.indicator_min).and_then(|s| s.resolved(opts.curvature_max)).is_ok()
}

struct Sample {
    raw_h: f64,
    raw_h2: f64,
    extrapolated: f64,
}

fn combine(eh: &Eqs, eh2: &Eqs) -> Sample {
    let mut s = Sample {
        raw_h: 0.0,
        raw_h2: 0.0,
        extrapolated: 0.0,
    };
    for ((l1, r1), (l2, r2)) in eh.iter().zip(eh2) {
        let scale = 1f64.max(l2.max_norm()).max(r2.max_norm());
        let d1 = l1 - r1;
        let d2 = l2 - r2;
        let ext = (&d2.scale(C64::new(4.0, 0.0)) - &d1).scale(C64::new(1.0 / 3.0, 0.0));
        s.raw_h = s.raw_h.max(d1.max_norm() / scale);
        s.raw_h2 = s.raw_h2.max(d2.max_norm() / scale);
        s.extrapolated = s.extrapolated.max(ext.max_norm() / scale);
    }
    s
}

/// Runs `f` at every item with steps h and h/2 and assembles the report.
fn fd_report<T: Sync, F>(
    name: &str,
    domain: String,
    h: f64,
    items: &[T],
    coords: impl Fn(&T) -> (f64, f64),
    min_points: usize,
    f: F,
) -> Result<ResidualReport>
where
    F: Fn(&T, f64) -> Result<Eqs> + Sync,
{
    let results: Vec<Option<Sample>> = items
        .par_iter()
        .map(|it| {
            let a = f(it, h).ok()?;
            let b = f(it, 0.5 * h).ok()?;
            Some(combine(&a, &b))
        })
        .collect();
    let masked: Vec<(f64, f64)> = items
        .iter()
        .zip(&results)
        .filter(|(_, r)| r.is_none())
        .map(|(it, _)| coords(it))
        .collect();
    let used: Vec<&Sample> = results.iter().flatten().collect();
    if used.len() < min_points {
        return Err(too_coarse(used.len()));
    }
    let raw_h = used.iter().map(|s| s.raw_h).fold(0.0, f64::max);
    let raw_h2 = used.iter().map(|s| s.raw_h2).fold(0.0, f64::max);
    let ext = used.iter().map(|s| s.extrapolated).fold(0.0, f64::max);
    let ratio = (raw_h >= RATIO_FLOOR).then(|| raw_h / raw_h2);
    let mut report = ResidualReport {
        name: name.to_string(),
        domain,
        h: Some(h),
        order: Some(2),
        points: used.len(),
        max_residual: ext,
        tolerance: FD_TOLERANCE,
        raw: Some((raw_h, raw_h2)),
        ratio,
        pass: ext <= FD_TOLERANCE,
        masked,
        note: format!("raw(h)={raw_h:.2e} raw(h/2)={raw_h2:.2e}"),
    };
    if let Some(r) = ratio {
        if !(RATIO_RANGE.0..=RATIO_RANGE.1).contains(&r) {
            report.pass = false;
            report.note.push_str(" ratio outside [3, 5]");
        }
    }
    Ok(report)
}

fn centres(spec: &GridSpec, stride: usize) -> Vec<(f64, f64)> {
    let stride = stride.max(1);
    let xs = spec.xs();
    let ts = spec.ts();
    ts.iter()
        .step_by(stride)
        .flat_map(|&t| xs.iter().step_by(stride).map(move |&x| (x, t)))
        .collect()
}

fn domain(spec: &GridSpec, stride: usize) -> String {
    format!(
        "{}x{} [{},{}]x[{},{}] stride {}",
        spec.nx, spec.nt, spec.x_min, spec.x_max, spec.t_min, spec.t_max, stride
    )
}

/// FD residual of `R̃_x = ((−1)^p/2)(ṼṼ_t + Ṽ_tṼ)`, `Ṽ_tx = (ṼR̃ + R̃Ṽ)/2`.
pub fn mcde_residual(sol: &TransformedSolution, spec: &GridSpec, opts: &FdOptions) -> Result<ResidualReport> {
    let sign = sol.params().structure.sign();
    let half = C64::new(0.5, 0.0);
    let items = centres(spec, opts.stride);
    fd_report(
        "pde: matrix form",
        domain(spec, opts.stride),
        opts.h,
        &items,
        |&p| p,
        MIN_REGULAR_POINTS,
        |&(x, t), h| {
            let s = Stencil::new(sol, x, t, h, opts.indicator_min)?.resolved(opts.curvature_max)?;
            let v = &s.c.v_tilde;
            let r = &s.c.r_tilde;
            let vt = s.dt(|p| p.v_tilde.clone());
            let rx = s.dx(|p| p.r_tilde.clone());
            let vtx = s.dxt(|p| p.v_tilde.clone());
            let rhs1 = (&(v * &vt) + &(&vt * v)).scale(half * sign);
            let rhs2 = (&(v * r) + &(r * v)).scale(half);
            Ok(vec![(rx, rhs1), (vtx, rhs2)])
        },
    )
}

fn scalar(z: C64) -> ComplexMatrix {
    ComplexMatrix::scalar(1, z)
}

/// FD residual of the scalar form of the equations for the reductions that
/// have one: the CCDE `ρ̃_x + (κ/2)(|ṽ|²)_t = 0, ṽ_tx = ρ̃ṽ`, and the
/// nonlocal pair coupling x and −x. `None` for the other cases.
pub fn scalar_form_residual(
    sol: &TransformedSolution,
    spec: &GridSpec,
    opts: &FdOptions,
) -> Result<Option<ResidualReport>> {
    let sign = sol.params().structure.sign();
    let items = centres(spec, opts.stride);
    let dom = domain(spec, opts.stride);
    let min = opts.indicator_min;
    let kmax = opts.curvature_max;
    match sol.case() {
        ReductionCase::Ccde => {
            let kappa = -sign;
            fd_report("pde: scalar ccde form", dom, opts.h, &items, |&p| p, MIN_REGULAR_POINTS, |&(x, t), h| {
                let s = Stencil::new(sol, x, t, h, min)?.resolved(kmax)?;
                let rho_x = s.dx(|p| scalar(p.rho()));
                let abs2_t = s.dt(|p| scalar(C64::new(p.v().norm_sqr(), 0.0)));
                let lhs1 = &rho_x + &abs2_t.scale(C64::new(0.5 * kappa, 0.0));
                let vtx = s.dxt(|p| scalar(p.v()));
                Ok(vec![(lhs1, scalar(C64::new(0.0, 0.0))), (vtx, scalar(s.c.rho() * s.c.v()))])
            })
            .map(Some)
        }
        ReductionCase::ScalarNonlocal => {
            fd_report("pde: scalar nonlocal form", dom, opts.h, &items, |&p| p, MIN_REGULAR_POINTS, |&(x, t), h| {
                let s = Stencil::new(sol, x, t, h, min)?.resolved(kmax)?;
                let m = eval(sol, -x, t, min)?;
                let mtp = eval(sol, -x, t + h, min)?;
                let mtm = eval(sol, -x, t - h, min)?;
                let v = s.c.v();
                let vt = (s.tp.v() - s.tm.v()) / (2.0 * h);
                let vt_m = (mtp.v() - mtm.v()) / (2.0 * h);
                let rho_x = s.dx(|p| scalar(p.rho()));
                let rhs1 = 0.5 * sign * (v * vt_m.conj() + vt * m.v().conj());
                let vtx = s.dxt(|p| scalar(p.v()));
                Ok(vec![(rho_x, scalar(rhs1)), (vtx, scalar(s.c.rho() * v))])
            })
            .map(Some)
        }
        _ => Ok(None),
    }
}

/// `G̃_t − F̃_x + [G̃, F̃] = 0` by central differences at the given points
/// and spectral parameters.
pub fn zero_curvature_residual(
    sol: &TransformedSolution,
    points: &[(f64, f64)],
    lambdas: &[C64],
    h: f64,
) -> Result<ResidualReport> {
    let items: Vec<(f64, f64, C64)> = points
        .iter()
        .flat_map(|&(x, t)| lambdas.iter().map(move |&l| (x, t, l)))
        .collect();
    fd_report(
        "zero curvature",
        format!("{} points x {} lambda", points.len(), lambdas.len()),
        h,
        &items,
        |&(x, t, _)| (x, t),
        1,
        |&(x, t, lambda), h| {
            let s = Stencil::new(sol, x, t, h, super::FD_INDICATOR_MIN)?;
            let g = sol.g_tilde(&s.c, lambda);
            let f = sol.f_tilde(&s.c, lambda)?;
            let g_t = s.dt(|p| sol.g_tilde(p, lambda));
            let f_x = {
                let a = sol.f_tilde(&s.xp, lambda)?;
                let b = sol.f_tilde(&s.xm, lambda)?;
                (&a - &b).scale(C64::new(0.5 / h, 0.0))
            };
            Ok(vec![(&g_t - &f_x, &(&f * &g) - &(&g * &f))])
        },
    )
}

/// Intertwining of w_A with the seed and dressed Lax pairs, the dressed
/// wave equations, the λ = 0 identities and invariance of det w_A.
pub fn darboux_checks(
    sol: &TransformedSolution,
    points: &[(f64, f64)],
    lambdas: &[C64],
    h: f64,
) -> Result<Vec<ResidualReport>> {
    let ev = DarbouxEvaluator::new(sol);
    let seed = sol.seed();
    let items: Vec<(f64, f64, C64)> = points
        .iter()
        .flat_map(|&(x, t)| lambdas.iter().map(move |&l| (x, t, l)))
        .collect();
    let dom = format!("{} points x {} lambda", points.len(), lambdas.len());
    let min = super::FD_INDICATOR_MIN;
    let mut out = Vec::new();

    out.push(fd_report("darboux: intertwining", dom.clone(), h, &items, |&(x, t, _)| (x, t), 1, |&(x, t, l), h| {
        let s = Stencil::new(sol, x, t, h, min)?;
        let w = ev.darboux_at(&s.c, l)?;
        let wx = (&ev.darboux_at(&s.xp, l)? - &ev.darboux_at(&s.xm, l)?).scale(C64::new(0.5 / h, 0.0));
        let wt = (&ev.darboux_at(&s.tp, l)? - &ev.darboux_at(&s.tm, l)?).scale(C64::new(0.5 / h, 0.0));
        let gt = sol.g_tilde(&s.c, l);
        let ft = sol.f_tilde(&s.c, l)?;
        let g = seed.g(x, t, l);
        let f = seed.f(x, t, l)?;
        Ok(vec![
            (wx, &(&gt * &w) - &(&w * &g)),
            (wt, &(&ft * &w) - &(&w * &f)),
        ])
    })?);

    out.push(fd_report("darboux: dressed wave", dom.clone(), h, &items, |&(x, t, _)| (x, t), 1, |&(x, t, l), h| {
        let s = Stencil::new(sol, x, t, h, min)?;
        let wt = |p: &PointEval| -> Result<ComplexMatrix> { Ok(&ev.darboux_at(p, l)? * &seed.wave(p.x, p.t, l)?) };
        let w = wt(&s.c)?;
        let w_x = (&wt(&s.xp)? - &wt(&s.xm)?).scale(C64::new(0.5 / h, 0.0));
        let w_t = (&wt(&s.tp)? - &wt(&s.tm)?).scale(C64::new(0.5 / h, 0.0));
        Ok(vec![
            (w_x, &sol.g_tilde(&s.c, l) * &w),
            (w_t, &sol.f_tilde(&s.c, l)? * &w),
        ])
    })?);

    let mut zero_res: f64 = 0.0;
    let mut inverse_res: f64 = 0.0;
    let mut det_res: f64 = 0.0;
    let mut masked = Vec::new();
    let mut used = 0;
    let mut reference: Vec<Option<C64>> = vec![None; lambdas.len()];
    for &(x, t) in points {
        let Ok(p) = sol.point(x, t) else {
            masked.push((x, t));
            continue;
        };
        used += 1;
        let id = ComplexMatrix::identity(p.xm1.rows());
        let w0 = ev.darboux_at(&p, C64::new(0.0, 0.0))?;
        zero_res = zero_res.max(relative_diff(&w0, &(&id - &p.xm1)));
        inverse_res = inverse_res.max(relative_diff(&(&w0 * &(&id + &p.ym1)), &id));
        for (k, &l) in lambdas.iter().enumerate() {
            let d = det(&ev.darboux_at(&p, l)?);
            match reference[k] {
                None => reference[k] = Some(d),
                Some(d0) => det_res = det_res.max((d - d0).norm() / ONE.norm().max(d0.norm())),
            }
        }
    }
    if used == 0 {
        return Err(too_coarse(0));
    }
    out.push(ResidualReport::algebraic("darboux: w_A(0) = I - X_-1", dom.clone(), zero_res, 1e-11, used).with_masked(masked.clone()));
    out.push(
        ResidualReport::algebraic("darboux: w_A(0)(I + Y_-1) = I", dom.clone(), inverse_res, IDENTITY_TOLERANCE, used)
            .with_masked(masked.clone()),
    );
    out.push(ResidualReport::algebraic("darboux: det w_A invariance", dom, det_res, 1e-9, used).with_masked(masked));
    Ok(out)
}
