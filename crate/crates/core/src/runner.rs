//! Orchestration behind the CLI: grid evaluation and export, verification
//! runs, λ tabulation and the built-in reproductions.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::darboux::DarbouxEvaluator;
use crate::error::{Error, Result};
use crate::gbdt::{Fault, SMode, TransformedSolution};
use crate::grid::{sample_fields, Field, FieldGrid, GridSpec, Provenance, SvgOptions};
use crate::matrix::{determinant, ComplexMatrix, C64};
use crate::presets::{preset, Preset};
use crate::seed::SeedSolution;
use crate::verify::{run_checks, Check, Verification, VerifyOptions};

pub fn solution(cfg: &RunConfig) -> Result<TransformedSolution> {
    TransformedSolution::new(cfg.params.clone(), cfg.seed.clone(), cfg.mode)
}

/// One grid per selected field. With `seed_only` the undressed seed is
/// sampled instead.
pub fn run_transform(cfg: &RunConfig, seed_only: bool) -> Result<Vec<FieldGrid>> {
    cfg.grid.validate()?;
    if seed_only {
        return Ok(cfg.fields.iter().map(|&f| seed_grid(&cfg.seed, &cfg.grid, f)).collect());
    }
    let sol = solution(cfg)?;
    sample_fields(&sol, &cfg.grid, &cfg.fields)
}

fn seed_grid(seed: &SeedSolution, spec: &GridSpec, field: Field) -> FieldGrid {
    let m1 = seed.structure().m1;
    FieldGrid::from_fn(field.name(), spec, Provenance::Engine, |x, t| {
        let v = seed.v(x, t);
        let r = seed.r(x, t);
        let m = r.rows();
        let re = |z: f64| C64::new(z, 0.0);
        Some(match field {
            Field::AbsV => re(v[(0, m1)].norm()),
            Field::LnAbsV => re(v[(0, m1)].norm().ln()),
            Field::AbsRho => re(r[(m - 1, m - 1)].norm()),
            Field::LnAbsRho => re(r[(m - 1, m - 1)].norm().ln()),
            Field::V => v[(0, m1)],
            Field::V2 => v[(m1, 0)],
            Field::Rho => r[(m - 1, m - 1)],
            Field::Rho1 => r[(0, 0)],
            Field::DetS => C64::new(1.0, 0.0),
        })
    })
}

/// `name: nx x nt, masked k, |.| in [lo, hi]` per grid.
pub fn summary(grids: &[FieldGrid]) -> String {
    let mut s = String::new();
    for g in grids {
        let _ = write!(s, "{}: {}x{}, masked {}", g.name, g.nx(), g.nt(), g.masked_count());
        match g.magnitude_range() {
            Some((lo, hi)) => {
                let _ = writeln!(s, ", |.| in [{lo:.6e}, {hi:.6e}]");
            }
            None => s.push_str(", no regular cells\n"),
        }
    }
    s
}

/// Writes `<stem>_<field>.csv` and `.svg` for every grid into `dir`.
pub fn export(grids: &[FieldGrid], dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for g in grids {
        let base = dir.join(format!("{stem}_{}", g.name));
        let csv = base.with_extension("csv");
        g.write_csv(&csv)?;
        let svg = base.with_extension("svg");
        g.write_svg(&svg, &SvgOptions::default())?;
        files.push(csv);
        files.push(svg);
    }
    Ok(files)
}

#[derive(Clone, Debug, Default)]
pub struct VerifyArgs {
    pub h: Option<f64>,
    /// Overrides the configured check list.
    pub checks: Option<Vec<Check>>,
    pub fault: Option<Fault>,
    /// Adds the Sylvester-vs-ODE comparison even when not listed.
    pub ode_check: bool,
}

pub fn run_verify(cfg: &RunConfig, args: &VerifyArgs) -> Result<Verification> {
    let mut sol = solution(cfg)?;
    if let Some(f) = args.fault {
        sol = sol.with_fault(f);
    }
    let mut checks = args.checks.clone().unwrap_or_else(|| cfg.checks.clone());
    if args.ode_check && !checks.contains(&Check::Mode) {
        checks.push(Check::Mode);
    }
    let mut opts = VerifyOptions {
        lambdas: cfg.lambdas.clone(),
        decay_t: cfg.t,
        ..VerifyOptions::default()
    };
    if let Some(h) = args.h {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::config(None, "h", format!("FD step must be positive, got {h}")));
        }
        opts.fd.h = h;
    }
    run_checks(&sol, &cfg.grid, &checks, &opts)
}

fn push_matrix(out: &mut String, lambda: C64, name: &str, m: &ComplexMatrix) {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let z = m[(i, j)];
            let _ = writeln!(out, "{:.16e},{:.16e},{name},{i},{j},{:.16e},{:.16e}", lambda.re, lambda.im, z.re, z.im);
        }
    }
}

const TABLE_HEADER: &str = "lambda_re,lambda_im,matrix,row,col,re,im";

/// CSV of w_A and w̃ at the configured (x, t) for every λ. With
/// `seed_only` the seed wave w is tabulated instead.
pub fn darboux_table(cfg: &RunConfig, seed_only: bool) -> Result<String> {
    let mut out = format!("{TABLE_HEADER}\n");
    if seed_only {
        for &l in &cfg.lambdas {
            push_matrix(&mut out, l, "w", &cfg.seed.wave(cfg.x, cfg.t, l)?);
        }
        return Ok(out);
    }
    let sol = solution(cfg)?;
    let ev = DarbouxEvaluator::new(&sol);
    let p = sol.point(cfg.x, cfg.t)?;
    for &l in &cfg.lambdas {
        let w_a = ev.darboux_at(&p, l)?;
        let w = &w_a * &cfg.seed.wave(cfg.x, cfg.t, l)?;
        push_matrix(&mut out, l, "w_A", &w_a);
        push_matrix(&mut out, l, "w~", &w);
        let d = determinant(&w_a);
        let _ = writeln!(out, "{:.16e},{:.16e},det w_A,0,0,{:.16e},{:.16e}", l.re, l.im, d.re, d.im);
    }
    Ok(out)
}

/// CSV of the reflection coefficient R_L(t, λ) over the configured λ
/// (local reduction, p = 0).
pub fn reflect_table(cfg: &RunConfig) -> Result<String> {
    let sol = solution(cfg)?;
    let ev = DarbouxEvaluator::new(&sol);
    let mut out = format!("{TABLE_HEADER}\n");
    for &l in &cfg.lambdas {
        push_matrix(&mut out, l, "R_L", &ev.reflection_coefficient(cfg.t, l)?);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Deviation {
    pub field: &'static str,
    pub max_abs: f64,
    pub max_rel: f64,
    pub compared: usize,
}

#[derive(Debug)]
pub struct ReproduceReport {
    pub id: &'static str,
    pub grids: Vec<FieldGrid>,
    pub files: Vec<PathBuf>,
    /// Engine vs the printed closed form (ex24, ex42, fig1, fig2).
    pub oracle: Vec<Deviation>,
    /// Engine vs the independent Jordan-block formula (fig1..fig5).
    pub jordan: Vec<Deviation>,
    /// `max |Im S|` over the grid when S is expected to be real.
    pub s_imag: Option<f64>,
    pub verification: Verification,
}

impl ReproduceReport {
    pub fn pass(&self) -> bool {
        let ok = |d: &[Deviation], tol: f64| d.iter().all(|d| d.max_rel <= tol);
        self.verification.pass()
            && ok(&self.oracle, ORACLE_TOLERANCE)
            && ok(&self.jordan, ORACLE_TOLERANCE)
            && self.s_imag.map_or(true, |v| v <= 1e-12)
    }
}

impl std::fmt::Display for ReproduceReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "reproduce {}", self.id)?;
        f.write_str(&summary(&self.grids))?;
        for (what, devs) in [("oracle", &self.oracle), ("jordan formula", &self.jordan)] {
            for d in devs.iter() {
                writeln!(
                    f,
                    "{} {what} deviation {}: max abs {:.3e}, max rel {:.3e} over {} cells",
                    if d.max_rel <= ORACLE_TOLERANCE { "PASS" } else { "FAIL" },
                    d.field,
                    d.max_abs,
                    d.max_rel,
                    d.compared
                )?;
            }
        }
        if let Some(v) = self.s_imag {
            writeln!(f, "{} max |Im S| = {v:.3e}", if v <= 1e-12 { "PASS" } else { "FAIL" })?;
        }
        write!(f, "{}", self.verification)
    }
}

/// Bound on the engine-vs-closed-form deviation in `reproduce`, relative to
/// max(1, |engine|, |oracle|).
pub const ORACLE_TOLERANCE: f64 = 1e-9;

/// Checks run by `reproduce`.
pub const REPRODUCE_CHECKS: [Check; 5] = [Check::Pde, Check::Identities, Check::Symmetry, Check::ZeroCurvature, Check::Darboux];

fn deviation(
    sol: &TransformedSolution,
    spec: &GridSpec,
    f: impl Fn(f64, f64) -> Result<(C64, C64)> + Sync,
    second: &'static str,
) -> Result<Vec<Deviation>> {
    let points = sol.evaluate_grid(&spec.xs(), &spec.ts())?;
    let mut dv = Deviation {
        field: "v",
        max_abs: 0.0,
        max_rel: 0.0,
        compared: 0,
    };
    let mut dr = Deviation { field: second, ..dv.clone() };
    for p in points.iter().flatten().flatten() {
        let Ok((v, r)) = f(p.x, p.t) else { continue };
        let rho = if second == "rho1" { p.rho1() } else { p.rho() };
        for (d, a, b) in [(&mut dv, p.v(), v), (&mut dr, rho, r)] {
            let e = (a - b).norm();
            d.max_abs = d.max_abs.max(e);
            d.max_rel = d.max_rel.max(e / 1f64.max(a.norm()).max(b.norm()));
            d.compared += 1;
        }
    }
    Ok(vec![dv, dr])
}

/// Evaluates a built-in parameter set, exports its grids when `out` is
/// given, compares against the closed forms and runs the residual checks.
pub fn reproduce(id: &str, out: Option<&Path>) -> Result<ReproduceReport> {
    let pr: Preset = preset(id)?;
    let sol = pr.solution(SMode::SylvesterPointwise)?;
    let grids = sample_fields(&sol, &pr.grid, &pr.fields)?;
    let files = match out {
        Some(dir) => export(&grids, dir, pr.id)?,
        None => Vec::new(),
    };
    let oracle = match &pr.oracle {
        Some(o) => {
            let second = if matches!(o, crate::oracles::OracleParams::Example24(_)) { "rho1" } else { "rho" };
            deviation(&sol, &pr.grid, |x, t| o.v_rho(x, t), second)?
        }
        None => Vec::new(),
    };
    let jordan = match &pr.jordan {
        Some(j) => deviation(&sol, &pr.grid, |x, t| crate::oracles::jordan_fields(j, x, t), "rho")?,
        None => Vec::new(),
    };
    let s_imag = (pr.params.case == crate::gbdt::ReductionCase::Ccde).then(|| {
        sol.evaluate_grid(&pr.grid.xs(), &pr.grid.ts())
            .map(|pts| {
                pts.iter()
                    .flatten()
                    .flatten()
                    .flat_map(|p| p.s.as_slice().iter().map(|z| z.im.abs()).collect::<Vec<_>>())
                    .fold(0.0, f64::max)
            })
            .unwrap_or(f64::INFINITY)
    });
    let verification = run_checks(&sol, &pr.grid, &REPRODUCE_CHECKS, &VerifyOptions::default())?;
    Ok(ReproduceReport {
        id: pr.id,
        grids,
        files,
        oracle,
        jordan,
        s_imag,
        verification,
    })
}

/// Process exit status for an error: every error before a check verdict is
/// a configuration or parameter problem.
pub fn exit_code(_err: &Error) -> i32 {
    2
}
