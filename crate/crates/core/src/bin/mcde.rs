use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mcde_gbdt::config::RunConfig;
use mcde_gbdt::gbdt::{Fault, FaultTarget, SMode};
use mcde_gbdt::grid::Field;
use mcde_gbdt::presets::PRESET_IDS;
use mcde_gbdt::runner::{self, VerifyArgs};
use mcde_gbdt::verify::Check;
use mcde_gbdt::Error;

#[derive(Parser)]
#[command(name = "mcde", version, about = "GBDT dressing of matrix coupled dispersionless equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the dressed fields on the configured grid.
    Transform(Common),
    /// Run residual checks; exit 1 if any fails.
    Verify {
        #[command(flatten)]
        common: Common,
        /// FD step.
        #[arg(long)]
        h: Option<f64>,
        /// Comma-separated checks (pde, zero-curvature, identities,
        /// symmetry, definiteness, decay, darboux, mode).
        #[arg(long)]
        checks: Option<String>,
        /// Perturb one quantity, e.g. `s:1e-4`, `v:1e-4`, `r:1e-4`, `w:1e-4`.
        #[arg(long)]
        inject_fault: Option<String>,
        /// Include the Sylvester-vs-ODE comparison of S.
        #[arg(long)]
        ode_check: bool,
    },
    /// Tabulate w_A and w~ over the configured λ at (x, t).
    Darboux(Common),
    /// Tabulate the reflection coefficient R_L(t, λ).
    Reflect(Common),
    /// Evaluate a built-in parameter set with oracle comparison and checks.
    Reproduce {
        /// One of ex24, ex42, fig1, fig2, fig3, fig4, fig5.
        id: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Comma-separated fields (abs_v, ln_abs_v, abs_rho, ln_abs_rho, v, v2,
    /// rho, rho1, det_s).
    #[arg(long)]
    fields: Option<String>,
    /// Use the undressed seed.
    #[arg(long)]
    seed_only: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Sylvester,
    Ode,
}

fn list<T>(s: &str, f: impl Fn(&str) -> Option<T>, what: &str) -> Result<Vec<T>, Error> {
    s.split(',')
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .map(|w| f(w).ok_or_else(|| cli_error(what, format!("unknown value `{w}`"))))
        .collect()
}

fn cli_error(flag: &str, message: String) -> Error {
    Error::Config {
        line: None,
        field: format!("--{flag}"),
        message,
    }
}

fn load(c: &Common) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::load(&c.config)?;
    if let Some(out) = &c.out {
        cfg.out = Some(out.clone());
    }
    match c.mode {
        Some(Mode::Sylvester) => cfg.mode = SMode::SylvesterPointwise,
        Some(Mode::Ode) if !matches!(cfg.mode, SMode::OdePropagated { .. }) => cfg.mode = SMode::ode(),
        _ => {}
    }
    if let Some(f) = &c.fields {
        cfg.fields = list(f, Field::parse, "fields")?;
    }
    Ok(cfg)
}

fn parse_fault(s: &str) -> Result<Fault, Error> {
    let bad = || cli_error("inject-fault", format!("expected target:eps with target s, v, r or w, got `{s}`"));
    let (target, eps) = s.split_once(':').unwrap_or((s, "1e-4"));
    let target = match target {
        "s" => FaultTarget::S,
        "v" => FaultTarget::V,
        "r" => FaultTarget::R,
        "w" => FaultTarget::Darboux,
        _ => return Err(bad()),
    };
    let eps: f64 = eps.parse().map_err(|_| bad())?;
    Ok(Fault { target, eps })
}

fn write_table(cfg: &RunConfig, name: &str, table: String) -> Result<(), Error> {
    match &cfg.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(name);
            std::fs::write(&path, table)?;
            println!("wrote {}", path.display());
        }
        None => print!("{table}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Transform(c) => {
            let cfg = load(&c)?;
            let grids = runner::run_transform(&cfg, c.seed_only)?;
            print!("{}", runner::summary(&grids));
            if let Some(dir) = &cfg.out {
                let stem = if c.seed_only { "seed" } else { "transform" };
                for f in runner::export(&grids, dir, stem)? {
                    println!("wrote {}", f.display());
                }
            }
            Ok(true)
        }
        Command::Verify {
            common,
            h,
            checks,
            inject_fault,
            ode_check,
        } => {
            if common.seed_only {
                return Err(cli_error("seed-only", "not supported by verify".into()));
            }
            let cfg = load(&common)?;
            let args = VerifyArgs {
                h,
                checks: checks.as_deref().map(|s| list(s, Check::parse, "checks")).transpose()?,
                fault: inject_fault.as_deref().map(parse_fault).transpose()?,
                ode_check,
            };
            let v = runner::run_verify(&cfg, &args)?;
            print!("{v}");
            Ok(v.pass())
        }
        Command::Darboux(c) => {
            let cfg = load(&c)?;
            let table = runner::darboux_table(&cfg, c.seed_only)?;
            write_table(&cfg, "darboux.csv", table)?;
            Ok(true)
        }
        Command::Reflect(c) => {
            if c.seed_only {
                return Err(cli_error("seed-only", "not supported by reflect".into()));
            }
            let cfg = load(&c)?;
            let table = runner::reflect_table(&cfg)?;
            write_table(&cfg, "reflect.csv", table)?;
            Ok(true)
        }
        Command::Reproduce { id, out } => {
            if !PRESET_IDS.contains(&id.as_str()) {
                return Err(cli_error("id", format!("expected one of {}", PRESET_IDS.join(", "))));
            }
            let r = runner::reproduce(&id, out.as_deref())?;
            print!("{r}");
            for f in &r.files {
                println!("wrote {}", f.display());
            }
            Ok(r.pass())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(runner::exit_code(&e) as u8)
        }
    }
}
