//! Parse a config, evaluate the selected fields and export CSV and SVG.

use mcde_gbdt::config::RunConfig;
use mcde_gbdt::runner;

const CONFIG: &str = "
case = scalar-nonlocal
p = 1
a = [[0.3333333333333333+0.2j, 1], [0, 0.3333333333333333+0.2j]]
pi = [[3, 0], [1, 0.5]]
seed_r = [1j, 1j]
nx = 101
nt = 101
fields = abs_v, ln_abs_rho, v
";

fn main() -> mcde_gbdt::Result<()> {
    let cfg: RunConfig = CONFIG.parse()?;
    let grids = runner::run_transform(&cfg, false)?;
    print!("{}", runner::summary(&grids));
    let dir = std::env::temp_dir().join("mcde_config_pipeline");
    for f in runner::export(&grids, &dir, "fig2")? {
        println!("wrote {}", f.display());
    }
    println!("\nnormalized config:\n{}", cfg.to_config_string());
    Ok(())
}
