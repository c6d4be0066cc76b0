//! Every built-in parameter set: grids, SVG heatmaps, oracle deviations and
//! residual checks. Output goes to the directory given as first argument.

use std::path::PathBuf;

use mcde_gbdt::presets::PRESET_IDS;
use mcde_gbdt::runner::reproduce;

fn main() -> mcde_gbdt::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("target/figures"));
    for id in PRESET_IDS {
        let r = reproduce(id, Some(&out))?;
        print!("{r}");
        println!("{id}: {}\n", if r.pass() { "ok" } else { "FAILED" });
    }
    println!("files in {}", out.display());
    Ok(())
}
