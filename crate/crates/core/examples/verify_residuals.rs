//! Full residual verification of one built-in solution on a coarse grid.

use mcde_gbdt::gbdt::SMode;
use mcde_gbdt::grid::GridSpec;
use mcde_gbdt::presets::preset;
use mcde_gbdt::verify::{run_checks, Check, VerifyOptions};

fn main() -> mcde_gbdt::Result<()> {
    let id = std::env::args().nth(1).unwrap_or_else(|| "fig3".into());
    let pr = preset(&id)?;
    let sol = pr.solution(SMode::SylvesterPointwise)?;
    let spec = GridSpec::square(5.0, 61)?;
    let v = run_checks(&sol, &spec, &Check::ALL, &VerifyOptions::default())?;
    print!("{v}");
    println!("{id}: {}", if v.pass() { "all checks pass" } else { "some checks fail" });
    Ok(())
}
