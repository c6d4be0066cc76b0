//! Engine against the printed closed forms on the default 201x201 grid.

use mcde_gbdt::gbdt::SMode;
use mcde_gbdt::grid::GridSpec;
use mcde_gbdt::presets::preset;

fn main() -> mcde_gbdt::Result<()> {
    let spec = GridSpec::default();
    for id in ["ex24", "ex42", "fig1", "fig2"] {
        let pr = preset(id)?;
        let oracle = pr.oracle.clone().expect("closed form");
        let sol = pr.solution(SMode::SylvesterPointwise)?;
        let mut worst: f64 = 0.0;
        let mut cells = 0;
        for p in sol.evaluate_grid(&spec.xs(), &spec.ts())?.iter().flatten().flatten() {
            let (v, rho) = oracle.v_rho(p.x, p.t)?;
            let r = if id == "ex24" { p.rho1() } else { p.rho() };
            worst = worst.max((p.v() - v).norm()).max((r - rho).norm());
            cells += 1;
        }
        println!("{id} ({}): max |engine - oracle| = {worst:.3e} over {cells} cells", oracle.name());
    }
    Ok(())
}
