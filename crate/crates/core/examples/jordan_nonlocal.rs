//! The Jordan-block nonlocal solutions behind the built-in figures, with
//! the engine compared against the independent 2x2 formula.

use mcde_gbdt::gbdt::SMode;
use mcde_gbdt::oracles::jordan_fields;
use mcde_gbdt::presets::preset;

fn main() -> mcde_gbdt::Result<()> {
    for id in ["fig1", "fig2", "fig3", "fig4", "fig5"] {
        let pr = preset(id)?;
        let q = pr.jordan.as_ref().expect("Jordan preset");
        let sol = pr.solution(SMode::SylvesterPointwise)?;
        let mut worst: f64 = 0.0;
        for (x, t) in [(0.0, 0.0), (1.5, -0.5), (-3.0, 2.0), (4.0, 4.0)] {
            let p = sol.point(x, t)?;
            let (v, rho) = jordan_fields(q, x, t)?;
            let scale = 1f64.max(v.norm()).max(rho.norm());
            worst = worst.max((p.v() - v).norm().max((p.rho() - rho).norm()) / scale);
        }
        println!("{id}: p = {}, a = {}, |v(1,1)| = {:.6}, worst relative gap {worst:.2e}", q.p, q.a, sol.point(1.0, 1.0)?.v().norm());
    }
    Ok(())
}
