use mcde_gbdt::gbdt::SMode;
use mcde_gbdt::presets::{preset, PRESET_IDS};

#[test]
fn engine_matches_oracles_on_coarse_grids() {
    for id in PRESET_IDS {
        let pr = preset(id).unwrap();
        let sol = pr.solution(SMode::SylvesterPointwise).unwrap();
        let mut worst_o: f64 = 0.0;
        let mut worst_j: f64 = 0.0;
        let mut masked = 0;
        for it in 0..41 {
            for ix in 0..41 {
                let x = -8.0 + 0.4 * ix as f64;
                let t = -8.0 + 0.4 * it as f64;
                let Ok(p) = sol.point(x, t) else { masked += 1; continue };
                let (v, rho) = if id == "ex24" { (p.v(), p.rho1()) } else { (p.v(), p.rho()) };
                if let Some(o) = &pr.oracle {
                    if let Ok((ov, orho)) = o.v_rho(x, t) {
                        let d = (v - ov).norm().max((rho - orho).norm());
                        worst_o = worst_o.max(d / 1f64.max(v.norm()).max(rho.norm()));
                    }
                }
                if let Some(j) = &pr.jordan {
                    if let Ok((jv, jr)) = mcde_gbdt::oracles::jordan_fields(j, x, t) {
                        let d = (v - jv).norm().max((rho - jr).norm());
                        worst_j = worst_j.max(d / 1f64.max(v.norm()).max(rho.norm()));
                    }
                }
            }
        }
        println!("{id}: oracle {worst_o:.3e} jordan {worst_j:.3e} masked {masked}");
    }
}
