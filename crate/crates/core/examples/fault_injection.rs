//! A 1e-4 perturbation of S, V~, R~ or w_A makes the verifier fail.

use mcde_gbdt::gbdt::{Fault, FaultTarget, SMode};
use mcde_gbdt::grid::GridSpec;
use mcde_gbdt::presets::preset;
use mcde_gbdt::verify::{run_checks, Check, VerifyOptions};

fn main() -> mcde_gbdt::Result<()> {
    let pr = preset("fig1")?;
    let spec = GridSpec::square(4.0, 41)?;
    let opts = VerifyOptions::default();
    for target in [None, Some(FaultTarget::S), Some(FaultTarget::V), Some(FaultTarget::R), Some(FaultTarget::Darboux)] {
        let mut sol = pr.solution(SMode::SylvesterPointwise)?;
        if let Some(target) = target {
            sol = sol.with_fault(Fault { target, eps: 1e-4 });
        }
        let v = run_checks(&sol, &spec, &Check::ALL, &opts)?;
        let failed: Vec<_> = v.reports.iter().filter(|r| !r.pass).map(|r| r.name.clone()).collect();
        println!("{:<14} {} failing: {}", target.map_or("clean".into(), |t| format!("{t:?}")), failed.len(), failed.join("; "));
    }
    Ok(())
}
