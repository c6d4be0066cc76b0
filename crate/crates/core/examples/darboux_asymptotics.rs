//! Darboux matrix w_A, its large-x limit diag(I, chi) and the reflection
//! coefficient for a local p = 0 configuration.

use mcde_gbdt::darboux::DarbouxEvaluator;
use mcde_gbdt::gbdt::{GbdtParameters, SMode, TransformedSolution};
use mcde_gbdt::matrix::{c, ComplexMatrix};
use mcde_gbdt::seed::{BlockStructure, SeedSolution};

fn main() -> mcde_gbdt::Result<()> {
    let params = GbdtParameters::local(
        BlockStructure::scalar(0),
        ComplexMatrix::scalar(1, c(0.5, -1.0)),
        ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)]])?,
        Some(ComplexMatrix::scalar(1, c(1.5, 0.0))),
    )?;
    let seed = SeedSolution::const_diag(BlockStructure::scalar(0), vec![c(1.0, 0.0), c(1.0, 0.0)])?;
    let sol = TransformedSolution::new(params, seed, SMode::SylvesterPointwise)?;
    let ev = DarbouxEvaluator::new(&sol);
    let t = 0.5;

    let k = ev.kappa(t)?;
    println!("kappa({t}) = {} after {} doublings", k.kappa[(0, 0)], k.iterates.len());

    let lambda = c(0.3, 0.0);
    let limit = ev.asymptotic_limit(t, lambda)?;
    for x in [2.0, 8.0, 20.0, 80.0] {
        let gap = (&ev.darboux(x, t, lambda)? - &limit).max_norm();
        println!("x = {x:>4}: |w_A - diag(1, chi)| = {gap:.3e}");
    }
    for l in ev.reflection_lambda_grid(t, -3.0, 3.0, 7)? {
        println!("R_L(t, {:+.1}) = {}", l.re, ev.reflection_coefficient(t, l)?[(0, 0)]);
    }
    Ok(())
}
