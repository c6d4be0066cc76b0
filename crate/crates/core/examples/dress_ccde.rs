//! Dressing a constant seed into a one-soliton of the complex coupled
//! dispersionless equations and sampling it along x.

use mcde_gbdt::gbdt::{GbdtParameters, SMode, TransformedSolution};
use mcde_gbdt::matrix::{c, ComplexMatrix};
use mcde_gbdt::seed::{BlockStructure, SeedSolution};

fn main() -> mcde_gbdt::Result<()> {
    let params = GbdtParameters::ccde(
        1,
        ComplexMatrix::scalar(1, c(0.7, -0.4)),
        ComplexMatrix::from_rows(&[vec![c(1.0, 0.5), c(0.3, -0.8)]])?,
        None,
    )?;
    print!("{}", params.validate());
    let seed = SeedSolution::const_diag(BlockStructure::scalar(1), vec![c(1.3, 0.0), c(1.3, 0.0)])?;
    let sol = TransformedSolution::new(params, seed, SMode::SylvesterPointwise)?;
    println!("{:>6} {:>14} {:>14} {:>14}", "x", "|v|", "rho", "S");
    for k in -8..=8 {
        let x = k as f64;
        let p = sol.point(x, 0.5)?;
        println!("{x:>6.1} {:>14.6e} {:>14.6e} {:>14.6e}", p.v().norm(), p.rho().re, p.s[(0, 0)].re);
    }
    Ok(())
}
