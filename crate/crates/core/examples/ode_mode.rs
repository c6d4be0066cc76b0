//! S from the pointwise Sylvester solve against S integrated by RK4 along
//! an L-shaped path.

use mcde_gbdt::gbdt::{GbdtParameters, SMode, TransformedSolution};
use mcde_gbdt::matrix::{c, ComplexMatrix};
use mcde_gbdt::seed::{BlockStructure, SeedSolution};
use mcde_gbdt::verify::{l_path, mode_agreement};

fn main() -> mcde_gbdt::Result<()> {
    let structure = BlockStructure::new(1, 1, 1)?;
    let params = GbdtParameters::local(
        structure,
        ComplexMatrix::from_rows(&[vec![c(0.4, -0.9), c(0.2, 0.0)], vec![c(0.0, 0.0), c(-0.6, -0.5)]])?,
        ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.5, 0.2)], vec![c(0.0, 1.0), c(1.0, -0.3)]])?,
        None,
    )?;
    let seed = SeedSolution::const_diag(structure, vec![c(1.0, 0.0), c(-0.5, 0.0)])?;
    let sol = TransformedSolution::new(params.clone(), seed.clone(), SMode::SylvesterPointwise)?;
    println!("{}", mode_agreement(&sol, &l_path(5.0, 5.0, 50))?);

    let ode = TransformedSolution::new(params, seed, SMode::ode())?;
    let (a, b) = (sol.point(2.0, 1.0)?, ode.point(2.0, 1.0)?);
    println!("v at (2, 1): sylvester {}  ode {}", a.v(), b.v());
    Ok(())
}
