//! Constant seed solutions and their Lax pair: the wave function satisfies
//! w_x = G w and w_t = F w, checked here by central differences.

use mcde_gbdt::config::fmt_matrix;
use mcde_gbdt::matrix::c;
use mcde_gbdt::seed::{BlockStructure, SeedSolution};

fn main() -> mcde_gbdt::Result<()> {
    let structure = BlockStructure::new(1, 2, 1)?;
    let seed = SeedSolution::const_diag(structure, vec![c(1.0, 0.0), c(0.5, 0.5), c(-0.3, 0.0)])?;
    let (x, t, lambda) = (0.7, -0.4, c(1.3, 0.2));
    let w = seed.wave(x, t, lambda)?;
    println!("R = {}", fmt_matrix(&seed.r(x, t)));
    println!("w(x, t, lambda) = {}", fmt_matrix(&w));
    for h in [1e-2, 1e-3] {
        let wx = (&seed.wave(x + h, t, lambda)? - &seed.wave(x - h, t, lambda)?).scale(c(0.5 / h, 0.0));
        let wt = (&seed.wave(x, t + h, lambda)? - &seed.wave(x, t - h, lambda)?).scale(c(0.5 / h, 0.0));
        let rx = (&wx - &(&seed.g(x, t, lambda) * &w)).max_norm();
        let rt = (&wt - &(&seed.f(x, t, lambda)? * &w)).max_norm();
        println!("h = {h:e}: |w_x - G w| = {rx:.3e}, |w_t - F w| = {rt:.3e}");
    }
    Ok(())
}
