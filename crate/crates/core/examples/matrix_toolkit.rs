//! Small dense complex linear algebra: exponentials of Jordan blocks,
//! Sylvester solves, LU inverses and determinants.

use mcde_gbdt::config::fmt_matrix;
use mcde_gbdt::matrix::{c, determinant, eigenvalues, lu_inverse, mat_exp, sylvester_solve, ComplexMatrix, ONE, ZERO};

fn main() -> mcde_gbdt::Result<()> {
    let a = c(0.5, 1.0 / 3.0);
    let jordan = ComplexMatrix::from_rows(&[vec![a, ONE], vec![ZERO, a]])?;

    // exp of a Jordan block is e^a [[1, 1], [0, 1]].
    let e = mat_exp(&jordan);
    println!("exp(J) = {}", fmt_matrix(&e));
    println!("e^a    = {}", a.exp());

    let a2 = -jordan.adjoint();
    let rhs = ComplexMatrix::identity(2);
    let s = sylvester_solve(&jordan, &a2, &rhs)?;
    let back = &(&jordan * &s) - &(&s * &a2);
    println!("Sylvester residual {:.2e}", back.dist(&rhs));

    let inv = lu_inverse(&s)?;
    println!("|S S^-1 - I| = {:.2e}", (&s * &inv).dist(&ComplexMatrix::identity(2)));
    println!("det S = {}", determinant(&s));
    println!("eig(J) = {:?}", eigenvalues(&jordan));
    Ok(())
}
