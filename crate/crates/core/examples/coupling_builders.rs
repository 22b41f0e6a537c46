//! Building vertex couplings: named families, a symmetric coupling and one
//! given by linear conditions `A psi + B psi' = 0`.

use num_complex::Complex64;
use qgr::graph::{
    coupling_delta, coupling_delta_prime, coupling_kirchhoff, coupling_symmetric,
    unitary_from_linear_conditions,
};
use qgr::linalg::{unitarity_residual, CMatrix};

fn show(name: &str, u: &CMatrix) {
    println!("{name}: {}x{}, |UU* - I| = {:.1e}", u.nrows(), u.ncols(), unitarity_residual(u));
    for i in 0..u.nrows() {
        let row: Vec<String> = (0..u.ncols())
            .map(|j| format!("{:+.4}{:+.4}i", u[(i, j)].re, u[(i, j)].im))
            .collect();
        println!("    {}", row.join("  "));
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    show("kirchhoff d=3", &coupling_kirchhoff(3)?.matrix);
    show("delta d=3, alpha=0.5", &coupling_delta(3, 0.5)?.matrix);
    show("delta' d=2, beta=1", &coupling_delta_prime(2, 1.0)?.matrix);

    // U = aJ + bI with b = -1 and a = 2/(d + i) is a delta coupling of strength 1
    let a = 2.0 / Complex64::new(2.0, 1.0);
    show("symmetric d=2", &coupling_symmetric(2, a, -Complex64::new(1.0, 0.0))?.matrix);

    // Dirichlet at one end, Neumann at the other
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let a = CMatrix::from_row_slice(2, 2, &[one, zero, zero, zero]);
    let b = CMatrix::from_row_slice(2, 2, &[zero, zero, zero, one]);
    show("from (A, B)", &unitary_from_linear_conditions(&a, &b)?.matrix);
    Ok(())
}
