// Symmetric tensor basics: invariants, eigenpairs and spectral functions.

use strainlim::SymTensor;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let a = SymTensor::new(4.0, 3.0, 2.0, 0.5, -0.25, 0.1);
    println!("A = {a:?}");
    println!("tr A = {}, det A = {:.6}, |A| = {:.6}", a.trace(), a.det(), a.frobenius());

    let spec = a.eig();
    println!("eigenvalues (descending) = {:?}", spec.eigenvalues);
    let err = (spec.reconstruct() - a).frobenius();
    println!("reconstruction error = {err:.2e}");

    let r = a.spd_sqrt()?;
    println!("|sqrt(A)^2 - A| = {:.2e}", (r.matmul(&r).sym() - a).frobenius());

    let l = a.sym_log()?;
    println!("|exp(log A) - A| = {:.2e}", (l.sym_exp() - a).frobenius());

    // det(I + X) - 1 without cancellation for tiny X
    let x = SymTensor::diag(1e-9, -2e-9, 3e-9);
    println!("det(I + X) - 1 = {:e} (trace {:e})", x.det_identity_plus_minus_one(), x.trace());
    Ok(())
}

fn main() {
    run_example().unwrap();
}
