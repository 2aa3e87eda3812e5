// Solving the implicit relation `E = f_δ(E, S̄)`.

use strainlim::solver::solve_implicit;
use strainlim::{FamilyKind, FamilySpec, SymTensor};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let s = SymTensor::new(0.3, 0.1, -0.2, 0.15, -0.05, 0.1);
    for kind in [FamilyKind::DensityModulusReciprocal, FamilyKind::DensityModulusDirect] {
        let spec = FamilySpec {
            kind,
            ..FamilySpec::density_reciprocal(1.0, 0.3, 0.3, 1.0, 1.0)
        };
        for delta in [1e-2, 1e-3] {
            let r = solve_implicit(&spec, delta, &s, None)?;
            println!(
                "{:<28} delta = {delta:.0e}: {:?} in {} iterations, residual {:.1e}, |E|/delta = {:.4}",
                kind.name(),
                r.method,
                r.iterations,
                r.residual,
                r.solution.frobenius() / delta
            );
        }
    }

    // a stiff density law where Picard is slow and Newton takes over
    let stiff = FamilySpec {
        delta_ceiling: Some(0.01),
        ..FamilySpec::density_direct(1.0, 0.3, 1.9, 0.26, 1.0)
    };
    let r = solve_implicit(&stiff, 0.002, &SymTensor::diag(0.2, 0.15, 0.1), None)?;
    println!("stiff case: {:?} after {} iterations", r.method, r.iterations);

    // solutions outside the strain ball are reported, not returned
    let narrow = FamilySpec::density_reciprocal(1.0, 0.3, 0.3, 0.5, 1.0);
    match solve_implicit(&narrow, 0.005, &(SymTensor::diag(1.0, 0.5, -0.25) * 0.5), None) {
        Ok(r) => println!("narrow ball: solved, |E| = {:.3e}", r.solution.frobenius()),
        Err(e) => println!("narrow ball: {e}"),
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
