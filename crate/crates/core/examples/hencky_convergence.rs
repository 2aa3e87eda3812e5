// The Hencky strain / Cauchy stress variant for both density laws.

use strainlim::analysis::run_convergence_hencky;
use strainlim::{FamilyKind, FamilySpec, RotationSpec, SymTensor};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let t = SymTensor::diag(1.0, 0.5, -0.25) * 0.5;
    let rot = RotationSpec::new([1.0, 0.0, 0.0], 1.0);
    // admissible for the density laws: delta <= 0.01
    let deltas: Vec<f64> = (7..=13).map(|k| 2f64.powi(-k)).collect();
    for kind in [FamilyKind::DensityModulusReciprocal, FamilyKind::DensityModulusDirect] {
        let spec = FamilySpec {
            kind,
            ..FamilySpec::density_reciprocal(1.0, 0.3, 0.3, 1.0, 1.0)
        };
        let rep = run_convergence_hencky(&spec, &t, &rot, &deltas)?;
        println!(
            "{}: full {:?}, leading {:?}, stress {:?}",
            kind.name(),
            rep.fitted_order_full,
            rep.fitted_order_leading,
            rep.fitted_order_stress
        );
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
