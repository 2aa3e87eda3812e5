// Evaluating the strain-limiting families and their leading profiles.

use strainlim::families::CustomBase;
use strainlim::{BaseProfile, FamilySpec, SymTensor};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let s = SymTensor::diag(1.0, 0.5, -0.25) * 0.5;
    let delta = 0.005;

    let power = FamilySpec::power_law(1.0, 2.0);
    let f = power.eval(delta, &SymTensor::ZERO, &s)?;
    println!("power_law: |f|/delta = {:.6} (always < 1)", f.frobenius() / delta);

    let dens = FamilySpec::density_reciprocal(1.0, 0.3, 0.3, 0.5, 1.0);
    let e = SymTensor::scaled_identity(0.4 * delta / 3f64.sqrt());
    println!("density E_delta(E) = {:.4} (1/delta = {})", dens.generalized_modulus(delta, &e)?, 1.0 / delta);
    println!("C0 bound = {:.6}", dens.density_c0_bound());
    let (le, ls) = dens.density_lipschitz_bounds(delta);
    println!("Lipschitz bounds: strain {le:.4}, stress {ls:.6}");

    // the leading-order gap shrinks like delta^2
    let e_hat = SymTensor::new(0.2, -0.1, 0.1, 0.05, 0.0, 0.0);
    for d in [1e-2, 5e-3, 2.5e-3] {
        let gap = dens.leading_gap(d, &(e_hat * d), &s)?;
        println!("delta = {d:.1e}: leading gap / delta^2 = {:.5}", gap / (d * d));
    }

    // scaled families from a named base or any closure
    let scaled = FamilySpec::scaled_base(BaseProfile::PowerLaw, 0.1);
    println!("scaled power law: {:?}", scaled.eval(delta, &SymTensor::ZERO, &s)?);
    let base = CustomBase::new(|e: &SymTensor, s: &SymTensor| *s * 0.1 - *e * 0.5, false);
    let custom = FamilySpec::scaled_base(BaseProfile::Zero, 0.1).with_custom_base(base);
    println!("custom base at E = 0: {:?}", custom.eval(delta, &SymTensor::ZERO, &s)?);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
