// Building deformation gradients from strains and small rotations.

use strainlim::kinematics::{
    deformation_from_green, deformation_from_hencky, density_linearization_gap, make_rotation,
    sigma_from_cauchy, sigma_from_piola, RotationSpec,
};
use strainlim::SymTensor;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let rot = RotationSpec::new([0.0, 0.0, 1.0], 1.0);
    let e_hat = SymTensor::new(0.6, 0.2, -0.3, 0.1, 0.0, 0.05);

    println!("{:>10} {:>12} {:>12} {:>12}", "delta", "|F - I|", "|E - eps|", "density gap");
    for k in 4..=10 {
        let delta = 2f64.powi(-k);
        let r = make_rotation(&rot, delta)?;
        let state = deformation_from_green(&(e_hat * delta), &r)?;
        println!(
            "{delta:>10.3e} {:>12.4e} {:>12.4e} {:>12.4e}",
            state.delta0(),
            (state.green - state.eps).frobenius(),
            density_linearization_gap(&state)
        );
    }

    // the two stress measures for the same load
    let delta = 0.01;
    let r = make_rotation(&rot, delta)?;
    let s = SymTensor::diag(0.5, 0.25, -0.125);
    let green = deformation_from_green(&(e_hat * delta), &r)?;
    let hencky = deformation_from_hencky(&(e_hat * delta), &r)?;
    println!("sigma (Piola)  = {:?}", sigma_from_piola(&green.f, &s));
    println!("sigma (Cauchy) = {:?}", sigma_from_cauchy(&hencky.f, &s)?);
    println!("rho/rho_R = {:.8}", green.density_ratio);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
