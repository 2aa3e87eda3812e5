// Complementary energy, its Legendre transform and the Green stress.

use strainlim::energy::EnergyProfile;
use strainlim::{FamilySpec, SymTensor};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for p in [2.0, 3.0] {
        let profile = EnergyProfile::new(FamilySpec::power_law(1.0, p).with_stress_radius(2.0), 64)?;
        let s = SymTensor::new(0.6, 0.0, 0.0, 0.4, 0.0, 0.0) / 0.68f64.sqrt();
        println!("p = {p}: W*(S) at |S| = 1 is {:.12}", profile.complementary_energy(&s)?);

        let e = SymTensor::new(0.3, -0.2, 0.1, 0.2, 0.0, -0.1);
        let conj = profile.leading_inverse(&e)?;
        let w = profile.legendre_transform(&e)?;
        let defect = w + profile.radial_energy(conj.frobenius()) - e.dot(&conj);
        println!("  W(E) = {w:.12}, Fenchel-Young defect {defect:.1e}");

        let delta = 0.01;
        let sigma = profile.green_stress(delta, &(e * delta))?;
        let back = profile.leading(&sigma) * delta;
        println!("  green stress round trip error {:.1e}", (back - e * delta).frobenius());
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
