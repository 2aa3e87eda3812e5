// Quadratic convergence of the linearized relation on a δ ladder.

use strainlim::analysis::{default_deltas, run_convergence};
use strainlim::{FamilySpec, RotationSpec, SymTensor};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec = FamilySpec::power_law(1.0, 2.0);
    let s = SymTensor::diag(1.0, 0.5, -0.25) * 0.5;
    let rot = RotationSpec::new([0.0, 0.0, 1.0], 1.0);
    let rep = run_convergence(&spec, &s, &rot, &default_deltas())?;

    println!("{:>12} {:>12} {:>14} {:>12} {:>12}", "delta", "delta0", "residual", "stress gap", "strain gap");
    for r in &rep.records {
        println!(
            "{:>12.4e} {:>12.4e} {:>14.4e} {:>12.4e} {:>12.4e}",
            r.delta, r.delta0, r.residual_full, r.stress_gap, r.strain_gap
        );
    }
    println!("fitted orders: residual {:?}, stress {:?}, strain {:?}",
        rep.fitted_order_full, rep.fitted_order_stress, rep.fitted_order_strain);
    println!("pairwise orders: {:.3?}", rep.pairwise_orders_full);
    println!("max residual/delta^2 = {:.4}", rep.max_normalized_residual());
    Ok(())
}

fn main() {
    run_example().unwrap();
}
