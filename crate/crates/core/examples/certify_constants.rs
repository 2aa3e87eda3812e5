// Sampled estimates of the family constants against their closed-form bounds.

use strainlim::analysis::certify_constants;
use strainlim::FamilySpec;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let deltas = [2f64.powi(-7), 2f64.powi(-10), 2f64.powi(-13)];

    let power = FamilySpec::power_law(1.0, 2.0);
    let c = certify_constants(&power, &deltas, 2000, 1)?;
    println!("power_law: C0 {:.4} <= 1, C1 {:e}, D0 {:.4} <= 2", c.c0_hat, c.c1_hat, c.d0_hat);

    let dens = FamilySpec::density_reciprocal(1.0, 0.3, 0.3, 0.5, 1.0);
    let c = certify_constants(&dens, &deltas, 2000, 1)?;
    println!(
        "density: C0 {:.4} <= {:.4}, C1 {:.4}, D0 {:.4}, C3 {:.4}",
        c.c0_hat,
        dens.density_c0_bound(),
        c.c1_hat,
        c.d0_hat,
        c.c3_hat
    );
    for row in &c.rows {
        println!("  delta {:.3e}: C0 {:.4} C1 {:.4} D0 {:.4} C3 {:.4}", row.delta, row.c0_hat, row.c1_hat, row.d0_hat, row.c3_hat);
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
