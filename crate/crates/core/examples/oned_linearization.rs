// The one-dimensional strain-limiting law and its linearization.

use strainlim::scalar1d::{
    oned_delta0_study, oned_forward, oned_invert, oned_strain, stress_grid, Scalar1DParams,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = Scalar1DParams::new(1.0, 2.0, 1e-3)?;
    for s in [0.1, 1.0, 10.0, 1e3] {
        let e = oned_forward(&params, s);
        println!(
            "S = {s:>7}: E/delta = {:.9}, eps = {:.6e}, back = {}",
            e / params.delta,
            oned_strain(e)?,
            oned_invert(&params, e)?
        );
    }

    let st = oned_delta0_study(&params, &stress_grid(0.01, 0.5, 50))?;
    println!("slope of |sigma - S| against delta0: {:?}", st.slope);
    println!("max gap*delta/(|S| delta0) = {:.4}", st.max_ratio);
    println!("max gap*a*delta^2/delta0^2 = {:.4}", st.max_quadratic_ratio);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
