// Driving a study from a JSON config, as the `strainlim` binary does.

use strainlim::cli::{run, ExperimentConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let config = ExperimentConfig::from_json(
        r#"{
            "command": "certify",
            "family": {"kind": "power_law", "a": 1.0, "p": 2.0},
            "deltas": [0.0078125, 0.0009765625],
            "samples": 500,
            "seed": 11
        }"#,
    )?;
    let out = std::env::temp_dir().join(format!("strainlim-example-{}", std::process::id()));
    let outcome = run(&config, &out)?;
    println!("{}", outcome.status_line());
    print!("{}", std::fs::read_to_string(&outcome.csv_path)?);
    std::fs::remove_dir_all(&out)?;
    Ok(())
}

fn main() {
    run_example().unwrap();
}
