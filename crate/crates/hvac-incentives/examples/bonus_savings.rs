// Calibrates the bonus to an observed operating point and tabulates savings.

use std::path::PathBuf;

use hvac_incentives::agents::{bonus_threshold, calibrate, savings_table, ElasticityForm};
use hvac_incentives::io::read_json;
use hvac_incentives::static_model::CanonicalSpec;
use hvac_incentives::{OperatingPoint, Result};

fn run_example() -> Result<()> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/canonical.json");
    let m = read_json::<CanonicalSpec>(&path)?.build()?;

    let cal = calibrate(&m, OperatingPoint::new(0.92, 7.0), 150.0, ElasticityForm::Energy, None)?;
    println!("lambda = {:.4}, kappa = {:.4}, elasticity = {:.3e}", cal.lambda, cal.kappa, cal.mu_elast);
    let g = bonus_threshold(&m, cal.lambda, cal.kappa, None)?;
    println!("bonus reaches (S_max, E_opt) from gamma = {g:.4}");

    let prices = [20.0, 60.0, 100.0];
    println!("P      dE      dS     savings at $20/$60/$100 per unit");
    for r in savings_table(&m, &cal, &[0.0, 50.0, 100.0, 150.0, 200.0], &prices, None)? {
        let s: Vec<String> = r.savings.iter().map(|x| format!("{x:8.2}")).collect();
        println!("{:4}  {:6.3}  {:6.3}  {}", r.p, r.delta_e, r.delta_s, s.join(" "));
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
