// Unincentivized manager: optimal set as work aversion grows.

use std::path::PathBuf;

use hvac_incentives::agents::{lambda_threshold, manager_trace};
use hvac_incentives::io::read_json;
use hvac_incentives::static_model::CanonicalSpec;
use hvac_incentives::Result;

fn run_example() -> Result<()> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/canonical.json");
    let m = read_json::<CanonicalSpec>(&path)?.build()?;
    let kp = m.key_points;

    let lambdas: Vec<f64> = (0..=10).map(|k| 0.05 * k as f64).collect();
    println!("lambda      S range           E range");
    for (l, r) in lambdas.iter().zip(manager_trace(&m, &lambdas, None)?) {
        println!("{l:6.2}  [{:.3}, {:.3}]  [{:6.2}, {:6.2}]", r.s_lo(), r.s_hi(), r.e_lo(), r.e_hi());
    }
    let th = lambda_threshold(&m, None)?;
    println!("settles at omega ({:.3}, {:.2}) from lambda = {th:.4}", kp.omega.s, kp.omega.e);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
