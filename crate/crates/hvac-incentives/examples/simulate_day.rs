// One day of the shipped three-zone building under a fixed configuration.

use std::path::PathBuf;

use hvac_incentives::dynamics::{self, BuildingModel, DisturbanceTrace, HvacConfiguration};
use hvac_incentives::io::read_json;
use hvac_incentives::Result;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run_example() -> Result<()> {
    let model: BuildingModel = read_json(&data("building.json"))?;
    let cfg: HvacConfiguration = read_json(&data("config.json"))?;
    let dist: DisturbanceTrace = read_json(&data("disturbance.json"))?;

    let out = dynamics::simulate_period(&model, &cfg, &dist, None)?;
    println!("S = {:.4}, E = {:.3} over {} steps", out.s, out.e, model.steps);
    for (z, _) in cfg.t_d.iter().enumerate() {
        let (lo, hi) =
            out.trace.iter().map(|t| t[z]).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        println!("zone {z}: {lo:.2} .. {hi:.2} degC");
    }

    // a stronger mode with the same gains
    let mut cold = cfg.clone();
    cold.mode = 3;
    let (s, e) = dynamics::simulate_point(&model, &cold, &dist, None)?;
    println!("mode 3: S = {s:.4}, E = {e:.3}");
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
