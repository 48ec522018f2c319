// Samples the shipped building and extracts a static model from the cloud.

use std::path::PathBuf;
use std::time::Instant;

use hvac_incentives::dynamics::BuildingModel;
use hvac_incentives::io::read_json;
use hvac_incentives::static_model::{monte_carlo_cloud, ExtractOptions, SampleSpec};
use hvac_incentives::{Result, StaticModel};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run_example() -> Result<()> {
    let model: BuildingModel = read_json(&data("building.json"))?;
    let spec: SampleSpec = read_json(&data("sample-spec.json"))?;

    let t = Instant::now();
    let cloud = monte_carlo_cloud(&model, &spec)?;
    let sm = StaticModel::from_cloud(&cloud.points, &ExtractOptions::default())?;
    println!("{} samples, extracted in {:.2?}", cloud.points.len(), t.elapsed());

    let kp = sm.key_points;
    println!("alpha = ({:.3}, {:.2})  omega = ({:.3}, {:.2})", kp.alpha.s, kp.alpha.e, kp.omega.s, kp.omega.e);
    println!("S in [{:.3}, {:.3}], E in [{:.2}, {:.2}]", kp.s_min, kp.s_max, kp.e_min, kp.e_max);
    println!("E_opt = {:.2}, E_3 = {:.2}, S_4 = {:.3}", kp.e_opt, kp.e_3, kp.s_4);
    println!("{} feasible cells of {}", sm.cells().count(), sm.grid.len());
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
