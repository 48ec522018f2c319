// Builds the analytic static model from key points and queries it.

use std::path::PathBuf;

use hvac_incentives::io::read_json;
use hvac_incentives::static_model::{extract_key_points, CanonicalSpec};
use hvac_incentives::{OperatingPoint, Result, StaticModel};

fn run_example() -> Result<()> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/canonical.json");
    let spec: CanonicalSpec = read_json(&path)?;
    let m = spec.build()?;
    let kp = m.key_points;
    println!("grid {}x{}, slope m = {:.3}", m.grid.n_s, m.grid.n_e, kp.slope()?);

    for p in [kp.alpha, kp.omega, OperatingPoint::new(kp.s_max, kp.e_opt), OperatingPoint::new(0.9, 1.5)] {
        match m.work_at(p) {
            Ok(w) => println!("({:.3}, {:.2}) feasible, W = {w:.4}", p.s, p.e),
            Err(e) => println!("({:.3}, {:.2}) {e}", p.s, p.e),
        }
    }

    // key points survive extraction from the surface itself
    assert_eq!(extract_key_points(&m.grid, &m.feasible, &m.work)?, kp);
    let back = StaticModel::from_json(&m.to_json()?)?;
    assert_eq!(back.key_points, kp);
    println!("round trip ok");
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
