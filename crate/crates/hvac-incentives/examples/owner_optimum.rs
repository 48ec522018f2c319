// Owner's optimum of S - mu E: closed form against brute force.

use std::path::PathBuf;

use hvac_incentives::agents::{owner_optimum_bruteforce, owner_optimum_closed_form, OwnerOptimum};
use hvac_incentives::io::read_json;
use hvac_incentives::static_model::CanonicalSpec;
use hvac_incentives::Result;

fn run_example() -> Result<()> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/canonical.json");
    let m = read_json::<CanonicalSpec>(&path)?.build()?;
    let inv_m = 1.0 / m.key_points.slope()?;
    println!("1/m = {inv_m:.5}");

    for mu in [0.0, 0.5 * inv_m, inv_m, 2.0 * inv_m] {
        let closed = owner_optimum_closed_form(&m.key_points, mu)?;
        // at 1/m the segment ties up to rounding of the snapped grid
        let tol = (mu == inv_m).then(|| m.grid.ds());
        let brute = owner_optimum_bruteforce(&m, mu, tol)?;
        let shape = match closed {
            OwnerOptimum::TopSegment { s, e_lo, e_hi } => format!("S = {s:.3}, E in [{e_lo:.2}, {e_hi:.2}]"),
            OwnerOptimum::BoundarySegment { from, to } => {
                format!("segment ({:.3}, {:.2}) -> ({:.3}, {:.2})", from.s, from.e, to.s, to.e)
            }
            OwnerOptimum::Point(p) => format!("point ({:.3}, {:.2})", p.s, p.e),
        };
        println!(
            "mu = {mu:.5}: {shape}; brute force {} cells, S [{:.3}, {:.3}]",
            brute.cells.len(),
            brute.s_lo(),
            brute.s_hi()
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
