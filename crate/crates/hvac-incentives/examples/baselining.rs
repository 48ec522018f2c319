// Baselining incentive: stronger rewards inflate the first-period baseline.

use std::path::PathBuf;

use hvac_incentives::agents::baselining_trace;
use hvac_incentives::io::read_json;
use hvac_incentives::static_model::CanonicalSpec;
use hvac_incentives::Result;

fn run_example() -> Result<()> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/canonical.json");
    let m = read_json::<CanonicalSpec>(&path)?.build()?;
    let lambda = 0.1;
    let gammas = [0.0, 0.005, 0.01, 0.02, 0.05, 0.1, 0.5, 2.0];

    println!("gamma   E1      E2      paid");
    for (g, o) in gammas.iter().zip(baselining_trace(&m, lambda, &gammas, None)?) {
        let (a, b) = (o.period1.representative(), o.period2.representative());
        println!("{g:5.3}  {:6.2}  {:6.2}  {:7.4}", a.e, b.e, o.payout);
    }
    let kp = m.key_points;
    println!("limits: ({:.3}, {:.2}) then ({:.3}, {:.2})", kp.s_4, kp.e_max, kp.s_min, kp.e_min);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
