// Maximizer sets of a small tabulated objective as the parameter grows.

use hvac_incentives::param_opt::{check_theorem, sweep, Direction, Family, ObjectiveSpec, Verdict};
use hvac_incentives::Result;

fn run_example() -> Result<()> {
    let points: Vec<(f64, f64)> = (0..8).map(|k| (k as f64, 0.0)).collect();
    let cost: Vec<f64> = (0..8).map(|k| -((k * k) as f64) / 4.0).collect();
    let lambdas: Vec<f64> = (0..=12).map(|k| k as f64 * 0.25).collect();

    // type 1: concave benefit f(x) against a penalty weighted by lambda
    let benefit = vec![0.0, 3.0, 5.0, 6.5, 7.5, 8.0, 8.2, 8.3];
    let t1 = ObjectiveSpec::from_values(Family::Type1, points.clone(), benefit, cost.clone())?;
    // type 2: lambda scales the reward for x itself
    let reward: Vec<f64> = (0..8).map(|k| k as f64).collect();
    let t2 = ObjectiveSpec::from_values(Family::Type2, points, reward, cost)?;

    for spec in [&t1, &t2] {
        println!("{:?}", spec.family);
        for row in sweep(spec, &lambdas, None)? {
            println!("  lambda {:5.2}: x in [{}, {}]", row.lambda, row.x_lo, row.x_hi);
        }
        assert_eq!(check_theorem(spec, &lambdas, Direction::Increasing, None)?, Verdict::Pass);
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
