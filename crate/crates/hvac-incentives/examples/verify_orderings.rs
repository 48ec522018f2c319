// Randomized check of the maximizer orderings, and a broken harness that
// must be caught.

use hvac_incentives::verify::{self, Mutation};
use hvac_incentives::Result;

fn run_example() -> Result<()> {
    let report = verify::run(500, 2024, None)?;
    for c in &report.cases {
        println!("{:?}: {} instances, {} counterexamples", c.case, c.instances, c.counterexamples);
    }
    assert!(report.passed());

    let broken = verify::run(500, 2024, Some(Mutation::SwapFamily))?;
    let f = &broken.failures[0];
    println!("mutated harness: first failure at {:?} #{}", f.instance.case, f.instance.index);
    assert_eq!(verify::replay(f)?, f.verdict);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
