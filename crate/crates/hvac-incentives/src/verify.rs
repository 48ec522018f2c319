//! Randomized check of the four comparative-statics orderings.
//!
//! Half the instances are continuous (uniform f increments, g and lambda); the
//! other half live on an integer lattice with dyadic lambdas, so that exact
//! ties and multi-valued maximizers actually occur.
//!
//! `Mutation::SwapFamily` is a deliberately broken harness: it evaluates each
//! instance with the other family's objective while still expecting the
//! original ordering. A sound checker must report counterexamples under it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::param_opt::{check_theorem, Direction, Family, ObjectiveSpec, Verdict};

pub const MAX_POINTS: usize = 100;
pub const LAMBDAS_PER_INSTANCE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    /// Type 1, f increasing: maximizers nonincreasing in lambda.
    Type1Increasing,
    /// Type 1, f decreasing: nondecreasing.
    Type1Decreasing,
    /// Type 2, f increasing: nondecreasing.
    Type2Increasing,
    /// Type 2, f decreasing: nonincreasing.
    Type2Decreasing,
}

impl Case {
    pub const ALL: [Case; 4] =
        [Case::Type1Increasing, Case::Type1Decreasing, Case::Type2Increasing, Case::Type2Decreasing];

    pub fn family(self) -> Family {
        match self {
            Case::Type1Increasing | Case::Type1Decreasing => Family::Type1,
            Case::Type2Increasing | Case::Type2Decreasing => Family::Type2,
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Case::Type1Increasing | Case::Type2Increasing => Direction::Increasing,
            Case::Type1Decreasing | Case::Type2Decreasing => Direction::Decreasing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mutation {
    SwapFamily,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub case: Case,
    pub index: u64,
    pub spec: ObjectiveSpec,
    pub lambdas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub instance: Instance,
    pub mutation: Option<Mutation>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub case: Case,
    pub instances: u64,
    pub counterexamples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub seed: u64,
    pub mutation: Option<Mutation>,
    pub cases: Vec<CaseReport>,
    /// First failing instance of each case, for replay.
    pub failures: Vec<Failure>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.counterexamples == 0)
    }
}

/// Builds instance `index` of `case`; the random stream depends only on
/// `(seed, case, index)`.
pub fn instance(case: Case, seed: u64, index: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((case as u64) << 48) | index);
    let lattice = index % 2 == 1;
    let n_points = rng.gen_range(1..=MAX_POINTS);
    let n_x = rng.gen_range(1..=n_points.min(25));

    // distinct sorted x grid and strictly increasing f over it
    let mut xs = Vec::with_capacity(n_x);
    let mut fs = Vec::with_capacity(n_x);
    let (mut x, mut f) = if lattice {
        (rng.gen_range(-10..=10) as f64, rng.gen_range(-10..=10) as f64)
    } else {
        (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0))
    };
    for _ in 0..n_x {
        xs.push(x);
        fs.push(f);
        if lattice {
            x += rng.gen_range(1..=3) as f64;
            f += rng.gen_range(1..=4) as f64;
        } else {
            x += rng.gen_range(0.01..1.0);
            f += rng.gen_range(0.001..2.0);
        }
    }
    if case.direction() == Direction::Decreasing {
        fs.iter_mut().for_each(|v| *v = -*v);
    }

    let mut points = Vec::with_capacity(n_points);
    let mut fv = Vec::with_capacity(n_points);
    let mut gv = Vec::with_capacity(n_points);
    for k in 0..n_points {
        // every x appears at least once
        let ix = if k < n_x { k } else { rng.gen_range(0..n_x) };
        let (y, g) = if lattice {
            (rng.gen_range(-20..=20) as f64, rng.gen_range(-12..=12) as f64)
        } else {
            let y: f64 = rng.gen_range(-10.0..10.0);
            (y, rng.gen_range(-10.0..10.0))
        };
        points.push((xs[ix], y));
        fv.push(fs[ix]);
        gv.push(g);
    }

    let mut lambdas: Vec<f64> = if lattice {
        let mut ks: Vec<u32> = Vec::new();
        while ks.len() < LAMBDAS_PER_INSTANCE {
            let k = rng.gen_range(0..=64);
            if !ks.contains(&k) {
                ks.push(k);
            }
        }
        ks.into_iter().map(|k| k as f64 / 8.0).collect()
    } else {
        let mut v: Vec<f64> = (0..LAMBDAS_PER_INSTANCE).map(|_| rng.gen_range(0.0..5.0)).collect();
        if rng.gen_bool(0.5) {
            v[0] = 0.0;
        }
        v
    };
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();

    let spec = ObjectiveSpec { family: case.family(), points, f: fv, g: gv };
    Instance { case, index, spec, lambdas }
}

/// Runs one instance, optionally through the mutated objective.
pub fn check_instance(inst: &Instance, mutation: Option<Mutation>) -> Result<Verdict> {
    let mut spec = inst.spec.clone();
    let dir = inst.case.direction();
    match mutation {
        None => check_theorem(&spec, &inst.lambdas, dir, None),
        Some(Mutation::SwapFamily) => {
            spec.family = match spec.family {
                Family::Type1 => Family::Type2,
                Family::Type2 => Family::Type1,
            };
            // evaluate the swapped objective but judge it by the original ordering
            spec.certify_monotone(dir)?;
            let rows = crate::param_opt::sweep(&spec, &inst.lambdas, None)?;
            let dec = crate::param_opt::expects_decreasing(inst.case.family(), dir);
            for w in rows.windows(2) {
                if !crate::param_opt::ordered(&w[0], &w[1], dec) {
                    return Ok(Verdict::Counterexample { first: w[0], second: w[1] });
                }
            }
            Ok(Verdict::Pass)
        }
    }
}

/// Checks `instances` random instances of each case in parallel.
pub fn run(instances: u64, seed: u64, mutation: Option<Mutation>) -> Result<Report> {
    let mut cases = Vec::new();
    let mut failures = Vec::new();
    for case in Case::ALL {
        let verdicts: Vec<(u64, Verdict)> = (0..instances)
            .into_par_iter()
            .map(|i| check_instance(&instance(case, seed, i), mutation).map(|v| (i, v)))
            .collect::<Result<_>>()?;
        let bad: Vec<&(u64, Verdict)> = verdicts.iter().filter(|(_, v)| *v != Verdict::Pass).collect();
        if let Some((i, v)) = bad.first() {
            failures.push(Failure { instance: instance(case, seed, *i), mutation, verdict: v.clone() });
        }
        cases.push(CaseReport { case, instances, counterexamples: bad.len() as u64 });
    }
    Ok(Report { seed, mutation, cases, failures })
}

/// Re-runs a serialized failure and returns the fresh verdict.
pub fn replay(f: &Failure) -> Result<Verdict> {
    check_instance(&f.instance, f.mutation)
}
