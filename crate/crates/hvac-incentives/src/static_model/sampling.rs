use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::OperatingPoint;
use crate::dynamics::{self, BuildingModel, DisturbanceTrace, HvacConfiguration};
use crate::error::{Error, Result};

/// Closed interval `[lo, hi]`, serialized as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl From<[f64; 2]> for Range {
    fn from([lo, hi]: [f64; 2]) -> Self {
        Range { lo, hi }
    }
}

impl From<Range> for [f64; 2] {
    fn from(r: Range) -> Self {
        [r.lo, r.hi]
    }
}

impl Range {
    pub fn new(lo: f64, hi: f64) -> Self {
        Range { lo, hi }
    }

    fn draw(&self, rng: &mut impl Rng) -> f64 {
        self.lo + (self.hi - self.lo) * rng.gen::<f64>()
    }
}

/// Controller settings shared by every sampled configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Controller {
    pub t_d: f64,
    pub k_f: f64,
    pub k_r: f64,
    pub r_max: f64,
}

/// Uniform sampling ranges for the Monte Carlo cloud.
///
/// `f_min` and `f_max` are drawn once per sample for the whole building. An
/// `f_min` draw below zero clips to zero and an `f_max` draw below the sampled
/// `f_min` pins the box at `f_min`, so both ranges may reach below zero to put
/// weight on minimum-flow and fans-off operation. `o` and `q` are drawn afresh
/// for every step (and every zone, for `q`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub f_min: Range,
    pub f_max: Range,
    /// Inclusive mode range.
    pub mode: [u8; 2],
    pub o: Range,
    pub q: Range,
    pub n: usize,
    pub seed: u64,
    pub controller: Controller,
}

impl SampleSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, r) in [("f_min", self.f_min), ("f_max", self.f_max), ("o", self.o), ("q", self.q)] {
            if !(r.lo.is_finite() && r.hi.is_finite() && r.lo <= r.hi) {
                return Err(Error::Argument(format!("{name}: need finite lo <= hi")));
            }
        }
        let [m0, m1] = self.mode;
        if !(1 <= m0 && m0 <= m1 && m1 <= 3) {
            return Err(Error::Argument("mode range must satisfy 1 <= lo <= hi <= 3".into()));
        }
        if self.n == 0 {
            return Err(Error::Argument("sample count must be at least 1".into()));
        }
        Ok(())
    }

    /// Configuration and disturbance for sample `index`; each index owns its own
    /// random stream, so the draw does not depend on evaluation order.
    pub fn draw(&self, model: &BuildingModel, index: u64) -> (HvacConfiguration, DisturbanceTrace) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let n = model.n;
        let mode = rng.gen_range(self.mode[0]..=self.mode[1]);
        let f_min = self.f_min.draw(&mut rng).max(0.0);
        let f_max = self.f_max.draw(&mut rng).max(f_min);
        let c = &self.controller;
        let cfg = HvacConfiguration {
            f_min: vec![f_min; n],
            f_max: vec![f_max; n],
            t_d: vec![c.t_d; n],
            mode,
            k_f: c.k_f,
            k_r: c.k_r,
            r_max: vec![c.r_max; n],
        };
        let o = (0..model.steps).map(|_| self.o.draw(&mut rng)).collect();
        let q = (0..model.steps).map(|_| (0..n).map(|_| self.q.draw(&mut rng)).collect()).collect();
        (cfg, DisturbanceTrace { o, q })
    }
}

/// Operating points of the runs that stayed finite, in sample order.
#[derive(Debug, Clone, PartialEq)]
pub struct Cloud {
    pub points: Vec<OperatingPoint>,
    pub diverged: usize,
}

/// Simulates `spec.n` random configurations in parallel. Diverged runs are
/// dropped and counted; more than half diverging is an error.
pub fn monte_carlo_cloud(model: &BuildingModel, spec: &SampleSpec) -> Result<Cloud> {
    model.validate()?;
    spec.validate()?;
    let results: Vec<Result<OperatingPoint>> = (0..spec.n as u64)
        .into_par_iter()
        .map(|i| {
            let (cfg, dist) = spec.draw(model, i);
            dynamics::simulate_point(model, &cfg, &dist, None).map(|(s, e)| OperatingPoint { s, e })
        })
        .collect();
    let mut points = Vec::with_capacity(results.len());
    let mut diverged = 0;
    for r in results {
        match r {
            Ok(p) => points.push(p),
            Err(Error::Diverged { .. }) => diverged += 1,
            Err(e) => return Err(e),
        }
    }
    if 2 * diverged > spec.n {
        return Err(Error::SamplingFailed { diverged, total: spec.n });
    }
    Ok(Cloud { points, diverged })
}
