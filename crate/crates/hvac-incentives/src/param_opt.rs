//! Set-valued maximization of `f(x) + lambda g(x, y)` (type 1) and
//! `lambda f(x) + g(x, y)` (type 2) over a finite feasible set, and the
//! comparative-statics orderings of the maximizers in `lambda`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Type1,
    Type2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Objective over a finite set, with `f` and `g` tabulated per point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub family: Family,
    pub points: Vec<(f64, f64)>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl ObjectiveSpec {
    pub fn new(
        family: Family,
        points: Vec<(f64, f64)>,
        f: impl Fn(f64) -> f64,
        g: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let fv = points.iter().map(|p| f(p.0)).collect();
        let gv = points.iter().map(|p| g(p.0, p.1)).collect();
        Self::from_values(family, points, fv, gv)
    }

    pub fn from_values(family: Family, points: Vec<(f64, f64)>, f: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        let spec = ObjectiveSpec { family, points, f, g };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::Argument("feasible set is empty".into()));
        }
        if self.f.len() != self.points.len() || self.g.len() != self.points.len() {
            return Err(Error::Argument("f and g must have one value per point".into()));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(&self.f) || !finite(&self.g) || self.points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(Error::Argument("points, f and g must be finite".into()));
        }
        Ok(())
    }

    pub fn objective(&self, k: usize, lambda: f64) -> f64 {
        match self.family {
            Family::Type1 => self.f[k] + lambda * self.g[k],
            Family::Type2 => lambda * self.f[k] + self.g[k],
        }
    }

    /// Checks pairwise over all distinct x that `f` is a function of x and is
    /// strictly monotone in the given direction.
    pub fn certify_monotone(&self, dir: Direction) -> Result<()> {
        let mut xs: Vec<(f64, f64)> = self.points.iter().map(|p| p.0).zip(self.f.iter().cloned()).collect();
        xs.sort_by(|a, b| a.0.total_cmp(&b.0));
        xs.dedup_by(|b, a| {
            // identical x must carry identical f; keep one copy
            a.0 == b.0 && a.1 == b.1
        });
        for a in 0..xs.len() {
            for b in a + 1..xs.len() {
                let (xa, fa) = xs[a];
                let (xb, fb) = xs[b];
                if xa == xb {
                    return Err(Error::Precondition(format!("f is not a function of x at x = {xa}")));
                }
                let ok = match dir {
                    Direction::Increasing => fa < fb,
                    Direction::Decreasing => fa > fb,
                };
                if !ok {
                    return Err(Error::Precondition(format!(
                        "f is not strictly {} between x = {xa} and x = {xb}",
                        if dir == Direction::Increasing { "increasing" } else { "decreasing" }
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximizerSet {
    /// Indices into the feasible set, ascending.
    pub indices: Vec<usize>,
    pub points: Vec<(f64, f64)>,
    pub value: f64,
    pub x_lo: f64,
    pub x_hi: f64,
}

/// Default tie tolerance: a billionth of the spread of the objective values.
pub fn default_tie_tol(values: &[f64]) -> f64 {
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    1e-9 * (hi - lo)
}

/// Every index whose value lies within `tie_tol` of the maximum (default tolerance
/// when `None`), with the x-projection taken from `x`.
pub fn argmax_set(
    values: &[f64],
    x: impl Fn(usize) -> f64,
    y: impl Fn(usize) -> f64,
    tie_tol: Option<f64>,
) -> Result<MaximizerSet> {
    if values.is_empty() {
        return Err(Error::Argument("feasible set is empty".into()));
    }
    let tol = tie_tol.unwrap_or_else(|| default_tie_tol(values));
    if !(tol >= 0.0) {
        return Err(Error::Argument(format!("tie tolerance must be nonnegative, got {tol}")));
    }
    let value = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let indices: Vec<usize> = (0..values.len()).filter(|&k| values[k] >= value - tol).collect();
    let points: Vec<(f64, f64)> = indices.iter().map(|&k| (x(k), y(k))).collect();
    let x_lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x_hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(MaximizerSet { indices, points, value, x_lo, x_hi })
}

pub fn solve(spec: &ObjectiveSpec, lambda: f64, tie_tol: Option<f64>) -> Result<MaximizerSet> {
    if !(lambda >= 0.0) {
        return Err(Error::Argument(format!("lambda must be nonnegative, got {lambda}")));
    }
    spec.validate()?;
    let values: Vec<f64> = (0..spec.points.len()).map(|k| spec.objective(k, lambda)).collect();
    argmax_set(&values, |k| spec.points[k].0, |k| spec.points[k].1, tie_tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub x_lo: f64,
    pub x_hi: f64,
}

pub fn check_lambdas(lambdas: &[f64]) -> Result<()> {
    if lambdas.iter().any(|l| !(*l >= 0.0) || !l.is_finite()) {
        return Err(Error::Argument("lambda values must be finite and nonnegative".into()));
    }
    if lambdas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Argument("lambda values must be strictly increasing".into()));
    }
    Ok(())
}

pub fn sweep(spec: &ObjectiveSpec, lambdas: &[f64], tie_tol: Option<f64>) -> Result<Vec<SweepRow>> {
    check_lambdas(lambdas)?;
    lambdas
        .iter()
        .map(|&lambda| solve(spec, lambda, tie_tol).map(|m| SweepRow { lambda, x_lo: m.x_lo, x_hi: m.x_hi }))
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    use crate::io::num;
    let body: Vec<Vec<String>> = rows.iter().map(|r| vec![num(r.lambda), num(r.x_lo), num(r.x_hi)]).collect();
    crate::io::csv_string(&["lambda".into(), "x_lo".into(), "x_hi".into()], &body)
}

/// Whether the maximizers should move down (`true`) or up in x as lambda grows.
pub fn expects_decreasing(family: Family, dir: Direction) -> bool {
    matches!((family, dir), (Family::Type1, Direction::Increasing) | (Family::Type2, Direction::Decreasing))
}

/// Ordering between consecutive rows: `lo(a) >= hi(b)` when decreasing,
/// `hi(a) <= lo(b)` when increasing. Compared exactly.
pub fn ordered(a: &SweepRow, b: &SweepRow, decreasing: bool) -> bool {
    if decreasing {
        a.x_lo >= b.x_hi
    } else {
        a.x_hi <= b.x_lo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Counterexample { first: SweepRow, second: SweepRow },
}

/// Verifies the ordering of maximizers across consecutive lambdas implied by
/// the family and the monotonicity of `f`, which is certified first.
pub fn check_theorem(spec: &ObjectiveSpec, lambdas: &[f64], dir: Direction, tie_tol: Option<f64>) -> Result<Verdict> {
    spec.validate()?;
    spec.certify_monotone(dir)?;
    let rows = sweep(spec, lambdas, tie_tol)?;
    let dec = expects_decreasing(spec.family, dir);
    for w in rows.windows(2) {
        if !ordered(&w[0], &w[1], dec) {
            return Ok(Verdict::Counterexample { first: w[0], second: w[1] });
        }
    }
    Ok(Verdict::Pass)
}
