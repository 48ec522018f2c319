//! Best responses of the building manager under no incentive, a baselining
//! incentive and a performance bonus, plus the owner's own optimum.

mod calibration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use calibration::{
    calibrate, calibration_grid, estimate_elasticity, estimate_lambda, gamma_for_payout, kappa, money_payout,
    savings_csv, savings_table, Calibration, ElasticityForm, SavingsRow,
};

use crate::error::{Error, Result};
use crate::param_opt::{self, Family, ObjectiveSpec};
use crate::static_model::{OperatingPoint, StaticModel};

/// Maximizing cells of an objective over the feasible region.
#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub cells: Vec<(usize, usize)>,
    pub points: Vec<OperatingPoint>,
    pub value: f64,
}

impl Response {
    fn fold(&self, f: impl Fn(&OperatingPoint) -> f64, min: bool) -> f64 {
        let init = if min { f64::INFINITY } else { f64::NEG_INFINITY };
        self.points.iter().map(f).fold(init, if min { f64::min } else { f64::max })
    }

    pub fn s_lo(&self) -> f64 {
        self.fold(|p| p.s, true)
    }

    pub fn s_hi(&self) -> f64 {
        self.fold(|p| p.s, false)
    }

    pub fn e_lo(&self) -> f64 {
        self.fold(|p| p.e, true)
    }

    pub fn e_hi(&self) -> f64 {
        self.fold(|p| p.e, false)
    }

    /// Highest-S member; lowest E among those.
    pub fn representative(&self) -> OperatingPoint {
        *self
            .points
            .iter()
            .max_by(|a, b| a.s.total_cmp(&b.s).then(b.e.total_cmp(&a.e)))
            .expect("responses are nonempty")
    }

    /// Every member within one cell of `p` along both axes.
    pub fn within_one_cell(&self, model: &StaticModel, p: OperatingPoint) -> bool {
        self.points.iter().all(|q| model.cell_distance(*q, p) <= 1.0 + 1e-9)
    }
}

fn from_indices(model: &StaticModel, cells: &[(usize, usize)], m: param_opt::MaximizerSet) -> Response {
    let cells: Vec<(usize, usize)> = m.indices.iter().map(|&k| cells[k]).collect();
    let points = cells.iter().map(|&(i, j)| model.point(i, j)).collect();
    Response { cells, points, value: m.value }
}

/// Maximizes `objective(S, E, W)` over feasible cells.
pub fn best_response(
    model: &StaticModel,
    objective: impl Fn(f64, f64, f64) -> f64,
    tie_tol: Option<f64>,
) -> Result<Response> {
    let cells: Vec<(usize, usize)> = model.cells().collect();
    let values: Vec<f64> =
        cells.iter().map(|&(i, j)| objective(model.grid.s_at(i), model.grid.e_at(j), model.work_cell(i, j))).collect();
    let m = param_opt::argmax_set(&values, |k| model.grid.s_at(cells[k].0), |k| model.grid.e_at(cells[k].1), tie_tol)?;
    Ok(from_indices(model, &cells, m))
}

fn check_nonneg(name: &str, x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Argument(format!("{name} must be finite and nonnegative, got {x}")));
    }
    Ok(())
}

/// Type-1 problem with x = S, f = S, g = -W: the manager trades satisfaction
/// against work at rate `lambda`.
pub fn manager_spec(model: &StaticModel) -> (Vec<(usize, usize)>, ObjectiveSpec) {
    let cells: Vec<(usize, usize)> = model.cells().collect();
    let points = cells.iter().map(|&(i, j)| (model.grid.s_at(i), model.grid.e_at(j))).collect();
    let f = cells.iter().map(|&(i, _)| model.grid.s_at(i)).collect();
    let g = cells.iter().map(|&(i, j)| -model.work_cell(i, j)).collect();
    let spec = ObjectiveSpec { family: Family::Type1, points, f, g };
    (cells, spec)
}

pub fn manager_best_response(model: &StaticModel, lambda: f64, tie_tol: Option<f64>) -> Result<Response> {
    check_nonneg("lambda", lambda)?;
    let (cells, spec) = manager_spec(model);
    let m = param_opt::solve(&spec, lambda, tie_tol)?;
    Ok(from_indices(model, &cells, m))
}

/// Manager responses for a list of lambdas, computed in parallel.
pub fn manager_trace(model: &StaticModel, lambdas: &[f64], tie_tol: Option<f64>) -> Result<Vec<Response>> {
    param_opt::check_lambdas(lambdas)?;
    let (cells, spec) = manager_spec(model);
    lambdas.par_iter().map(|&l| param_opt::solve(&spec, l, tie_tol).map(|m| from_indices(model, &cells, m))).collect()
}

/// Type-2 problem over the region with x = E, f = `sign * E`, g = S - lambda W.
fn energy_spec(model: &StaticModel, lambda: f64, sign: f64) -> (Vec<(usize, usize)>, ObjectiveSpec) {
    let cells: Vec<(usize, usize)> = model.cells().collect();
    let points = cells.iter().map(|&(i, j)| (model.grid.e_at(j), model.grid.s_at(i))).collect();
    let f = cells.iter().map(|&(_, j)| sign * model.grid.e_at(j)).collect();
    let g = cells.iter().map(|&(i, j)| model.grid.s_at(i) - lambda * model.work_cell(i, j)).collect();
    (cells, ObjectiveSpec { family: Family::Type2, points, f, g })
}

/// The owner's closed-form optimum of `S - mu E` over the region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OwnerOptimum {
    /// `mu = 0`: the top of the region, `{(S_max, E) : E_opt <= E <= E_3}`.
    TopSegment {
        s: f64,
        e_lo: f64,
        e_hi: f64,
    },
    /// `mu = 1/m`: the lower-right boundary from `from` to `to`.
    BoundarySegment {
        from: OperatingPoint,
        to: OperatingPoint,
    },
    Point(OperatingPoint),
}

pub fn owner_optimum_closed_form(kp: &crate::static_model::KeyPoints, mu: f64) -> Result<OwnerOptimum> {
    check_nonneg("mu", mu)?;
    let m = kp.slope().map_err(|_| Error::Shape("degenerate model: S_max equals S_min".into()))?;
    let inv_m = 1.0 / m;
    let low = OperatingPoint::new(kp.s_min, kp.e_min);
    let top = OperatingPoint::new(kp.s_max, kp.e_opt);
    Ok(if mu == 0.0 {
        OwnerOptimum::TopSegment { s: kp.s_max, e_lo: kp.e_opt, e_hi: kp.e_3 }
    } else if (mu - inv_m).abs() <= 1e-12 * inv_m {
        OwnerOptimum::BoundarySegment { from: low, to: top }
    } else if mu < inv_m {
        OwnerOptimum::Point(top)
    } else {
        OwnerOptimum::Point(low)
    })
}

pub fn owner_optimum_bruteforce(model: &StaticModel, mu: f64, tie_tol: Option<f64>) -> Result<Response> {
    check_nonneg("mu", mu)?;
    best_response(model, |s, e, _| s - mu * e, tie_tol)
}

/// Optima of both periods under one incentive.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPeriodOutcome {
    pub period1: Response,
    pub period2: Response,
    /// Incentive value at the representative points, in utility units.
    pub payout: f64,
    /// `E*_2 - E*_1` between representatives.
    pub energy_delta: f64,
    /// `S*_2 - S*_1` between representatives.
    pub satisfaction_delta: f64,
}

impl TwoPeriodOutcome {
    fn new(period1: Response, period2: Response, payout: impl Fn(OperatingPoint, OperatingPoint) -> f64) -> Self {
        let (a, b) = (period1.representative(), period2.representative());
        TwoPeriodOutcome {
            payout: payout(a, b),
            energy_delta: b.e - a.e,
            satisfaction_delta: b.s - a.s,
            period1,
            period2,
        }
    }
}

/// Period 1 maximizes `S + gamma E - lambda W`, period 2 `S - gamma E - lambda W`;
/// the manager is paid `gamma (E_1 - E_2)`.
pub fn baselining_best_response(
    model: &StaticModel,
    lambda: f64,
    gamma: f64,
    tie_tol: Option<f64>,
) -> Result<TwoPeriodOutcome> {
    check_nonneg("lambda", lambda)?;
    check_nonneg("gamma", gamma)?;
    let (p1, p2) = if gamma == 0.0 {
        let r = manager_best_response(model, lambda, tie_tol)?;
        (r.clone(), r)
    } else {
        let (c1, s1) = energy_spec(model, lambda, 1.0);
        let (c2, s2) = energy_spec(model, lambda, -1.0);
        (
            from_indices(model, &c1, param_opt::solve(&s1, gamma, tie_tol)?),
            from_indices(model, &c2, param_opt::solve(&s2, gamma, tie_tol)?),
        )
    };
    Ok(TwoPeriodOutcome::new(p1, p2, |a, b| gamma * (a.e - b.e)))
}

/// Energy projections of both periods across a gamma sweep, as type-2
/// problems in E: period 1 with f = E, period 2 with f = -E.
pub fn baselining_trace(
    model: &StaticModel,
    lambda: f64,
    gammas: &[f64],
    tie_tol: Option<f64>,
) -> Result<Vec<TwoPeriodOutcome>> {
    param_opt::check_lambdas(gammas)?;
    gammas.par_iter().map(|&g| baselining_best_response(model, lambda, g, tie_tol)).collect()
}

/// Period 1 is the unincentivized response; period 2 maximizes
/// `(1 + gamma) S - gamma kappa E - lambda W`.
pub fn bonus_best_response(
    model: &StaticModel,
    lambda: f64,
    gamma: f64,
    kappa: f64,
    tie_tol: Option<f64>,
) -> Result<TwoPeriodOutcome> {
    check_nonneg("lambda", lambda)?;
    check_nonneg("gamma", gamma)?;
    if !(kappa > 0.0) {
        return Err(Error::Argument(format!("kappa must be positive, got {kappa}")));
    }
    let p1 = manager_best_response(model, lambda, tie_tol)?;
    let p2 = if gamma == 0.0 {
        p1.clone()
    } else {
        best_response(model, |s, e, w| (1.0 + gamma) * s - gamma * kappa * e - lambda * w, tie_tol)?
    };
    Ok(TwoPeriodOutcome::new(p1, p2, |_, b| gamma * (b.s - kappa * b.e)))
}

pub fn bonus_trace(
    model: &StaticModel,
    lambda: f64,
    gammas: &[f64],
    kappa: f64,
    tie_tol: Option<f64>,
) -> Result<Vec<TwoPeriodOutcome>> {
    param_opt::check_lambdas(gammas)?;
    gammas.par_iter().map(|&g| bonus_best_response(model, lambda, g, kappa, tie_tol)).collect()
}

/// Smallest parameter (to relative precision ~1e-6) from which `ok` holds,
/// found by doubling from 1e-3 and then bisecting. Assumes `ok` is monotone.
pub fn detect_threshold(ok: impl Fn(f64) -> Result<bool>) -> Result<f64> {
    let (mut lo, mut hi) = (0.0, 1e-3);
    let mut doublings = 0;
    while !ok(hi)? {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 80 {
            return Err(Error::Calibration("no convergence threshold below 1e21".into()));
        }
    }
    for _ in 0..20 {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Smallest lambda (see [`detect_threshold`]) whose whole maximizer set lies
/// within one cell of omega.
pub fn lambda_threshold(model: &StaticModel, tie_tol: Option<f64>) -> Result<f64> {
    let omega = model.key_points.omega;
    detect_threshold(|l| Ok(manager_best_response(model, l, tie_tol)?.within_one_cell(model, omega)))
}

/// Smallest gamma from which the bonus period-2 response sits within one cell
/// of `(S_max, E_opt)`.
pub fn bonus_threshold(model: &StaticModel, lambda: f64, kappa: f64, tie_tol: Option<f64>) -> Result<f64> {
    let kp = model.key_points;
    let target = OperatingPoint::new(kp.s_max, kp.e_opt);
    detect_threshold(|g| {
        Ok(bonus_best_response(model, lambda, g, kappa, tie_tol)?.period2.within_one_cell(model, target))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::static_model::{canonical_model, KeyPoints};

    fn model() -> StaticModel {
        let kp = KeyPoints {
            alpha: OperatingPoint::new(0.45, 2.5),
            omega: OperatingPoint::new(0.9, 7.0),
            s_min: 0.3,
            s_max: 0.95,
            s_4: 0.7,
            e_min: 1.0,
            e_max: 12.0,
            e_opt: 3.0,
            e_3: 9.0,
        };
        canonical_model(&kp, 120, 120).unwrap()
    }

    #[test]
    fn zero_lambda_is_the_top_segment() {
        let m = model();
        let kp = m.key_points;
        let r = manager_best_response(&m, 0.0, None).unwrap();
        let mut expect: Vec<(usize, usize)> = m.cells().filter(|&(i, _)| m.grid.s_at(i) == kp.s_max).collect();
        expect.sort();
        let mut got = r.cells.clone();
        got.sort();
        assert_eq!(got, expect);
        assert_eq!((r.e_lo(), r.e_hi()), (kp.e_opt, kp.e_3));
        assert_eq!(r.representative(), OperatingPoint::new(kp.s_max, kp.e_opt));
    }

    #[test]
    fn large_lambda_reaches_omega() {
        let m = model();
        let l = lambda_threshold(&m, None).unwrap();
        for k in [1.0, 3.0, 100.0] {
            assert!(manager_best_response(&m, l * k, None).unwrap().within_one_cell(&m, m.key_points.omega));
        }
    }

    #[test]
    fn incentives_off_reduce_to_manager() {
        let m = model();
        let base = manager_best_response(&m, 0.05, None).unwrap();
        let b = baselining_best_response(&m, 0.05, 0.0, None).unwrap();
        assert_eq!(b.period1, base);
        assert_eq!(b.period2, base);
        let k = kappa(&m.key_points).unwrap();
        let p = bonus_best_response(&m, 0.05, 0.0, k, None).unwrap();
        assert_eq!(p.period1, base);
        assert_eq!(p.period2, base);
        assert_eq!(p.payout, 0.0);
    }

    #[test]
    fn owner_cases() {
        let m = model();
        let kp = m.key_points;
        let inv_m = 1.0 / kp.slope().unwrap();
        assert!(matches!(owner_optimum_closed_form(&kp, 0.0).unwrap(), OwnerOptimum::TopSegment { .. }));
        assert_eq!(
            owner_optimum_closed_form(&kp, 0.5 * inv_m).unwrap(),
            OwnerOptimum::Point(OperatingPoint::new(kp.s_max, kp.e_opt))
        );
        assert_eq!(
            owner_optimum_closed_form(&kp, 2.0 * inv_m).unwrap(),
            OwnerOptimum::Point(OperatingPoint::new(kp.s_min, kp.e_min))
        );
        assert!(matches!(owner_optimum_closed_form(&kp, inv_m).unwrap(), OwnerOptimum::BoundarySegment { .. }));
        for (mu, p) in [
            (0.5 * inv_m, OperatingPoint::new(kp.s_max, kp.e_opt)),
            (2.0 * inv_m, OperatingPoint::new(kp.s_min, kp.e_min)),
        ] {
            assert!(owner_optimum_bruteforce(&m, mu, None).unwrap().within_one_cell(&m, p));
        }
        let mut flat = kp;
        flat.s_max = flat.s_min;
        assert!(owner_optimum_closed_form(&flat, 0.1).is_err());
    }

    #[test]
    fn threshold_search() {
        let t = detect_threshold(|x| Ok(x >= 0.37)).unwrap();
        assert!((0.37..0.37 * (1.0 + 1e-5)).contains(&t));
    }
}
