use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{bonus_best_response, lambda_threshold, manager_best_response};
use crate::error::{Error, Result};
use crate::io::{csv_string, num};
use crate::static_model::{KeyPoints, OperatingPoint, StaticModel};

/// Bonus weight on energy: `min(S_min / E_max, (S_max - S_min) / E_max)`.
/// Keeps `S - kappa E` nonnegative on the region while staying below `1/m`.
pub fn kappa(kp: &KeyPoints) -> Result<f64> {
    if !(kp.s_min > 0.0) {
        return Err(Error::Calibration(format!("S_min must be positive, got {}", kp.s_min)));
    }
    if !(kp.e_max > 0.0) {
        return Err(Error::Calibration(format!("E_max must be positive, got {}", kp.e_max)));
    }
    let k = (kp.s_min / kp.e_max).min((kp.s_max - kp.s_min) / kp.e_max);
    let inv_m = 1.0 / kp.slope()?;
    if !(k > 0.0 && k < inv_m) {
        return Err(Error::Calibration(format!("kappa {k} is outside (0, 1/m = {inv_m})")));
    }
    Ok(k)
}

/// Lambda whose optimal set comes closest to `actual`, distance measured in
/// cells. Equal distances go to the smaller lambda.
pub fn estimate_lambda(model: &StaticModel, actual: OperatingPoint, grid: &[f64], tie_tol: Option<f64>) -> Result<f64> {
    if !model.membership(actual) {
        return Err(Error::Domain { s: actual.s, e: actual.e });
    }
    if grid.is_empty() {
        return Err(Error::Argument("lambda grid is empty".into()));
    }
    let (ds, de) = (model.grid.ds(), model.grid.de());
    let dists: Vec<f64> = grid
        .par_iter()
        .map(|&l| {
            let r = manager_best_response(model, l, tie_tol)?;
            Ok(r.points
                .iter()
                .map(|p| ((p.s - actual.s) / ds).hypot((p.e - actual.e) / de))
                .fold(f64::INFINITY, f64::min))
        })
        .collect::<Result<_>>()?;
    let best =
        (0..grid.len()).min_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(grid[a].total_cmp(&grid[b]))).unwrap();
    Ok(grid[best])
}

/// `0` followed by 99 log-spaced values from `1e-4 c` to `c`, where `c` is the
/// lambda beyond which the manager settles at omega.
pub fn calibration_grid(model: &StaticModel, tie_tol: Option<f64>) -> Result<Vec<f64>> {
    let c = lambda_threshold(model, tie_tol)?;
    let (a, b) = ((c * 1e-4).ln(), c.ln());
    let mut g = vec![0.0];
    g.extend((0..99).map(|k| (a + (b - a) * k as f64 / 98.0).exp()));
    *g.last_mut().unwrap() = c;
    Ok(g)
}

/// Payment elasticity `(S_1 - lambda E_1) / R_1`.
pub fn estimate_elasticity(s1: f64, e1: f64, lambda: f64, salary: f64) -> Result<f64> {
    if !(salary > 0.0) {
        return Err(Error::Calibration(format!("salary must be positive, got {salary}")));
    }
    Ok((s1 - lambda * e1) / salary)
}

/// Which quantity the elasticity subtracts: energy as in the published
/// estimate, or work as in the manager's utility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ElasticityForm {
    Energy,
    Work,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub lambda: f64,
    /// Unincentivized operating point.
    pub period1: OperatingPoint,
    pub work1: f64,
    pub mu_elast: f64,
    pub kappa: f64,
    pub salary: f64,
}

/// Fits lambda to an observed operating point and sizes the elasticity from
/// the manager's salary.
pub fn calibrate(
    model: &StaticModel,
    actual: OperatingPoint,
    salary: f64,
    form: ElasticityForm,
    tie_tol: Option<f64>,
) -> Result<Calibration> {
    let grid = calibration_grid(model, tie_tol)?;
    let lambda = estimate_lambda(model, actual, &grid, tie_tol)?;
    let p1 = manager_best_response(model, lambda, tie_tol)?.representative();
    let work1 = model.work_at(p1)?;
    let mu_elast = match form {
        ElasticityForm::Energy => estimate_elasticity(p1.s, p1.e, lambda, salary)?,
        ElasticityForm::Work => estimate_elasticity(p1.s, work1, lambda, salary)?,
    };
    if !(mu_elast > 0.0) {
        return Err(Error::Calibration(format!("elasticity must be positive, got {mu_elast}")));
    }
    Ok(Calibration { lambda, period1: p1, work1, mu_elast, kappa: kappa(&model.key_points)?, salary })
}

fn payout_scale(kp: &KeyPoints, kappa: f64) -> Result<f64> {
    let d = kp.s_max - kappa * kp.e_opt;
    if !(d > 0.0) {
        return Err(Error::Calibration(format!("S_max - kappa E_opt = {d} must be positive")));
    }
    Ok(d)
}

/// Bonus weight that pays `P` (in money) at the ideal point `(S_max, E_opt)`.
pub fn gamma_for_payout(p: f64, mu_elast: f64, kp: &KeyPoints, kappa: f64) -> Result<f64> {
    Ok(mu_elast * p / payout_scale(kp, kappa)?)
}

/// Money paid for operating at `at`: `P (S - kappa E) / (S_max - kappa E_opt)`.
pub fn money_payout(p: f64, kp: &KeyPoints, kappa: f64, at: OperatingPoint) -> Result<f64> {
    Ok(p * (at.s - kappa * at.e) / payout_scale(kp, kappa)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavingsRow {
    pub p: f64,
    pub gamma: f64,
    pub delta_e: f64,
    pub delta_s: f64,
    pub payout: f64,
    /// `price * (E_1 - E_2) - payout`, one entry per price.
    pub savings: Vec<f64>,
}

/// Daily energy and money savings of the bonus scheme for each maximum payout.
pub fn savings_table(
    model: &StaticModel,
    cal: &Calibration,
    payouts: &[f64],
    prices: &[f64],
    tie_tol: Option<f64>,
) -> Result<Vec<SavingsRow>> {
    if payouts.iter().chain(prices).any(|x| !(*x >= 0.0)) {
        return Err(Error::Argument("payouts and prices must be nonnegative".into()));
    }
    let kp = &model.key_points;
    payouts
        .par_iter()
        .map(|&p| {
            let gamma = gamma_for_payout(p, cal.mu_elast, kp, cal.kappa)?;
            let out = bonus_best_response(model, cal.lambda, gamma, cal.kappa, tie_tol)?;
            let (a, b) = (out.period1.representative(), out.period2.representative());
            let payout = money_payout(p, kp, cal.kappa, b)?;
            let savings = prices.iter().map(|pr| pr * (a.e - b.e) - payout).collect();
            Ok(SavingsRow { p, gamma, delta_e: b.e - a.e, delta_s: b.s - a.s, payout, savings })
        })
        .collect()
}

pub fn savings_csv(rows: &[SavingsRow], prices: &[f64]) -> Result<String> {
    let mut header: Vec<String> = vec!["P".into(), "delta_E".into(), "delta_S".into()];
    header.extend(prices.iter().map(|p| format!("savings_{}", num(*p))));
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut v = vec![num(r.p), num(r.delta_e), num(r.delta_s)];
            v.extend(r.savings.iter().map(|x| num(*x)));
            v
        })
        .collect();
    csv_string(&header, &body)
}
