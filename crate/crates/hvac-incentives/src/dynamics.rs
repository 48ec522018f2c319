//! Multi-zone hybrid thermal model: temperatures, energy and occupant satisfaction
//! over one evaluation period.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Matrix = Vec<Vec<f64>>;

/// Matrices and supply-air temperature of one discrete HVAC mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    /// Thermal coupling.
    pub a: Matrix,
    /// Airflow influence.
    pub b: Matrix,
    /// Reheat influence.
    pub c: Matrix,
    /// Supply-air temperature, degC.
    pub t_s: f64,
}

/// Fan, chiller and reheat coefficients of the per-step energy model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildingModel {
    /// Zone count.
    pub n: usize,
    /// Modes 1, 2 and 3, in that order.
    pub modes: Vec<Mode>,
    pub energy: EnergyCoefficients,
    /// Per-zone deadband around the setpoint in which no discomfort accrues.
    pub comfort_band: Vec<f64>,
    /// Steps per period.
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HvacConfiguration {
    pub f_min: Vec<f64>,
    pub f_max: Vec<f64>,
    /// Desired temperature per zone.
    pub t_d: Vec<f64>,
    /// 1, 2 or 3.
    pub mode: u8,
    pub k_f: f64,
    pub k_r: f64,
    pub r_max: Vec<f64>,
}

/// Outside air temperature `o` and per-zone heat load `q`, one entry per step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceTrace {
    pub o: Vec<f64>,
    pub q: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationOutput {
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "E")]
    pub e: f64,
    /// Zone temperatures after each step.
    pub trace: Vec<Vec<f64>>,
}

fn check_square(m: &Matrix, n: usize, what: &str) -> Result<()> {
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::Model(format!("{what} must be {n}x{n}")));
    }
    Ok(())
}

fn check_len(v: &[f64], n: usize, what: &str) -> Result<()> {
    if v.len() != n {
        return Err(Error::Model(format!("{what} has {} entries, expected {n}", v.len())));
    }
    Ok(())
}

impl BuildingModel {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Model("zone count must be positive".into()));
        }
        if self.modes.len() != 3 {
            return Err(Error::Model(format!("expected 3 modes, found {}", self.modes.len())));
        }
        for (k, m) in self.modes.iter().enumerate() {
            check_square(&m.a, self.n, &format!("modes[{k}].a"))?;
            check_square(&m.b, self.n, &format!("modes[{k}].b"))?;
            check_square(&m.c, self.n, &format!("modes[{k}].c"))?;
        }
        let EnergyCoefficients { a, b, c } = self.energy;
        if !(a > 0.0 && b > 0.0 && c > 0.0) {
            return Err(Error::Model("energy coefficients a, b, c must be positive".into()));
        }
        check_len(&self.comfort_band, self.n, "comfort_band")?;
        if self.comfort_band.iter().any(|&x| !(x >= 0.0)) {
            return Err(Error::Model("comfort_band must be nonnegative".into()));
        }
        if self.steps == 0 {
            return Err(Error::Model("steps must be at least 1".into()));
        }
        Ok(())
    }

    pub fn mode(&self, m: u8) -> Result<&Mode> {
        match m {
            1..=3 => self.modes.get(m as usize - 1).ok_or_else(|| Error::Model(format!("mode {m} not defined"))),
            _ => Err(Error::Model(format!("mode {m} is not in 1..=3"))),
        }
    }
}

impl HvacConfiguration {
    pub fn validate(&self, n: usize) -> Result<()> {
        check_len(&self.f_min, n, "f_min")?;
        check_len(&self.f_max, n, "f_max")?;
        check_len(&self.t_d, n, "t_d")?;
        check_len(&self.r_max, n, "r_max")?;
        if !(1..=3).contains(&self.mode) {
            return Err(Error::Model(format!("mode {} is not in 1..=3", self.mode)));
        }
        for i in 0..n {
            if !(0.0 <= self.f_min[i] && self.f_min[i] <= self.f_max[i]) {
                return Err(Error::Model(format!("zone {i}: need 0 <= f_min <= f_max")));
            }
            if !(self.r_max[i] >= 0.0) {
                return Err(Error::Model(format!("zone {i}: r_max must be nonnegative")));
            }
        }
        if !(self.k_f >= 0.0 && self.k_r >= 0.0) {
            return Err(Error::Model("gains must be nonnegative".into()));
        }
        Ok(())
    }
}

impl DisturbanceTrace {
    pub fn validate(&self, n: usize, steps: usize) -> Result<()> {
        if self.o.len() != steps || self.q.len() != steps {
            return Err(Error::Model(format!(
                "disturbance has {} / {} entries, expected {steps}",
                self.o.len(),
                self.q.len()
            )));
        }
        for (k, q) in self.q.iter().enumerate() {
            check_len(q, n, &format!("q[{k}]"))?;
        }
        Ok(())
    }

    /// Same outside temperature and load at every step.
    pub fn constant(steps: usize, o: f64, q: Vec<f64>) -> Self {
        DisturbanceTrace { o: vec![o; steps], q: vec![q; steps] }
    }
}

/// Saturated proportional control: airflow rises above `f_min` when a zone is
/// warm, reheat engages when it is cold.
pub fn control_law(t: &[f64], cfg: &HvacConfiguration) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = t.len();
    check_len(&cfg.f_min, n, "f_min")?;
    check_len(&cfg.f_max, n, "f_max")?;
    check_len(&cfg.t_d, n, "t_d")?;
    check_len(&cfg.r_max, n, "r_max")?;
    let mut f = vec![0.0; n];
    let mut r = vec![0.0; n];
    control_into(t, cfg, &mut f, &mut r);
    Ok((f, r))
}

fn control_into(t: &[f64], cfg: &HvacConfiguration, f: &mut [f64], r: &mut [f64]) {
    for i in 0..t.len() {
        let err = t[i] - cfg.t_d[i];
        f[i] = (cfg.f_min[i] + cfg.k_f * err).max(cfg.f_min[i]).min(cfg.f_max[i]);
        r[i] = (-cfg.k_r * err).max(0.0).min(cfg.r_max[i]);
    }
}

/// `A T + B F + C R + Q` for the given mode.
pub fn affine_step(t: &[f64], f: &[f64], r: &[f64], mode: &Mode, q: &[f64]) -> Result<Vec<f64>> {
    let n = t.len();
    check_square(&mode.a, n, "a")?;
    check_square(&mode.b, n, "b")?;
    check_square(&mode.c, n, "c")?;
    check_len(f, n, "flows")?;
    check_len(r, n, "reheats")?;
    check_len(q, n, "load")?;
    let mut out = vec![0.0; n];
    affine_into(t, f, r, mode, q, &mut out);
    Ok(out)
}

fn affine_into(t: &[f64], f: &[f64], r: &[f64], mode: &Mode, q: &[f64], out: &mut [f64]) {
    for i in 0..t.len() {
        let mut acc = q[i];
        for j in 0..t.len() {
            acc += mode.a[i][j] * t[j] + mode.b[i][j] * f[j] + mode.c[i][j] * r[j];
        }
        out[i] = acc;
    }
}

/// One step of the closed loop: control law, then the mode's affine update.
pub fn step(t: &[f64], cfg: &HvacConfiguration, model: &BuildingModel, q: &[f64]) -> Result<Vec<f64>> {
    let (f, r) = control_law(t, cfg)?;
    affine_step(t, &f, &r, model.mode(cfg.mode)?, q)
}

/// Energy drawn in one step. The chiller term keeps its sign, so it is negative
/// when the supply air is colder than outside.
pub fn energy_step(f: &[f64], r: &[f64], mode: u8, o: f64, model: &BuildingModel) -> Result<f64> {
    let t_s = model.mode(mode)?.t_s;
    Ok(energy_terms(f.iter().sum(), r.iter().sum(), t_s, o, &model.energy))
}

fn energy_terms(sum_f: f64, sum_r: f64, t_s: f64, o: f64, k: &EnergyCoefficients) -> f64 {
    k.a * sum_f * sum_f * sum_f + k.b * (t_s - o) * sum_f + k.c * sum_r
}

/// One minus the mean excess deviation outside the deadband, over all zones and steps.
pub fn satisfaction(trace: &[Vec<f64>], t_d: &[f64], comfort_band: &[f64]) -> Result<f64> {
    if trace.is_empty() || t_d.is_empty() {
        return Err(Error::Argument("satisfaction needs a nonempty trace".into()));
    }
    let n = t_d.len();
    check_len(comfort_band, n, "comfort_band")?;
    let mut excess = 0.0;
    for (k, t) in trace.iter().enumerate() {
        check_len(t, n, &format!("trace[{k}]"))?;
        excess += excess_deviation(t, t_d, comfort_band);
    }
    Ok(1.0 - excess / (n * trace.len()) as f64)
}

fn excess_deviation(t: &[f64], t_d: &[f64], band: &[f64]) -> f64 {
    t.iter().zip(t_d).zip(band).map(|((t, d), b)| ((t - d).abs() - b).max(0.0)).sum()
}

/// Runs one period from `t0` (the setpoint when `None`).
pub fn simulate_period(
    model: &BuildingModel,
    cfg: &HvacConfiguration,
    dist: &DisturbanceTrace,
    t0: Option<&[f64]>,
) -> Result<SimulationOutput> {
    let (s, e, trace) = run(model, cfg, dist, t0, true)?;
    Ok(SimulationOutput { s, e, trace })
}

/// Same as [`simulate_period`] without keeping the temperature trace.
pub fn simulate_point(
    model: &BuildingModel,
    cfg: &HvacConfiguration,
    dist: &DisturbanceTrace,
    t0: Option<&[f64]>,
) -> Result<(f64, f64)> {
    let (s, e, _) = run(model, cfg, dist, t0, false)?;
    Ok((s, e))
}

fn run(
    model: &BuildingModel,
    cfg: &HvacConfiguration,
    dist: &DisturbanceTrace,
    t0: Option<&[f64]>,
    keep: bool,
) -> Result<(f64, f64, Vec<Vec<f64>>)> {
    model.validate()?;
    let n = model.n;
    cfg.validate(n)?;
    dist.validate(n, model.steps)?;
    let mode = model.mode(cfg.mode)?;
    let mut t = match t0 {
        Some(t0) => {
            check_len(t0, n, "t0")?;
            t0.to_vec()
        }
        None => cfg.t_d.clone(),
    };
    let mut next = vec![0.0; n];
    let mut f = vec![0.0; n];
    let mut r = vec![0.0; n];
    let mut energy = 0.0;
    let mut excess = 0.0;
    let mut trace = Vec::with_capacity(if keep { model.steps } else { 0 });
    for k in 0..model.steps {
        control_into(&t, cfg, &mut f, &mut r);
        energy += energy_terms(f.iter().sum(), r.iter().sum(), mode.t_s, dist.o[k], &model.energy);
        affine_into(&t, &f, &r, mode, &dist.q[k], &mut next);
        if next.iter().any(|x| !x.is_finite()) || !energy.is_finite() {
            return Err(Error::Diverged { step: k + 1 });
        }
        std::mem::swap(&mut t, &mut next);
        excess += excess_deviation(&t, &cfg.t_d, &model.comfort_band);
        if keep {
            trace.push(t.clone());
        }
    }
    let s = 1.0 - excess / (n * model.steps) as f64;
    Ok((s, energy, trace))
}

/// `a I + coupling (J - I)`: every zone keeps fraction `a` of its own temperature
/// and exchanges `coupling` with each other zone.
pub fn coupled_matrix(n: usize, a: f64, coupling: f64) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { a } else { coupling }).collect()).collect()
}

pub fn diagonal(n: usize, d: f64) -> Matrix {
    coupled_matrix(n, d, 0.0)
}
