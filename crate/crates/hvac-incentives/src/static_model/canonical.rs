use serde::{Deserialize, Serialize};

use super::{check_key_points, Grid, KeyPoints, OperatingPoint, ShapeTolerances, StaticModel};
use crate::error::{Error, Result};

/// Empty cells kept around the region on every side.
const MARGIN: usize = 2;

/// Shape of one work well. Distances are measured in units of the region's
/// extent; `shear` tilts the well so that its valley runs along
/// `dE = shear * dS`. A zero shear gives a radial well.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Well {
    pub scale: f64,
    pub shear: f64,
}

impl Well {
    pub const RADIAL: Well = Well { scale: 0.3, shear: 0.0 };
}

fn default_resolution() -> [usize; 2] {
    [200, 200]
}

/// File form of a canonical model: key points, well shapes and resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalSpec {
    pub key_points: KeyPoints,
    #[serde(default = "radial")]
    pub alpha_well: Well,
    #[serde(default = "radial")]
    pub omega_well: Well,
    #[serde(default = "default_resolution")]
    pub resolution: [usize; 2],
}

fn radial() -> Well {
    Well::RADIAL
}

impl CanonicalSpec {
    pub fn build(&self) -> Result<StaticModel> {
        let [n_s, n_e] = self.resolution;
        canonical_model_with(&self.key_points, n_s, n_e, self.alpha_well, self.omega_well)
    }
}

/// Analytic static model with the given key points: a region bounded on the
/// right by the polyline through `(S_min, E_min)`, `(S_max, E_opt)`,
/// `(S_max, E_3)`, `(S_4, E_max)` and on the left by `S = S_min`, with work
/// equal to the lower of two radial wells of equal depth at alpha and omega.
pub fn canonical_model(kp: &KeyPoints, n_s: usize, n_e: usize) -> Result<StaticModel> {
    canonical_model_with(kp, n_s, n_e, Well::RADIAL, Well::RADIAL)
}

/// [`canonical_model`] with custom well shapes. Key points are snapped to the
/// nearest lattice node; the returned model carries the snapped values.
pub fn canonical_model_with(
    kp: &KeyPoints,
    n_s: usize,
    n_e: usize,
    alpha_well: Well,
    omega_well: Well,
) -> Result<StaticModel> {
    validate(kp)?;
    for w in [alpha_well, omega_well] {
        if !(w.scale > 0.0 && w.scale.is_finite() && w.shear.is_finite()) {
            return Err(Error::Argument("well scale must be positive and finite".into()));
        }
    }
    if n_s < 2 * MARGIN + 4 || n_e < 2 * MARGIN + 4 {
        return Err(Error::Argument(format!("resolution {n_s}x{n_e} is too coarse")));
    }
    let ds = (kp.s_max - kp.s_min) / (n_s - 1 - 2 * MARGIN) as f64;
    let de = (kp.e_max - kp.e_min) / (n_e - 1 - 2 * MARGIN) as f64;
    let s_lo = kp.s_min - MARGIN as f64 * ds;
    let e_lo = kp.e_min - MARGIN as f64 * de;
    let grid = Grid::new(s_lo, s_lo + (n_s - 1) as f64 * ds, e_lo, e_lo + (n_e - 1) as f64 * de, n_s, n_e)?;

    let (i_min, i_max) = (MARGIN, n_s - 1 - MARGIN);
    let (j_min, j_max) = (MARGIN, n_e - 1 - MARGIN);
    let (i_4, j_opt, j_3) = (grid.snap_s(kp.s_4), grid.snap_e(kp.e_opt), grid.snap_e(kp.e_3));
    let alpha = (grid.snap_s(kp.alpha.s), grid.snap_e(kp.alpha.e));
    let omega = (grid.snap_s(kp.omega.s), grid.snap_e(kp.omega.e));
    if !(j_min < j_opt && j_opt <= j_3 && j_3 < j_max && i_min < i_4 && i_4 <= i_max) {
        return Err(Error::Argument("key points collapse at this resolution".into()));
    }

    let s = |i: usize| grid.s_at(i);
    let e = |j: usize| grid.e_at(j);
    let slope = (e(j_opt) - e(j_min)) / (s(i_max) - s(i_min));
    let eps = 1e-9 * grid.ds();
    let right = |j: usize| -> f64 {
        if j <= j_opt {
            s(i_min) + (e(j) - e(j_min)) / slope
        } else if j <= j_3 {
            s(i_max)
        } else {
            s(i_max) + (s(i_4) - s(i_max)) * (e(j) - e(j_3)) / (e(j_max) - e(j_3))
        }
    };
    let mut feasible = vec![false; grid.len()];
    for i in i_min..=i_max {
        for j in j_min..=j_max {
            if s(i) <= right(j) + eps {
                feasible[grid.idx(i, j)] = true;
            }
        }
    }
    if !feasible[grid.idx(alpha.0, alpha.1)] || !feasible[grid.idx(omega.0, omega.1)] {
        return Err(Error::Argument("alpha and omega must lie inside the region".into()));
    }

    let span_s = s(i_max) - s(i_min);
    let span_e = e(j_max) - e(j_min);
    let well = |c: (usize, usize), w: Well, i: usize, j: usize| -> f64 {
        let u = (s(i) - s(c.0)) / span_s;
        let v = (e(j) - e(c.1)) / span_e;
        let d = u.hypot(v - w.shear * u) / w.scale;
        1.0 - (-d).exp()
    };
    let mut work = vec![f64::NAN; grid.len()];
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..grid.len() {
        if feasible[k] {
            let (i, j) = grid.ij(k);
            let w = well(alpha, alpha_well, i, j).min(well(omega, omega_well, i, j));
            work[k] = w;
            lo = lo.min(w);
            hi = hi.max(w);
        }
    }
    for w in work.iter_mut().filter(|w| !w.is_nan()) {
        *w = (*w - lo) / (hi - lo);
    }

    let key_points = KeyPoints {
        alpha: OperatingPoint::new(s(alpha.0), e(alpha.1)),
        omega: OperatingPoint::new(s(omega.0), e(omega.1)),
        s_min: s(i_min),
        s_max: s(i_max),
        s_4: s(i_4),
        e_min: e(j_min),
        e_max: e(j_max),
        e_opt: e(j_opt),
        e_3: e(j_3),
    };
    let model = StaticModel { grid, feasible, work, key_points };
    model.validate()?;
    check_key_points(&model, &ShapeTolerances::default())?;
    Ok(model)
}

fn validate(kp: &KeyPoints) -> Result<()> {
    let all = [
        kp.alpha.s, kp.alpha.e, kp.omega.s, kp.omega.e, kp.s_min, kp.s_max, kp.s_4, kp.e_min, kp.e_max, kp.e_opt,
        kp.e_3,
    ];
    let bad = |what: &str| Err(Error::Argument(format!("inconsistent key points: {what}")));
    if all.iter().any(|x| !x.is_finite()) {
        return bad("non-finite value");
    }
    if !(kp.s_min < kp.s_4 && kp.s_4 <= kp.s_max) {
        return bad("need S_min < S_4 <= S_max");
    }
    if !(kp.e_min < kp.e_opt && kp.e_opt <= kp.e_3 && kp.e_3 < kp.e_max) {
        return bad("need E_min < E_opt <= E_3 < E_max");
    }
    if !(kp.alpha.s < kp.omega.s && kp.alpha.e < kp.omega.e) {
        return bad("alpha must lie below and left of omega");
    }
    Ok(())
}
