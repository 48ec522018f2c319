//! Static operating model: the feasible region of (satisfaction, energy)
//! points, the work needed to hold the building at each of them, and the
//! landmarks of that region.

mod canonical;
mod grid;
mod key_points;
mod sampling;
mod surface;

use serde::{Deserialize, Serialize};

pub use canonical::{canonical_model, canonical_model_with, CanonicalSpec, Well};
pub use grid::Grid;
pub use key_points::{check_key_points, extract_key_points, local_minima, ShapeTolerances};
pub use sampling::{monte_carlo_cloud, Cloud, Controller, Range, SampleSpec};
pub use surface::{
    components, default_floor, dilate, estimate_density, extract_feasible, largest_component, work_surface,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "E")]
    pub e: f64,
}

impl OperatingPoint {
    pub fn new(s: f64, e: f64) -> Self {
        OperatingPoint { s, e }
    }
}

/// Landmarks of the feasible region: the two work minima and the corners of
/// its right-hand boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyPoints {
    pub alpha: OperatingPoint,
    pub omega: OperatingPoint,
    #[serde(rename = "S_min")]
    pub s_min: f64,
    #[serde(rename = "S_max")]
    pub s_max: f64,
    #[serde(rename = "S_4")]
    pub s_4: f64,
    #[serde(rename = "E_min")]
    pub e_min: f64,
    #[serde(rename = "E_max")]
    pub e_max: f64,
    #[serde(rename = "E_opt")]
    pub e_opt: f64,
    #[serde(rename = "E_3")]
    pub e_3: f64,
}

impl KeyPoints {
    /// Slope of the lower-right boundary from `(S_min, E_min)` to `(S_max, E_opt)`.
    pub fn slope(&self) -> Result<f64> {
        if self.s_max == self.s_min {
            return Err(Error::Shape("S_max equals S_min".into()));
        }
        Ok((self.e_opt - self.e_min) / (self.s_max - self.s_min))
    }
}

/// Options for turning a Monte Carlo cloud into a [`StaticModel`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractOptions {
    pub n_s: usize,
    pub n_e: usize,
    /// Smoothing bandwidth in cells.
    pub bandwidth: f64,
    pub dilation: usize,
    /// Padding around the cloud's bounding box, as a fraction of its extent.
    pub pad: f64,
    /// Work floor; `None` uses [`default_floor`].
    pub floor: Option<f64>,
    pub tolerances: ShapeTolerances,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            n_s: 200,
            n_e: 200,
            bandwidth: 2.0,
            dilation: 2,
            pad: 0.05,
            floor: None,
            tolerances: ShapeTolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticModel {
    pub grid: Grid,
    /// Feasible region, S-major like the grid.
    pub feasible: Vec<bool>,
    /// Work in [0, 1] on feasible cells, NaN elsewhere.
    pub work: Vec<f64>,
    pub key_points: KeyPoints,
}

impl StaticModel {
    /// Cloud -> density -> mask -> work -> key points, with every key-point
    /// invariant checked.
    pub fn from_cloud(points: &[OperatingPoint], opts: &ExtractOptions) -> Result<Self> {
        let grid = Grid::covering(points, opts.pad, opts.n_s, opts.n_e)?;
        let density = estimate_density(points, &grid, opts.bandwidth)?;
        let feasible = extract_feasible(points, &grid, opts.dilation);
        let floor = opts.floor.unwrap_or_else(|| default_floor(&density));
        let work = work_surface(&density, &feasible, floor)?;
        Self::from_surface(grid, feasible, work, &opts.tolerances)
    }

    /// Extracts key points from a mask and work grid and checks them.
    pub fn from_surface(grid: Grid, feasible: Vec<bool>, work: Vec<f64>, tol: &ShapeTolerances) -> Result<Self> {
        let key_points = extract_key_points(&grid, &feasible, &work)?;
        let model = StaticModel { grid, feasible, work, key_points };
        model.validate()?;
        check_key_points(&model, tol)?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.grid.len();
        if self.feasible.len() != n || self.work.len() != n {
            return Err(Error::Shape("mask or work grid does not match the lattice".into()));
        }
        for (k, (&f, &w)) in self.feasible.iter().zip(&self.work).enumerate() {
            if f && !(0.0..=1.0).contains(&w) {
                return Err(Error::Shape(format!("work {w} at cell {k} is outside [0, 1]")));
            }
        }
        let (_, sizes) = components(&self.feasible, &self.grid);
        if sizes.len() != 2 {
            return Err(Error::Shape(format!(
                "feasible region must be one connected component, found {}",
                sizes.len() - 1
            )));
        }
        Ok(())
    }

    pub fn is_feasible(&self, i: usize, j: usize) -> bool {
        self.feasible[self.grid.idx(i, j)]
    }

    pub fn work_cell(&self, i: usize, j: usize) -> f64 {
        self.work[self.grid.idx(i, j)]
    }

    pub fn point(&self, i: usize, j: usize) -> OperatingPoint {
        OperatingPoint { s: self.grid.s_at(i), e: self.grid.e_at(j) }
    }

    /// Feasible cells in storage order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.grid.len()).filter(|&k| self.feasible[k]).map(|k| self.grid.ij(k))
    }

    pub fn membership(&self, p: OperatingPoint) -> bool {
        self.grid.cell_of(p.s, p.e).is_some_and(|(i, j)| self.is_feasible(i, j))
    }

    /// Bilinear interpolation between lattice nodes; corners off the region
    /// drop out and the remaining weights are renormalized.
    pub fn work_at(&self, p: OperatingPoint) -> Result<f64> {
        if !self.membership(p) {
            return Err(Error::Domain { s: p.s, e: p.e });
        }
        let g = &self.grid;
        let (u, v) = g.frac(p.s, p.e);
        // lattice points come back as their node value despite rounding in frac
        let near = |x: f64| if (x - x.round()).abs() < 1e-9 { x.round() } else { x };
        let (u, v) = (near(u), near(v));
        let i0 = (u.floor().max(0.0) as usize).min(g.n_s - 2);
        let j0 = (v.floor().max(0.0) as usize).min(g.n_e - 2);
        let (tu, tv) = ((u - i0 as f64).clamp(0.0, 1.0), (v - j0 as f64).clamp(0.0, 1.0));
        let mut acc = 0.0;
        let mut wsum = 0.0;
        for (di, wi) in [(0, 1.0 - tu), (1, tu)] {
            for (dj, wj) in [(0, 1.0 - tv), (1, tv)] {
                let w = wi * wj;
                let x = self.work_cell(i0 + di, j0 + dj);
                if w > 0.0 && !x.is_nan() {
                    acc += w * x;
                    wsum += w;
                }
            }
        }
        if wsum == 0.0 {
            // only reachable through rounding at a cell edge
            let (i, j) = g.cell_of(p.s, p.e).expect("member point is on the grid");
            return Ok(self.work_cell(i, j));
        }
        Ok(acc / wsum)
    }

    /// Distance between two points in cell units (Chebyshev).
    pub fn cell_distance(&self, a: OperatingPoint, b: OperatingPoint) -> f64 {
        let ds = ((a.s - b.s) / self.grid.ds()).abs();
        let de = ((a.e - b.e) / self.grid.de()).abs();
        ds.max(de)
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = StaticModelDoc {
            schema_version: crate::io::SCHEMA_VERSION.to_string(),
            grid: self.grid,
            feasible: encode_rows(&self.feasible, &self.grid),
            work: self.work.iter().map(|&w| (!w.is_nan()).then_some(w)).collect(),
            key_points: self.key_points,
        };
        serde_json::to_string_pretty(&doc).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: StaticModelDoc = crate::io::parse_versioned(text)?;
        let g = doc.grid;
        Grid::new(g.s_lo, g.s_hi, g.e_lo, g.e_hi, g.n_s, g.n_e).map_err(|e| Error::Schema(e.to_string()))?;
        let feasible = decode_rows(&doc.feasible, &g)?;
        if doc.work.len() != g.len() {
            return Err(Error::Schema(format!("work has {} entries, expected {}", doc.work.len(), g.len())));
        }
        let mut work = Vec::with_capacity(g.len());
        for (k, (w, &f)) in doc.work.iter().zip(&feasible).enumerate() {
            match (w, f) {
                (Some(w), true) => work.push(*w),
                (None, false) => work.push(f64::NAN),
                _ => return Err(Error::Schema(format!("work and mask disagree at cell {k}"))),
            }
        }
        let model = StaticModel { grid: g, feasible, work, key_points: doc.key_points };
        model.validate().map_err(|e| Error::Schema(e.to_string()))?;
        Ok(model)
    }
}

#[derive(Serialize, Deserialize)]
struct StaticModelDoc {
    schema_version: String,
    grid: Grid,
    /// One row per S index: alternating run lengths along E, starting with an
    /// infeasible run (possibly empty).
    feasible: Vec<Vec<usize>>,
    /// S-major, `null` off the region.
    work: Vec<Option<f64>>,
    key_points: KeyPoints,
}

fn encode_rows(mask: &[bool], g: &Grid) -> Vec<Vec<usize>> {
    (0..g.n_s)
        .map(|i| {
            let mut runs = Vec::new();
            let mut cur = false;
            let mut len = 0;
            for j in 0..g.n_e {
                let b = mask[g.idx(i, j)];
                if b != cur {
                    runs.push(len);
                    cur = b;
                    len = 0;
                }
                len += 1;
            }
            runs.push(len);
            runs
        })
        .collect()
}

fn decode_rows(rows: &[Vec<usize>], g: &Grid) -> Result<Vec<bool>> {
    if rows.len() != g.n_s {
        return Err(Error::Schema(format!("feasible has {} rows, expected {}", rows.len(), g.n_s)));
    }
    let mut mask = Vec::with_capacity(g.len());
    for (i, runs) in rows.iter().enumerate() {
        let start = mask.len();
        for (r, &len) in runs.iter().enumerate() {
            mask.extend(std::iter::repeat_n(r % 2 == 1, len));
        }
        if mask.len() - start != g.n_e {
            return Err(Error::Schema(format!("feasible row {i} does not cover {} cells", g.n_e)));
        }
    }
    Ok(mask)
}
