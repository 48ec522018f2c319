use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Node-centred lattice over `[s_lo, s_hi] x [e_lo, e_hi]`. Node `(i, j)` sits
/// at `(s_lo + i ds, e_lo + j de)` and stands for the cell of width `ds x de`
/// around it. Flat storage is S-major: `i * n_e + j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub s_lo: f64,
    pub s_hi: f64,
    pub e_lo: f64,
    pub e_hi: f64,
    pub n_s: usize,
    pub n_e: usize,
}

impl Grid {
    pub fn new(s_lo: f64, s_hi: f64, e_lo: f64, e_hi: f64, n_s: usize, n_e: usize) -> Result<Self> {
        let ok = n_s >= 2
            && n_e >= 2
            && s_lo.is_finite()
            && s_hi.is_finite()
            && e_lo.is_finite()
            && e_hi.is_finite()
            && s_lo < s_hi
            && e_lo < e_hi;
        if !ok {
            return Err(Error::Argument(format!("bad grid [{s_lo}, {s_hi}] x [{e_lo}, {e_hi}] at {n_s}x{n_e}")));
        }
        Ok(Grid { s_lo, s_hi, e_lo, e_hi, n_s, n_e })
    }

    /// Bounding box of the points padded by `pad` of its extent on each side.
    pub fn covering(points: &[super::OperatingPoint], pad: f64, n_s: usize, n_e: usize) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Argument("cannot size a grid from zero points".into()));
        }
        let (mut s0, mut s1, mut e0, mut e1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in points {
            s0 = s0.min(p.s);
            s1 = s1.max(p.s);
            e0 = e0.min(p.e);
            e1 = e1.max(p.e);
        }
        // a degenerate extent still needs a box to put cells in
        let ws = if s1 > s0 { s1 - s0 } else { s0.abs().max(1.0) };
        let we = if e1 > e0 { e1 - e0 } else { e0.abs().max(1.0) };
        Grid::new(s0 - pad * ws, s1 + pad * ws, e0 - pad * we, e1 + pad * we, n_s, n_e)
    }

    pub fn ds(&self) -> f64 {
        (self.s_hi - self.s_lo) / (self.n_s - 1) as f64
    }

    pub fn de(&self) -> f64 {
        (self.e_hi - self.e_lo) / (self.n_e - 1) as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.ds() * self.de()
    }

    pub fn len(&self) -> usize {
        self.n_s * self.n_e
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn s_at(&self, i: usize) -> f64 {
        self.s_lo + i as f64 * self.ds()
    }

    pub fn e_at(&self, j: usize) -> f64 {
        self.e_lo + j as f64 * self.de()
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n_e + j
    }

    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k / self.n_e, k % self.n_e)
    }

    /// Cell containing `(s, e)`, if it is on the grid.
    pub fn cell_of(&self, s: f64, e: f64) -> Option<(usize, usize)> {
        let i = ((s - self.s_lo) / self.ds()).round();
        let j = ((e - self.e_lo) / self.de()).round();
        let inside = i >= 0.0 && j >= 0.0 && i < self.n_s as f64 && j < self.n_e as f64;
        inside.then_some((i as usize, j as usize))
    }

    /// Fractional node coordinates of `(s, e)`.
    pub fn frac(&self, s: f64, e: f64) -> (f64, f64) {
        ((s - self.s_lo) / self.ds(), (e - self.e_lo) / self.de())
    }

    /// Nearest S index, clamped onto the grid.
    pub fn snap_s(&self, s: f64) -> usize {
        (((s - self.s_lo) / self.ds()).round().max(0.0) as usize).min(self.n_s - 1)
    }

    pub fn snap_e(&self, e: f64) -> usize {
        (((e - self.e_lo) / self.de()).round().max(0.0) as usize).min(self.n_e - 1)
    }

    /// 4-neighbours of a cell that lie on the grid.
    pub fn neighbors4(&self, i: usize, j: usize) -> impl Iterator<Item = (usize, usize)> {
        let (n_s, n_e) = (self.n_s, self.n_e);
        [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)].into_iter().filter_map(move |(di, dj)| {
            let (a, b) = (i as i64 + di, j as i64 + dj);
            (a >= 0 && b >= 0 && (a as usize) < n_s && (b as usize) < n_e).then_some((a as usize, b as usize))
        })
    }

    pub fn neighbors8(&self, i: usize, j: usize) -> impl Iterator<Item = (usize, usize)> {
        let (n_s, n_e) = (self.n_s, self.n_e);
        (-1i64..=1).flat_map(|di| (-1i64..=1).map(move |dj| (di, dj))).filter(|&d| d != (0, 0)).filter_map(
            move |(di, dj)| {
                let (a, b) = (i as i64 + di, j as i64 + dj);
                (a >= 0 && b >= 0 && (a as usize) < n_s && (b as usize) < n_e).then_some((a as usize, b as usize))
            },
        )
    }
}
