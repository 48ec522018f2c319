//! Density, work surface and feasible mask on a [`Grid`].

use std::collections::VecDeque;

use super::{Grid, OperatingPoint};
use crate::error::{Error, Result};

/// Truncation radius of the smoothing kernel, in standard deviations.
const TRUNCATE: f64 = 3.0;

fn histogram(points: &[OperatingPoint], grid: &Grid) -> Vec<f64> {
    let mut h = vec![0.0; grid.len()];
    for p in points {
        if let Some((i, j)) = grid.cell_of(p.s, p.e) {
            h[grid.idx(i, j)] += 1.0;
        }
    }
    h
}

fn kernel(bandwidth: f64) -> Vec<f64> {
    let r = (TRUNCATE * bandwidth).ceil() as i64;
    let w: Vec<f64> = (-r..=r).map(|x| (-0.5 * (x as f64 / bandwidth).powi(2)).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

/// Separable convolution; mass pushed past the grid edge is dropped.
fn smooth(h: &[f64], grid: &Grid, bandwidth: f64) -> Vec<f64> {
    let k = kernel(bandwidth);
    let r = (k.len() / 2) as i64;
    let (ns, ne) = (grid.n_s as i64, grid.n_e as i64);
    let mut tmp = vec![0.0; h.len()];
    for i in 0..ns {
        for j in 0..ne {
            let v = h[(i * ne + j) as usize];
            if v == 0.0 {
                continue;
            }
            for (t, w) in k.iter().enumerate() {
                let jj = j + t as i64 - r;
                if (0..ne).contains(&jj) {
                    tmp[(i * ne + jj) as usize] += v * w;
                }
            }
        }
    }
    let mut out = vec![0.0; h.len()];
    for i in 0..ns {
        for j in 0..ne {
            let v = tmp[(i * ne + j) as usize];
            if v == 0.0 {
                continue;
            }
            for (t, w) in k.iter().enumerate() {
                let ii = i + t as i64 - r;
                if (0..ns).contains(&ii) {
                    out[(ii * ne + j) as usize] += v * w;
                }
            }
        }
    }
    out
}

/// Histogram smoothed by a truncated Gaussian (`bandwidth` in cells), scaled so
/// that sum x cell area = 1.
pub fn estimate_density(points: &[OperatingPoint], grid: &Grid, bandwidth: f64) -> Result<Vec<f64>> {
    if points.is_empty() {
        return Err(Error::Argument("density needs at least one point".into()));
    }
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::Argument(format!("bandwidth must be positive, got {bandwidth}")));
    }
    let d = smooth(&histogram(points, grid), grid, bandwidth);
    let total: f64 = d.iter().sum::<f64>() * grid.cell_area();
    if !(total > 0.0) {
        return Err(Error::Argument("no point falls on the grid".into()));
    }
    Ok(d.into_iter().map(|x| x / total).collect())
}

/// Default floor: a thousandth of the peak density.
pub fn default_floor(density: &[f64]) -> f64 {
    1e-3 * density.iter().cloned().fold(0.0, f64::max)
}

/// `1 / (density + floor)` on feasible cells, rescaled onto [0, 1]. Cells off
/// the mask hold NaN.
pub fn work_surface(density: &[f64], feasible: &[bool], floor: f64) -> Result<Vec<f64>> {
    if !(floor > 0.0) {
        return Err(Error::Argument(format!("floor must be positive, got {floor}")));
    }
    if density.len() != feasible.len() {
        return Err(Error::Argument("density and mask sizes differ".into()));
    }
    let raw: Vec<f64> =
        density.iter().zip(feasible).map(|(&d, &f)| if f { 1.0 / (d + floor) } else { f64::NAN }).collect();
    let (lo, hi) =
        raw.iter().filter(|x| !x.is_nan()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if !(hi > lo) {
        return Err(Error::DegenerateSurface);
    }
    Ok(raw.into_iter().map(|w| (w - lo) / (hi - lo)).collect())
}

/// Occupied cells, dilated `dilation` times over 4-neighbourhoods, reduced to
/// the largest 4-connected component.
pub fn extract_feasible(points: &[OperatingPoint], grid: &Grid, dilation: usize) -> Vec<bool> {
    let mut mask = vec![false; grid.len()];
    for p in points {
        if let Some((i, j)) = grid.cell_of(p.s, p.e) {
            mask[grid.idx(i, j)] = true;
        }
    }
    for _ in 0..dilation {
        mask = dilate(&mask, grid);
    }
    largest_component(&mask, grid)
}

pub fn dilate(mask: &[bool], grid: &Grid) -> Vec<bool> {
    let mut out = mask.to_vec();
    for (k, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
        let (i, j) = grid.ij(k);
        for (a, b) in grid.neighbors4(i, j) {
            out[grid.idx(a, b)] = true;
        }
    }
    out
}

/// Component labels (0 = off the mask) and the size of each label.
pub fn components(mask: &[bool], grid: &Grid) -> (Vec<usize>, Vec<usize>) {
    let mut label = vec![0usize; mask.len()];
    let mut sizes = vec![0usize];
    let mut queue = VecDeque::new();
    for start in 0..mask.len() {
        if !mask[start] || label[start] != 0 {
            continue;
        }
        let id = sizes.len();
        sizes.push(0);
        label[start] = id;
        queue.push_back(start);
        while let Some(k) = queue.pop_front() {
            sizes[id] += 1;
            let (i, j) = grid.ij(k);
            for (a, b) in grid.neighbors4(i, j) {
                let n = grid.idx(a, b);
                if mask[n] && label[n] == 0 {
                    label[n] = id;
                    queue.push_back(n);
                }
            }
        }
    }
    (label, sizes)
}

/// Largest 4-connected component; on equal sizes the one reached first in
/// storage order wins.
pub fn largest_component(mask: &[bool], grid: &Grid) -> Vec<bool> {
    let (label, sizes) = components(mask, grid);
    let mut best = 0;
    for id in 1..sizes.len() {
        if sizes[id] > sizes[best] {
            best = id;
        }
    }
    label.iter().map(|&l| best != 0 && l == best).collect()
}
