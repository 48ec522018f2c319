use super::{Grid, KeyPoints, OperatingPoint, StaticModel};
use crate::error::{Error, Result};

/// Slack allowed by the key-point invariants, in normalized work units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeTolerances {
    /// Largest allowed gap between the two minima.
    pub depth: f64,
    /// Every other cell must sit strictly above the deeper minimum and at most
    /// this far below the shallower one.
    pub isolation: f64,
    /// Boundary key points may sit this many cells (Chebyshev) from a boundary
    /// cell. Dilation with a 4-neighbourhood cuts the corners of the occupied
    /// region, so the extreme corner itself can fall just outside the mask.
    pub boundary_cells: usize,
}

impl Default for ShapeTolerances {
    fn default() -> Self {
        ShapeTolerances { depth: 0.02, isolation: 0.02, boundary_cells: 2 }
    }
}

/// Feasible cells whose work is strictly below every feasible 8-neighbour,
/// sorted by work, then S, then E.
pub fn local_minima(grid: &Grid, feasible: &[bool], work: &[f64]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for k in 0..grid.len() {
        if !feasible[k] {
            continue;
        }
        let (i, j) = grid.ij(k);
        let w = work[k];
        let strict = grid.neighbors8(i, j).all(|(a, b)| {
            let n = grid.idx(a, b);
            !feasible[n] || w < work[n]
        });
        if strict {
            out.push((i, j));
        }
    }
    out.sort_by(|&(a, b), &(c, d)| {
        work[grid.idx(a, b)].total_cmp(&work[grid.idx(c, d)]).then(a.cmp(&c)).then(b.cmp(&d))
    });
    out
}

/// Reads the landmarks off a mask and work grid.
pub fn extract_key_points(grid: &Grid, feasible: &[bool], work: &[f64]) -> Result<KeyPoints> {
    if !feasible.iter().any(|&b| b) {
        return Err(Error::Shape("feasible region is empty".into()));
    }
    let minima = local_minima(grid, feasible, work);
    if minima.len() < 2 {
        return Err(Error::Shape(format!("need two strict local minima of work, found {}", minima.len())));
    }
    let (mut a, mut w) = (minima[0], minima[1]);
    if (w.0, w.1) < (a.0, a.1) {
        std::mem::swap(&mut a, &mut w);
    }
    let cells = || (0..grid.len()).filter(|&k| feasible[k]).map(|k| grid.ij(k));
    let i_min = cells().map(|c| c.0).min().unwrap();
    let i_max = cells().map(|c| c.0).max().unwrap();
    let j_min = cells().map(|c| c.1).min().unwrap();
    let j_max = cells().map(|c| c.1).max().unwrap();
    let col = || cells().filter(|c| c.0 == i_max).map(|c| c.1);
    let j_opt = col().min().unwrap();
    let j_3 = col().max().unwrap();
    let i_4 = cells().filter(|c| c.1 == j_max).map(|c| c.0).max().unwrap();
    let pt = |(i, j): (usize, usize)| OperatingPoint { s: grid.s_at(i), e: grid.e_at(j) };
    Ok(KeyPoints {
        alpha: pt(a),
        omega: pt(w),
        s_min: grid.s_at(i_min),
        s_max: grid.s_at(i_max),
        s_4: grid.s_at(i_4),
        e_min: grid.e_at(j_min),
        e_max: grid.e_at(j_max),
        e_opt: grid.e_at(j_opt),
        e_3: grid.e_at(j_3),
    })
}

fn on_boundary(m: &StaticModel, p: OperatingPoint, radius: usize) -> bool {
    let g = &m.grid;
    let Some((i0, j0)) = g.cell_of(p.s, p.e) else { return false };
    let edge = |i: usize, j: usize| {
        m.is_feasible(i, j)
            && !(g.neighbors4(i, j).count() == 4 && g.neighbors4(i, j).all(|(a, b)| m.is_feasible(a, b)))
    };
    let (ia, ib) = (i0.saturating_sub(radius), (i0 + radius).min(g.n_s - 1));
    let (ja, jb) = (j0.saturating_sub(radius), (j0 + radius).min(g.n_e - 1));
    (ia..=ib).any(|i| (ja..=jb).any(|j| edge(i, j)))
}

/// Checks the structural invariants of a model's key points; the error names
/// the clause that failed.
pub fn check_key_points(m: &StaticModel, tol: &ShapeTolerances) -> Result<()> {
    let kp = &m.key_points;
    let fail = |what: &str| Err(Error::Shape(what.to_string()));
    if !(kp.alpha.s < kp.omega.s && kp.alpha.e < kp.omega.e) {
        return fail("minima ordering: alpha must lie below and left of omega");
    }
    let cell = |p: OperatingPoint| m.grid.cell_of(p.s, p.e).filter(|&(i, j)| m.is_feasible(i, j));
    let (Some(ca), Some(cw)) = (cell(kp.alpha), cell(kp.omega)) else {
        return fail("isolated minima: alpha and omega must be feasible");
    };
    let (wa, ww) = (m.work_cell(ca.0, ca.1), m.work_cell(cw.0, cw.1));
    if (wa - ww).abs() > tol.depth {
        return fail("equal depth: work at alpha and omega differs beyond tolerance");
    }
    let (lo, hi) = (wa.min(ww), wa.max(ww));
    for (i, j) in m.cells() {
        if (i, j) == ca || (i, j) == cw {
            continue;
        }
        let w = m.work_cell(i, j);
        if !(w > lo && w >= hi - tol.isolation) {
            return fail("isolated minima: another cell is as deep as alpha or omega");
        }
    }
    if kp.e_opt > kp.e_3 {
        return fail("right boundary: E_opt exceeds E_3");
    }
    let corners = [
        ("(S_min, E_min)", OperatingPoint::new(kp.s_min, kp.e_min)),
        ("(S_max, E_opt)", OperatingPoint::new(kp.s_max, kp.e_opt)),
        ("(S_max, E_3)", OperatingPoint::new(kp.s_max, kp.e_3)),
        ("(S_4, E_max)", OperatingPoint::new(kp.s_4, kp.e_max)),
    ];
    for (name, p) in corners {
        if !on_boundary(m, p, tol.boundary_cells) {
            return fail(&format!("right boundary: {name} is not on the region boundary"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_built_pits() {
        let g = Grid::new(0.0, 4.0, 0.0, 4.0, 5, 5).unwrap();
        #[rustfmt::skip]
        let work = vec![
            0.9, 0.8, 0.7, 0.8, 0.9,
            0.8, 0.1, 0.6, 0.7, 0.8,
            0.7, 0.6, 0.5, 0.6, 0.7,
            0.8, 0.7, 0.6, 0.0, 0.8,
            0.9, 0.8, 0.7, 0.8, 1.0,
        ];
        let mask = vec![true; 25];
        // brute oracle: every cell strictly below all 8 neighbours
        let mut oracle = Vec::new();
        for i in 0..5i64 {
            for j in 0..5i64 {
                let w = work[(i * 5 + j) as usize];
                let mut ok = true;
                for di in -1..=1 {
                    for dj in -1..=1 {
                        let (a, b) = (i + di, j + dj);
                        if (di, dj) != (0, 0) && (0..5).contains(&a) && (0..5).contains(&b) {
                            ok &= w < work[(a * 5 + b) as usize];
                        }
                    }
                }
                if ok {
                    oracle.push((i as usize, j as usize));
                }
            }
        }
        let mut found = local_minima(&g, &mask, &work);
        assert_eq!(found, vec![(3, 3), (1, 1)]);
        found.sort();
        oracle.sort();
        assert_eq!(found, oracle);
        let kp = extract_key_points(&g, &mask, &work).unwrap();
        assert_eq!(kp.alpha, OperatingPoint::new(1.0, 1.0));
        assert_eq!(kp.omega, OperatingPoint::new(3.0, 3.0));
    }

    #[test]
    fn one_minimum_is_a_shape_error() {
        let g = Grid::new(0.0, 2.0, 0.0, 2.0, 3, 3).unwrap();
        let work = vec![0.5, 0.5, 0.5, 0.5, 0.0, 0.5, 0.5, 0.5, 0.5];
        assert!(matches!(extract_key_points(&g, &[true; 9], &work), Err(Error::Shape(_))));
    }
}
