use hvac_incentives::param_opt::{check_theorem, solve, sweep, sweep_csv, Direction, Family, ObjectiveSpec, Verdict};
use hvac_incentives::Error;
use proptest::prelude::*;

/// Integer points with f strictly monotone in x and arbitrary integer g.
fn lattice_spec(family: Family, dir: Direction) -> impl Strategy<Value = ObjectiveSpec> {
    (1usize..12, prop::collection::vec((0usize..64, -20i32..=20, -12i32..=12), 1..60)).prop_flat_map(
        move |(n_x, raw)| {
            prop::collection::vec(1i32..=4, n_x).prop_map(move |steps| {
                let mut f_of = Vec::with_capacity(n_x);
                let mut acc = 0i32;
                for s in &steps {
                    acc += s;
                    f_of.push(if dir == Direction::Increasing { acc } else { -acc } as f64);
                }
                let mut points = Vec::new();
                let mut f = Vec::new();
                let mut g = Vec::new();
                for (k, &(ix, y, gv)) in raw.iter().enumerate() {
                    let ix = if k < n_x { k } else { ix % n_x };
                    points.push((ix as f64 * 2.0 - 7.0, y as f64));
                    f.push(f_of[ix]);
                    g.push(gv as f64);
                }
                ObjectiveSpec { family, points, f, g }
            })
        },
    )
}

fn dyadic_lambdas() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::btree_set(0u32..=64, 2..10).prop_map(|s| s.into_iter().map(|k| k as f64 / 8.0).collect())
}

fn continuous_spec() -> impl Strategy<Value = ObjectiveSpec> {
    prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64, -3.0..3.0f64, -3.0..3.0f64), 50).prop_map(|rows| {
        let points = rows.iter().map(|r| (r.0, r.1)).collect();
        let f = rows.iter().map(|r| r.2).collect();
        let g = rows.iter().map(|r| r.3).collect();
        ObjectiveSpec { family: Family::Type1, points, f, g }
    })
}

#[test]
fn type1_at_zero_picks_the_largest_x() {
    let points = vec![(0.0, 1.0), (2.0, -1.0), (3.0, 4.0), (3.0, -2.0), (1.0, 0.0)];
    let spec = ObjectiveSpec::new(Family::Type1, points, |x| x * x * x, |x, y| 10.0 * y - x).unwrap();
    let m = solve(&spec, 0.0, None).unwrap();
    assert_eq!((m.x_lo, m.x_hi), (3.0, 3.0));
}

#[test]
fn dominant_point_wins_for_every_lambda() {
    let spec = ObjectiveSpec::new(Family::Type2, vec![(0.0, 0.0), (1.0, 0.0)], |x| x, |_, _| 0.0).unwrap();
    for l in [0.5, 1.0, 7.0] {
        assert_eq!(solve(&spec, l, None).unwrap().points, vec![(1.0, 0.0)]);
    }
}

#[test]
fn constant_objective_spans_all_x() {
    let points = vec![(0.5, 0.0), (-1.0, 2.0), (3.0, 1.0)];
    let spec = ObjectiveSpec::new(Family::Type1, points, |_| 0.0, |_, _| 0.0).unwrap();
    for r in sweep(&spec, &[0.0, 1.0, 2.0], None).unwrap() {
        assert_eq!((r.x_lo, r.x_hi), (-1.0, 3.0));
    }
}

#[test]
fn flat_objective_gives_a_multi_valued_maximizer() {
    // f(x) + lambda g = (1 - lambda) x is flat in x at lambda = 1
    let points: Vec<(f64, f64)> = (0..5).map(|k| (k as f64, 0.0)).collect();
    let spec = ObjectiveSpec::new(Family::Type1, points, |x| x, |x, _| -x).unwrap();
    let lambdas = [0.0, 0.5, 1.0, 1.5];
    assert_eq!(check_theorem(&spec, &lambdas, Direction::Increasing, None).unwrap(), Verdict::Pass);
    let rows = sweep(&spec, &lambdas, None).unwrap();
    assert_eq!((rows[2].x_lo, rows[2].x_hi), (0.0, 4.0));
}

#[test]
fn non_monotone_f_is_a_precondition_error() {
    let spec =
        ObjectiveSpec::new(Family::Type1, vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], |x| (x - 1.0).abs(), |_, _| 0.0)
            .unwrap();
    let err = check_theorem(&spec, &[0.0, 1.0], Direction::Increasing, None).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
}

#[test]
fn sweep_csv_header() {
    let spec = ObjectiveSpec::new(Family::Type1, vec![(0.0, 0.0), (1.0, 0.0)], |x| x, |x, _| -2.0 * x).unwrap();
    let csv = sweep_csv(&sweep(&spec, &[0.0, 1.0], None).unwrap()).unwrap();
    assert_eq!(csv, "lambda,x_lo,x_hi\n0,1,1\n1,0,0\n");
}

proptest! {
    #[test]
    fn solve_matches_reverse_enumeration(spec in continuous_spec(), lambda in 0.0..4.0f64) {
        let m = solve(&spec, lambda, Some(0.0)).unwrap();
        let mut best = f64::NEG_INFINITY;
        let mut set = Vec::new();
        for k in (0..spec.points.len()).rev() {
            let v = spec.f[k] + lambda * spec.g[k];
            if v > best {
                best = v;
                set.clear();
            }
            if v == best {
                set.push(k);
            }
        }
        set.reverse();
        prop_assert_eq!(m.value, best);
        prop_assert_eq!(m.indices, set);
    }

    #[test]
    fn positive_scaling_keeps_the_maximizers(
        spec in lattice_spec(Family::Type2, Direction::Increasing),
        lambda in 0u32..40,
        scale in 0.01..100.0f64,
    ) {
        let lambda = lambda as f64 / 8.0;
        let mut scaled = spec.clone();
        scaled.f.iter_mut().chain(scaled.g.iter_mut()).for_each(|v| *v *= scale);
        prop_assert_eq!(solve(&spec, lambda, None).unwrap().indices, solve(&scaled, lambda, None).unwrap().indices);
    }

    #[test]
    fn type1_increasing_orders_down(spec in lattice_spec(Family::Type1, Direction::Increasing), l in dyadic_lambdas()) {
        let rows = sweep(&spec, &l, Some(0.0)).unwrap();
        prop_assert!(rows.windows(2).all(|w| w[0].x_lo >= w[1].x_hi));
    }

    #[test]
    fn type1_decreasing_orders_up(spec in lattice_spec(Family::Type1, Direction::Decreasing), l in dyadic_lambdas()) {
        let rows = sweep(&spec, &l, Some(0.0)).unwrap();
        prop_assert!(rows.windows(2).all(|w| w[0].x_hi <= w[1].x_lo));
    }

    #[test]
    fn type2_increasing_orders_up(spec in lattice_spec(Family::Type2, Direction::Increasing), l in dyadic_lambdas()) {
        let rows = sweep(&spec, &l, Some(0.0)).unwrap();
        prop_assert!(rows.windows(2).all(|w| w[0].x_hi <= w[1].x_lo));
    }

    #[test]
    fn type2_decreasing_orders_down(spec in lattice_spec(Family::Type2, Direction::Decreasing), l in dyadic_lambdas()) {
        let rows = sweep(&spec, &l, Some(0.0)).unwrap();
        prop_assert!(rows.windows(2).all(|w| w[0].x_lo >= w[1].x_hi));
    }

    #[test]
    fn negating_x_swaps_decreasing_for_increasing(
        spec in lattice_spec(Family::Type1, Direction::Decreasing),
        l in dyadic_lambdas(),
    ) {
        let direct = check_theorem(&spec, &l, Direction::Decreasing, Some(0.0)).unwrap();
        let mut flipped = spec.clone();
        flipped.points.iter_mut().for_each(|p| p.0 = -p.0);
        let via = check_theorem(&flipped, &l, Direction::Increasing, Some(0.0)).unwrap();
        prop_assert_eq!(direct, Verdict::Pass);
        prop_assert_eq!(via, Verdict::Pass);
    }
}
