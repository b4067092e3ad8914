//! Brute-force oracles for the geometry searches. The oracles here are
//! deliberately naive (dense grids, direction sweeps) and independent of the
//! branch-and-bound implementation they check.

use rand::Rng as _;
use rand::SeedableRng as _;
use rand_chacha::ChaCha8Rng;

use rotbeta_core::geometry::{largest_empty_ball, LatticeDomain};
use rotbeta_core::points::PointSet;

/// Support width of the parallelotope in direction `u`: sum of the absolute
/// projections of the edge vectors.
fn support_width(basis: &[Vec<f64>], u: &[f64]) -> f64 {
    basis
        .iter()
        .map(|eta| eta.iter().zip(u).map(|(e, u)| e * u).sum::<f64>().abs())
        .sum()
}

fn brute_force_width_2d(basis: &[Vec<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    let n = 200_000;
    for i in 0..n {
        let phi = std::f64::consts::PI * i as f64 / n as f64;
        best = best.min(support_width(basis, &[phi.cos(), phi.sin()]));
    }
    best
}

#[test]
fn width_matches_direction_sweep() {
    let cases: Vec<Vec<Vec<f64>>> = vec![
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![vec![1.0, 0.0], vec![0.0, 3.0]],
        vec![vec![1.0, 0.0], vec![
            (std::f64::consts::FRAC_PI_6).cos(),
            (std::f64::consts::FRAC_PI_6).sin(),
        ]],
    ];
    let expected = [1.0, 1.0, 0.5];
    for (basis, expect) in cases.iter().zip(expected) {
        let d = LatticeDomain::new(basis, &[0.0, 0.0]).unwrap();
        let oracle = brute_force_width_2d(basis);
        assert!((d.width() - expect).abs() < 1e-12);
        assert!((d.width() - oracle).abs() < 1e-8, "width {} oracle {}", d.width(), oracle);
    }
}

#[test]
fn width_is_rotation_invariant_and_scales_linearly() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let theta: f64 = rng.random_range(0.4..2.7);
        let s1: f64 = rng.random_range(0.5..2.0);
        let s2: f64 = rng.random_range(0.5..2.0);
        let basis = vec![vec![s1, 0.0], vec![s2 * theta.cos(), s2 * theta.sin()]];
        let d = LatticeDomain::new(&basis, &[0.0, 0.0]).unwrap();

        let rot: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let rotate = |v: &Vec<f64>| {
            vec![
                v[0] * rot.cos() - v[1] * rot.sin(),
                v[0] * rot.sin() + v[1] * rot.cos(),
            ]
        };
        let rotated: Vec<Vec<f64>> = basis.iter().map(rotate).collect();
        let dr = LatticeDomain::new(&rotated, &[0.0, 0.0]).unwrap();
        assert!((d.width() - dr.width()).abs() < 1e-12);

        let scale: f64 = rng.random_range(0.3..3.0);
        let scaled: Vec<Vec<f64>> = basis
            .iter()
            .map(|v| v.iter().map(|x| x * scale).collect())
            .collect();
        let ds = LatticeDomain::new(&scaled, &[0.0, 0.0]).unwrap();
        assert!((ds.width() - scale * d.width()).abs() < 1e-12);
    }
}

#[test]
fn tiling_assigns_every_point_to_exactly_one_translate() {
    let basis = vec![vec![1.0, 0.2], vec![-0.3, 1.4]];
    let d = LatticeDomain::new(&basis, &[0.15, -0.4]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10_000 {
        let x = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let mut hits = 0;
        for k1 in -6i64..=6 {
            for k2 in -6i64..=6 {
                let t = d.lattice_vector(&[k1, k2]);
                let shifted = [x[0] - t[0], x[1] - t[1]];
                if d.contains(&shifted) {
                    hits += 1;
                }
            }
        }
        assert_eq!(hits, 1, "point {x:?} covered {hits} times");
    }
}

#[test]
fn single_point_covering_radius_is_independent_of_the_point() {
    let d = LatticeDomain::new(&[vec![1.0, 0.0], vec![0.4, 1.1]], &[0.0, 0.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut values = Vec::new();
    for _ in 0..5 {
        let c = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
        let p = d.point_at(&c);
        let r = d.covering_radius(&PointSet::single(&p)).unwrap();
        values.push((r.value, r.err_bound));
    }
    let (v0, e0) = values[0];
    for &(v, e) in &values[1..] {
        assert!((v - v0).abs() <= 2.0 * (e.max(e0)) + 1e-12, "{v} vs {v0}");
    }
}

/// Dense-grid oracle for the largest empty ball in the unit square with one
/// central obstacle. This pins the expected optimum used by the unit tests.
#[test]
fn empty_ball_brute_force_oracle_center_obstacle() {
    let n = 2000usize;
    let mut best = (0.0f64, [0.0f64, 0.0]);
    for i in 0..=n {
        for j in 0..=n {
            let x = [i as f64 / n as f64, j as f64 / n as f64];
            let border = x[0].min(1.0 - x[0]).min(x[1]).min(1.0 - x[1]);
            let dx = x[0] - 0.5;
            let dy = x[1] - 0.5;
            let f = border.min((dx * dx + dy * dy).sqrt());
            if f > best.0 {
                best = (f, x);
            }
        }
    }
    let expect = 1.0 - 1.0 / 2.0f64.sqrt();
    assert!((best.0 - expect).abs() < 1e-3, "oracle max {} vs {}", best.0, expect);

    let d = LatticeDomain::unit_cube(2);
    let ball = largest_empty_ball(&d, &PointSet::single(&[0.5, 0.5]));
    assert!((ball.radius - best.0).abs() <= ball.err_bound + 1e-3);
}

#[test]
fn returned_ball_is_feasible_after_shrinking() {
    let d = LatticeDomain::new(&[vec![1.2, 0.1], vec![0.3, 0.9]], &[-0.2, 0.4]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..10 {
        let mut obstacles = PointSet::new(2);
        for _ in 0..rng.random_range(1..30) {
            let c = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
            obstacles.push(&d.point_at(&c));
        }
        let ball = largest_empty_ball(&d, &obstacles);
        let r = ball.radius - ball.err_bound - 1e-12;
        assert!(d.dist_to_complement(&ball.center).unwrap() >= r);
        for p in obstacles.iter() {
            let dd: f64 = ball
                .center
                .iter()
                .zip(p)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!(dd >= r, "obstacle inside shrunk ball");
        }
    }
}
