//! Property suites for the map: digit consistency across coordinate routes,
//! reconstruction bounds, preimage/forward consistency, branch statistics,
//! and hole-ratio behavior.

use rand::Rng as _;
use rand::SeedableRng as _;
use rand_chacha::ChaCha8Rng;

use rotbeta_core::bounds::b2;
use rotbeta_core::dynamics::{check_property_s, hole_radii, Isometry, RotBetaMap};
use rotbeta_core::geometry::LatticeDomain;
use rotbeta_core::points::dist;
use rotbeta_core::Exec;

fn random_map(rng: &mut ChaCha8Rng) -> RotBetaMap {
    let theta: f64 = rng.random_range(0.5..2.6);
    let s1: f64 = rng.random_range(0.6..1.6);
    let s2: f64 = rng.random_range(0.6..1.6);
    let basis = vec![vec![s1, 0.0], vec![s2 * theta.cos(), s2 * theta.sin()]];
    let xi = vec![rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)];
    let domain = LatticeDomain::new(&basis, &xi).unwrap();
    let iso = if rng.random_bool(0.5) {
        Isometry::rotation(rng.random_range(0.0..std::f64::consts::TAU))
    } else {
        Isometry::reflection(rng.random_range(0.0..std::f64::consts::PI))
    };
    let beta = rng.random_range(1.3..3.8);
    RotBetaMap::new(beta, iso, domain).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, map: &RotBetaMap) -> Vec<f64> {
    let c: Vec<f64> = (0..map.dim()).map(|_| rng.random_range(0.0..1.0)).collect();
    map.domain().point_at(&c)
}

/// Independent digit rule: scan lattice coefficients in a box and keep the
/// unique one whose shifted image lands in the domain.
fn digit_by_scan(map: &RotBetaMap, z: &[f64]) -> Vec<i64> {
    let m = map.dim();
    let zv = nalgebra::DVector::from_column_slice(z);
    let y = map.isometry().apply(&zv) * map.beta();
    let c = map.domain().basis_inv() * (&y - map.domain().xi());
    let mut found: Option<Vec<i64>> = None;
    let center: Vec<i64> = c.iter().map(|v| v.round() as i64).collect();
    let mut k = vec![-2i64; m];
    loop {
        let cand: Vec<i64> = (0..m).map(|i| center[i] + k[i]).collect();
        let d = map.domain().lattice_vector(&cand);
        let img: Vec<f64> = y.iter().zip(&d).map(|(a, b)| a - b).collect();
        if map.domain().contains(&img) {
            assert!(found.is_none(), "digit not unique at {z:?}");
            found = Some(cand);
        }
        let mut axis = 0;
        loop {
            if axis == m {
                break;
            }
            k[axis] += 1;
            if k[axis] <= 2 {
                break;
            }
            k[axis] = -2;
            axis += 1;
        }
        if axis == m {
            break;
        }
    }
    found.expect("some digit must keep the image in the domain")
}

#[test]
fn digits_agree_between_coordinate_routes() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..4 {
        let map = random_map(&mut rng);
        for _ in 0..2500 {
            let z = random_point(&mut rng, &map);
            let st = map.step(&z).unwrap();
            if st.boundary_fragile {
                continue;
            }
            assert_eq!(st.digit, digit_by_scan(&map, &z), "z = {z:?}");
        }
    }
}

#[test]
fn reconstruction_error_is_within_the_geometric_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..100 {
        let map = random_map(&mut rng);
        let z = random_point(&mut rng, &map);
        let e = map.expand(&z, 20).unwrap();
        for n in 1..=20 {
            let rec = map.reconstruct(&e.digits[..n]);
            let err = dist(&rec, &z);
            assert!(
                err <= map.reconstruction_error_bound(n) + 1e-12,
                "n = {n}, err = {err:e}, bound = {:e}",
                map.reconstruction_error_bound(n)
            );
        }
    }
}

#[test]
fn preimages_map_forward_onto_their_target() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let map = random_map(&mut rng);
    let tol = 1e-9 * map.domain().diameter();
    for _ in 0..1000 {
        let z = random_point(&mut rng, &map);
        let pre = map.preimages(&z).unwrap();
        assert!(!pre.is_empty(), "no preimage found for {z:?}");
        for p in pre.iter() {
            let st = map.step(p).unwrap();
            assert!(dist(&st.image, &z) <= tol);
        }
    }
}

#[test]
fn mean_branch_count_matches_the_jacobian() {
    let map = RotBetaMap::new(
        2.5,
        Isometry::rotation(0.9),
        LatticeDomain::unit_cube(2),
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let n = 10_000usize;
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for _ in 0..n {
        let z = random_point(&mut rng, &map);
        let k = map.preimages(&z).unwrap().len() as f64;
        sum += k;
        sumsq += k * k;
    }
    let mean = sum / n as f64;
    let var = (sumsq / n as f64 - mean * mean).max(0.0);
    let sigma = (var / n as f64).sqrt();
    let expect = map.beta().powi(2);
    assert!(
        (mean - expect).abs() <= 3.0 * sigma + 1e-9,
        "mean {mean} expect {expect} sigma {sigma}"
    );
}

#[test]
fn exact_branch_count_for_full_branch_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let doubling =
        RotBetaMap::new(2.0, Isometry::identity(1), LatticeDomain::unit_cube(1)).unwrap();
    let torus =
        RotBetaMap::new(3.0, Isometry::identity(2), LatticeDomain::unit_cube(2)).unwrap();
    for _ in 0..10_000 {
        let z = random_point(&mut rng, &doubling);
        assert_eq!(doubling.preimages(&z).unwrap().len(), 2);
        let z = random_point(&mut rng, &torus);
        assert_eq!(torus.preimages(&z).unwrap().len(), 9);
    }
}

#[test]
fn cumulative_hole_radii_are_non_increasing() {
    let map = RotBetaMap::new(
        2.2,
        Isometry::rotation(1.3),
        LatticeDomain::new(&[vec![1.0, 0.0], vec![0.2, 1.1]], &[0.0, 0.0]).unwrap(),
    )
    .unwrap();
    let reports = hole_radii(&map, &[0.31, 0.47], 4, true, None, Exec::default()).unwrap();
    for w in reports.windows(2) {
        assert!(
            w[1].radius <= w[0].radius + w[0].err_bound + 1e-12,
            "radii must not grow: {} then {}",
            w[0].radius,
            w[1].radius
        );
    }
}

#[test]
fn hole_ratios_stay_below_the_planar_equivalence_bound() {
    let map = RotBetaMap::new(
        3.5,
        Isometry::rotation(std::f64::consts::FRAC_PI_4),
        LatticeDomain::unit_cube(2),
    )
    .unwrap();
    let z = [0.371, 0.642];
    let ev = check_property_s(&map, &z, 0, Exec::default()).unwrap();
    assert_eq!(ev.satisfied_at, Some(0));
    let reports = hole_radii(&map, &z, 4, true, None, Exec::default()).unwrap();
    let theta = map.domain().theta().unwrap();
    let bound = b2(theta).unwrap() / map.beta() + 0.05;
    for w in reports.windows(2) {
        if w[0].level == 0 {
            continue;
        }
        let ratio = w[1].radius / w[0].radius;
        assert!(ratio <= bound, "ratio {ratio} exceeds {bound} at level {}", w[1].level);
    }
}
