//! The expanding map `T(z) = beta * M z - d(z)` on a lattice fundamental
//! domain, with digit expansions, preimage sets and trees, hole-radius
//! tracking, and the hypothesis checkers used by the threshold verdicts.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::geometry::{largest_empty_ball_with, snapped_floor, LatticeDomain};
use crate::points::PointSet;
use crate::search::SearchOpts;

/// Orthogonal matrix (`M^T M = I` within 1e-12, |det M| = 1 within 1e-12).
#[derive(Clone, Debug)]
pub struct Isometry {
    mat: DMatrix<f64>,
}

impl Isometry {
    pub fn identity(m: usize) -> Self {
        Isometry { mat: DMatrix::identity(m, m) }
    }

    /// Planar rotation by `angle`.
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Isometry { mat: DMatrix::from_row_slice(2, 2, &[c, -s, s, c]) }
    }

    /// Planar reflection across the line through the origin at `axis_angle`.
    pub fn reflection(axis_angle: f64) -> Self {
        let (s, c) = (2.0 * axis_angle).sin_cos();
        Isometry { mat: DMatrix::from_row_slice(2, 2, &[c, s, s, -c]) }
    }

    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidParameter("isometry matrix must be square".into()));
        }
        let mat = DMatrix::from_fn(m, m, |r, c| rows[r][c]);
        let gram = mat.transpose() * &mat;
        let dev = (&gram - DMatrix::<f64>::identity(m, m)).abs().max();
        if dev > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "matrix is not orthogonal: max |M^T M - I| = {dev:e}"
            )));
        }
        let det = mat.clone().determinant();
        if (det.abs() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("|det M| = {} != 1", det.abs())));
        }
        Ok(Isometry { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn det_sign(&self) -> i8 {
        if self.mat.clone().determinant() >= 0.0 { 1 } else { -1 }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.mat * x
    }

    /// Inverse application; for orthogonal matrices the inverse is the
    /// transpose.
    pub fn apply_inv(&self, x: &DVector<f64>) -> DVector<f64> {
        self.mat.tr_mul(x)
    }
}

/// Result of one application of the map.
#[derive(Clone, Debug)]
pub struct Step {
    pub image: Vec<f64>,
    /// Digit as integer coefficients in the lattice basis.
    pub digit: Vec<i64>,
    /// Set when an image coordinate lies within the snap tolerance of a cell
    /// boundary; such orbits depend on the tie rule and deserve suspicion.
    pub boundary_fragile: bool,
}

/// The expanding map `z -> beta * M z - d(z)` keeping images in the domain.
#[derive(Clone, Debug)]
pub struct RotBetaMap {
    beta: f64,
    iso: Isometry,
    domain: LatticeDomain,
    // Coordinate form of z -> beta*M*z: coords(T z) + digit = A * coords(z) + t.
    coord_mat: DMatrix<f64>,
    coord_off: DVector<f64>,
}

impl RotBetaMap {
    pub fn new(beta: f64, iso: Isometry, domain: LatticeDomain) -> Result<Self> {
        if !(beta > 1.0) {
            return Err(Error::InvalidParameter(format!("beta must exceed 1, got {beta}")));
        }
        if iso.dim() != domain.dim() {
            return Err(Error::InvalidParameter(
                "isometry and domain dimensions disagree".into(),
            ));
        }
        let b = domain.basis();
        let binv = domain.basis_inv();
        let coord_mat = binv * iso.matrix() * b * beta;
        let coord_off = binv * (iso.matrix() * domain.xi() * beta - domain.xi());
        Ok(RotBetaMap { beta, iso, domain, coord_mat, coord_off })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn isometry(&self) -> &Isometry {
        &self.iso
    }

    pub fn domain(&self) -> &LatticeDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// One step in lattice coordinates: returns (image coords, digit, fragile).
    pub fn step_coords(&self, c: &[f64]) -> (Vec<f64>, Vec<i64>, bool) {
        let y = &self.coord_mat * DVector::from_column_slice(c) + &self.coord_off;
        let mut digit = Vec::with_capacity(y.len());
        let mut image = Vec::with_capacity(y.len());
        let mut fragile = false;
        for &yi in y.iter() {
            let k = snapped_floor(yi);
            // The snap fires exactly when a coordinate sits within tolerance
            // below an integer; such orbits straddle a cell boundary.
            if k != yi.floor() as i64 {
                fragile = true;
            }
            let f = (yi - k as f64).max(0.0);
            digit.push(k);
            image.push(f);
        }
        (image, digit, fragile)
    }

    /// One step in ambient coordinates. Errors if `z` is outside the domain.
    pub fn step(&self, z: &[f64]) -> Result<Step> {
        if !self.domain.contains(z) {
            return Err(Error::PointOutsideDomain);
        }
        let c = self.domain.coords(z);
        let (ci, digit, fragile) = self.step_coords(&c);
        Ok(Step {
            image: self.domain.point_at(&ci),
            digit,
            boundary_fragile: fragile,
        })
    }

    /// Digit string of the first `n` steps of the orbit of `z`.
    pub fn expand(&self, z: &[f64], n: usize) -> Result<DigitExpansion> {
        if n == 0 {
            return Err(Error::InvalidParameter("expansion length must be >= 1".into()));
        }
        if !self.domain.contains(z) {
            return Err(Error::PointOutsideDomain);
        }
        let mut c = self.domain.coords(z);
        let mut digits = Vec::with_capacity(n);
        let mut fragile = false;
        for _ in 0..n {
            let (ci, d, fr) = self.step_coords(&c);
            fragile |= fr;
            digits.push(d);
            c = ci;
        }
        Ok(DigitExpansion { base: z.to_vec(), digits, boundary_fragile: fragile })
    }

    /// Reconstruct `sum_i M^{-i} d_i / beta^i` from a digit string.
    pub fn reconstruct(&self, digits: &[Vec<i64>]) -> Vec<f64> {
        let m = self.dim();
        let mut acc = DVector::zeros(m);
        // Horner from the innermost digit: acc <- M^{-1}(d_i + acc) / beta.
        for d in digits.iter().rev() {
            let dv = DVector::from_column_slice(&self.domain.lattice_vector(d));
            acc = self.iso.apply_inv(&(dv + acc)) / self.beta;
        }
        acc.as_slice().to_vec()
    }

    /// Upper bound for the reconstruction error after `n` digits.
    pub fn reconstruction_error_bound(&self, n: usize) -> f64 {
        self.domain.max_vertex_norm() / self.beta.powi(n as i32)
    }

    /// All solutions of `T(x) = z` in the domain.
    pub fn preimages(&self, z: &[f64]) -> Result<PointSet> {
        if !self.domain.contains(z) {
            return Err(Error::PointOutsideDomain);
        }
        let mut out = PointSet::new(self.dim());
        self.preimages_into(z, &mut out);
        Ok(out)
    }

    /// Enumerate lattice digits `d` with `x = (1/beta) M^{-1}(z + d)` in the
    /// domain; the candidate box is the coordinate bounding box of
    /// `beta*M(closure X) - z`, inflated by one cell.
    fn preimages_into(&self, z: &[f64], out: &mut PointSet) {
        let m = self.dim();
        let zv = DVector::from_column_slice(z);
        let mut lo = vec![f64::INFINITY; m];
        let mut hi = vec![f64::NEG_INFINITY; m];
        for v in self.domain.vertices().iter() {
            let img = self.iso.apply(&DVector::from_column_slice(v)) * self.beta - &zv;
            let c = self.domain.basis_inv() * img;
            for k in 0..m {
                lo[k] = lo[k].min(c[k]);
                hi[k] = hi[k].max(c[k]);
            }
        }
        let lo: Vec<i64> = lo.iter().map(|v| v.floor() as i64 - 1).collect();
        let hi: Vec<i64> = hi.iter().map(|v| v.ceil() as i64 + 1).collect();
        let tol = 1e-9 * self.domain.diameter();
        let mut k = lo.clone();
        loop {
            let d = DVector::from_column_slice(&self.domain.lattice_vector(&k));
            let x = self.iso.apply_inv(&(&zv + d)) / self.beta;
            let xs = x.as_slice();
            if self.domain.contains(xs) {
                // consistency guard: forward image must return to z
                if let Ok(st) = self.step(xs) {
                    if crate::points::dist(&st.image, z) <= tol {
                        out.push(xs);
                    }
                }
            }
            let mut axis = 0;
            loop {
                if axis == m {
                    break;
                }
                k[axis] += 1;
                if k[axis] <= hi[axis] {
                    break;
                }
                k[axis] = lo[axis];
                axis += 1;
            }
            if axis == m {
                break;
            }
        }
    }

    /// Levels `T^{-1}(z), ..., T^{-depth}(z)`, deduplicated at 1e-12.
    pub fn preimage_tree(&self, z: &[f64], depth: usize, budget: usize) -> Result<PreimageTree> {
        self.preimage_tree_with(z, depth, budget, Exec::default())
    }

    pub fn preimage_tree_with(
        &self,
        z: &[f64],
        depth: usize,
        budget: usize,
        exec: Exec,
    ) -> Result<PreimageTree> {
        if depth == 0 {
            return Err(Error::InvalidParameter("tree depth must be >= 1".into()));
        }
        if !self.domain.contains(z) {
            return Err(Error::PointOutsideDomain);
        }
        let predicted = self.beta.powi((self.dim() * depth) as i32);
        let budget_warning = predicted > budget as f64;
        let mut levels = vec![PointSet::single(z)];
        let mut total = 1usize;
        for level in 1..=depth {
            let parents = &levels[level - 1];
            let chunks: Vec<PointSet> = exec::map_range(exec, parents.len(), |i| {
                let mut out = PointSet::new(self.dim());
                self.preimages_into(parents.point(i), &mut out);
                out
            });
            let mut merged = PointSet::with_capacity(
                self.dim(),
                chunks.iter().map(|c| c.len()).sum(),
            );
            for c in &chunks {
                for p in c.iter() {
                    merged.push(p);
                }
            }
            merged.dedup_at_resolution(1e-12);
            total += merged.len();
            levels.push(merged);
            if total > budget {
                return Err(Error::TreeBudgetExceeded {
                    budget,
                    level,
                    partial: Box::new(PreimageTree { levels, budget_warning }),
                });
            }
        }
        Ok(PreimageTree { levels, budget_warning })
    }
}

pub const DEFAULT_TREE_BUDGET: usize = 10_000_000;

/// Digit string `d_1..d_n` of an orbit, as lattice coefficients.
#[derive(Clone, Debug)]
pub struct DigitExpansion {
    pub base: Vec<f64>,
    pub digits: Vec<Vec<i64>>,
    pub boundary_fragile: bool,
}

/// Preimage levels: `levels[0] = {z}`, `levels[i] = T^{-i}(z)`.
#[derive(Clone, Debug)]
pub struct PreimageTree {
    pub levels: Vec<PointSet>,
    /// Set when `beta^(m*depth)` already exceeded the node budget at entry.
    pub budget_warning: bool,
}

impl PreimageTree {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// Union of levels `1..=n`.
    pub fn cumulative(&self, n: usize) -> PointSet {
        let dim = self.levels[0].dim();
        let mut out = PointSet::new(dim);
        for level in &self.levels[1..=n] {
            for p in level.iter() {
                out.push(p);
            }
        }
        out
    }
}

/// Largest-empty-ball record at one preimage level.
#[derive(Clone, Debug)]
pub struct HoleReport {
    pub level: usize,
    pub center: Vec<f64>,
    pub radius: f64,
    pub err_bound: f64,
    /// Obstacles were the union of levels `1..=n` (true) or level `n` alone.
    pub cumulative: bool,
    /// Number of preimage points at this level.
    pub preimage_count: usize,
    /// `radius(level) / radius(level - 1)`, absent at level 0.
    pub ratio_from_prev: Option<f64>,
}

/// Track the largest hole against obstacle sets drawn from the preimage tree.
/// Level 0 has no obstacles, so its radius is the domain inradius.
pub fn hole_radii(
    map: &RotBetaMap,
    z: &[f64],
    depth: usize,
    cumulative: bool,
    tol: Option<f64>,
    exec: Exec,
) -> Result<Vec<HoleReport>> {
    let tree = map.preimage_tree_with(z, depth, DEFAULT_TREE_BUDGET, exec)?;
    hole_radii_for_tree(map, &tree, cumulative, tol, exec)
}

pub fn hole_radii_for_tree(
    map: &RotBetaMap,
    tree: &PreimageTree,
    cumulative: bool,
    tol: Option<f64>,
    exec: Exec,
) -> Result<Vec<HoleReport>> {
    let domain = map.domain();
    let tol = tol.unwrap_or(1e-4 * domain.diameter());
    let opts = SearchOpts::with_tol(domain.dim(), tol);
    let mut reports: Vec<HoleReport> = Vec::with_capacity(tree.depth() + 1);
    for n in 0..=tree.depth() {
        let obstacles = if n == 0 {
            PointSet::new(domain.dim())
        } else if cumulative {
            tree.cumulative(n)
        } else {
            tree.levels[n].clone()
        };
        let ball = largest_empty_ball_with(domain, &obstacles, &opts, exec);
        let ratio = reports
            .last()
            .map(|prev: &HoleReport| ball.radius / prev.radius);
        reports.push(HoleReport {
            level: n,
            center: ball.center,
            radius: ball.radius,
            err_bound: ball.err_bound,
            cumulative,
            preimage_count: tree.levels[n].len(),
            ratio_from_prev: ratio,
        });
    }
    Ok(reports)
}

/// Density evidence: margins `beta*w(X) - 2 r(T^{-n}(z) + L)` per level.
#[derive(Clone, Debug)]
pub struct DensityEvidence {
    /// First level whose margin clears the certification bound.
    pub satisfied_at: Option<usize>,
    pub margins: Vec<f64>,
    /// Margin `n` is conclusive when `margins[n] >= cert_bounds[n]`.
    pub cert_bounds: Vec<f64>,
}

/// Check, level by level, whether the periodized preimage set is dense enough
/// that twice its covering radius is at most `beta * width(X)`. This samples
/// a single starting point; it is evidence, not proof.
pub fn check_property_s(
    map: &RotBetaMap,
    z: &[f64],
    n_max: usize,
    exec: Exec,
) -> Result<DensityEvidence> {
    let domain = map.domain();
    let threshold = map.beta() * domain.width();
    let tree = if n_max >= 1 {
        Some(map.preimage_tree_with(z, n_max, DEFAULT_TREE_BUDGET, exec)?)
    } else {
        if !domain.contains(z) {
            return Err(Error::PointOutsideDomain);
        }
        None
    };
    let opts = SearchOpts::with_tol(domain.dim(), 1e-4 * domain.diameter());
    let mut margins = Vec::with_capacity(n_max + 1);
    let mut cert_bounds = Vec::with_capacity(n_max + 1);
    let mut satisfied_at = None;
    for n in 0..=n_max {
        let level = match (&tree, n) {
            (_, 0) => PointSet::single(z),
            (Some(t), n) => t.levels[n].clone(),
            (None, _) => unreachable!(),
        };
        let r = domain.covering_radius_with(&level, &opts, exec)?;
        let margin = threshold - 2.0 * r.value;
        let cert = 2.0 * r.err_bound;
        if satisfied_at.is_none() && margin >= cert {
            satisfied_at = Some(n);
        }
        margins.push(margin);
        cert_bounds.push(cert);
    }
    Ok(DensityEvidence { satisfied_at, margins, cert_bounds })
}

/// Check `beta * M(closure X)` lies inside the infinite slab spanned by the
/// domain along the direction of the lattice vector `eta` (given as integer
/// coefficients). The slab union is convex in closure, so checking that every
/// vertex image has its non-slab coordinates in `[0,1]` suffices.
pub fn check_slab_condition(map: &RotBetaMap, eta: &[i64]) -> Result<bool> {
    let m = map.dim();
    if eta.len() != m || eta.iter().all(|&k| k == 0) {
        return Err(Error::InvalidSlabDirection);
    }
    // Reduce eta to a primitive direction and change basis so it becomes a
    // coordinate axis. Axis multiples need no change of basis; general 2D
    // vectors get a unimodular completion; anything else is rejected.
    let g = eta.iter().fold(0i64, |a, &b| gcd(a, b.abs()));
    let prim: Vec<i64> = eta.iter().map(|k| k / g).collect();
    let axes_hit: Vec<usize> = (0..m).filter(|&i| prim[i] != 0).collect();
    let (basis_inv, slab_axis): (DMatrix<f64>, usize) = if axes_hit.len() == 1 {
        (DMatrix::identity(m, m), axes_hit[0])
    } else if m == 2 {
        // unimodular U with first column prim: a*x + b*y = 1
        let (a, b) = (prim[0], prim[1]);
        let (x, y) = bezout(a, b);
        let u = DMatrix::from_row_slice(2, 2, &[a as f64, -y as f64, b as f64, x as f64]);
        let uinv = u.try_inverse().ok_or(Error::InvalidSlabDirection)?;
        (uinv, 0)
    } else {
        return Err(Error::InvalidSlabDirection);
    };
    let domain = map.domain();
    for v in domain.vertices().iter() {
        let img = map.isometry().apply(&DVector::from_column_slice(v)) * map.beta();
        let c = domain.basis_inv() * img - domain.basis_inv() * domain.xi();
        let c = &basis_inv * c;
        for i in 0..m {
            if i == slab_axis {
                continue;
            }
            if !(-1e-9..=1.0 + 1e-9).contains(&c[i]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

/// `(x, y)` with `a x + b y = gcd(a, b)` for primitive input (gcd 1).
fn bezout(a: i64, b: i64) -> (i64, i64) {
    if b == 0 {
        return (a.signum(), 0);
    }
    let (x, y) = bezout(b, a % b);
    (y, x - (a / b) * y)
}
