//! Lattices, fundamental domains, widths, covering radii, and
//! largest-empty-ball searches.
//!
//! The domain is a half-open parallelotope `X = { xi + sum x_i eta_i, x_i in
//! [0,1) }` whose lattice translates tile space. All distances are Euclidean.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::points::{dist, PointGrid, PointSet};
use crate::search::{self, MaxResult, SearchOpts, SearchSpace};

/// Coordinates within this distance below an integer are snapped up, so that
/// digit selection and membership agree on a single deterministic rule.
pub const COORD_SNAP: f64 = 1e-12;

pub(crate) fn snapped_floor(x: f64) -> i64 {
    (x + COORD_SNAP).floor() as i64
}

/// Half-open parallelotope fundamental domain of a lattice.
#[derive(Clone, Debug)]
pub struct LatticeDomain {
    m: usize,
    basis: DMatrix<f64>, // columns are the basis vectors eta_i
    inv: DMatrix<f64>,
    xi: DVector<f64>,
    dual_row_norms: Vec<f64>,
    reduced: DMatrix<f64>,
    reduced_inv: DMatrix<f64>,
    diameter: f64,
    max_vertex_norm: f64,
    theta: Option<f64>,
}

impl LatticeDomain {
    /// Build from basis vectors (each of length `m`) and the translation `xi`.
    pub fn new(basis_vectors: &[Vec<f64>], xi: &[f64]) -> Result<Self> {
        let m = basis_vectors.len();
        if m == 0 {
            return Err(Error::InvalidParameter("empty basis".into()));
        }
        if basis_vectors.iter().any(|v| v.len() != m) || xi.len() != m {
            return Err(Error::InvalidParameter(
                "basis vectors and xi must all have length m".into(),
            ));
        }
        let basis = DMatrix::from_fn(m, m, |r, c| basis_vectors[c][r]);
        let scale: f64 = basis_vectors
            .iter()
            .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
            .product();
        let det = basis.clone().determinant();
        if det.abs() <= 1e-12 * scale.max(1e-300) {
            return Err(Error::DegenerateBasis { det });
        }
        let inv = basis
            .clone()
            .try_inverse()
            .ok_or(Error::DegenerateBasis { det })?;
        let dual_row_norms: Vec<f64> = (0..m).map(|i| inv.row(i).norm()).collect();
        let xi = DVector::from_column_slice(xi);

        // Longest diagonal over coefficient patterns in {-1,0,1}^m.
        let mut diameter: f64 = 0.0;
        let mut pattern = vec![-1i32; m];
        loop {
            let v = (0..m).fold(DVector::zeros(m), |acc, k| {
                acc + basis.column(k) * pattern[k] as f64
            });
            diameter = diameter.max(v.norm());
            let mut k = 0;
            loop {
                if k == m {
                    break;
                }
                pattern[k] += 1;
                if pattern[k] <= 1 {
                    break;
                }
                pattern[k] = -1;
                k += 1;
            }
            if k == m {
                break;
            }
        }

        let mut max_vertex_norm: f64 = 0.0;
        for mask in 0..(1usize << m) {
            let v = (0..m).fold(xi.clone(), |acc, k| {
                if mask >> k & 1 == 1 { acc + basis.column(k) } else { acc }
            });
            max_vertex_norm = max_vertex_norm.max(v.norm());
        }

        let theta = if m == 2 {
            let a = basis.column(0);
            let b = basis.column(1);
            let cos = a.dot(&b) / (a.norm() * b.norm());
            Some(cos.clamp(-1.0, 1.0).acos())
        } else {
            None
        };

        let reduced = reduce_basis(&basis);
        let reduced_inv = reduced
            .clone()
            .try_inverse()
            .ok_or(Error::DegenerateBasis { det })?;

        Ok(LatticeDomain {
            m,
            basis,
            inv,
            xi,
            dual_row_norms,
            reduced,
            reduced_inv,
            diameter,
            max_vertex_norm,
            theta,
        })
    }

    /// Unit interval/square/cube `[0,1)^m`.
    pub fn unit_cube(m: usize) -> Self {
        let basis: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        LatticeDomain::new(&basis, &vec![0.0; m]).expect("unit cube is non-degenerate")
    }

    /// `[-1/2, 1/2)^m`, the symmetric cube used by the product case study.
    pub fn centered_cube(m: usize) -> Self {
        let basis: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        LatticeDomain::new(&basis, &vec![-0.5; m]).expect("centered cube is non-degenerate")
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn basis_inv(&self) -> &DMatrix<f64> {
        &self.inv
    }

    pub fn xi(&self) -> &DVector<f64> {
        &self.xi
    }

    /// Angle between the two basis vectors; defined for m = 2 only.
    pub fn theta(&self) -> Option<f64> {
        self.theta
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// `max_{x in closure(X)} |x|`, attained at a vertex.
    pub fn max_vertex_norm(&self) -> f64 {
        self.max_vertex_norm
    }

    /// Lattice coordinates of an ambient point.
    pub fn coords(&self, x: &[f64]) -> Vec<f64> {
        let c = &self.inv * (DVector::from_column_slice(x) - &self.xi);
        c.as_slice().to_vec()
    }

    /// Ambient point of lattice coordinates.
    pub fn point_at(&self, coords: &[f64]) -> Vec<f64> {
        let p = &self.basis * DVector::from_column_slice(coords) + &self.xi;
        p.as_slice().to_vec()
    }

    /// Ambient lattice vector with integer coefficients `k`.
    pub fn lattice_vector(&self, k: &[i64]) -> Vec<f64> {
        let v = (0..self.m).fold(DVector::zeros(self.m), |acc, j| {
            acc + self.basis.column(j) * k[j] as f64
        });
        v.as_slice().to_vec()
    }

    /// Half-open membership, with the snap rule applied to each coordinate.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.coords(x).iter().all(|&c| snapped_floor(c) == 0)
    }

    /// The 2^m vertices of the closed parallelotope.
    pub fn vertices(&self) -> PointSet {
        let mut out = PointSet::with_capacity(self.m, 1 << self.m);
        for mask in 0..(1usize << self.m) {
            let v = (0..self.m).fold(self.xi.clone(), |acc, k| {
                if mask >> k & 1 == 1 { acc + self.basis.column(k) } else { acc }
            });
            out.push(v.as_slice());
        }
        out
    }

    /// Minimal width of a strip containing the closed parallelotope.
    ///
    /// The minimum over directions is attained at a facet normal, and the
    /// width in the i-th facet-normal direction is `1 / |row_i(B^-1)|`.
    /// For m = 2 this reduces to `min(|eta_1|, |eta_2|) * sin(theta)`.
    pub fn width(&self) -> f64 {
        self.dual_row_norms
            .iter()
            .map(|n| 1.0 / n)
            .fold(f64::INFINITY, f64::min)
    }

    /// Radius of the largest ball inscribed in the closed parallelotope.
    pub fn inradius(&self) -> f64 {
        self.width() / 2.0
    }

    /// Distance from an interior point to the complement of the closed
    /// parallelotope (the nearest of the 2m facet hyperplanes).
    pub fn dist_to_complement(&self, x: &[f64]) -> Result<f64> {
        let c = self.coords(x);
        if c.iter().any(|&ci| !(-COORD_SNAP..=1.0 + COORD_SNAP).contains(&ci)) {
            return Err(Error::PointOutsideDomain);
        }
        Ok(self.dist_to_complement_coords(&c))
    }

    fn dist_to_complement_coords(&self, c: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.m {
            let d = c[i].min(1.0 - c[i]) / self.dual_row_norms[i];
            best = best.min(d);
        }
        best.max(0.0)
    }

    /// Wrap a point into the fundamental cell of the reduced basis.
    fn canonical(&self, x: &[f64]) -> Vec<f64> {
        let c = &self.reduced_inv * DVector::from_column_slice(x);
        let frac = DVector::from_iterator(self.m, c.iter().map(|v| v - v.floor()));
        (&self.reduced * frac).as_slice().to_vec()
    }

    /// Covering radius `sup_x inf_{p, k} |x - p - L k|` of the periodized
    /// point set `P + L`, certified within `opts.tol`.
    pub fn covering_radius_with(
        &self,
        points: &PointSet,
        opts: &SearchOpts,
        exec: Exec,
    ) -> Result<MaxResult> {
        if points.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        // Canonicalize into the reduced cell, then expand by the 3^m nearest
        // translates so a single grid answers periodic distance queries.
        let mut expanded = PointSet::with_capacity(self.m, points.len() * 3usize.pow(self.m as u32));
        let mut pattern = vec![-1i64; self.m];
        loop {
            let shift = self.reduced_lattice_vector(&pattern);
            for p in points.iter() {
                let c = self.canonical(p);
                let t: Vec<f64> = c.iter().zip(&shift).map(|(a, b)| a + b).collect();
                expanded.push(&t);
            }
            let mut k = 0;
            loop {
                if k == self.m {
                    break;
                }
                pattern[k] += 1;
                if pattern[k] <= 1 {
                    break;
                }
                pattern[k] = -1;
                k += 1;
            }
            if k == self.m {
                break;
            }
        }
        let grid = PointGrid::build(expanded);
        let lo = vec![0.0; self.m];
        let hi = vec![1.0; self.m];
        let space = SearchSpace { lo: &lo, hi: &hi, affine: Some((&self.basis, &self.xi)) };
        let canon = |x: &[f64]| self.canonical(x);
        let res = search::maximize(exec, &space, opts, |_, amb| grid.min_dist(&canon(amb)));
        Ok(res)
    }

    /// `covering_radius_with` at the default tolerance `1e-4 * diameter`.
    pub fn covering_radius(&self, points: &PointSet) -> Result<MaxResult> {
        let opts = SearchOpts::with_tol(self.m, 1e-4 * self.diameter);
        self.covering_radius_with(points, &opts, Exec::default())
    }

    fn reduced_lattice_vector(&self, k: &[i64]) -> Vec<f64> {
        let v = (0..self.m).fold(DVector::zeros(self.m), |acc, j| {
            acc + self.reduced.column(j) * k[j] as f64
        });
        v.as_slice().to_vec()
    }
}

/// Largest open ball inside the closed parallelotope avoiding all obstacles.
#[derive(Clone, Debug)]
pub struct EmptyBall {
    pub center: Vec<f64>,
    pub radius: f64,
    /// `radius <= true optimum <= radius + err_bound`.
    pub err_bound: f64,
}

/// Maximize `min(dist to obstacles, dist to domain complement)` over the
/// domain. Empty obstacle set: returns the inball of the parallelotope.
pub fn largest_empty_ball_with(
    domain: &LatticeDomain,
    obstacles: &PointSet,
    opts: &SearchOpts,
    exec: Exec,
) -> EmptyBall {
    let m = domain.dim();
    let grid = if obstacles.is_empty() { None } else { Some(PointGrid::build(obstacles.clone())) };
    let lo = vec![0.0; m];
    let hi = vec![1.0; m];
    let space = SearchSpace {
        lo: &lo,
        hi: &hi,
        affine: Some((domain.basis(), domain.xi())),
    };
    let res = search::maximize(exec, &space, opts, |param, amb| {
        let border = domain.dist_to_complement_coords(param);
        match &grid {
            None => border,
            Some(g) => border.min(g.min_dist(amb)),
        }
    });
    EmptyBall { center: res.argmax, radius: res.value, err_bound: res.err_bound }
}

/// `largest_empty_ball_with` at the default tolerance `1e-4 * diameter`.
pub fn largest_empty_ball(domain: &LatticeDomain, obstacles: &PointSet) -> EmptyBall {
    let opts = SearchOpts::with_tol(domain.dim(), 1e-4 * domain.diameter());
    largest_empty_ball_with(domain, obstacles, &opts, Exec::default())
}

/// Closed region between two parallel hyperplanes: `|<n,x> - c| <= h`.
/// A hyperplane is a strip with `h = 0`.
#[derive(Clone, Debug)]
pub struct Strip {
    normal: Vec<f64>,
    center: f64,
    half_width: f64,
}

impl Strip {
    pub fn new(normal: &[f64], center: f64, half_width: f64) -> Result<Self> {
        let n = dist(normal, &vec![0.0; normal.len()]);
        if n <= 0.0 {
            return Err(Error::InvalidParameter("zero strip normal".into()));
        }
        if half_width < 0.0 {
            return Err(Error::InvalidParameter("negative strip half-width".into()));
        }
        let normal: Vec<f64> = normal.iter().map(|x| x / n).collect();
        Ok(Strip { normal, center, half_width })
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn width(&self) -> f64 {
        2.0 * self.half_width
    }

    /// Signed clearance of `x` from the strip: negative inside, positive
    /// outside, zero on the boundary.
    pub fn clearance(&self, x: &[f64]) -> f64 {
        let proj: f64 = self.normal.iter().zip(x).map(|(n, v)| n * v).sum();
        (proj - self.center).abs() - self.half_width
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.clearance(x) <= 0.0
    }
}

/// Lagrange reduction for 2D bases; other dimensions are returned unchanged.
/// The reduced basis generates the same lattice (column operations are
/// unimodular) and makes the 3^m-translate rule for periodic distances valid.
fn reduce_basis(basis: &DMatrix<f64>) -> DMatrix<f64> {
    if basis.nrows() != 2 {
        return basis.clone();
    }
    let mut a = basis.column(0).clone_owned();
    let mut b = basis.column(1).clone_owned();
    for _ in 0..64 {
        if a.norm_squared() > b.norm_squared() {
            std::mem::swap(&mut a, &mut b);
        }
        let mu = (a.dot(&b) / a.norm_squared()).round();
        if mu == 0.0 {
            break;
        }
        b -= &a * mu;
    }
    DMatrix::from_columns(&[a, b])
}
