//! Certified maximization of 1-Lipschitz objectives over a box.
//!
//! The searches in this crate (covering radius, largest empty ball, inscribed
//! ball in a line arrangement) all maximize functions that are 1-Lipschitz in
//! the ambient Euclidean metric. A branch-and-bound grid exploits that: a box
//! cell with center value `v` and ambient circumradius `r` cannot contain a
//! value above `v + r`, so cells that cannot beat the incumbent are dropped
//! and the rest are split until the circumradius reaches the requested
//! tolerance. The result is an evaluated point together with a one-sided
//! bound: `value <= sup f <= value + err_bound`.
//!
//! The search box may live in a parameter space that maps affinely to the
//! ambient space (lattice coordinates mapping to a parallelotope); the
//! circumradius is then measured through that map.

use nalgebra::{DMatrix, DVector};

use crate::exec::{self, Exec};

/// Box to search, with an optional affine map `param -> ambient`.
pub struct SearchSpace<'a> {
    pub lo: &'a [f64],
    pub hi: &'a [f64],
    /// `ambient(p) = linear * p + offset`; identity when `None`.
    pub affine: Option<(&'a DMatrix<f64>, &'a DVector<f64>)>,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOpts {
    /// Initial grid resolution per axis.
    pub init_per_axis: usize,
    /// Stop refining once the ambient cell circumradius is below this.
    pub tol: f64,
    /// Hard cap on the number of live cells per round.
    pub max_cells: usize,
}

impl SearchOpts {
    /// Defaults scaled to the dimension; `tol` must still be set by the
    /// caller (it carries the units of the problem).
    pub fn with_tol(dim: usize, tol: f64) -> Self {
        let init_per_axis = match dim {
            1 => 512,
            2 => 192,
            _ => 40,
        };
        SearchOpts { init_per_axis, tol, max_cells: 8_000_000 }
    }
}

#[derive(Clone, Debug)]
pub struct MaxResult {
    /// Objective value at `argmax` (an evaluated point, never extrapolated).
    pub value: f64,
    /// Maximizer in parameter coordinates.
    pub argmax_param: Vec<f64>,
    /// Maximizer in ambient coordinates.
    pub argmax: Vec<f64>,
    /// One-sided certificate: `sup f <= value + err_bound`.
    pub err_bound: f64,
    pub evaluations: usize,
}

struct Cell {
    center: Vec<f64>,
    value: f64,
}

fn to_ambient(space: &SearchSpace, p: &[f64]) -> Vec<f64> {
    match space.affine {
        None => p.to_vec(),
        Some((a, b)) => {
            let v = a * DVector::from_column_slice(p) + b;
            v.as_slice().to_vec()
        }
    }
}

/// Ambient circumradius of a box cell with half-widths `half` per axis.
fn ambient_radius(space: &SearchSpace, half: &[f64]) -> f64 {
    match space.affine {
        None => half.iter().map(|h| h * h).sum::<f64>().sqrt(),
        Some((a, _)) => {
            // max over sign patterns of |A (s .* half)|; linear, so the max
            // is at a vertex. With dim <= 3 this is at most 8 candidates.
            let dim = half.len();
            let mut best: f64 = 0.0;
            for mask in 0..(1usize << dim) {
                let signed: Vec<f64> = (0..dim)
                    .map(|k| if mask >> k & 1 == 1 { half[k] } else { -half[k] })
                    .collect();
                let v = a * DVector::from_column_slice(&signed);
                best = best.max(v.norm());
            }
            best
        }
    }
}

/// Maximize a 1-Lipschitz objective; `f(param, ambient)` is given both
/// coordinate representations of the probe point.
pub fn maximize<F>(exec: Exec, space: &SearchSpace, opts: &SearchOpts, f: F) -> MaxResult
where
    F: Fn(&[f64], &[f64]) -> f64 + Sync + Send,
{
    let dim = space.lo.len();
    assert_eq!(space.hi.len(), dim);
    let n0 = opts.init_per_axis.max(1);
    let mut half: Vec<f64> = (0..dim)
        .map(|k| (space.hi[k] - space.lo[k]) / (2.0 * n0 as f64))
        .collect();

    // Initial frontier: full uniform grid, axis 0 fastest.
    let total: usize = n0.pow(dim as u32);
    let centers: Vec<Vec<f64>> = (0..total)
        .map(|mut i| {
            let mut c = vec![0.0; dim];
            for k in 0..dim {
                let ik = i % n0;
                i /= n0;
                c[k] = space.lo[k] + (2 * ik + 1) as f64 * half[k];
            }
            c
        })
        .collect();

    let mut evaluations = 0usize;
    let eval = |centers: &[Vec<f64>]| -> Vec<Cell> {
        exec::map_slice(exec, centers, |c| {
            let amb = to_ambient(space, c);
            Cell { value: f(c, &amb), center: c.clone() }
        })
    };

    let mut frontier = eval(&centers);
    evaluations += frontier.len();
    let mut best_value = f64::NEG_INFINITY;
    let mut best_center: Vec<f64> = space.lo.to_vec();
    let mut err_bound;

    loop {
        // Deterministic incumbent update: scan in frontier order, breaking
        // value ties toward the lexicographically smallest center.
        for c in &frontier {
            if c.value > best_value
                || (c.value == best_value && c.center.as_slice() < best_center.as_slice())
            {
                best_value = c.value;
                best_center = c.center.clone();
            }
        }
        let r = ambient_radius(space, &half);
        err_bound = r;
        if r <= opts.tol {
            break;
        }
        let survivors: Vec<&Cell> = frontier
            .iter()
            .filter(|c| c.value + r > best_value)
            .collect();
        if survivors.is_empty() {
            // Nothing can beat the incumbent: the bound collapses onto it.
            err_bound = 0.0;
            break;
        }
        if survivors.len() << dim > opts.max_cells {
            break;
        }
        let child_half: Vec<f64> = half.iter().map(|h| h / 2.0).collect();
        let mut children: Vec<Vec<f64>> = Vec::with_capacity(survivors.len() << dim);
        for cell in survivors {
            for mask in 0..(1usize << dim) {
                let c: Vec<f64> = (0..dim)
                    .map(|k| {
                        cell.center[k]
                            + if mask >> k & 1 == 1 { child_half[k] } else { -child_half[k] }
                    })
                    .collect();
                children.push(c);
            }
        }
        half = child_half;
        frontier = eval(&children);
        evaluations += frontier.len();
    }

    let argmax = to_ambient(space, &best_center);
    MaxResult {
        value: best_value,
        argmax_param: best_center,
        argmax,
        err_bound,
        evaluations,
    }
}
