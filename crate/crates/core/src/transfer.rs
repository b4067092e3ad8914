//! Ulam discretization of the transfer operator: cell-to-cell transition
//! fractions on a lattice-coordinate grid, recurrent classes of the sampled
//! support digraph, and stationary densities per class.

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::dynamics::RotBetaMap;

/// Row-stochastic sparse transition matrix on the `N^m` coordinate grid.
///
/// Entries are exact sample counts over a deterministic stratified subgrid of
/// `s` points per axis per cell (offsets `(2k+1)/(2s)`), divided by `s^m`. No
/// randomness is involved, so matrices are reproducible bit for bit.
#[derive(Clone, Debug)]
pub struct UlamOperator {
    n_per_axis: usize,
    dim: usize,
    samples_per_axis: usize,
    // CSR over rows (source cells).
    row_start: Vec<u32>,
    col: Vec<u32>,
    val: Vec<f64>,
    // CSR over columns (incoming edges), for fixed-order mat-vec products.
    tr_start: Vec<u32>,
    tr_col: Vec<u32>,
    tr_val: Vec<f64>,
}

pub const DEFAULT_OPERATOR_BUDGET: f64 = 5e7;

impl UlamOperator {
    pub fn num_cells(&self) -> usize {
        self.row_start.len() - 1
    }

    pub fn n_per_axis(&self) -> usize {
        self.n_per_axis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples_per_axis(&self) -> usize {
        self.samples_per_axis
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (s, e) = (self.row_start[i] as usize, self.row_start[i + 1] as usize);
        (&self.col[s..e], &self.val[s..e])
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).1.iter().sum()
    }

    /// Lattice coordinates of the center of cell `i` (axis 0 fastest).
    pub fn cell_center_coords(&self, i: usize) -> Vec<f64> {
        let mut idx = i;
        (0..self.dim)
            .map(|_| {
                let k = idx % self.n_per_axis;
                idx /= self.n_per_axis;
                (k as f64 + 0.5) / self.n_per_axis as f64
            })
            .collect()
    }

    /// `out = pi * P` accumulated column-wise in a fixed order.
    pub fn apply_left(&self, pi: &[f64], out: &mut [f64], exec: Exec) {
        let res = exec::map_range(exec, out.len(), |j| {
            let (s, e) = (self.tr_start[j] as usize, self.tr_start[j + 1] as usize);
            let mut acc = 0.0;
            for k in s..e {
                acc += pi[self.tr_col[k] as usize] * self.tr_val[k];
            }
            acc
        });
        out.copy_from_slice(&res);
    }

    /// Nonzero entries in row-major order, for the coordinate-list dump.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.num_cells()).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter()
                .zip(vals)
                .map(move |(&c, &v)| (i, c as usize, v))
        })
    }
}

/// Build the Ulam matrix with `n` cells per axis and `s` sample points per
/// axis per cell.
pub fn build_ulam(map: &RotBetaMap, n: usize, s: usize) -> Result<UlamOperator> {
    build_ulam_with(map, n, s, Exec::default())
}

pub fn build_ulam_with(map: &RotBetaMap, n: usize, s: usize, exec: Exec) -> Result<UlamOperator> {
    if n < 2 {
        return Err(Error::InvalidParameter("grid resolution must be >= 2".into()));
    }
    if s < 1 {
        return Err(Error::InvalidParameter("samples per axis must be >= 1".into()));
    }
    let m = map.dim();
    let cells = (n as f64).powi(m as i32);
    if cells * map.beta().powi(m as i32) > DEFAULT_OPERATOR_BUDGET {
        return Err(Error::OperatorBudgetExceeded(format!(
            "N^m * beta^m = {:.3e}",
            cells * map.beta().powi(m as i32)
        )));
    }
    let cells = cells as usize;
    let samples = s.pow(m as u32);
    let weight = 1.0 / samples as f64;

    let rows: Vec<Vec<(u32, f64)>> = exec::map_range(exec, cells, |cell| {
        let mut idx = cell;
        let base: Vec<usize> = (0..m)
            .map(|_| {
                let k = idx % n;
                idx /= n;
                k
            })
            .collect();
        let mut hits: Vec<(u32, f64)> = Vec::new();
        let mut offs = vec![0usize; m];
        loop {
            let c: Vec<f64> = (0..m)
                .map(|k| (base[k] as f64 + (2 * offs[k] + 1) as f64 / (2 * s) as f64) / n as f64)
                .collect();
            let (img, _, _) = map.step_coords(&c);
            let mut target = 0usize;
            for k in (0..m).rev() {
                let t = img[k] * n as f64;
                let cell_k = (crate::geometry::snapped_floor(t).max(0) as usize).min(n - 1);
                target = target * n + cell_k;
            }
            match hits.iter_mut().find(|(c, _)| *c == target as u32) {
                Some(entry) => entry.1 += weight,
                None => hits.push((target as u32, weight)),
            }
            let mut k = 0;
            loop {
                if k == m {
                    break;
                }
                offs[k] += 1;
                if offs[k] < s {
                    break;
                }
                offs[k] = 0;
                k += 1;
            }
            if k == m {
                break;
            }
        }
        hits.sort_unstable_by_key(|(c, _)| *c);
        hits
    });

    let mut row_start = Vec::with_capacity(cells + 1);
    row_start.push(0u32);
    let mut col = Vec::new();
    let mut val = Vec::new();
    for r in &rows {
        for &(c, v) in r {
            col.push(c);
            val.push(v);
        }
        row_start.push(col.len() as u32);
    }

    // transpose
    let mut tr_start = vec![0u32; cells + 1];
    for &c in &col {
        tr_start[c as usize + 1] += 1;
    }
    for i in 0..cells {
        tr_start[i + 1] += tr_start[i];
    }
    let mut fill = tr_start.clone();
    let mut tr_col = vec![0u32; col.len()];
    let mut tr_val = vec![0.0; col.len()];
    for i in 0..cells {
        let (s0, e0) = (row_start[i] as usize, row_start[i + 1] as usize);
        for k in s0..e0 {
            let j = col[k] as usize;
            let slot = fill[j] as usize;
            tr_col[slot] = i as u32;
            tr_val[slot] = val[k];
            fill[j] += 1;
        }
    }

    Ok(UlamOperator {
        n_per_axis: n,
        dim: m,
        samples_per_axis: s,
        row_start,
        col,
        val,
        tr_start,
        tr_col,
        tr_val,
    })
}

/// Recurrent-class labels: 0 for transient cells, `1..=count` for the bottom
/// strongly connected components, numbered by their smallest cell index.
#[derive(Clone, Debug)]
pub struct Components {
    pub count: usize,
    pub labels: Vec<u32>,
}

/// Bottom strongly connected components of the support digraph with edges
/// `i -> j` wherever `P[i][j] > support_threshold`.
pub fn ergodic_components(op: &UlamOperator, support_threshold: f64) -> Components {
    let n = op.num_cells();
    let adj = |i: usize| -> Vec<usize> {
        let (cols, vals) = op.row(i);
        cols.iter()
            .zip(vals)
            .filter(|(_, &v)| v > support_threshold)
            .map(|(&c, _)| c as usize)
            .collect()
    };

    // Kosaraju, iterative: forward finish order, then reverse-graph sweeps.
    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    for root in 0..n {
        if visited[root] {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        visited[root] = true;
        while let Some((v, ei)) = stack.pop() {
            let nbrs = adj(v);
            if ei < nbrs.len() {
                stack.push((v, ei + 1));
                let u = nbrs[ei];
                if !visited[u] {
                    visited[u] = true;
                    stack.push((u, 0));
                }
            } else {
                order.push(v);
            }
        }
    }

    let mut radj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in adj(i) {
            radj[j].push(i as u32);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut ncomp = 0usize;
    for &v in order.iter().rev() {
        if comp[v] != usize::MAX {
            continue;
        }
        let mut stack = vec![v];
        comp[v] = ncomp;
        while let Some(u) = stack.pop() {
            for &w in &radj[u] {
                let w = w as usize;
                if comp[w] == usize::MAX {
                    comp[w] = ncomp;
                    stack.push(w);
                }
            }
        }
        ncomp += 1;
    }

    // A component is recurrent iff it has no edge to another component.
    let mut closed = vec![true; ncomp];
    for i in 0..n {
        for j in adj(i) {
            if comp[i] != comp[j] {
                closed[comp[i]] = false;
            }
        }
    }
    // Number recurrent classes by smallest member cell index.
    let mut first_cell = vec![usize::MAX; ncomp];
    for i in 0..n {
        first_cell[comp[i]] = first_cell[comp[i]].min(i);
    }
    let mut recurrent: Vec<usize> = (0..ncomp).filter(|&c| closed[c]).collect();
    recurrent.sort_unstable_by_key(|&c| first_cell[c]);
    let mut class_of = vec![0u32; ncomp];
    for (label, &c) in recurrent.iter().enumerate() {
        class_of[c] = label as u32 + 1;
    }
    let labels: Vec<u32> = (0..n).map(|i| class_of[comp[i]]).collect();
    Components { count: recurrent.len(), labels }
}

/// Stationary density of one recurrent class, on the full grid (zero off the
/// class).
#[derive(Clone, Debug)]
pub struct StationaryDensity {
    pub class: u32,
    pub values: Vec<f64>,
    /// Final `l1` residual of `pi P - pi`.
    pub residual: f64,
    pub labels: Vec<u32>,
}

pub const DEFAULT_STATIONARY_TOL: f64 = 1e-10;
pub const DEFAULT_STATIONARY_MAX_ITER: usize = 100_000;

/// One stationary density per recurrent class.
///
/// Iteration uses the half-lazy operator `(P + I)/2`, which has the same
/// stationary vectors but no periodic obstruction (recurrent classes of
/// sampled product maps are often exactly bipartite). The residual reported
/// and tested is for `P` itself.
pub fn stationary(op: &UlamOperator, tol: f64, max_iter: usize) -> Result<Vec<StationaryDensity>> {
    stationary_with(op, tol, max_iter, Exec::default())
}

pub fn stationary_with(
    op: &UlamOperator,
    tol: f64,
    max_iter: usize,
    exec: Exec,
) -> Result<Vec<StationaryDensity>> {
    let comps = ergodic_components(op, 0.0);
    let n = op.num_cells();
    let mut out = Vec::with_capacity(comps.count);
    for class in 1..=comps.count as u32 {
        let members: Vec<usize> = (0..n).filter(|&i| comps.labels[i] == class).collect();
        let msize = members.len() as f64;
        let mut pi = vec![0.0; n];
        for &i in &members {
            pi[i] = 1.0 / msize;
        }
        let mut next = vec![0.0; n];
        let mut residual = f64::INFINITY;
        let mut converged = false;
        let mut iterations = 0usize;
        while iterations < max_iter {
            op.apply_left(&pi, &mut next, exec);
            iterations += 1;
            residual = pi
                .iter()
                .zip(next.iter())
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>();
            // half-lazy update, then renormalize against rounding drift
            let mut mass = 0.0;
            for i in 0..n {
                next[i] = 0.5 * (next[i] + pi[i]);
                mass += next[i];
            }
            for v in next.iter_mut() {
                *v /= mass;
            }
            std::mem::swap(&mut pi, &mut next);
            if residual <= tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence { residual, iterations, last_iterate: pi });
        }
        for v in pi.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let mass: f64 = pi.iter().sum();
        for v in pi.iter_mut() {
            *v /= mass;
        }
        debug_assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        out.push(StationaryDensity {
            class,
            values: pi,
            residual,
            labels: comps.labels.clone(),
        });
    }
    Ok(out)
}

/// Numerical proxy for "the invariant density is equivalent to volume":
/// exactly one recurrent class and every cell above `delta`.
pub fn lebesgue_equivalence(densities: &[StationaryDensity], delta: f64) -> bool {
    if densities.len() != 1 {
        return false;
    }
    densities[0].values.iter().all(|&v| v >= delta)
}

/// Default positivity threshold `1e-3 / N^m`.
pub fn default_equivalence_delta(op: &UlamOperator) -> f64 {
    1e-3 / (op.n_per_axis() as f64).powi(op.dim() as i32)
}
