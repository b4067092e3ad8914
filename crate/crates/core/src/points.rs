//! Flat point storage and a bucket grid for nearest-point distance queries.

/// A set of points in `R^dim`, stored as one flat buffer.
///
/// Preimage sets grow into the millions, so points are not individually
/// heap-allocated.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointSet {
    dim: usize,
    data: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize) -> Self {
        PointSet { dim, data: Vec::new() }
    }

    pub fn with_capacity(dim: usize, points: usize) -> Self {
        PointSet { dim, data: Vec::with_capacity(dim * points) }
    }

    pub fn from_rows(dim: usize, rows: &[Vec<f64>]) -> Self {
        let mut s = PointSet::with_capacity(dim, rows.len());
        for r in rows {
            s.push(r);
        }
        s
    }

    pub fn single(point: &[f64]) -> Self {
        PointSet { dim: point.len(), data: point.to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 { 0 } else { self.data.len() / self.dim }
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn push(&mut self, p: &[f64]) {
        debug_assert_eq!(p.len(), self.dim);
        self.data.extend_from_slice(p);
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim.max(1))
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// Sort points lexicographically after quantizing coordinates to
    /// `resolution`, and drop duplicates that quantize identically.
    pub fn dedup_at_resolution(&mut self, resolution: f64) {
        let n = self.len();
        if n <= 1 {
            return;
        }
        let dim = self.dim;
        let key = |p: &[f64]| -> Vec<i64> {
            p.iter().map(|&x| (x / resolution).round() as i64).collect()
        };
        let mut order: Vec<usize> = (0..n).collect();
        let keys: Vec<Vec<i64>> = (0..n).map(|i| key(self.point(i))).collect();
        order.sort_unstable_by(|&a, &b| keys[a].cmp(&keys[b]));
        let mut out = Vec::with_capacity(self.data.len());
        let mut last: Option<&Vec<i64>> = None;
        for &i in &order {
            if last != Some(&keys[i]) {
                out.extend_from_slice(self.point(i));
                last = Some(&keys[i]);
            }
        }
        self.data = out;
        let _ = dim;
    }
}

/// Euclidean distance between two points given as slices.
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Uniform bucket grid over a point set, answering exact min-distance queries
/// by expanding ring search. Distances are computed exactly; the grid only
/// prunes which points are inspected, so results do not depend on bucket
/// layout.
#[derive(Clone, Debug)]
pub struct PointGrid {
    dim: usize,
    lo: Vec<f64>,
    cell: f64,
    n: Vec<usize>,
    // CSR-style buckets: point indices grouped by bucket.
    start: Vec<u32>,
    idx: Vec<u32>,
    points: PointSet,
}

impl PointGrid {
    pub fn build(points: PointSet) -> Self {
        let dim = points.dim();
        let npts = points.len();
        assert!(npts > 0, "PointGrid needs at least one point");
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for p in points.iter() {
            for k in 0..dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let mut extent_max: f64 = 0.0;
        for k in 0..dim {
            extent_max = extent_max.max(hi[k] - lo[k]);
        }
        if extent_max <= 0.0 {
            extent_max = 1.0;
        }
        // Aim for about one point per bucket, capped per axis.
        let per_axis = (npts as f64).powf(1.0 / dim as f64).ceil() as usize;
        let per_axis = per_axis.clamp(1, 2048);
        let cell = extent_max / per_axis as f64;
        let mut n = vec![0usize; dim];
        for k in 0..dim {
            n[k] = (((hi[k] - lo[k]) / cell).ceil() as usize).max(1);
        }
        let nbuckets: usize = n.iter().product();
        let bucket_of = |p: &[f64]| -> usize {
            let mut b = 0usize;
            for k in (0..dim).rev() {
                let mut i = ((p[k] - lo[k]) / cell).floor() as isize;
                i = i.clamp(0, n[k] as isize - 1);
                b = b * n[k] + i as usize;
            }
            b
        };
        let mut counts = vec![0u32; nbuckets + 1];
        for p in points.iter() {
            counts[bucket_of(p) + 1] += 1;
        }
        for i in 0..nbuckets {
            counts[i + 1] += counts[i];
        }
        let start = counts.clone();
        let mut fill = counts;
        let mut idx = vec![0u32; npts];
        for (i, p) in points.iter().enumerate() {
            let b = bucket_of(p);
            idx[fill[b] as usize] = i as u32;
            fill[b] += 1;
        }
        PointGrid { dim, lo, cell, n, start, idx, points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn bucket_coords(&self, q: &[f64]) -> Vec<isize> {
        (0..self.dim)
            .map(|k| ((q[k] - self.lo[k]) / self.cell).floor() as isize)
            .collect()
    }

    /// Exact minimum Euclidean distance from `q` to the stored set.
    pub fn min_dist(&self, q: &[f64]) -> f64 {
        let c = self.bucket_coords(q);
        let mut best = f64::INFINITY;
        let max_ring: isize = self
            .n
            .iter()
            .enumerate()
            .map(|(k, &nk)| {
                let lo = -c[k];
                let hi = nk as isize - 1 - c[k];
                lo.abs().max(hi.abs())
            })
            .max()
            .unwrap_or(0);
        for ring in 0..=max_ring {
            // Any point in a bucket at Chebyshev ring distance `ring` is at
            // Euclidean distance at least (ring-1)*cell from q.
            if best.is_finite() && (ring - 1).max(0) as f64 * self.cell >= best {
                break;
            }
            self.scan_ring(&c, ring, q, &mut best);
        }
        best
    }

    fn scan_ring(&self, c: &[isize], ring: isize, q: &[f64], best: &mut f64) {
        let dim = self.dim;
        let mut offs = vec![-ring; dim];
        'outer: loop {
            if offs.iter().any(|o| o.abs() == ring) || ring == 0 {
                let mut b = 0usize;
                let mut ok = true;
                for k in (0..dim).rev() {
                    let i = c[k] + offs[k];
                    if i < 0 || i >= self.n[k] as isize {
                        ok = false;
                        break;
                    }
                    b = b * self.n[k] + i as usize;
                }
                if ok {
                    let (s, e) = (self.start[b] as usize, self.start[b + 1] as usize);
                    for &pi in &self.idx[s..e] {
                        let d = dist(q, self.points.point(pi as usize));
                        if d < *best {
                            *best = d;
                        }
                    }
                }
            }
            // advance multi-offset
            for k in 0..dim {
                offs[k] += 1;
                if offs[k] <= ring {
                    continue 'outer;
                }
                offs[k] = -ring;
            }
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedup_removes_quantized_duplicates() {
        let mut s = PointSet::from_rows(
            2,
            &[
                vec![0.5, 0.5],
                vec![0.5 + 1e-14, 0.5],
                vec![0.25, 0.75],
            ],
        );
        s.dedup_at_resolution(1e-12);
        assert_eq!(s.len(), 2);
        // sorted lexicographically by quantized coordinates
        assert_eq!(s.point(0), &[0.25, 0.75]);
    }

    #[test]
    fn grid_min_dist_matches_brute_force() {
        let mut pts = PointSet::new(2);
        let mut v = 0.37_f64;
        for _ in 0..500 {
            v = (v * 997.0 + 0.1234).fract();
            let a = v;
            v = (v * 997.0 + 0.1234).fract();
            pts.push(&[a * 3.0 - 1.0, v * 2.0]);
        }
        let grid = PointGrid::build(pts.clone());
        let mut q = 0.11_f64;
        for _ in 0..200 {
            q = (q * 613.0 + 0.517).fract();
            let a = q * 4.0 - 2.0;
            q = (q * 613.0 + 0.517).fract();
            let query = [a, q * 3.0 - 0.5];
            let brute = pts
                .iter()
                .map(|p| dist(&query, p))
                .fold(f64::INFINITY, f64::min);
            let fast = grid.min_dist(&query);
            assert!((brute - fast).abs() < 1e-12, "brute {brute} vs grid {fast}");
        }
    }
}
