//! Farthest point sampling and nearest-neighbor queries.
//!
//! Both are brute-force over squared distances, which is plenty for the
//! cloud sizes this crate targets (N up to ~10⁴). Distance ties always break
//! toward the lower index so results are reproducible across runs.

use nalgebra::Vector3;
use rand::Rng;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};

/// Greedy farthest point sampling.
///
/// The first index is drawn uniformly from `rng`; every subsequent index
/// maximizes the minimum distance to the points already selected. Returns
/// `m` distinct indices in selection order.
pub fn farthest_point_sampling(
    pc: &PointCloud,
    m: usize,
    rng: &mut impl Rng,
) -> Result<Vec<usize>> {
    let n = pc.len();
    if m < 1 || m > n {
        return Err(Error::InvalidArgument(format!(
            "farthest point sampling needs 1 <= m <= {n}, got m = {m}"
        )));
    }

    let points = pc.points();
    let first = rng.random_range(0..n);
    let mut selected = Vec::with_capacity(m);
    selected.push(first);

    // min_d2[i] tracks the squared distance from point i to the selected set.
    let mut min_d2: Vec<f64> = points
        .iter()
        .map(|p| (p - points[first]).norm_squared())
        .collect();

    while selected.len() < m {
        let mut best = 0;
        let mut best_d2 = -1.0;
        for (i, &d2) in min_d2.iter().enumerate() {
            if d2 > best_d2 {
                best = i;
                best_d2 = d2;
            }
        }
        selected.push(best);
        for (i, d2) in min_d2.iter_mut().enumerate() {
            let cand = (points[i] - points[best]).norm_squared();
            if cand < *d2 {
                *d2 = cand;
            }
        }
    }

    Ok(selected)
}

/// Indices of the `k` points closest to `center`, nearest first.
pub fn k_nearest(pc: &PointCloud, center: &Vector3<f64>, k: usize) -> Result<Vec<usize>> {
    let n = pc.len();
    if k < 1 || k > n {
        return Err(Error::InvalidArgument(format!(
            "k-nearest needs 1 <= k <= {n}, got k = {k}"
        )));
    }
    Ok(k_nearest_of(
        pc.points().iter().enumerate().map(|(i, p)| (i, *p)),
        center,
        k,
    ))
}

/// One uniform draw from [lo, hi]; consumes exactly one RNG value and
/// returns `lo` exactly when the interval is degenerate.
pub(crate) fn draw_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    lo + rng.random::<f64>() * (hi - lo)
}

/// Shared core: k smallest distances among labeled candidates, ties toward
/// the lower label. Callers guarantee `k <= candidates.len()`.
pub(crate) fn k_nearest_of(
    candidates: impl Iterator<Item = (usize, Vector3<f64>)>,
    center: &Vector3<f64>,
    k: usize,
) -> Vec<usize> {
    let mut by_distance: Vec<(f64, usize)> = candidates
        .map(|(id, p)| ((p - center).norm_squared(), id))
        .collect();
    by_distance.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    by_distance.truncate(k);
    by_distance.into_iter().map(|(_, id)| id).collect()
}
