//! Corruption generators for building degraded evaluation sets: cluster
//! removal, cluster injection, point-wise dropout, and Gaussian noise.
//!
//! All four are deterministic given the RNG, and the removing corruptions
//! can either shrink the cloud or pad it back to its original size by
//! repeating the first surviving point in place of each removed one.

use nalgebra::Vector3;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::sampling::{draw_uniform, k_nearest, k_nearest_of};

/// How corruptions that remove points restore the cloud's size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PadMode {
    /// Return only the survivors; the cloud shrinks.
    Shrink,
    /// Keep the original size by substituting the first surviving point
    /// for every removed one, in place.
    #[default]
    DuplicateFirst,
}

/// A corruption kind with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Corruption {
    LocalDrop { clusters: usize, cluster_size: usize },
    LocalAdd { clusters: usize, cluster_size: usize },
    Dropout { rate: f64 },
    Noise { sigma: f64 },
}

impl Corruption {
    pub fn name(&self) -> &'static str {
        match self {
            Corruption::LocalDrop { .. } => "local_drop",
            Corruption::LocalAdd { .. } => "local_add",
            Corruption::Dropout { .. } => "dropout",
            Corruption::Noise { .. } => "noise",
        }
    }

    /// Applies the corruption; `pad` matters only for the removing kinds.
    pub fn apply(&self, pc: &PointCloud, pad: PadMode, rng: &mut impl Rng) -> Result<PointCloud> {
        match *self {
            Corruption::LocalDrop {
                clusters,
                cluster_size,
            } => local_drop(pc, clusters, cluster_size, pad, rng),
            Corruption::LocalAdd {
                clusters,
                cluster_size,
            } => local_add(pc, clusters, cluster_size, rng),
            Corruption::Dropout { rate } => point_dropout(pc, rate, pad, rng),
            Corruption::Noise { sigma } => gaussian_noise(pc, sigma, rng),
        }
    }
}

/// Rebuilds a cloud from the survivor flags per the pad mode.
fn assemble(pc: &PointCloud, survived: &[bool], pad: PadMode) -> PointCloud {
    let first = survived
        .iter()
        .position(|&s| s)
        .expect("at least one survivor");
    let points = pc.points();
    let out = match pad {
        PadMode::Shrink => points
            .iter()
            .zip(survived)
            .filter(|(_, &s)| s)
            .map(|(p, _)| *p)
            .collect(),
        PadMode::DuplicateFirst => survived
            .iter()
            .enumerate()
            .map(|(i, &s)| if s { points[i] } else { points[first] })
            .collect(),
    };
    PointCloud::from_points_unchecked(out)
}

/// Removes `clusters` clusters of the `cluster_size` nearest remaining
/// points around centers drawn uniformly from the remaining points.
///
/// Draw order: one center draw per cluster (an index into the remaining
/// points, in their current order).
pub fn local_drop(
    pc: &PointCloud,
    clusters: usize,
    cluster_size: usize,
    pad: PadMode,
    rng: &mut impl Rng,
) -> Result<PointCloud> {
    if clusters == 0 {
        return Ok(pc.clone());
    }
    if cluster_size < 1 {
        return Err(Error::InvalidArgument(
            "cluster size must be at least 1".into(),
        ));
    }
    if clusters * cluster_size >= pc.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot drop {clusters} clusters of {cluster_size} from {} points",
            pc.len()
        )));
    }

    let points = pc.points();
    let mut survived = vec![true; pc.len()];
    let mut remaining: Vec<usize> = (0..pc.len()).collect();
    for _ in 0..clusters {
        let center = points[remaining[rng.random_range(0..remaining.len())]];
        let removed = k_nearest_of(
            remaining.iter().map(|&i| (i, points[i])),
            &center,
            cluster_size,
        );
        for i in removed {
            survived[i] = false;
        }
        remaining.retain(|&i| survived[i]);
    }
    Ok(assemble(pc, &survived, pad))
}

/// Appends `clusters` rigid copies of k-nearest clusters, each translated
/// so its center lands at a uniform random location inside the original
/// bounding box.
///
/// Draw order per cluster: center index, then target location x, y, z.
pub fn local_add(
    pc: &PointCloud,
    clusters: usize,
    cluster_size: usize,
    rng: &mut impl Rng,
) -> Result<PointCloud> {
    if clusters == 0 {
        return Ok(pc.clone());
    }
    if cluster_size < 1 || cluster_size > pc.len() {
        return Err(Error::InvalidArgument(format!(
            "cluster size must lie in [1, {}], got {cluster_size}",
            pc.len()
        )));
    }

    let points = pc.points();
    let (lo, hi) = pc.bounding_box();
    let mut out = points.to_vec();
    for _ in 0..clusters {
        let center = points[rng.random_range(0..pc.len())];
        let members = k_nearest(pc, &center, cluster_size)?;
        let target = Vector3::new(
            draw_uniform(rng, lo.x, hi.x),
            draw_uniform(rng, lo.y, hi.y),
            draw_uniform(rng, lo.z, hi.z),
        );
        let offset = target - center;
        out.extend(members.into_iter().map(|i| points[i] + offset));
    }
    Ok(PointCloud::from_points_unchecked(out))
}

/// Drops each point independently with probability `rate`.
///
/// Draw order: one draw per point in cloud order; if every point drops,
/// one extra draw picks the single retained point uniformly.
pub fn point_dropout(
    pc: &PointCloud,
    rate: f64,
    pad: PadMode,
    rng: &mut impl Rng,
) -> Result<PointCloud> {
    if !(rate.is_finite() && (0.0..1.0).contains(&rate)) {
        return Err(Error::InvalidArgument(format!(
            "dropout rate must lie in [0, 1), got {rate}"
        )));
    }
    let mut survived: Vec<bool> = (0..pc.len())
        .map(|_| rng.random::<f64>() >= rate)
        .collect();
    if survived.iter().all(|&s| !s) {
        survived[rng.random_range(0..pc.len())] = true;
    }
    Ok(assemble(pc, &survived, pad))
}

/// Adds unclipped i.i.d. Gaussian offsets per coordinate.
///
/// Draw order: x, y, z per point in cloud order.
pub fn gaussian_noise(pc: &PointCloud, sigma: f64, rng: &mut impl Rng) -> Result<PointCloud> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sigma must be nonnegative, got {sigma}"
        )));
    }
    let noise = Normal::new(0.0, sigma).expect("validated sigma");
    let mut out = Vec::with_capacity(pc.len());
    for p in pc.iter() {
        out.push(Vector3::new(
            p.x + noise.sample(rng),
            p.y + noise.sample(rng),
            p.z + noise.sample(rng),
        ));
    }
    Ok(PointCloud::from_points_unchecked(out))
}
