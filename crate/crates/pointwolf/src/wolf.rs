//! The locally weighted augmentation engine.
//!
//! A cloud is deformed by sampling anchor points with farthest point
//! sampling, attaching a random similarity transform and a projection mask
//! to each anchor, and blending the per-anchor results with normalized
//! Gaussian kernel weights. The blend can run in two mathematically
//! equivalent ways — transform every point by every anchor and average the
//! images ([`blend_pointwise`]), or average the affine maps and apply the
//! result once per point ([`blend_transform_space`]) — and both are kept as
//! independent code paths so they can check each other.

use nalgebra::Vector3;
use rand::Rng;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::sampling::{draw_uniform, farthest_point_sampling};
use crate::transform::{rotation_matrix, AffineMap, EulerAngles, Similarity};

/// Parameters of the locally weighted augmentation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WolfConfig {
    /// Number of anchors M selected by farthest point sampling.
    pub anchors: usize,
    /// Gaussian kernel bandwidth h, in model units.
    pub bandwidth: f64,
    /// Per-axis scale factors are drawn from U[1, rho_s]; rho_s ≥ 1.
    pub rho_s: f64,
    /// Euler angles are drawn from U[−rho_r, rho_r] radians; rho_r ≥ 0.
    pub rho_r: f64,
    /// Translation entries are drawn from U[−rho_t, rho_t]; rho_t ≥ 0.
    pub rho_t: f64,
    /// Per-axis probability of keeping an axis in the projection mask,
    /// strictly between 0 and 1.
    pub beta: f64,
}

impl Default for WolfConfig {
    fn default() -> Self {
        Self {
            anchors: 4,
            bandwidth: 0.5,
            rho_s: 2.0,
            rho_r: 15f64.to_radians(),
            rho_t: 1.0,
            beta: 0.5,
        }
    }
}

impl WolfConfig {
    pub fn validate(&self) -> Result<()> {
        if self.anchors < 1 {
            return Err(Error::InvalidArgument(
                "anchor count must be at least 1".into(),
            ));
        }
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "bandwidth must be positive, got {}",
                self.bandwidth
            )));
        }
        if !(self.rho_s.is_finite() && self.rho_s >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "rho_s must be at least 1, got {}",
                self.rho_s
            )));
        }
        if !(self.rho_r.is_finite() && self.rho_r >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "rho_r must be nonnegative, got {}",
                self.rho_r
            )));
        }
        if !(self.rho_t.is_finite() && self.rho_t >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "rho_t must be nonnegative, got {}",
                self.rho_t
            )));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "beta must lie strictly between 0 and 1, got {}",
                self.beta
            )));
        }
        Ok(())
    }
}

/// A random similarity transform centered at an anchor, plus the projection
/// mask that shapes its kernel footprint.
///
/// The Euler angles are retained alongside the composed rotation so the
/// transform's strength can later be rescaled in parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTransform {
    sim: Similarity,
    angles: EulerAngles,
    mask: [bool; 3],
}

impl LocalTransform {
    /// Validates the parts; the mask must keep at least one axis.
    pub fn new(
        anchor: Vector3<f64>,
        scale: Vector3<f64>,
        angles: EulerAngles,
        translation: Vector3<f64>,
        mask: [bool; 3],
    ) -> Result<Self> {
        if mask == [false, false, false] {
            return Err(Error::InvalidArgument(
                "projection mask must keep at least one axis".into(),
            ));
        }
        let sim = Similarity::new(rotation_matrix(angles), scale, translation, anchor)?;
        Ok(Self { sim, angles, mask })
    }

    /// The identity transform anchored at `anchor`, with an all-axes mask.
    pub fn identity_at(anchor: Vector3<f64>) -> Self {
        Self::new(
            anchor,
            Vector3::new(1.0, 1.0, 1.0),
            EulerAngles::zero(),
            Vector3::zeros(),
            [true, true, true],
        )
        .expect("identity parts are valid")
    }

    pub fn anchor(&self) -> Vector3<f64> {
        self.sim.center()
    }

    pub fn similarity(&self) -> &Similarity {
        &self.sim
    }

    pub fn scale(&self) -> Vector3<f64> {
        self.sim.scale()
    }

    pub fn angles(&self) -> EulerAngles {
        self.angles
    }

    pub fn translation(&self) -> Vector3<f64> {
        self.sim.translation()
    }

    pub fn mask(&self) -> [bool; 3] {
        self.mask
    }

    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.sim.apply(p)
    }

    pub fn to_affine(&self) -> AffineMap {
        self.sim.to_affine()
    }

    /// Squared norm of `p − anchor` after zeroing the masked-out axes.
    fn projected_distance_squared(&self, p: &Vector3<f64>) -> f64 {
        let offset = p - self.sim.center();
        let mut d2 = 0.0;
        for axis in 0..3 {
            if self.mask[axis] {
                d2 += offset[axis] * offset[axis];
            }
        }
        d2
    }
}

/// Draws the M anchored transforms.
///
/// The draw order is fixed and load-bearing for reproducibility: anchors
/// first (one FPS pass), then per anchor scale x, y, z; angles x, y, z;
/// translation x, y, z; mask x, y, z. An all-zero mask is rejected and all
/// three mask draws are repeated.
pub fn sample_local_transforms(
    pc: &PointCloud,
    cfg: &WolfConfig,
    rng: &mut impl Rng,
) -> Result<Vec<LocalTransform>> {
    cfg.validate()?;
    let anchor_ids = farthest_point_sampling(pc, cfg.anchors, rng)?;

    let mut transforms = Vec::with_capacity(anchor_ids.len());
    for id in anchor_ids {
        let anchor = pc.points()[id];
        let scale = Vector3::new(
            draw_uniform(rng, 1.0, cfg.rho_s),
            draw_uniform(rng, 1.0, cfg.rho_s),
            draw_uniform(rng, 1.0, cfg.rho_s),
        );
        let angles = EulerAngles::new(
            draw_uniform(rng, -cfg.rho_r, cfg.rho_r),
            draw_uniform(rng, -cfg.rho_r, cfg.rho_r),
            draw_uniform(rng, -cfg.rho_r, cfg.rho_r),
        );
        let translation = Vector3::new(
            draw_uniform(rng, -cfg.rho_t, cfg.rho_t),
            draw_uniform(rng, -cfg.rho_t, cfg.rho_t),
            draw_uniform(rng, -cfg.rho_t, cfg.rho_t),
        );
        let mask = loop {
            let mask = [
                rng.random::<f64>() < cfg.beta,
                rng.random::<f64>() < cfg.beta,
                rng.random::<f64>() < cfg.beta,
            ];
            if mask != [false, false, false] {
                break mask;
            }
        };
        transforms.push(LocalTransform::new(
            anchor,
            scale,
            angles,
            translation,
            mask,
        )?);
    }
    Ok(transforms)
}

/// Unnormalized kernel value `exp(−‖Π(p − anchor)‖² / (2h²))`, always in
/// (0, 1]. Kernel distances use the original coordinates of `p`, never the
/// transformed ones.
pub fn kernel_weight(p: &Vector3<f64>, t: &LocalTransform, h: f64) -> f64 {
    debug_assert!(h > 0.0);
    (-t.projected_distance_squared(p) / (2.0 * h * h)).exp()
}

/// Normalized kernel weights for one point against every transform.
///
/// Works on log-kernel values with the row maximum subtracted before
/// exponentiation, so entries stay strictly positive even when every
/// distance is large relative to the bandwidth.
fn normalized_weights(p: &Vector3<f64>, transforms: &[LocalTransform], h: f64) -> Vec<f64> {
    let inv = 1.0 / (2.0 * h * h);
    let mut logs: Vec<f64> = transforms
        .iter()
        .map(|t| -t.projected_distance_squared(p) * inv)
        .collect();
    let top = logs.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let mut sum = 0.0;
    for w in logs.iter_mut() {
        *w = (*w - top).exp();
        sum += *w;
    }
    for w in logs.iter_mut() {
        *w /= sum;
    }
    logs
}

/// Row-normalized N×M kernel weights of every point against every anchor.
#[derive(Debug, Clone)]
pub struct WeightMatrix {
    w: Vec<f64>,
    cols: usize,
}

impl WeightMatrix {
    pub fn compute(pc: &PointCloud, transforms: &[LocalTransform], h: f64) -> Result<Self> {
        if transforms.is_empty() {
            return Err(Error::InvalidArgument(
                "weight matrix needs at least one transform".into(),
            ));
        }
        let cols = transforms.len();
        let mut w = Vec::with_capacity(pc.len() * cols);
        for p in pc.iter() {
            w.extend(normalized_weights(p, transforms, h));
        }
        Ok(Self { w, cols })
    }

    pub fn rows(&self) -> usize {
        self.w.len() / self.cols
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.w[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.cols + j]
    }
}

fn require_transforms(transforms: &[LocalTransform]) -> Result<()> {
    if transforms.is_empty() {
        return Err(Error::InvalidArgument(
            "blend needs at least one transform".into(),
        ));
    }
    Ok(())
}

/// Blends by transforming each point through every anchor and averaging
/// the images under the normalized kernel weights.
pub fn blend_pointwise(
    pc: &PointCloud,
    transforms: &[LocalTransform],
    h: f64,
) -> Result<PointCloud> {
    blend_pointwise_counted(pc, transforms, h).map(|(out, _)| out)
}

/// Same as [`blend_pointwise`], also reporting the number of single-point
/// transform applications performed (N·M).
pub(crate) fn blend_pointwise_counted(
    pc: &PointCloud,
    transforms: &[LocalTransform],
    h: f64,
) -> Result<(PointCloud, usize)> {
    require_transforms(transforms)?;
    let mut ops = 0usize;
    let mut out = Vec::with_capacity(pc.len());
    for p in pc.iter() {
        let weights = normalized_weights(p, transforms, h);
        let mut blended = Vector3::zeros();
        for (t, w) in transforms.iter().zip(&weights) {
            blended += *w * t.apply(p);
            ops += 1;
        }
        out.push(blended);
    }
    Ok((PointCloud::from_points_unchecked(out), ops))
}

/// The smoothly varying map induced at an arbitrary location: the
/// kernel-weighted average of the anchors' affine forms.
pub fn smooth_transform_at(p: &Vector3<f64>, transforms: &[LocalTransform], h: f64) -> AffineMap {
    let weights = normalized_weights(p, transforms, h);
    let mut averaged = AffineMap::zero();
    for (t, w) in transforms.iter().zip(&weights) {
        averaged.accumulate(*w, &t.to_affine());
    }
    averaged
}

/// Blends by averaging the affine maps per point and applying the averaged
/// map once. Agrees with [`blend_pointwise`] because affine maps commute
/// with convex combination.
pub fn blend_transform_space(
    pc: &PointCloud,
    transforms: &[LocalTransform],
    h: f64,
) -> Result<PointCloud> {
    require_transforms(transforms)?;
    Ok(pc.map(|p| smooth_transform_at(p, transforms, h).apply(p)))
}

/// The full augmentation: sample anchored transforms, then blend pointwise.
pub fn pointwolf(pc: &PointCloud, cfg: &WolfConfig, rng: &mut impl Rng) -> Result<PointCloud> {
    let transforms = sample_local_transforms(pc, cfg, rng)?;
    blend_pointwise(pc, &transforms, cfg.bandwidth)
}
