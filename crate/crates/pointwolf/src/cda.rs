//! Conventional data augmentation: one global similarity transform plus
//! point-wise jitter.
//!
//! This is the baseline the locally weighted engine generalizes — a single
//! anchored transform with isotropic scale reproduces it exactly, which
//! [`GlobalSimilarity::as_local_transform`] makes available directly.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::sampling::draw_uniform;
use crate::transform::{rotation_matrix, EulerAngles};
use crate::wolf::LocalTransform;

/// Which axis points "up" for the global rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpAxis {
    X,
    #[default]
    Y,
    Z,
}

impl UpAxis {
    /// Euler angles rotating by `angle` about this axis.
    pub fn euler(self, angle: f64) -> EulerAngles {
        match self {
            UpAxis::X => EulerAngles::new(angle, 0.0, 0.0),
            UpAxis::Y => EulerAngles::new(0.0, angle, 0.0),
            UpAxis::Z => EulerAngles::new(0.0, 0.0, angle),
        }
    }
}

/// Parameters of the conventional baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdaConfig {
    /// Uniform scale is drawn from U[scale_lo, scale_hi]; scale_lo > 0.
    pub scale_lo: f64,
    pub scale_hi: f64,
    /// Whether to rotate about the up axis at all.
    pub rotate: bool,
    /// Rotation angle is drawn from U[0, rotation_range) radians.
    pub rotation_range: f64,
    pub up_axis: UpAxis,
    /// Global translation entries are drawn from U[−translation, translation].
    pub translation: f64,
    /// Per-coordinate jitter standard deviation.
    pub sigma: f64,
    /// Jitter offsets are clipped to [−clip, clip].
    pub clip: f64,
}

impl Default for CdaConfig {
    fn default() -> Self {
        Self {
            scale_lo: 0.8,
            scale_hi: 1.25,
            rotate: true,
            rotation_range: std::f64::consts::TAU,
            up_axis: UpAxis::Y,
            translation: 0.1,
            sigma: 0.01,
            clip: 0.05,
        }
    }
}

impl CdaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.scale_lo.is_finite() && self.scale_lo > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "scale_lo must be positive, got {}",
                self.scale_lo
            )));
        }
        if !(self.scale_hi.is_finite() && self.scale_hi >= self.scale_lo) {
            return Err(Error::InvalidArgument(format!(
                "scale range is empty: [{}, {}]",
                self.scale_lo, self.scale_hi
            )));
        }
        if !(self.rotation_range.is_finite() && self.rotation_range >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "rotation_range must be nonnegative, got {}",
                self.rotation_range
            )));
        }
        if !(self.translation.is_finite() && self.translation >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "translation must be nonnegative, got {}",
                self.translation
            )));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sigma must be nonnegative, got {}",
                self.sigma
            )));
        }
        if !(self.clip.is_finite() && self.clip >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "clip must be nonnegative, got {}",
                self.clip
            )));
        }
        Ok(())
    }
}

/// A drawn global similarity `p ↦ s·R·p + t` with `R` an up-axis rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalSimilarity {
    pub scale: f64,
    pub up_axis: UpAxis,
    pub angle: f64,
    pub translation: Vector3<f64>,
}

impl GlobalSimilarity {
    pub fn rotation(&self) -> Matrix3<f64> {
        rotation_matrix(self.up_axis.euler(self.angle))
    }

    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.scale * (self.rotation() * p) + self.translation
    }

    /// The same map re-expressed as a transform anchored at `anchor`:
    /// choosing `b = t + s·R·a − a` makes `s·R·(p − a) + b + a` collapse to
    /// `s·R·p + t` for every p.
    pub fn as_local_transform(&self, anchor: Vector3<f64>) -> Result<LocalTransform> {
        let s = self.scale;
        let b = self.translation + s * (self.rotation() * anchor) - anchor;
        LocalTransform::new(
            anchor,
            Vector3::new(s, s, s),
            self.up_axis.euler(self.angle),
            b,
            [true, true, true],
        )
    }
}

/// Draws a global similarity and applies it, then adds clipped Gaussian
/// jitter per coordinate.
///
/// Draw order: scale; rotation angle (only when rotation is enabled);
/// translation x, y, z; then jitter x, y, z per point in cloud order.
pub fn cda_augment(pc: &PointCloud, cfg: &CdaConfig, rng: &mut impl Rng) -> Result<PointCloud> {
    cfg.validate()?;
    let global = GlobalSimilarity {
        scale: draw_uniform(rng, cfg.scale_lo, cfg.scale_hi),
        up_axis: cfg.up_axis,
        angle: if cfg.rotate {
            draw_uniform(rng, 0.0, cfg.rotation_range)
        } else {
            0.0
        },
        translation: Vector3::new(
            draw_uniform(rng, -cfg.translation, cfg.translation),
            draw_uniform(rng, -cfg.translation, cfg.translation),
            draw_uniform(rng, -cfg.translation, cfg.translation),
        ),
    };
    let rotation = global.rotation();
    let jitter = Normal::new(0.0, cfg.sigma).expect("validated sigma");

    let mut out = Vec::with_capacity(pc.len());
    for p in pc.iter() {
        let mut q = global.scale * (rotation * p) + global.translation;
        for axis in 0..3 {
            q[axis] += jitter.sample(rng).clamp(-cfg.clip, cfg.clip);
        }
        out.push(q);
    }
    Ok(PointCloud::from_points_unchecked(out))
}
