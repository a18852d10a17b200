//! The point cloud container.
//!
//! A cloud is an ordered list of 3D points. Order matters: augmentations that
//! promise point-wise correspondence (blending, interpolation) must not
//! permute points, so every operation in this crate preserves index order
//! unless it explicitly adds or removes points.

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// An ordered set of N finite 3D points, N >= 1.
///
/// Coordinates are dimensionless model units; most augmentation defaults
/// assume clouds normalized to the unit sphere (see [`PointCloud::normalize`]).
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vector3<f64>>,
}

impl PointCloud {
    /// Builds a cloud, rejecting empty input and non-finite coordinates.
    pub fn new(points: Vec<Vector3<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("point cloud must contain at least one point".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "point {i} has a non-finite coordinate: ({}, {}, {})",
                    p.x, p.y, p.z
                )));
            }
        }
        Ok(Self { points })
    }

    /// Builds a cloud from coordinate triples.
    pub fn from_coords(coords: impl IntoIterator<Item = [f64; 3]>) -> Result<Self> {
        Self::new(coords.into_iter().map(Vector3::from).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false: the empty cloud is unrepresentable.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vector3<f64>> {
        self.points.iter()
    }

    /// Arithmetic mean of the points.
    pub fn centroid(&self) -> Vector3<f64> {
        let sum: Vector3<f64> = self.points.iter().sum();
        sum / self.points.len() as f64
    }

    /// Component-wise (min, max) corners of the axis-aligned bounding box.
    pub fn bounding_box(&self) -> (Vector3<f64>, Vector3<f64>) {
        let mut lo = self.points[0];
        let mut hi = self.points[0];
        for p in &self.points[1..] {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (lo, hi)
    }

    /// Largest distance from the origin to any point.
    pub fn bounding_radius(&self) -> f64 {
        self.points.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    /// Centers the cloud on its centroid and scales it so the farthest point
    /// sits on the unit sphere. A degenerate cloud (all points coincident)
    /// is centered but left unscaled.
    pub fn normalize(&self) -> PointCloud {
        let c = self.centroid();
        let mut points: Vec<_> = self.points.iter().map(|p| p - c).collect();
        let radius = points.iter().map(|p| p.norm()).fold(0.0, f64::max);
        if radius > 0.0 {
            for p in &mut points {
                *p /= radius;
            }
        }
        PointCloud { points }
    }

    /// Maps every point through `f`, preserving order. The result is not
    /// revalidated; callers must keep coordinates finite.
    pub fn map(&self, f: impl Fn(&Vector3<f64>) -> Vector3<f64>) -> PointCloud {
        PointCloud {
            points: self.points.iter().map(f).collect(),
        }
    }

    pub(crate) fn from_points_unchecked(points: Vec<Vector3<f64>>) -> PointCloud {
        debug_assert!(!points.is_empty());
        PointCloud { points }
    }
}

impl<'a> IntoIterator for &'a PointCloud {
    type Item = &'a Vector3<f64>;
    type IntoIter = std::slice::Iter<'a, Vector3<f64>>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_cloud() {
        assert!(PointCloud::new(Vec::new()).is_err());
    }

    #[test]
    fn rejects_non_finite_coordinates() {
        let bad = vec![Vector3::new(0.0, f64::NAN, 0.0)];
        assert!(PointCloud::new(bad).is_err());
        let bad = vec![Vector3::new(f64::INFINITY, 0.0, 0.0)];
        assert!(PointCloud::new(bad).is_err());
    }

    #[test]
    fn centroid_and_bbox() {
        let pc = PointCloud::from_coords([[0.0, 0.0, 0.0], [2.0, 4.0, -2.0]]).unwrap();
        assert_eq!(pc.centroid(), Vector3::new(1.0, 2.0, -1.0));
        let (lo, hi) = pc.bounding_box();
        assert_eq!(lo, Vector3::new(0.0, 0.0, -2.0));
        assert_eq!(hi, Vector3::new(2.0, 4.0, 0.0));
    }

    #[test]
    fn normalize_centers_and_scales_to_unit_sphere() {
        let pc = PointCloud::from_coords([[1.0, 0.0, 0.0], [3.0, 0.0, 0.0], [2.0, 1.0, 0.0]])
            .unwrap();
        let n = pc.normalize();
        assert!(n.centroid().norm() < 1e-12);
        assert!((n.bounding_radius() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalize_degenerate_cloud_is_centered_only() {
        let pc = PointCloud::from_coords([[5.0, 5.0, 5.0], [5.0, 5.0, 5.0]]).unwrap();
        let n = pc.normalize();
        assert_eq!(n.points()[0], Vector3::zeros());
        assert_eq!(n.points()[1], Vector3::zeros());
    }
}
