//! Rotations, similarity transforms about an anchor, and their affine form.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Tolerance for the orthonormality and determinant checks on rotations.
pub const ROTATION_TOL: f64 = 1e-9;

/// Euler angles in radians, applied extrinsically as X then Y then Z.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EulerAngles {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl EulerAngles {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Component-wise scaling, used when attenuating transforms.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            x: factor * self.x,
            y: factor * self.y,
            z: factor * self.z,
        }
    }
}

/// Builds the rotation matrix R = Rz(z) * Ry(y) * Rx(x).
///
/// The convention is fixed: an extrinsic rotation about X, then Y, then Z.
/// Angles must be finite; the result is orthonormal with determinant +1.
pub fn rotation_matrix(angles: EulerAngles) -> Matrix3<f64> {
    let (sx, cx) = angles.x.sin_cos();
    let (sy, cy) = angles.y.sin_cos();
    let (sz, cz) = angles.z.sin_cos();

    let rx = Matrix3::new(1.0, 0.0, 0.0, 0.0, cx, -sx, 0.0, sx, cx);
    let ry = Matrix3::new(cy, 0.0, sy, 0.0, 1.0, 0.0, -sy, 0.0, cy);
    let rz = Matrix3::new(cz, -sz, 0.0, sz, cz, 0.0, 0.0, 0.0, 1.0);

    rz * ry * rx
}

/// A similarity transform expressed about a center point:
/// `p ↦ S·R·(p − center) + translation + center`
/// with `S = diag(scale)` per-axis positive scaling and `R` a rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct Similarity {
    rotation: Matrix3<f64>,
    scale: Vector3<f64>,
    translation: Vector3<f64>,
    center: Vector3<f64>,
}

impl Similarity {
    /// Validates the parts: `rotation` must be orthonormal with determinant
    /// +1 within [`ROTATION_TOL`], and every scale entry must be positive
    /// and finite.
    pub fn new(
        rotation: Matrix3<f64>,
        scale: Vector3<f64>,
        translation: Vector3<f64>,
        center: Vector3<f64>,
    ) -> Result<Self> {
        let residual = rotation.transpose() * rotation - Matrix3::identity();
        let max_residual = residual.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !(max_residual <= ROTATION_TOL) {
            return Err(Error::InvalidArgument(format!(
                "rotation is not orthonormal (max |RᵀR − I| = {max_residual:e})"
            )));
        }
        let det = rotation.determinant();
        if !((det - 1.0).abs() <= ROTATION_TOL) {
            return Err(Error::InvalidArgument(format!(
                "rotation must have determinant +1, got {det}"
            )));
        }
        for (i, s) in scale.iter().enumerate() {
            if !(s.is_finite() && *s > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "scale[{i}] must be positive and finite, got {s}"
                )));
            }
        }
        Ok(Self {
            rotation,
            scale,
            translation,
            center,
        })
    }

    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            scale: Vector3::new(1.0, 1.0, 1.0),
            translation: Vector3::zeros(),
            center: Vector3::zeros(),
        }
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn scale(&self) -> Vector3<f64> {
        self.scale
    }

    pub fn translation(&self) -> Vector3<f64> {
        self.translation
    }

    pub fn center(&self) -> Vector3<f64> {
        self.center
    }

    /// Applies the transform: `S·R·(p − center) + translation + center`.
    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        let rotated = self.rotation * (p - self.center);
        rotated.component_mul(&self.scale) + self.translation + self.center
    }

    /// The equivalent unconditioned affine map. Averaging these commutes
    /// exactly with applying them, which the blend equivalence relies on.
    pub fn to_affine(&self) -> AffineMap {
        let mut linear = self.rotation;
        for i in 0..3 {
            for j in 0..3 {
                linear[(i, j)] *= self.scale[i];
            }
        }
        let translation = self.translation + self.center - linear * self.center;
        AffineMap {
            linear,
            translation,
        }
    }
}

/// A plain affine map `p ↦ linear·p + translation` (a 3×4 matrix in effect).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub linear: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl AffineMap {
    pub fn identity() -> Self {
        Self {
            linear: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// The zero map, the natural accumulator start for weighted averages.
    pub fn zero() -> Self {
        Self {
            linear: Matrix3::zeros(),
            translation: Vector3::zeros(),
        }
    }

    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.linear * p + self.translation
    }

    /// Accumulates `weight * other` into `self`.
    pub fn accumulate(&mut self, weight: f64, other: &AffineMap) {
        self.linear += weight * other.linear;
        self.translation += weight * other.translation;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_angles_give_identity() {
        assert_eq!(rotation_matrix(EulerAngles::zero()), Matrix3::identity());
    }

    #[test]
    fn quarter_turn_about_z_sends_x_to_y() {
        // Hand evaluation of Rz(90°): (1,0,0) ↦ (0,1,0).
        let r = rotation_matrix(EulerAngles::new(0.0, 0.0, FRAC_PI_2));
        let v = r * Vector3::new(1.0, 0.0, 0.0);
        assert!((v - Vector3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn quarter_turn_about_x_sends_y_to_z() {
        // Hand evaluation of Rx(90°): (0,1,0) ↦ (0,0,1).
        let r = rotation_matrix(EulerAngles::new(FRAC_PI_2, 0.0, 0.0));
        let v = r * Vector3::new(0.0, 1.0, 0.0);
        assert!((v - Vector3::new(0.0, 0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn rotation_order_is_z_after_y_after_x() {
        let angles = EulerAngles::new(0.3, -0.7, 1.1);
        let r = rotation_matrix(angles);
        let rx = rotation_matrix(EulerAngles::new(angles.x, 0.0, 0.0));
        let ry = rotation_matrix(EulerAngles::new(0.0, angles.y, 0.0));
        let rz = rotation_matrix(EulerAngles::new(0.0, 0.0, angles.z));
        assert!((r - rz * ry * rx).norm() < 1e-14);
    }

    #[test]
    fn similarity_pure_translation() {
        let sim = Similarity::new(
            Matrix3::identity(),
            Vector3::new(1.0, 1.0, 1.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(-3.0, 7.0, 2.0),
        )
        .unwrap();
        assert_eq!(sim.apply(&Vector3::zeros()), Vector3::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn similarity_uniform_double_about_origin() {
        let sim = Similarity::new(
            Matrix3::identity(),
            Vector3::new(2.0, 2.0, 2.0),
            Vector3::zeros(),
            Vector3::zeros(),
        )
        .unwrap();
        assert_eq!(
            sim.apply(&Vector3::new(1.0, 1.0, 1.0)),
            Vector3::new(2.0, 2.0, 2.0)
        );
    }

    #[test]
    fn similarity_identity_fixes_points() {
        let sim = Similarity::identity();
        let p = Vector3::new(0.4, -1.7, 3.14);
        assert_eq!(sim.apply(&p), p);
    }

    #[test]
    fn similarity_rejects_non_rotation() {
        let reflection = Matrix3::new(-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(Similarity::new(
            reflection,
            Vector3::new(1.0, 1.0, 1.0),
            Vector3::zeros(),
            Vector3::zeros()
        )
        .is_err());
        let skew = Matrix3::new(1.0, 0.5, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(Similarity::new(
            skew,
            Vector3::new(1.0, 1.0, 1.0),
            Vector3::zeros(),
            Vector3::zeros()
        )
        .is_err());
    }

    #[test]
    fn similarity_rejects_non_positive_scale() {
        assert!(Similarity::new(
            Matrix3::identity(),
            Vector3::new(1.0, 0.0, 1.0),
            Vector3::zeros(),
            Vector3::zeros()
        )
        .is_err());
    }

    #[test]
    fn affine_form_matches_direct_application() {
        let r = rotation_matrix(EulerAngles::new(0.2, 0.5, -0.9));
        let sim = Similarity::new(
            r,
            Vector3::new(1.5, 0.7, 2.0),
            Vector3::new(0.3, -0.2, 0.1),
            Vector3::new(1.0, 2.0, 3.0),
        )
        .unwrap();
        let affine = sim.to_affine();
        for p in [
            Vector3::zeros(),
            Vector3::new(1.0, -1.0, 0.5),
            Vector3::new(-2.0, 0.1, 4.0),
        ] {
            assert!((sim.apply(&p) - affine.apply(&p)).norm() < 1e-12);
        }
    }
}
