//! Rotation algebra in three dimensions.
//!
//! Convention used throughout the crate: rotations are *active* and
//! *right-handed*, acting on column vectors. `Rotation::from_axis_angle(e_z, π/2)`
//! takes `e_x` to `e_y`. Composition follows operator order, so
//! [`compose(later, earlier)`](compose) applies `earlier` first.

use nalgebra::{Matrix3, Quaternion, Unit, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Tolerance on `|v| = 1` accepted by [`UnitVector3::new`].
pub const UNIT_TOL: f64 = 1e-12;
/// Below this angle [`Rotation::to_axis_angle`] reports the identity axis `e_z`.
pub const ANGLE_EPS: f64 = 1e-9;

/// A direction in R³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct UnitVector3(Vector3<f64>);

impl UnitVector3 {
    pub const X: Self = Self(Vector3::new(1.0, 0.0, 0.0));
    pub const Y: Self = Self(Vector3::new(0.0, 1.0, 0.0));
    pub const Z: Self = Self(Vector3::new(0.0, 0.0, 1.0));

    /// Strict constructor: the components must already have unit length
    /// within [`UNIT_TOL`]. The stored value is renormalized.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Vector3::new(x, y, z);
        let n = v.norm();
        if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::Normalization(x, y, z));
        }
        Ok(Self(v / n))
    }

    /// Normalizing constructor; fails only for zero or non-finite input.
    pub fn normalize(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::from_vector(Vector3::new(x, y, z))
    }

    pub fn from_vector(v: Vector3<f64>) -> Result<Self> {
        let n = v.norm();
        if !n.is_finite() || n < 1e-300 {
            return Err(Error::Normalization(v.x, v.y, v.z));
        }
        Ok(Self(v / n))
    }

    /// Renormalizes a vector known to be close to unit length (result of
    /// rotating a unit vector). Falls back to `e_z` only for a zero vector,
    /// which cannot arise from length-preserving operations.
    pub(crate) fn renormalized(v: Vector3<f64>) -> Self {
        Self::from_vector(v).unwrap_or(Self::Z)
    }

    /// `(cos λ cos φ, cos λ sin φ, sin λ)` for phase `φ` and latitude `λ`.
    pub fn from_phase(phi: f64, latitude: f64) -> Self {
        let (sl, cl) = latitude.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self(Vector3::new(cl * cp, cl * sp, sl))
    }

    pub fn x(&self) -> f64 {
        self.0.x
    }
    pub fn y(&self) -> f64 {
        self.0.y
    }
    pub fn z(&self) -> f64 {
        self.0.z
    }

    pub fn as_vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.0.x, self.0.y, self.0.z]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.dot(&other.0)
    }

    /// Azimuthal angle in (−π, π].
    pub fn phase(&self) -> f64 {
        self.0.y.atan2(self.0.x)
    }

    pub fn latitude(&self) -> f64 {
        self.0.z.clamp(-1.0, 1.0).asin()
    }

    pub fn is_equatorial(&self, tol: f64) -> bool {
        self.0.z.abs() <= tol
    }

    /// Euclidean distance between the two points on the sphere.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.0 - other.0).norm()
    }
}

impl std::ops::Neg for UnitVector3 {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl TryFrom<[f64; 3]> for UnitVector3 {
    type Error = Error;
    fn try_from(a: [f64; 3]) -> Result<Self> {
        Self::normalize(a[0], a[1], a[2])
    }
}

impl From<UnitVector3> for [f64; 3] {
    fn from(v: UnitVector3) -> Self {
        v.to_array()
    }
}

/// Equatorial or latitude-tilted axis from a phase; see [`UnitVector3::from_phase`].
pub fn axis_from_phase(phi: f64, latitude: f64) -> UnitVector3 {
    UnitVector3::from_phase(phi, latitude)
}

/// Axis-angle vector: direction is the axis, magnitude the angle in radians.
/// Also used for non-unit quantities such as centroids and error-expansion
/// coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct RotationVector(pub Vector3<f64>);

impl RotationVector {
    pub fn zero() -> Self {
        Self(Vector3::zeros())
    }

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self(Vector3::new(x, y, z))
    }

    pub fn magnitude(&self) -> f64 {
        self.0.norm()
    }

    pub fn to_rotation(&self) -> Rotation {
        Rotation(UnitQuaternion::from_scaled_axis(self.0))
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.0.x, self.0.y, self.0.z]
    }
}

impl From<[f64; 3]> for RotationVector {
    fn from(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl From<RotationVector> for [f64; 3] {
    fn from(v: RotationVector) -> Self {
        v.to_array()
    }
}

/// An element of SO(3), stored as a unit quaternion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(UnitQuaternion<f64>);

impl Default for Rotation {
    fn default() -> Self {
        Self::identity()
    }
}

impl Rotation {
    pub fn identity() -> Self {
        Self(UnitQuaternion::identity())
    }

    pub fn from_axis_angle(axis: &UnitVector3, beta: f64) -> Self {
        Self(UnitQuaternion::from_axis_angle(
            &Unit::new_unchecked(axis.0),
            beta,
        ))
    }

    /// Rotation whose matrix is `m`; `m` must be orthogonal with det +1.
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        Self(UnitQuaternion::from_matrix(m))
    }

    /// Canonical axis-angle pair with angle in `[0, π]`.
    ///
    /// For angles below [`ANGLE_EPS`] the axis is `e_z`. Within `ANGLE_EPS`
    /// of π both antipodal axes describe the same rotation and the one with
    /// the lexicographically largest components is returned.
    pub fn to_axis_angle(&self) -> (UnitVector3, f64) {
        let q = self.0.quaternion();
        let (w, v) = if q.w < 0.0 {
            (-q.w, -q.imag())
        } else {
            (q.w, q.imag())
        };
        let angle = 2.0 * v.norm().atan2(w);
        if angle < ANGLE_EPS {
            return (UnitVector3::Z, angle);
        }
        let mut axis = UnitVector3::renormalized(v);
        if PI - angle < ANGLE_EPS && lex_less(&axis, &-axis) {
            axis = -axis;
        }
        (axis, angle)
    }

    /// Rotation angle in `[0, π]`.
    pub fn angle(&self) -> f64 {
        self.to_axis_angle().1
    }

    /// Principal logarithm as an axis-angle vector (magnitude in `[0, π]`).
    pub fn rotation_vector(&self) -> RotationVector {
        let q = self.0.quaternion();
        let (w, v) = if q.w < 0.0 {
            (-q.w, -q.imag())
        } else {
            (q.w, q.imag())
        };
        let s = v.norm();
        if s < 1e-300 {
            return RotationVector::zero();
        }
        let angle = 2.0 * s.atan2(w);
        RotationVector(v * (angle / s))
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.inverse())
    }

    /// `self` applied after `earlier`.
    pub fn after(&self, earlier: &Rotation) -> Self {
        compose(self, earlier)
    }

    pub fn rotate(&self, v: &UnitVector3) -> UnitVector3 {
        UnitVector3::renormalized(self.0.transform_vector(&v.0))
    }

    /// Rotates an arbitrary (non-unit) vector.
    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0.transform_vector(v)
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        self.0.to_rotation_matrix().into_inner()
    }

    pub fn quaternion(&self) -> &UnitQuaternion<f64> {
        &self.0
    }

    /// Geodesic distance on SO(3): the angle of `self⁻¹·other`.
    pub fn distance(&self, other: &Rotation) -> f64 {
        compose(&self.inverse(), other).angle()
    }
}

/// Applies `earlier` first, then `later`. The result is renormalized so that
/// long chains do not drift off the unit sphere.
pub fn compose(later: &Rotation, earlier: &Rotation) -> Rotation {
    let q: Quaternion<f64> = later.0.into_inner() * earlier.0.into_inner();
    Rotation(UnitQuaternion::new_normalize(q))
}

pub fn rotate(r: &Rotation, v: &UnitVector3) -> UnitVector3 {
    r.rotate(v)
}

fn lex_less(a: &UnitVector3, b: &UnitVector3) -> bool {
    const T: f64 = 1e-12;
    for (x, y) in a.to_array().iter().zip(b.to_array().iter()) {
        if (x - y).abs() > T {
            return x < y;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn close(a: &UnitVector3, b: &UnitVector3, tol: f64) -> bool {
        a.distance(b) < tol
    }

    #[test]
    fn right_hand_rule() {
        let r = Rotation::from_axis_angle(&UnitVector3::Z, PI / 2.0);
        assert!(close(&r.rotate(&UnitVector3::X), &UnitVector3::Y, 1e-15));
        let r = Rotation::from_axis_angle(&UnitVector3::X, PI);
        assert!(close(&r.rotate(&UnitVector3::Z), &-UnitVector3::Z, 1e-15));
        let r = Rotation::from_axis_angle(&UnitVector3::Z, 0.0);
        assert_eq!(r.angle(), 0.0);
    }

    #[test]
    fn axis_angle_canonicalization() {
        let (a, t) = Rotation::identity().to_axis_angle();
        assert_eq!(a, UnitVector3::Z);
        assert_eq!(t, 0.0);

        let (a, t) = Rotation::from_axis_angle(&UnitVector3::Y, PI / 3.0).to_axis_angle();
        assert!(close(&a, &UnitVector3::Y, 1e-12));
        assert_abs_diff_eq!(t, PI / 3.0, epsilon = 1e-12);

        let (a, t) = Rotation::from_axis_angle(&UnitVector3::Y, -PI / 3.0).to_axis_angle();
        assert!(close(&a, &-UnitVector3::Y, 1e-12));
        assert_abs_diff_eq!(t, PI / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn pi_rotation_tie_break() {
        for axis in [UnitVector3::X, -UnitVector3::X, UnitVector3::Y, -UnitVector3::Z] {
            let (a, t) = Rotation::from_axis_angle(&axis, PI).to_axis_angle();
            assert_abs_diff_eq!(t, PI, epsilon = 1e-12);
            let expect = if lex_less(&axis, &-axis) { -axis } else { axis };
            assert!(close(&a, &expect, 1e-12), "{a:?}");
        }
        let d = UnitVector3::normalize(1.0, -1.0, 0.0).unwrap();
        let (a, _) = Rotation::from_axis_angle(&-d, PI).to_axis_angle();
        assert!(close(&a, &d, 1e-12));
    }

    #[test]
    fn compose_order() {
        let rx = Rotation::from_axis_angle(&UnitVector3::X, PI);
        assert!(compose(&rx, &rx).angle() < 1e-12);

        // R_z(π/2)·R_x(π/2): e_z → −e_y → e_x
        let rz = Rotation::from_axis_angle(&UnitVector3::Z, PI / 2.0);
        let rx = Rotation::from_axis_angle(&UnitVector3::X, PI / 2.0);
        let v = compose(&rz, &rx).rotate(&UnitVector3::Z);
        assert!(close(&v, &UnitVector3::X, 1e-15));
        let m = rz.matrix() * rx.matrix();
        assert_abs_diff_eq!(compose(&rz, &rx).matrix(), m, epsilon = 1e-15);

        let r = Rotation::from_axis_angle(&UnitVector3::Y, 0.3);
        assert!(compose(&r, &Rotation::identity()).distance(&r) < 1e-15);
    }

    #[test]
    fn body_diagonal_cycles_axes() {
        let d = UnitVector3::normalize(1.0, 1.0, 1.0).unwrap();
        let r = Rotation::from_axis_angle(&d, 2.0 * PI / 3.0);
        assert!(close(&r.rotate(&UnitVector3::X), &UnitVector3::Y, 1e-15));
        assert!(close(&r.rotate(&UnitVector3::Y), &UnitVector3::Z, 1e-15));
        let expected = Matrix3::new(0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        assert_abs_diff_eq!(r.matrix(), expected, epsilon = 1e-15);
    }

    #[test]
    fn phase_axes() {
        assert!(close(&axis_from_phase(0.0, 0.0), &UnitVector3::X, 1e-15));
        assert!(close(&axis_from_phase(PI / 2.0, 0.0), &UnitVector3::Y, 1e-15));
        assert!(close(&axis_from_phase(0.0, PI / 2.0), &UnitVector3::Z, 1e-15));
    }

    #[test]
    fn strict_constructor_rejects_non_unit() {
        assert!(UnitVector3::new(1.0, 1.0, 0.0).is_err());
        assert!(UnitVector3::new(0.0, 0.0, 1.0).is_ok());
        assert!(UnitVector3::normalize(0.0, 0.0, 0.0).is_err());
        assert!(UnitVector3::normalize(f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn rotation_vector_round_trip() {
        let e = UnitVector3::normalize(0.2, -0.5, 0.7).unwrap();
        let r = Rotation::from_axis_angle(&e, 2.5);
        let v = r.rotation_vector();
        assert_abs_diff_eq!(v.magnitude(), 2.5, epsilon = 1e-12);
        assert!(v.to_rotation().distance(&r) < 1e-12);
        assert_eq!(Rotation::identity().rotation_vector(), RotationVector::zero());
    }
}
