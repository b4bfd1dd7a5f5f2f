//! Closed-form model of `PG_2` and the sphere picture of the 2-ISP.
//!
//! For `k = 2` the dynamics started on the source stays, up to `O(1/sqrt N)`,
//! on the unit sphere in `span{ee, eN, NN}` and both the sequential stages
//! and the parallel operator act there as rotations. Coordinates of the
//! 3-space are ordered `(ee, eN, NN)`.
//!
//! Quaternions follow the half-angle convention: `(cos c, sin c * axis)`
//! rotates by `2c`. With the simulator's sign for the `eN` basis vector the
//! rotations run with the opposite handedness, so simulated trajectories
//! are reproduced by the conjugate quaternion ([`Quaternion::conjugate`]).

use std::f64::consts::SQRT_2;
use std::ops::Mul;

use nalgebra::{Matrix3, Vector3};

use crate::error::{IspError, Result};
use crate::reduced::{ReducedOperator, ReducedState};

/// `(a_ee, a_eN, a_NN)` of `PG_2^{c sqrt N}` applied to the source:
/// `(sin^2(sqrt2 c), sqrt2 sin(sqrt2 c) cos(sqrt2 c), cos^2(sqrt2 c))`.
pub fn pg2_amplitudes(c: f64) -> (f64, f64, f64) {
    let (s, co) = (SQRT_2 * c).sin_cos();
    (s * s, SQRT_2 * s * co, co * co)
}

/// `pg2_amplitudes(c)` as a `k = 2` reduced state (zero on `Ne`).
pub fn pg2_state(c: f64) -> ReducedState {
    let (ee, en, nn) = pg2_amplitudes(c);
    ReducedState::from_vector_unchecked(nalgebra::DVector::from_vec(vec![ee, en, 0.0, nn]))
}

/// Coefficient of `sqrt N` at which `PG_2` moves all weight to the sink.
pub fn pg2_full_transfer() -> f64 {
    std::f64::consts::PI / (2.0 * SQRT_2)
}

/// Restriction of a `k = 2` operator to rows/columns `(ee, eN, NN)`.
pub fn sphere_restriction(op: &ReducedOperator) -> Result<Matrix3<f64>> {
    if op.dim() != 4 {
        return Err(IspError::DimensionMismatch {
            expected: 4,
            got: op.dim(),
        });
    }
    const IDX: [usize; 3] = [0, 1, 3];
    Ok(Matrix3::from_fn(|r, c| op.matrix()[(IDX[r], IDX[c])]))
}

/// Coordinates `(ee, eN, NN)` of a `k = 2` reduced state.
pub fn sphere_coordinates(state: &ReducedState) -> Result<Vector3<f64>> {
    if state.dim() != 4 {
        return Err(IspError::DimensionMismatch {
            expected: 4,
            got: state.dim(),
        });
    }
    let a = state.amplitudes();
    Ok(Vector3::new(a[0], a[1], a[3]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    /// Vector part over `(ee, eN, NN)`.
    pub axis: Vector3<f64>,
}

impl Quaternion {
    pub fn identity() -> Self {
        Self {
            w: 1.0,
            axis: Vector3::zeros(),
        }
    }

    /// Rotation by `2 * half_angle` about the unit vector `axis`.
    pub fn from_axis_half_angle(axis: Vector3<f64>, half_angle: f64) -> Self {
        let (s, c) = half_angle.sin_cos();
        Self {
            w: c,
            axis: axis.normalize() * s,
        }
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.axis.norm_squared()).sqrt()
    }

    pub fn conjugate(&self) -> Self {
        Self {
            w: self.w,
            axis: -self.axis,
        }
    }

    pub fn rotate(&self, v: &Vector3<f64>) -> Result<Vector3<f64>> {
        Ok(quaternion_to_rotation(self)? * v)
    }
}

/// Hamilton product; `a * b` applies `b` first.
impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, rhs: Quaternion) -> Quaternion {
        Quaternion {
            w: self.w * rhs.w - self.axis.dot(&rhs.axis),
            axis: rhs.axis * self.w + self.axis * rhs.w + self.axis.cross(&rhs.axis),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereRotation {
    /// First sequential stage, fixing `ee`.
    Sg1,
    /// Second sequential stage, fixing `NN`.
    Sg2,
    /// Parallel Grover, about `(ee + NN) / sqrt 2`.
    Pg2,
}

/// Quaternion of `op^{c sqrt N}`.
pub fn quaternion_of(op: SphereRotation, c: f64) -> Quaternion {
    match op {
        SphereRotation::Sg1 => Quaternion::from_axis_half_angle(Vector3::x(), c),
        SphereRotation::Sg2 => Quaternion::from_axis_half_angle(Vector3::z(), c),
        SphereRotation::Pg2 => {
            Quaternion::from_axis_half_angle(Vector3::new(1.0, 0.0, 1.0), SQRT_2 * c)
        }
    }
}

/// Euler-Rodrigues matrix of a unit quaternion.
pub fn quaternion_to_rotation(q: &Quaternion) -> Result<Matrix3<f64>> {
    let norm = q.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(IspError::NonUnitQuaternion(norm));
    }
    let (a, b, c, d) = (q.w, q.axis.x, q.axis.y, q.axis.z);
    Ok(Matrix3::new(
        a * a + b * b - c * c - d * d,
        2.0 * (b * c - a * d),
        2.0 * (b * d + a * c),
        2.0 * (b * c + a * d),
        a * a + c * c - b * b - d * d,
        2.0 * (c * d - a * b),
        2.0 * (b * d - a * c),
        2.0 * (c * d + a * b),
        a * a + d * d - b * b - c * c,
    ))
}
