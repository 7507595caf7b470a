//! Vectors, quaternions, rotation matrices and Euler angles.
//!
//! Conventions used throughout the crate:
//!
//! * quaternions are stored `(x, y, z, w)` with the scalar part last;
//! * Euler angles are in degrees and decompose a rotation as
//!   `R = Rz(yaw) · Ry(roll) · Rx(pitch)`, i.e. pitch is the rotation about
//!   the x axis, roll about y and yaw about z.

use core::ops::{Add, AddAssign, Mul, Neg, Sub};
#[allow(unused_imports)]
use num_traits::Float;

const DEG: f64 = core::f64::consts::PI / 180.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub const fn from_array(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }

    pub const fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Squared Euclidean distance. Every nearest-neighbour search in the crate
    /// goes through this function so that ties resolve identically.
    #[inline]
    pub fn distance_squared(self, o: Vec3) -> f64 {
        let dx = self.x - o.x;
        let dy = self.y - o.y;
        let dz = self.z - o.z;
        dx * dx + dy * dy + dz * dz
    }

    pub fn distance(self, o: Vec3) -> f64 {
        self.distance_squared(o).sqrt()
    }

    pub fn scale(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn min(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn max(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    pub fn axis(self, i: usize) -> f64 {
        match i {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        self.scale(s)
    }
}

/// Row-major 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3 {
    pub m: [[f64; 3]; 3],
}

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3 {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    pub fn rot_x(deg: f64) -> Mat3 {
        let (s, c) = (deg * DEG).sin_cos();
        Mat3 {
            m: [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]],
        }
    }

    pub fn rot_y(deg: f64) -> Mat3 {
        let (s, c) = (deg * DEG).sin_cos();
        Mat3 {
            m: [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]],
        }
    }

    pub fn rot_z(deg: f64) -> Mat3 {
        let (s, c) = (deg * DEG).sin_cos();
        Mat3 {
            m: [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    pub fn transpose(&self) -> Mat3 {
        let m = &self.m;
        Mat3 {
            m: [
                [m[0][0], m[1][0], m[2][0]],
                [m[0][1], m[1][1], m[2][1]],
                [m[0][2], m[1][2], m[2][2]],
            ],
        }
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Largest absolute element-wise difference.
    pub fn max_abs_diff(&self, o: &Mat3) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..3 {
            for c in 0..3 {
                d = d.max((self.m[r][c] - o.m[r][c]).abs());
            }
        }
        d
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, o: Mat3) -> Mat3 {
        let mut out = [[0.0; 3]; 3];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = self.m[r][0] * o.m[0][c] + self.m[r][1] * o.m[1][c] + self.m[r][2] * o.m[2][c];
            }
        }
        Mat3 { m: out }
    }
}

impl Mul<Vec3> for Mat3 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        let m = &self.m;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }
}

/// Rotation quaternion, scalar part `w` last.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
}

impl Default for Quaternion {
    fn default() -> Self {
        Quaternion::IDENTITY
    }
}

impl Quaternion {
    pub const IDENTITY: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64, w: f64) -> Self {
        Quaternion { x, y, z, w }
    }

    pub const fn to_array(self) -> [f64; 4] {
        [self.x, self.y, self.z, self.w]
    }

    pub const fn from_array(a: [f64; 4]) -> Self {
        Quaternion::new(a[0], a[1], a[2], a[3])
    }

    pub fn from_axis_angle(axis: Vec3, deg: f64) -> Quaternion {
        let n = axis.norm();
        if n == 0.0 {
            return Quaternion::IDENTITY;
        }
        let (s, c) = (0.5 * deg * DEG).sin_cos();
        let a = axis.scale(s / n);
        Quaternion::new(a.x, a.y, a.z, c)
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z + self.w * self.w).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite() && self.w.is_finite()
    }

    /// Unit quaternion in the same direction, or `None` when the norm is zero
    /// (below `1e-12`) or not finite.
    pub fn normalized(self) -> Option<Quaternion> {
        let n = self.norm();
        if !n.is_finite() || n < 1e-12 {
            return None;
        }
        Some(Quaternion::new(
            self.x / n,
            self.y / n,
            self.z / n,
            self.w / n,
        ))
    }

    pub fn conjugate(self) -> Quaternion {
        Quaternion::new(-self.x, -self.y, -self.z, self.w)
    }

    /// Rotation matrix of a unit quaternion.
    pub fn to_matrix(self) -> Mat3 {
        let Quaternion { x, y, z, w } = self;
        Mat3 {
            m: [
                [
                    1.0 - 2.0 * (y * y + z * z),
                    2.0 * (x * y - w * z),
                    2.0 * (x * z + w * y),
                ],
                [
                    2.0 * (x * y + w * z),
                    1.0 - 2.0 * (x * x + z * z),
                    2.0 * (y * z - w * x),
                ],
                [
                    2.0 * (x * z - w * y),
                    2.0 * (y * z + w * x),
                    1.0 - 2.0 * (x * x + y * y),
                ],
            ],
        }
    }

    /// Unit quaternion of an orthonormal matrix (Shepperd's method), with
    /// non-negative `w`.
    pub fn from_matrix(r: &Mat3) -> Quaternion {
        let m = &r.m;
        let trace = m[0][0] + m[1][1] + m[2][2];
        let q = if trace > 0.0 {
            let s = (trace + 1.0).sqrt() * 2.0;
            Quaternion::new(
                (m[2][1] - m[1][2]) / s,
                (m[0][2] - m[2][0]) / s,
                (m[1][0] - m[0][1]) / s,
                0.25 * s,
            )
        } else if m[0][0] > m[1][1] && m[0][0] > m[2][2] {
            let s = (1.0 + m[0][0] - m[1][1] - m[2][2]).sqrt() * 2.0;
            Quaternion::new(
                0.25 * s,
                (m[0][1] + m[1][0]) / s,
                (m[0][2] + m[2][0]) / s,
                (m[2][1] - m[1][2]) / s,
            )
        } else if m[1][1] > m[2][2] {
            let s = (1.0 + m[1][1] - m[0][0] - m[2][2]).sqrt() * 2.0;
            Quaternion::new(
                (m[0][1] + m[1][0]) / s,
                0.25 * s,
                (m[1][2] + m[2][1]) / s,
                (m[0][2] - m[2][0]) / s,
            )
        } else {
            let s = (1.0 + m[2][2] - m[0][0] - m[1][1]).sqrt() * 2.0;
            Quaternion::new(
                (m[0][2] + m[2][0]) / s,
                (m[1][2] + m[2][1]) / s,
                0.25 * s,
                (m[1][0] - m[0][1]) / s,
            )
        };
        let q = q.normalized().unwrap_or(Quaternion::IDENTITY);
        if q.w < 0.0 {
            Quaternion::new(-q.x, -q.y, -q.z, -q.w)
        } else {
            q
        }
    }

    pub fn rotate(self, v: Vec3) -> Vec3 {
        self.to_matrix() * v
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    /// Hamilton product; `a * b` applies `b` first.
    fn mul(self, o: Quaternion) -> Quaternion {
        let (a, b) = (self, o);
        Quaternion::new(
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        )
    }
}

/// Euler triple in degrees: `pitch` about x, `roll` about y, `yaw` about z.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EulerAngles {
    pub pitch: f64,
    pub roll: f64,
    pub yaw: f64,
}

impl EulerAngles {
    pub const ZERO: EulerAngles = EulerAngles::new(0.0, 0.0, 0.0);

    pub const fn new(pitch: f64, roll: f64, yaw: f64) -> Self {
        EulerAngles { pitch, roll, yaw }
    }

    pub fn is_finite(self) -> bool {
        self.pitch.is_finite() && self.roll.is_finite() && self.yaw.is_finite()
    }

    /// Every angle mapped into `[-180, 180)`.
    pub fn wrapped(self) -> EulerAngles {
        EulerAngles::new(
            wrap_degrees(self.pitch),
            wrap_degrees(self.roll),
            wrap_degrees(self.yaw),
        )
    }

    /// `Rz(yaw) · Ry(roll) · Rx(pitch)`, the inverse of [`quat_to_euler`].
    pub fn to_rotation(self) -> Mat3 {
        Mat3::rot_z(self.yaw) * Mat3::rot_y(self.roll) * Mat3::rot_x(self.pitch)
    }

    pub fn to_quaternion(self) -> Quaternion {
        let qz = Quaternion::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), self.yaw);
        let qy = Quaternion::from_axis_angle(Vec3::new(0.0, 1.0, 0.0), self.roll);
        let qx = Quaternion::from_axis_angle(Vec3::new(1.0, 0.0, 0.0), self.pitch);
        qz * qy * qx
    }
}

/// Maps an angle in degrees into `[-180, 180)`.
pub fn wrap_degrees(a: f64) -> f64 {
    let w = a - 360.0 * ((a + 180.0) / 360.0).floor();
    // floating rounding can land exactly on the open end
    if w >= 180.0 {
        w - 360.0
    } else {
        w
    }
}

/// Pitch/roll/yaw of a unit quaternion in degrees.
///
/// The arcsine argument is clamped to `[-1, 1]`, so the conversion is total.
/// At gimbal lock pitch is reported as zero and the shared rotation as yaw.
pub fn quat_to_euler(q: Quaternion) -> EulerAngles {
    let Quaternion { x, y, z, w } = q;
    let sin_roll = (2.0 * (w * y - x * z)).clamp(-1.0, 1.0);
    let roll = sin_roll.asin();
    if sin_roll.abs() > 1.0 - 1e-12 {
        // gimbal lock: pitch and yaw share one axis, keep it all in yaw
        let yaw = (-2.0 * (x * y - w * z)).atan2(1.0 - 2.0 * (x * x + z * z));
        return EulerAngles::new(0.0, roll / DEG, yaw / DEG);
    }
    let pitch = (2.0 * (y * z + w * x)).atan2(1.0 - 2.0 * (x * x + y * y));
    let yaw = (2.0 * (x * y + w * z)).atan2(1.0 - 2.0 * (y * y + z * z));
    EulerAngles::new(pitch / DEG, roll / DEG, yaw / DEG)
}

/// Rotation matrix for an Euler triple. Free-function form of
/// [`EulerAngles::to_rotation`].
pub fn euler_to_rotation(e: EulerAngles) -> Mat3 {
    e.to_rotation()
}
