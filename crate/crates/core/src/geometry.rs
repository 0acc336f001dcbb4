//! Angles, headings and metric helpers for the simulator state convention.
//!
//! Headings are measured clockwise from the +Y axis and live in `[0, 2π)`.
//! Elevations are measured up from the horizontal plane. Relative bearings
//! are wrapped into `(-π, π]`, positive meaning "to the right".

use core::f64::consts::{FRAC_PI_3, FRAC_PI_6, PI, TAU};
use core::ops::{Add, Mul, Sub};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum AngleError {
    #[error("angle is not finite: {0}")]
    NonFinite(f64),
}

/// Point or direction in scene coordinates (meters, z up).
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

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        libm::sqrt(self.dot(self))
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (other - self).norm()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(v: [f64; 3]) -> Self {
        Vec3::new(v[0], v[1], v[2])
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, rhs: f64) -> Vec3 {
        Vec3::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

/// Result of [`heading_to`]. `degenerate` is set when the two points share
/// the same horizontal position, in which case `radians` is 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Heading {
    pub radians: f64,
    pub degenerate: bool,
}

/// Heading from `from` toward `to`, clockwise from +Y, in `[0, 2π)`.
pub fn heading_to(from: Vec3, to: Vec3) -> Heading {
    let dx = to.x - from.x;
    let dy = to.y - from.y;
    if dx == 0.0 && dy == 0.0 {
        return Heading {
            radians: 0.0,
            degenerate: true,
        };
    }
    let mut h = libm::atan2(dx, dy);
    if h < 0.0 {
        h += TAU;
    }
    // atan2 can return a tiny negative that rounds to exactly 2π after the shift.
    if h >= TAU {
        h -= TAU;
    }
    Heading {
        radians: h,
        degenerate: false,
    }
}

/// Elevation angle from `from` toward `to`, in `[-π/2, π/2]`.
pub fn elevation_to(from: Vec3, to: Vec3) -> f64 {
    let d = to - from;
    let horizontal = libm::hypot(d.x, d.y);
    if horizontal == 0.0 && d.z == 0.0 {
        return 0.0;
    }
    libm::atan2(d.z, horizontal)
}

fn round_half_even(x: f64) -> f64 {
    let r = libm::round(x);
    if libm::fabs(x - libm::trunc(x)) == 0.5 {
        2.0 * libm::round(x / 2.0)
    } else {
        r
    }
}

pub(crate) fn wrap(x: f64) -> f64 {
    let mut r = x - TAU * round_half_even(x / TAU);
    if r <= -PI {
        r += TAU;
    } else if r > PI {
        r -= TAU;
    }
    r
}

/// Wraps an angle into `(-π, π]`. `-π` maps to `π`.
pub fn wrap_angle(x: f64) -> Result<f64, AngleError> {
    if !x.is_finite() {
        return Err(AngleError::NonFinite(x));
    }
    Ok(wrap(x))
}

/// Normalizes any finite angle into `[0, 2π)`.
pub fn normalize_heading(x: f64) -> f64 {
    let mut h = x - TAU * libm::floor(x / TAU);
    if h >= TAU {
        h -= TAU;
    }
    if h < 0.0 {
        h = 0.0;
    }
    h
}

/// Signed angle from the viewer's heading to the target heading.
/// Positive means the target is clockwise, i.e. to the viewer's right.
pub fn relative_bearing(viewer_heading: f64, target_heading: f64) -> f64 {
    wrap(target_heading - viewer_heading)
}

/// Area proxy of an oriented box: the face spanned by its two largest
/// half-extents, `4 · r_a · r_b`.
pub fn projected_area(radii: [f64; 3]) -> f64 {
    let mut r = radii;
    // three-element sort, descending
    if r[0] < r[1] {
        r.swap(0, 1);
    }
    if r[1] < r[2] {
        r.swap(1, 2);
    }
    if r[0] < r[1] {
        r.swap(0, 1);
    }
    4.0 * r[0] * r[1]
}

/// Angular gate defining what is "in view" from a heading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FovConfig {
    pub half_width: f64,
    pub elevation_lo: f64,
    pub elevation_hi: f64,
}

impl Default for FovConfig {
    fn default() -> Self {
        FovConfig {
            half_width: FRAC_PI_3,
            elevation_lo: -FRAC_PI_6,
            elevation_hi: FRAC_PI_6,
        }
    }
}

impl FovConfig {
    pub fn is_valid(&self) -> bool {
        self.half_width > 0.0 && self.half_width <= PI && self.elevation_lo < self.elevation_hi
    }
}

/// Closed-bound field-of-view test on a wrapped bearing and an elevation.
pub fn in_fov(bearing: f64, elevation: f64, cfg: &FovConfig) -> bool {
    libm::fabs(bearing) <= cfg.half_width
        && elevation >= cfg.elevation_lo
        && elevation <= cfg.elevation_hi
}
