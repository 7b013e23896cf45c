//! The three geometries sharing one Legendre grid.
//!
//! A symmetric function lives on the sphere as f(z), z = cos(theta); the
//! stereographic projection z = (r^2 - 1)/(r^2 + 1) carries it to a radial
//! function on the plane, and s = -log r to an even-symmetric function on the
//! cylinder axis. All measures pull back to (1/2) dz, which is what makes the
//! three inequality forms a change of variables rather than three
//! discretizations.

use serde::{Deserialize, Serialize};

/// Native coordinate of a field: z on the sphere, r on the plane, s on the
/// cylinder axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Geometry {
    SphereZ,
    EuclideanR,
    CylinderS,
}

/// r(z) = sqrt((1+z)/(1-z)), the stereographic radius.
pub fn r_of_z(z: f64) -> f64 {
    ((1.0 + z) / (1.0 - z)).sqrt()
}

/// z(r) = (r^2 - 1)/(r^2 + 1).
pub fn z_of_r(r: f64) -> f64 {
    (r * r - 1.0) / (r * r + 1.0)
}

/// s(z) = -atanh(z) = -log r.
pub fn s_of_z(z: f64) -> f64 {
    -z.atanh()
}

/// z(s) = -tanh(s).
pub fn z_of_s(s: f64) -> f64 {
    -s.tanh()
}

/// dz/dr = 4r/(1+r^2)^2, evaluated from r.
pub fn dz_dr(r: f64) -> f64 {
    let q = 1.0 + r * r;
    4.0 * r / (q * q)
}

/// dz/ds = -sech^2(s), evaluated from s.
pub fn dz_ds(s: f64) -> f64 {
    let c = s.cosh();
    -1.0 / (c * c)
}

impl Geometry {
    /// Native coordinate of the Legendre node z.
    pub fn coord_of_z(self, z: f64) -> f64 {
        match self {
            Geometry::SphereZ => z,
            Geometry::EuclideanR => r_of_z(z),
            Geometry::CylinderS => s_of_z(z),
        }
    }

    /// d(native)/dz at the Legendre node z, used by chain rules.
    pub fn dcoord_dz(self, z: f64) -> f64 {
        match self {
            Geometry::SphereZ => 1.0,
            Geometry::EuclideanR => 1.0 / dz_dr(r_of_z(z)),
            Geometry::CylinderS => 1.0 / dz_ds(s_of_z(z)),
        }
    }
}
