//! A `Field` is a vector of point values on a shared Legendre grid, tagged
//! with the geometry its native coordinate lives in. All integrals against
//! the geometry's probability measure (d sigma, d mu, or xi ds) and the
//! Dirichlet integrals are computed here, each through its own native
//! coordinate path so that cross-geometry agreement is a real consistency
//! check rather than an identity.

use crate::error::{Error, Result};
use crate::geometry::{self, Geometry};
use crate::grid::LegendreGrid;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<LegendreGrid>,
    geometry: Geometry,
    values: Vec<f64>,
}

impl Field {
    pub fn from_values(grid: Arc<LegendreGrid>, geometry: Geometry, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteField);
        }
        Ok(Self { grid, geometry, values })
    }

    /// Sample a function of the native coordinate (z, r or s) at the nodes.
    pub fn from_fn(grid: &Arc<LegendreGrid>, geometry: Geometry, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&z| f(geometry.coord_of_z(z)))
            .collect();
        Self::from_values(grid.clone(), geometry, values)
    }

    pub fn grid(&self) -> &Arc<LegendreGrid> {
        &self.grid
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Native coordinates of the nodes (z, r or s depending on geometry).
    pub fn coords(&self) -> Vec<f64> {
        self.grid
            .nodes()
            .iter()
            .map(|&z| self.geometry.coord_of_z(z))
            .collect()
    }

    pub fn expect_geometry(&self, expected: Geometry) -> Result<()> {
        if self.geometry != expected {
            return Err(Error::GeometryMismatch {
                expected,
                got: self.geometry,
            });
        }
        Ok(())
    }

    /// Re-tag the field in another geometry. The three coordinates are glued
    /// by u(x) = v(omega, z) = w(theta, s) on the shared grid, so the values
    /// are carried over pointwise.
    pub fn reparameterize(&self, to: Geometry) -> Field {
        Field {
            grid: self.grid.clone(),
            geometry: to,
            values: self.values.clone(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Field> {
        let values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        Field::from_values(self.grid.clone(), self.geometry, values)
    }

    /// Raw spectral derivative with respect to z.
    pub fn deriv_z(&self) -> Vec<f64> {
        self.grid.diff_apply(&self.values)
    }

    /// Derivative with respect to the native coordinate.
    pub fn derivative(&self) -> Result<Field> {
        let dz = self.deriv_z();
        let values: Vec<f64> = self
            .grid
            .nodes()
            .iter()
            .zip(&dz)
            .map(|(&z, &d)| d / self.geometry.dcoord_dz(z))
            .collect();
        Field::from_values(self.grid.clone(), self.geometry, values)
    }

    /// Interpolated value at a point of the native coordinate.
    pub fn eval(&self, coord: f64) -> f64 {
        let z = match self.geometry {
            Geometry::SphereZ => coord,
            Geometry::EuclideanR => geometry::z_of_r(coord),
            Geometry::CylinderS => geometry::z_of_s(coord),
        };
        self.grid.interpolate(&self.values, z)
    }

    /// Integral against the geometry's probability measure:
    /// d sigma on the sphere, d mu = pi^-1 (1+|x|^2)^-2 dx on the plane,
    /// xi(s) ds = (1/2) sech^2(s) ds on the line.
    pub fn integrate(&self) -> f64 {
        match self.geometry {
            Geometry::SphereZ => 0.5 * self.grid.quad(&self.values),
            Geometry::EuclideanR => {
                let nodes = self.grid.nodes();
                let weights = self.grid.weights();
                let mut acc = 0.0;
                for k in 0..self.len() {
                    let r = geometry::r_of_z(nodes[k]);
                    let q = 1.0 + r * r;
                    // d mu pulled back: (1/pi)(1+r^2)^-2 * 2 pi r dr/dz dz
                    let jac = 2.0 * r / (q * q) / geometry::dz_dr(r);
                    acc += weights[k] * self.values[k] * jac;
                }
                acc
            }
            Geometry::CylinderS => {
                let nodes = self.grid.nodes();
                let weights = self.grid.weights();
                let mut acc = 0.0;
                for k in 0..self.len() {
                    let s = geometry::s_of_z(nodes[k]);
                    let c = s.cosh();
                    let xi = 0.5 / (c * c);
                    acc += weights[k] * self.values[k] * xi / (-geometry::dz_ds(s));
                }
                acc
            }
        }
    }

    /// Lebesgue-type integral in the native geometry: 4 pi * integral d sigma
    /// over S^2, integral dx over R^2, or 2 pi * integral ds over the
    /// cylinder (the angular factor of C = S^1 x R).
    pub fn integrate_lebesgue(&self) -> f64 {
        match self.geometry {
            Geometry::SphereZ => 4.0 * std::f64::consts::PI * self.integrate(),
            Geometry::EuclideanR => {
                let nodes = self.grid.nodes();
                let weights = self.grid.weights();
                let mut acc = 0.0;
                for k in 0..self.len() {
                    let r = geometry::r_of_z(nodes[k]);
                    let jac = 2.0 * std::f64::consts::PI * r / geometry::dz_dr(r);
                    acc += weights[k] * self.values[k] * jac;
                }
                acc
            }
            Geometry::CylinderS => {
                let nodes = self.grid.nodes();
                let weights = self.grid.weights();
                let mut acc = 0.0;
                for k in 0..self.len() {
                    let s = geometry::s_of_z(nodes[k]);
                    acc += weights[k] * self.values[k] / (-geometry::dz_ds(s))
                        * 2.0
                        * std::f64::consts::PI;
                }
                acc
            }
        }
    }

    /// Dirichlet integral in the native geometry:
    /// integral |grad v|^2 d sigma on S^2, integral |grad u|^2 dx on R^2,
    /// integral |grad w|^2 dy on the cylinder.
    pub fn dirichlet(&self) -> f64 {
        let dz = self.deriv_z();
        let nodes = self.grid.nodes();
        let weights = self.grid.weights();
        match self.geometry {
            Geometry::SphereZ => {
                // |grad v|^2 = (1 - z^2) |f'(z)|^2 against d sigma.
                let mut acc = 0.0;
                for k in 0..self.len() {
                    let nu = 1.0 - nodes[k] * nodes[k];
                    acc += 0.5 * weights[k] * nu * dz[k] * dz[k];
                }
                acc
            }
            Geometry::EuclideanR => {
                let mut acc = 0.0;
                for k in 0..self.len() {
                    let r = geometry::r_of_z(nodes[k]);
                    let du_dr = dz[k] * geometry::dz_dr(r);
                    let jac = 2.0 * std::f64::consts::PI * r / geometry::dz_dr(r);
                    acc += weights[k] * du_dr * du_dr * jac;
                }
                acc
            }
            Geometry::CylinderS => {
                let mut acc = 0.0;
                for k in 0..self.len() {
                    let s = geometry::s_of_z(nodes[k]);
                    let dw_ds = dz[k] * geometry::dz_ds(s);
                    acc += weights[k] * dw_ds * dw_ds / (-geometry::dz_ds(s))
                        * 2.0
                        * std::f64::consts::PI;
                }
                acc
            }
        }
    }

    /// Max |value| over the grid.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |a, &v| a.max(v.abs()))
    }
}
