//! The ultraspherical operator L f = (1-z^2) f'' - 2 z f' (the symmetric
//! reduction of the Laplace-Beltrami operator on S^2) and its inverse on
//! mean-zero fields.
//!
//! L is diagonal in the Legendre basis with L P_l = -l(l+1) P_l, which gives
//! a second, independent route to apply it and the natural way to invert it.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::Geometry;

/// Apply L f = nu f'' + nu' f' with nu = 1 - z^2, via the differentiation
/// matrix.
pub fn ultraspherical_apply(f: &Field) -> Result<Field> {
    f.expect_geometry(Geometry::SphereZ)?;
    let grid = f.grid();
    let d1 = grid.diff_apply(f.values());
    let d2 = grid.diff_apply(&d1);
    let values: Vec<f64> = grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(k, &z)| (1.0 - z * z) * d2[k] - 2.0 * z * d1[k])
        .collect();
    Field::from_values(grid.clone(), Geometry::SphereZ, values)
}

/// Apply L through the Legendre transform: coefficients scale by -l(l+1).
/// Equal to `ultraspherical_apply` on the interpolation space; kept as an
/// independent route for cross-checks.
pub fn ultraspherical_apply_coeff(f: &Field) -> Result<Field> {
    f.expect_geometry(Geometry::SphereZ)?;
    let grid = f.grid();
    let mut c = grid.to_coeffs(f.values());
    for (l, cl) in c.iter_mut().enumerate() {
        *cl *= -((l * (l + 1)) as f64);
    }
    Field::from_values(grid.clone(), Geometry::SphereZ, grid.from_coeffs(&c))
}

/// Solve (-L) h = f for mean-zero f; h is returned mean-zero. The Legendre
/// coefficients of f are divided by the eigenvalues l(l+1), l >= 1.
pub fn inverse_laplacian_sphere(f: &Field) -> Result<Field> {
    f.expect_geometry(Geometry::SphereZ)?;
    let mean = f.integrate();
    let scale = f.max_abs().max(1.0);
    if mean.abs() > 1e-10 * scale {
        return Err(Error::NonzeroMean(mean));
    }
    let grid = f.grid();
    let mut c = grid.to_coeffs(f.values());
    c[0] = 0.0;
    for l in 1..c.len() {
        c[l] /= (l * (l + 1)) as f64;
    }
    Field::from_values(grid.clone(), Geometry::SphereZ, grid.from_coeffs(&c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::LegendreGrid;
    use std::sync::Arc;

    fn grid(n: usize) -> Arc<LegendreGrid> {
        Arc::new(LegendreGrid::new(n).unwrap())
    }

    #[test]
    fn l_on_first_legendre_modes() {
        let g = grid(32);
        // L P_1 = -2 P_1
        let f = Field::from_fn(&g, Geometry::SphereZ, |z| z).unwrap();
        let lf = ultraspherical_apply(&f).unwrap();
        for (k, &z) in g.nodes().iter().enumerate() {
            assert!((lf.values()[k] + 2.0 * z).abs() < 1e-11);
        }
        // L z^2 = 2 - 6 z^2 by direct algebra.
        let f2 = Field::from_fn(&g, Geometry::SphereZ, |z| z * z).unwrap();
        let lf2 = ultraspherical_apply(&f2).unwrap();
        for (k, &z) in g.nodes().iter().enumerate() {
            assert!((lf2.values()[k] - (2.0 - 6.0 * z * z)).abs() < 1e-10);
        }
    }

    #[test]
    fn matrix_and_coefficient_routes_agree() {
        let g = grid(48);
        let f = Field::from_fn(&g, Geometry::SphereZ, |z| (1.3 * z).cos() + 0.2 * z).unwrap();
        let a = ultraspherical_apply(&f).unwrap();
        let b = ultraspherical_apply_coeff(&f).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
    }

    #[test]
    fn bilinear_identity_on_degree_six_polynomial() {
        // <f, L f> = -integral |f'|^2 nu dz, both sides by quadrature.
        let g = grid(32);
        let f = Field::from_fn(&g, Geometry::SphereZ, |z| {
            0.3 - 0.8 * z + 0.5 * z.powi(3) + 0.11 * z.powi(6)
        })
        .unwrap();
        let lf = ultraspherical_apply(&f).unwrap();
        let lhs: f64 = g.quad(
            &f.values()
                .iter()
                .zip(lf.values())
                .map(|(a, b)| a * b)
                .collect::<Vec<_>>(),
        );
        let df = f.deriv_z();
        let rhs: f64 = -g.quad(
            &df.iter()
                .zip(g.nodes())
                .map(|(d, &z)| d * d * (1.0 - z * z))
                .collect::<Vec<_>>(),
        );
        assert!((lhs - rhs).abs() < 1e-11, "{lhs} vs {rhs}");
    }

    #[test]
    fn inverse_laplacian_eigenfunctions() {
        let g = grid(32);
        // (-L)^{-1} z = z/2 (l = 1, eigenvalue 2).
        let f = Field::from_fn(&g, Geometry::SphereZ, |z| z).unwrap();
        let h = inverse_laplacian_sphere(&f).unwrap();
        for (k, &z) in g.nodes().iter().enumerate() {
            assert!((h.values()[k] - 0.5 * z).abs() < 1e-12);
        }
        // (-L)^{-1} P_2 = P_2 / 6.
        let p2 = Field::from_fn(&g, Geometry::SphereZ, |z| 1.5 * z * z - 0.5).unwrap();
        let h2 = inverse_laplacian_sphere(&p2).unwrap();
        for (k, v) in h2.values().iter().enumerate() {
            assert!((v - p2.values()[k] / 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_laplacian_round_trip() {
        // f = P_1 + P_3: -L (-L)^{-1} f = f.
        let g = grid(32);
        let f = Field::from_fn(&g, Geometry::SphereZ, |z| z + (2.5 * z.powi(3) - 1.5 * z)).unwrap();
        let h = inverse_laplacian_sphere(&f).unwrap();
        let back = ultraspherical_apply(&h).unwrap();
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!((-a - b).abs() < 1e-11);
        }
        assert!(h.integrate().abs() < 1e-13);
    }

    #[test]
    fn inverse_laplacian_rejects_nonzero_mean() {
        let g = grid(16);
        let f = Field::from_fn(&g, Geometry::SphereZ, |z| 1.0 + z).unwrap();
        assert!(matches!(
            inverse_laplacian_sphere(&f),
            Err(Error::NonzeroMean(_))
        ));
    }

    #[test]
    fn wrong_geometry_is_an_error() {
        let g = grid(16);
        let f = Field::from_fn(&g, Geometry::EuclideanR, |r| r).unwrap();
        assert!(ultraspherical_apply(&f).is_err());
    }
}
