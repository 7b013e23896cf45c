//! Every functional of the inequality family: the three itemized deficits,
//! the symmetric reduction G_lambda, the quotient Q_lambda, the rigidity
//! remainder R_lambda, the Euler-Lagrange residual, the duality
//! decomposition against the logarithmic HLS inequality, and the relative
//! entropy / Fisher information pair of the fast diffusion setting.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::{self, Geometry};
use crate::operators::{inverse_laplacian_sphere, ultraspherical_apply};
use serde::Serialize;

/// Hard cap before exp() of a field value is considered an overflow.
const EXP_CAP: f64 = 700.0;

/// Itemized deficit of one inequality form. `deficit` is assembled from the
/// other three terms exactly, so a report can always be audited term by
/// term.
#[derive(Debug, Clone, Serialize)]
pub struct DeficitReport {
    /// Dirichlet term with its prefactor (1/4 on the sphere, 1/(16 pi) in
    /// the plane and on the cylinder).
    pub kinetic: f64,
    /// lambda * integral of the field against the probability measure.
    pub linear: f64,
    /// lambda * log integral of exp(field).
    pub logterm: f64,
    /// kinetic + linear - logterm.
    pub deficit: f64,
    pub lambda: f64,
}

impl DeficitReport {
    fn assemble(kinetic: f64, linear: f64, logterm: f64, lambda: f64) -> Self {
        Self {
            kinetic,
            linear,
            logterm,
            deficit: kinetic + linear - logterm,
            lambda,
        }
    }
}

/// Terms of the duality identity
/// deficit = entropy - hls + square, with f = e^u / integral e^u.
#[derive(Debug, Clone, Serialize)]
pub struct DualityReport {
    pub deficit: f64,
    /// integral f log f d sigma.
    pub entropy_term: f64,
    /// integral (f-1) (-Delta)^{-1} (f-1) d sigma.
    pub hls_term: f64,
    /// integral |(1/2) grad u - grad (-Delta)^{-1}(f-1)|^2 d sigma.
    /// With the positive-Green-operator convention used here the square
    /// closes the identity with this relative sign.
    pub square_term: f64,
    /// deficit - (entropy - hls + square); zero up to quadrature.
    pub residual: f64,
}

/// Relative entropy / Fisher information of w = v / v_infinity against the
/// Barenblatt profile with parameter D at diffusion exponent m.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyPair {
    pub e: f64,
    pub i: f64,
    pub d: f64,
    pub m: f64,
}

/// Gap of the un-recentered fast-diffusion form of the inequality, and the
/// shift that turns it into the standard deficit.
#[derive(Debug, Clone, Serialize)]
pub struct FdGapReport {
    /// (1/16 pi) integral |grad u|^2 dx - (integral e^u d mu - 1 - integral u d mu).
    pub gap: f64,
    /// c* = -log integral e^u d mu; gap(u + c*) equals the Onofri deficit.
    pub optimal_shift: f64,
}

fn check_exp_range(u: &Field) -> Result<()> {
    let m = u.values().iter().fold(f64::MIN, |a, &v| a.max(v));
    if m > EXP_CAP {
        return Err(Error::ExpOverflow(m));
    }
    Ok(())
}

/// The Onofri deficit of a field in its native geometry, lambda-weighted:
/// kinetic + lambda * (linear - log term). At lambda = 1 this is the literal
/// inequality in each of the three forms.
pub fn onofri_deficit(u: &Field, lambda: f64) -> Result<DeficitReport> {
    check_exp_range(u)?;
    let kinetic = match u.geometry() {
        Geometry::SphereZ => 0.25 * u.dirichlet(),
        Geometry::EuclideanR | Geometry::CylinderS => {
            u.dirichlet() / (16.0 * std::f64::consts::PI)
        }
    };
    let linear = lambda * u.integrate();
    let mass = u.map(f64::exp)?.integrate();
    let logterm = lambda * mass.ln();
    Ok(DeficitReport::assemble(kinetic, linear, logterm, lambda))
}

/// The symmetric reduction on the sphere, computed directly in z:
/// (1/8) int nu |f'|^2 dz + (lambda/2) int f dz - lambda log((1/2) int e^f dz).
/// Agrees with `onofri_deficit` of the same field up to quadrature rounding.
pub fn g_lambda(f: &Field, lambda: f64) -> Result<DeficitReport> {
    f.expect_geometry(Geometry::SphereZ)?;
    check_exp_range(f)?;
    let grid = f.grid();
    let df = f.deriv_z();
    let kin_vals: Vec<f64> = df
        .iter()
        .zip(grid.nodes())
        .map(|(d, &z)| (1.0 - z * z) * d * d)
        .collect();
    let kinetic = 0.125 * grid.quad(&kin_vals);
    let linear = lambda * 0.5 * grid.quad(f.values());
    let e_vals: Vec<f64> = f.values().iter().map(|&v| v.exp()).collect();
    let logterm = lambda * (0.5 * grid.quad(&e_vals)).ln();
    Ok(DeficitReport::assemble(kinetic, linear, logterm, lambda))
}

/// Quotient Q_lambda[v] = ((1/4) int |grad v|^2 + lambda int v) / log int e^v,
/// defined for fields with positive mean.
pub fn q_lambda(v: &Field, lambda: f64) -> Result<f64> {
    v.expect_geometry(Geometry::SphereZ)?;
    check_exp_range(v)?;
    let mean = v.integrate();
    if mean <= 0.0 {
        return Err(Error::Inadmissible(format!(
            "Q_lambda needs integral v d sigma > 0, got {mean:e}"
        )));
    }
    let num = 0.25 * v.dirichlet() + lambda * mean;
    let den = v.map(f64::exp)?.integrate().ln();
    Ok(num / den)
}

/// Rigidity remainder
/// R_lambda[f] = (1/8) int nu^2 |f'' - |f'|^2/2|^2 e^{-f/2} dz
///             + ((1-lambda)/4) int nu |f'|^2 e^{-f/2} dz.
/// Nonnegative for lambda <= 1; vanishes on constants and, at lambda = 1,
/// on the conformal family f = C1 - 2 log(C2 - z).
pub fn rigidity_remainder(f: &Field, lambda: f64) -> Result<f64> {
    f.expect_geometry(Geometry::SphereZ)?;
    let grid = f.grid();
    let d1 = f.deriv_z();
    let d2 = grid.diff_apply(&d1);
    let mut first = 0.0;
    let mut second = 0.0;
    for (k, &z) in grid.nodes().iter().enumerate() {
        let nu = 1.0 - z * z;
        let w = grid.weights()[k] * (-f.values()[k] / 2.0).exp();
        let defect = d2[k] - 0.5 * d1[k] * d1[k];
        first += w * nu * nu * defect * defect;
        second += w * nu * d1[k] * d1[k];
    }
    Ok(0.125 * first + 0.25 * (1.0 - lambda) * second)
}

/// Pointwise residual of the Euler-Lagrange equation
/// -(1/2) L f + lambda = lambda e^f, under the normalization
/// (1/2) int e^f dz = 1 (applied when `normalize` is set). Returns the
/// residual field and its L^2(dz/2) norm.
pub fn euler_lagrange_residual(f: &Field, lambda: f64, normalize: bool) -> Result<(Field, f64)> {
    f.expect_geometry(Geometry::SphereZ)?;
    check_exp_range(f)?;
    let f = if normalize {
        let mass = 0.5 * f.grid().quad(&f.values().iter().map(|v| v.exp()).collect::<Vec<_>>());
        f.map(|v| v - mass.ln())?
    } else {
        f.clone()
    };
    let lf = ultraspherical_apply(&f)?;
    let values: Vec<f64> = lf
        .values()
        .iter()
        .zip(f.values())
        .map(|(l, v)| -0.5 * l + lambda - lambda * v.exp())
        .collect();
    let sq: Vec<f64> = values.iter().map(|r| r * r).collect();
    let norm = (0.5 * f.grid().quad(&sq)).sqrt();
    let res = Field::from_values(f.grid().clone(), Geometry::SphereZ, values)?;
    Ok((res, norm))
}

/// The expanded-square identity relating the sphere deficit to the
/// logarithmic HLS terms.
pub fn duality_decomposition(u: &Field) -> Result<DualityReport> {
    u.expect_geometry(Geometry::SphereZ)?;
    check_exp_range(u)?;
    let grid = u.grid();
    let mass = u.map(f64::exp)?.integrate();
    let f = u.map(|v| v.exp() / mass)?;

    let flogf = Field::from_values(
        grid.clone(),
        Geometry::SphereZ,
        f.values().iter().map(|&x| x * x.ln()).collect(),
    )?;
    let entropy_term = flogf.integrate();

    // f - 1 has zero mean by construction; subtract the numerical mean so
    // the Green operator sees an exactly balanced field.
    let fm1 = f.map(|x| x - 1.0)?;
    let num_mean = fm1.integrate();
    let fm1 = fm1.map(|x| x - num_mean)?;
    let h = inverse_laplacian_sphere(&fm1)?;
    let hls_vals: Vec<f64> = fm1.values().iter().zip(h.values()).map(|(a, b)| a * b).collect();
    let hls_term = 0.5 * grid.quad(&hls_vals);

    let du = u.deriv_z();
    let dh = h.deriv_z();
    let mut square_term = 0.0;
    for (k, &z) in grid.nodes().iter().enumerate() {
        let nu = 1.0 - z * z;
        let g = 0.5 * du[k] - dh[k];
        square_term += 0.5 * grid.weights()[k] * nu * g * g;
    }

    let deficit = onofri_deficit(u, 1.0)?.deficit;
    let residual = deficit - (entropy_term - hls_term + square_term);
    Ok(DualityReport {
        deficit,
        entropy_term,
        hls_term,
        square_term,
        residual,
    })
}

/// Relative entropy and Fisher information of w = v / v_infinity at
/// Barenblatt parameter D and exponent m in [1/2, 1). Everything is
/// computed in the w variable, where the integrands stay integrable all the
/// way down to m = 1/2.
pub fn entropy_fisher(w: &Field, d_param: f64, m: f64) -> Result<EntropyPair> {
    w.expect_geometry(Geometry::EuclideanR)?;
    if w.values().iter().any(|&v| v <= 0.0) {
        return Err(Error::PositivityLoss("w must be positive".into()));
    }
    if !(0.5..1.0).contains(&m) {
        return Err(Error::Inadmissible(format!("m = {m} outside [1/2, 1)")));
    }
    let grid = w.grid();
    let nodes = grid.nodes();
    let weights = grid.weights();
    let dw = w.derivative()?; // d/dr

    let mut e = 0.0;
    let mut i = 0.0;
    for k in 0..w.len() {
        let r = geometry::r_of_z(nodes[k]);
        let q = d_param + r * r;
        let wv = w.values()[k];
        // dx pulled back to the grid: 2 pi r dr/dz dz.
        let jac = 2.0 * std::f64::consts::PI * r / geometry::dz_dr(r);
        let wt = weights[k] * jac;

        if (m - 0.5).abs() < 1e-12 {
            let sw = wv.sqrt();
            e += wt * (sw - 1.0) * (sw - 1.0) / q;
            // g = (D + r^2)(w^{-1/2} - 1), radial gradient.
            let gr = 2.0 * r * (1.0 / sw - 1.0) - 0.5 * q * dw.values()[k] / (sw * sw * sw);
            i += wt * wv / (q * q) * gr * gr;
        } else {
            let vinf_m = q.powf(m / (m - 1.0));
            e += wt / (m - 1.0) * vinf_m * (wv.powf(m) - 1.0 - m * (wv - 1.0));
            // z_r = d/dr[(D+r^2) w^{m-1}] - 2r, v = v_inf w.
            let wm1 = wv.powf(m - 1.0);
            let zr = 2.0 * r * (wm1 - 1.0) + q * (m - 1.0) * wm1 / wv * dw.values()[k];
            let v = q.powf(1.0 / (m - 1.0)) * wv;
            i += wt * v * zr * zr * m / (1.0 - m);
        }
    }
    Ok(EntropyPair { e, i, d: d_param, m })
}

/// Gap of the stronger, shift-sensitive form
/// (1/16 pi) int |grad u|^2 dx >= int e^u d mu - 1 - int u d mu (D = 1), and
/// the shift c* = -log int e^u d mu that recovers the standard deficit.
pub fn fd_gap(u: &Field) -> Result<FdGapReport> {
    u.expect_geometry(Geometry::EuclideanR)?;
    check_exp_range(u)?;
    let kinetic = u.dirichlet() / (16.0 * std::f64::consts::PI);
    let mass = u.map(f64::exp)?.integrate();
    let mean = u.integrate();
    Ok(FdGapReport {
        gap: kinetic - (mass - 1.0 - mean),
        optimal_shift: -mass.ln(),
    })
}

/// C1 making the conformal profile C1 - 2 log(C2 - z) satisfy
/// (1/2) int e^f dz = 1; the profile then has zero deficit at lambda = 1.
pub fn conformal_c1(c2: f64) -> f64 {
    (c2 * c2 - 1.0).ln()
}
