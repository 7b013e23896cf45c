//! Gauss-Legendre grids on [-1, 1] with spectral differentiation and the
//! discrete Legendre transform pair.
//!
//! The nodes are the roots of P_n, so the endpoints are never grid points
//! and quadrature is exact for polynomials of degree <= 2n-1. The
//! differentiation matrix comes from barycentric Lagrange interpolation at
//! the nodes; the transform pair maps point values to coefficients of
//! P_0..P_{n-1} and back.

use crate::error::{Error, Result};

/// Gauss-Legendre discretization of [-1, 1].
#[derive(Debug, Clone)]
pub struct LegendreGrid {
    n: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// Barycentric interpolation weights, normalized to unit max.
    bary: Vec<f64>,
    /// Dense n x n differentiation matrix, row major.
    diff: Vec<f64>,
    /// Values -> Legendre coefficients, row major n x n.
    fwd: Vec<f64>,
    /// Legendre coefficients -> values, row major n x n.
    inv: Vec<f64>,
}

/// Value and derivative of P_n at x, by the three-term recurrence.
fn legendre_pn_dpn(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    // P'_n from P_n and P_{n-1}: (1-x^2) P'_n = n (P_{n-1} - x P_n)
    let dp = (n as f64) * (p0 - x * p1) / (1.0 - x * x);
    (p1, dp)
}

/// P_0(x), ..., P_{nmax-1}(x).
pub fn legendre_all(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(nmax);
    if nmax == 0 {
        return out;
    }
    out.push(1.0);
    if nmax == 1 {
        return out;
    }
    out.push(x);
    for k in 2..nmax {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * out[k - 1] - (kf - 1.0) * out[k - 2]) / kf;
        out.push(next);
    }
    out
}

impl LegendreGrid {
    /// Build an n-point grid. Newton iteration on P_n from the Chebyshev-like
    /// initial guess; converges in a handful of steps for n <= a few thousand.
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 {
            return Err(Error::GridTooSmall(n));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for k in 0..(n + 1) / 2 {
            // k-th root counted from the +1 end, descending in x.
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut converged = false;
            for _ in 0..100 {
                let (p, dp) = legendre_pn_dpn(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::RootConvergence(k));
            }
            // One polishing step.
            let (p, dp) = legendre_pn_dpn(n, x);
            x -= p / dp;
            let (_, dp) = legendre_pn_dpn(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[n - 1 - k] = x;
            nodes[k] = -x;
            weights[n - 1 - k] = w;
            weights[k] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
            let (_, dp) = legendre_pn_dpn(n, 0.0);
            weights[n / 2] = 2.0 / (dp * dp);
        }

        // Barycentric weights for Gauss nodes: lambda_j ~ (-1)^j sqrt((1-x_j^2) w_j).
        let mut bary: Vec<f64> = (0..n)
            .map(|j| {
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                s * ((1.0 - nodes[j] * nodes[j]) * weights[j]).sqrt()
            })
            .collect();
        let bmax = bary.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
        for b in &mut bary {
            *b /= bmax;
        }

        // Differentiation matrix with the negative-sum trick on the diagonal.
        let mut diff = vec![0.0; n * n];
        for i in 0..n {
            let mut row_sum = 0.0;
            for j in 0..n {
                if i != j {
                    let d = (bary[j] / bary[i]) / (nodes[i] - nodes[j]);
                    diff[i * n + j] = d;
                    row_sum += d;
                }
            }
            diff[i * n + i] = -row_sum;
        }

        // Transform pair. Analysis uses quadrature, exact on P_0..P_{n-1}
        // because deg(P_l * P_m) <= 2n - 2.
        let mut fwd = vec![0.0; n * n];
        let mut inv = vec![0.0; n * n];
        for k in 0..n {
            let p = legendre_all(n, nodes[k]);
            for l in 0..n {
                fwd[l * n + k] = (l as f64 + 0.5) * weights[k] * p[l];
                inv[k * n + l] = p[l];
            }
        }

        Ok(Self {
            n,
            nodes,
            weights,
            bary,
            diff,
            fwd,
            inv,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Raw quadrature of point values against dz on [-1, 1].
    pub fn quad(&self, values: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(values)
            .map(|(w, v)| w * v)
            .sum()
    }

    /// Spectral derivative d/dz of point values.
    pub fn diff_apply(&self, values: &[f64]) -> Vec<f64> {
        self.matvec(&self.diff, values)
    }

    /// Point values -> coefficients of P_0..P_{n-1}.
    pub fn to_coeffs(&self, values: &[f64]) -> Vec<f64> {
        self.matvec(&self.fwd, values)
    }

    /// Coefficients of P_0..P_{n-1} -> point values.
    pub fn from_coeffs(&self, coeffs: &[f64]) -> Vec<f64> {
        self.matvec(&self.inv, coeffs)
    }

    /// Barycentric evaluation of the interpolant of `values` at z.
    pub fn interpolate(&self, values: &[f64], z: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..self.n {
            let dz = z - self.nodes[j];
            if dz.abs() < 1e-300 {
                return values[j];
            }
            let t = self.bary[j] / dz;
            num += t * values[j];
            den += t;
        }
        num / den
    }

    fn matvec(&self, m: &[f64], v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.n);
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 0..n {
            let row = &m[i * n..(i + 1) * n];
            let mut acc = 0.0;
            for j in 0..n {
                acc += row[j] * v[j];
            }
            out[i] = acc;
        }
        out
    }
}
