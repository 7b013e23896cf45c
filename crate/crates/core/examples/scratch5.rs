// CKN limit decomposition: which displayed limit mismatches?
use onofri_core::field::Field;
use onofri_core::geometry::Geometry;
use onofri_core::grid::LegendreGrid;
use onofri_core::limits::ckn_limit;
use onofri_core::quad::integrate_exp_sinh;
use std::f64::consts::PI;
use std::sync::Arc;

fn main() {
    let g = Arc::new(LegendreGrid::new(96).unwrap());
    let u = Field::from_fn(&g, Geometry::EuclideanR, |r| 0.8 * (-(r * r)).exp()).unwrap();
    let du = u.derivative().unwrap();
    let alpha = -0.5_f64;

    let mu_a = |r: f64| {
        (1.0 + alpha) / PI * r.powf(2.0 * alpha) / (1.0 + r.powf(2.0 * (1.0 + alpha))).powi(2)
    };
    let uval = |r: f64| 0.8 * (-(r * r)).exp();
    let uslope = |r: f64| -1.6 * r * (-(r * r)).exp();

    let dx = |f: &dyn Fn(f64) -> f64| 2.0 * PI * integrate_exp_sinh(|r| f(r) * r, 1e-13);

    let mass = dx(&|r| uval(r).exp() * mu_a(r));
    let mean = dx(&|r| uval(r) * mu_a(r));
    let dir = dx(&|r| uslope(r) * uslope(r));
    println!("closed-form u: int e^u dmu_a = {mass:.10}");
    println!("closed-form u: int u dmu_a   = {mean:.10}");
    println!("closed-form u: |grad u|^2    = {dir:.10}");
    println!(
        "alpha-deficit = {:.10}",
        mean + dir / (16.0 * (1.0 + alpha) * PI) - mass.ln()
    );

    // Interpolated versions (what the sweep uses).
    let mass_i = dx(&|r| u.eval(r).exp() * mu_a(r));
    let mean_i = dx(&|r| u.eval(r) * mu_a(r));
    let dir_i = dx(&|r| du.eval(r) * du.eval(r));
    println!("interp mass {mass_i:.10} mean {mean_i:.10} dir {dir_i:.10}");

    let sweep = ckn_limit(&u, alpha, &[0.02, 0.01, 0.005, 0.0025]).unwrap();
    for r in &sweep.rows {
        println!(
            "eps={:7.4} lhs={:.8} rhs={:.8} gap={:.8}",
            r.param, r.lhs, r.rhs, r.gap
        );
    }
    println!("target from sweep = {:.10}", sweep.limit_target);
    println!("expected lhs limit = {mass:.10}");
    println!(
        "expected rhs limit = {:.10}",
        mean + dir / (16.0 * (1.0 + alpha) * PI)
    );
}
