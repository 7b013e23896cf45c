// Roundoff-floor measurements for stationary orbits.
use onofri_core::field::Field;
use onofri_core::flows::{bakry_emery_integral, run_rigidity_flow, StepControl};
use onofri_core::geometry::Geometry;
use onofri_core::grid::LegendreGrid;
use std::sync::Arc;

fn main() {
    let g = Arc::new(LegendreGrid::new(48).unwrap());
    let f0 = Field::from_fn(&g, Geometry::SphereZ, |_| 0.0).unwrap();
    let trace = run_rigidity_flow(&f0, 1.0, 0.5, StepControl::default()).unwrap();
    let max_r = trace.samples.iter().map(|s| s.dissipation.abs()).fold(0.0f64, f64::max);
    let max_g = trace.samples.iter().map(|s| s.lyapunov.abs()).fold(0.0f64, f64::max);
    println!(
        "rigidity const: max R {:.3e} max G {:.3e} final {:.3e}",
        max_r,
        max_g,
        trace.final_field.max_abs()
    );

    let g64 = Arc::new(LegendreGrid::new(64).unwrap());
    let zero = Field::from_fn(&g64, Geometry::EuclideanR, |_| 0.0).unwrap();
    let out = bakry_emery_integral(&zero, 1.0, StepControl::default()).unwrap();
    println!("bakry zero: lhs {:.3e} rhs {:.3e} t_reached {:.3}", out.lhs, out.rhs, out.t_reached);
    let u0 = Field::from_fn(&g64, Geometry::EuclideanR, |r| {
        2.0 * ((1.0 + r * r) / (1.7 + r * r)).ln()
    })
    .unwrap();
    let out = bakry_emery_integral(&u0, 1.0, StepControl::default()).unwrap();
    println!("bakry dilation: lhs {:.3e} rhs {:.3e}", out.lhs, out.rhs);
}
