// Sweep convergence inspection.
use onofri_core::field::Field;
use onofri_core::geometry::Geometry;
use onofri_core::grid::LegendreGrid;
use onofri_core::limits::*;
use std::sync::Arc;

fn show(name: &str, s: &SweepResult) {
    println!(
        "{name}: target {:.10e} rate {:?} shift {:?}",
        s.limit_target, s.fitted_rate, s.recenter_shift
    );
    for r in &s.rows {
        println!(
            "  {}={:8.4} lhs={:14.8e} rhs={:14.8e} gap={:14.8e} err={:10.3e} adm={}",
            s.param_name,
            r.param,
            r.lhs,
            r.rhs,
            r.gap,
            (r.gap - s.limit_target).abs(),
            r.admissible
        );
    }
}

fn main() {
    let g = Arc::new(LegendreGrid::new(96).unwrap());
    let u = Field::from_fn(&g, Geometry::EuclideanR, |r| 0.8 * (-(r * r)).exp()).unwrap();

    show("gn", &gn_limit_r2(&u, &[10.0, 20.0, 40.0, 80.0]).unwrap());
    show("sobolev_p", &sobolev_p_limit(&u, &[1.9, 1.95, 1.975]).unwrap());
    show("ckn", &ckn_limit(&u, -0.5, &[0.1, 0.05, 0.025]).unwrap());
    show(
        "radial_d",
        &radial_sobolev_d_limit(&u, &[2.5, 2.25, 2.125, 2.0625]).unwrap(),
    );
}
