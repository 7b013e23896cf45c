// Mass-drift resolution study for the fast diffusion flow.
use onofri_core::field::Field;
use onofri_core::flows::{run_fast_diffusion, StepControl};
use onofri_core::geometry::Geometry;
use onofri_core::grid::LegendreGrid;
use std::sync::Arc;

fn main() {
    for n in [64, 96, 128, 160] {
        let g = Arc::new(LegendreGrid::new(n).unwrap());
        let v0 = Field::from_fn(&g, Geometry::EuclideanR, |r| {
            (0.3 * (-(r * r)).exp()).exp() / (1.0 + r * r).powi(2)
        })
        .unwrap();
        match run_fast_diffusion(&v0, 0.5, 0.5, StepControl::default()) {
            Ok(trace) => {
                let rel = trace
                    .samples
                    .iter()
                    .map(|s| {
                        let i = s.dissipation.max(1e-300);
                        (s.lyapunov_rate + s.dissipation).abs() / i
                    })
                    .fold(0.0_f64, f64::max);
                println!(
                    "n={n:4} steps={:6} drift={:.3e} max|rate+I|/I={:.3e}",
                    trace.samples.len(),
                    trace.max_mass_drift() / trace.initial().mass,
                    rel
                );
            }
            Err(e) => println!("n={n}: ERR {e}"),
        }
    }
}
