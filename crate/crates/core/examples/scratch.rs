// Scratch harness used while developing; prints flow diagnostics.
use onofri_core::field::Field;
use onofri_core::flows::{run_fast_diffusion, run_log_diffusion, run_rigidity_flow, StepControl};
use onofri_core::geometry::Geometry;
use onofri_core::grid::LegendreGrid;
use std::sync::Arc;

fn main() {
    let g = Arc::new(LegendreGrid::new(64).unwrap());

    println!("--- rigidity zlinear lambda=1 ---");
    let f0 = Field::from_fn(&g, Geometry::SphereZ, |z| z).unwrap();
    match run_rigidity_flow(&f0, 1.0, 2.0, StepControl::default()) {
        Ok(trace) => {
            for (i, s) in trace.samples.iter().enumerate() {
                if i % (trace.samples.len() / 12).max(1) == 0 || i == trace.samples.len() - 1 {
                    println!(
                        "t={:10.5} G={:12.6e} R={:12.6e} rate={:12.6e} rel={:9.2e} mass={:.3e}",
                        s.t,
                        s.lyapunov,
                        s.dissipation,
                        s.lyapunov_rate,
                        (s.lyapunov_rate + s.dissipation).abs() / s.dissipation.max(1e-18),
                        s.mass - trace.samples[0].mass
                    );
                }
            }
            let drop = trace.initial().lyapunov - trace.last().lyapunov;
            println!(
                "steps={} drop={:.9e} integral={:.9e} reldiff={:.3e}",
                trace.samples.len(),
                drop,
                trace.dissipation_integral,
                (drop - trace.dissipation_integral).abs() / trace.initial().lyapunov
            );
        }
        Err(e) => println!("ERR {e}"),
    }

    println!("--- fast diffusion m=0.5 bump ---");
    let v0 = Field::from_fn(&g, Geometry::EuclideanR, |r| {
        (0.3 * (-(r * r)).exp()).exp() / (1.0 + r * r).powi(2)
    })
    .unwrap();
    match run_fast_diffusion(&v0, 0.5, 0.5, StepControl::default()) {
        Ok(trace) => {
            for (i, s) in trace.samples.iter().enumerate() {
                if i % (trace.samples.len() / 12).max(1) == 0 || i == trace.samples.len() - 1 {
                    println!(
                        "t={:10.6} E={:12.6e} I={:12.6e} rate={:12.6e} mass drift={:.3e}",
                        s.t,
                        s.lyapunov,
                        s.dissipation,
                        s.lyapunov_rate,
                        s.mass - trace.samples[0].mass
                    );
                }
            }
            println!("steps={}", trace.samples.len());
        }
        Err(e) => println!("ERR {e}"),
    }

    println!("--- log diffusion 0.8 z ---");
    let u0 = Field::from_fn(&g, Geometry::SphereZ, |z| 0.8 * z).unwrap();
    match run_log_diffusion(&u0, 2.0, StepControl::default()) {
        Ok(trace) => {
            let mut max_inc: f64 = 0.0;
            let mut max_t = 0.0;
            for w in trace.samples.windows(2) {
                let inc = w[1].lyapunov - w[0].lyapunov;
                if inc > max_inc {
                    max_inc = inc;
                    max_t = w[1].t;
                }
            }
            for (i, s) in trace.samples.iter().enumerate() {
                if i % (trace.samples.len() / 12).max(1) == 0 || i == trace.samples.len() - 1 {
                    println!(
                        "t={:10.6} H={:14.8e} bracket={:13.6e} rate={:13.6e}",
                        s.t, s.lyapunov, s.dissipation, s.lyapunov_rate
                    );
                }
            }
            println!("max per-step H increase {max_inc:.3e} at t={max_t:.4}");
        }
        Err(e) => println!("ERR {e}"),
    }
}
