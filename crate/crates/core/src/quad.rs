//! Double-exponential (tanh-sinh family) quadrature for half-line and
//! whole-line integrals with algebraic endpoint behavior, plus a Lanczos
//! log-gamma and a bisection root finder. These are the independent
//! high-precision oracles used by the limit families and the constants
//! table; the Legendre grid never sees them.

/// Integrate f over (0, inf) with the exp-sinh rule x = exp((pi/2) sinh t).
///
/// Handles integrands with algebraic singularity at 0 and algebraic decay
/// x^(-1-delta) at infinity; the substitution turns both into
/// double-exponential decay in t. Evaluation is capped at |log x| <= 700 to
/// stay inside f64 range, which truncates tails beyond x ~ 1e304.
pub fn integrate_exp_sinh(f: impl Fn(f64) -> f64, rel_tol: f64) -> f64 {
    de_integrate(
        |t| {
            let u = std::f64::consts::FRAC_PI_2 * t.sinh();
            if u.abs() > 700.0 {
                return 0.0;
            }
            let x = u.exp();
            let w = std::f64::consts::FRAC_PI_2 * t.cosh() * x;
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v * w
            }
        },
        rel_tol,
    )
}

/// Integrate f over (-inf, inf) with the sinh-sinh rule
/// x = sinh((pi/2) sinh t).
pub fn integrate_sinh_sinh(f: impl Fn(f64) -> f64, rel_tol: f64) -> f64 {
    de_integrate(
        |t| {
            let u = std::f64::consts::FRAC_PI_2 * t.sinh();
            if u.abs() > 700.0 {
                return 0.0;
            }
            let x = u.sinh();
            let w = std::f64::consts::FRAC_PI_2 * t.cosh() * u.cosh();
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v * w
            }
        },
        rel_tol,
    )
}

/// Trapezoid sums of phi over the t-line with step halving until two
/// consecutive levels agree. Non-finite integrand values (possible only in
/// the doubly-exponentially suppressed tails, from intermediate overflow in
/// caller closures) are dropped.
fn de_integrate(phi: impl Fn(f64) -> f64, rel_tol: f64) -> f64 {
    const T_MAX: f64 = 6.9;
    let p = |t: f64| {
        let v = phi(t);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut h = 1.0;
    // Level 0: nodes at integer t.
    let mut sum = p(0.0);
    let mut k = 1;
    while (k as f64) * h <= T_MAX {
        let t = k as f64 * h;
        sum += p(t) + p(-t);
        k += 1;
    }
    let mut integral = sum * h;
    for _level in 0..12 {
        // Add midpoints of the current mesh.
        let h2 = h / 2.0;
        let mut mid = 0.0;
        let mut k = 0;
        loop {
            let t = h2 + (k as f64) * h;
            if t > T_MAX {
                break;
            }
            mid += p(t) + p(-t);
            k += 1;
        }
        let next = integral / 2.0 + mid * h2;
        h = h2;
        let err = (next - integral).abs();
        integral = next;
        if err <= rel_tol * integral.abs() + 1e-300 {
            break;
        }
    }
    integral
}

/// log Gamma(x) for x > 0, Lanczos approximation (g = 7, 9 terms).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return (std::f64::consts::PI / (std::f64::consts::PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// Bisection on a monotone (either direction) continuous function; returns x
/// with f(x) ~ 0. `a` and `b` must bracket a sign change.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || (b - a).abs() < tol {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exp_sinh_on_beta_integrals() {
        // integral_0^inf t^(a-1) (1+t)^(-a-b) dt = B(a, b)
        for (a, b) in [(1.0, 2.0), (0.5, 1.5), (2.0 / 3.0, 4.0 / 3.0), (3.0, 3.0)] {
            let got = integrate_exp_sinh(|t| t.powf(a - 1.0) * (1.0 + t).powf(-a - b), 1e-14);
            let want = (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp();
            assert!(
                (got - want).abs() < 1e-12 * want,
                "B({a},{b}): {got} vs {want}"
            );
        }
    }

    #[test]
    fn exp_sinh_slow_algebraic_tail() {
        // f = r (1+r^2)^(-1-d/2) has closed form integral 1/d; at d = 0.05
        // the tail reaches past r ~ 1e300, so the integrand is written in
        // log form to stay inside f64 range all the way out.
        let d = 0.05;
        let f = |r: f64| {
            let log1pr2 = if r > 1.0 {
                2.0 * r.ln() + (1.0 / (r * r)).ln_1p()
            } else {
                (r * r).ln_1p()
            };
            (r.ln() - (1.0 + d / 2.0) * log1pr2).exp()
        };
        let got = integrate_exp_sinh(f, 1e-13);
        let want = 1.0 / d;
        assert!((got - want).abs() < 1e-9 * want, "{got} vs {want}");
    }

    #[test]
    fn sinh_sinh_gaussian_and_sech() {
        let got = integrate_sinh_sinh(|x| (-x * x).exp(), 1e-14);
        assert!((got - PI.sqrt()).abs() < 1e-13);
        // integral of (1/2) sech^2 = 1: the line weight has unit mass.
        let got = integrate_sinh_sinh(|s| 0.5 / (s.cosh() * s.cosh()), 1e-14);
        assert!((got - 1.0).abs() < 1e-13);
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!((gamma(1.0) - 1.0).abs() < 1e-14);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(1.5) - 0.5 * PI.sqrt()).abs() < 1e-14);
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        // Recurrence Gamma(x+1) = x Gamma(x) at an awkward point.
        let x = 2.0 / 3.0;
        assert!((gamma(x + 1.0) - x * gamma(x)).abs() < 1e-14);
    }

    #[test]
    fn bisect_finds_roots() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2.0_f64.sqrt()).abs() < 1e-13);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-14).is_none());
    }
}
