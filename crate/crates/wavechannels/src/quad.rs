//! Quadrature helpers shared by the analytic-tail integrals and the
//! half-line transforms.

use std::sync::OnceLock;

/// Nodes and weights of the 24-point Gauss-Legendre rule on [-1, 1].
fn gl24() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(24))
}

/// Gauss-Legendre nodes/weights by Newton iteration on the Legendre roots.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 2);
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut deriv = 1.0;
        for _ in 0..60 {
            let (p, dp) = legendre_with_deriv(n, x);
            deriv = dp;
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// 24-point Gauss-Legendre on a single interval [a, b].
pub fn gl_panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (xs, ws) = gl24();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in xs.iter().zip(ws.iter()) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Composite Gauss-Legendre over [a, b] with `panels` equal panels.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    let panels = panels.max(1);
    let step = (b - a) / panels as f64;
    let mut acc = 0.0;
    for k in 0..panels {
        let lo = a + step * k as f64;
        acc += gl_panel(f, lo, lo + step);
    }
    acc
}

/// Integral of a smooth decaying function over [a, infinity), by panel
/// doubling. The integrand must decay at least like r^{-1-delta}; panels
/// [x, 2x] then contribute geometrically and the loop stops once three
/// consecutive panels fall below `rel_tol` of the accumulated value.
pub fn integrate_to_inf(f: &dyn Fn(f64) -> f64, a: f64, rel_tol: f64) -> f64 {
    assert!(a >= 0.0);
    let mut lo = a;
    let mut hi = if a > 0.0 { 2.0 * a } else { 1.0 };
    if hi - lo < 1.0 {
        hi = lo + 1.0;
    }
    let mut acc = 0.0;
    let mut quiet = 0;
    for _ in 0..500 {
        let part = gl_panel(f, lo, 0.5 * (lo + hi)) + gl_panel(f, 0.5 * (lo + hi), hi);
        acc += part;
        if part.abs() <= rel_tol * acc.abs().max(f64::MIN_POSITIVE) {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        lo = hi;
        hi = 2.0 * hi;
    }
    acc
}

/// Composite trapezoid of samples y_j on a uniform grid with spacing h.
pub fn trapezoid(y: &[f64], h: f64) -> f64 {
    if y.len() < 2 {
        return 0.0;
    }
    let inner: f64 = y[1..y.len() - 1].iter().sum();
    h * (0.5 * (y[0] + y[y.len() - 1]) + inner)
}

/// Composite Simpson for samples on a log-uniform grid x_j = exp(l0 + j*step):
/// computes the integral over [x_0, x_{n-1}] of the sampled function in the
/// variable x, using d x = x d(log x). Odd interval counts fall back to one
/// trapezoid cell at the far end.
pub fn simpson_log(x: &[f64], y: &[f64], log_step: f64) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    let g: Vec<f64> = x.iter().zip(y.iter()).map(|(xi, yi)| xi * yi).collect();
    let intervals = n - 1;
    let simpson_pairs = intervals / 2;
    let mut acc = 0.0;
    for k in 0..simpson_pairs {
        let j = 2 * k;
        acc += log_step / 3.0 * (g[j] + 4.0 * g[j + 1] + g[j + 2]);
    }
    if intervals % 2 == 1 {
        acc += log_step * 0.5 * (g[n - 2] + g[n - 1]);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        // a 24-point rule integrates degree-47 polynomials exactly
        let val = gl_panel(&|x| x.powi(8) - 3.0 * x.powi(3) + 2.0, -1.0, 1.0);
        let exact = 2.0 / 9.0 + 4.0;
        assert!((val - exact).abs() < 1e-14);
    }

    #[test]
    fn finite_integral_of_exponential() {
        let val = integrate(&|x| (-x).exp(), 0.0, 30.0, 8);
        assert!((val - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_line_power_law_tail() {
        // int_1^inf r^-3 dr = 1/2
        let val = integrate_to_inf(&|r| r.powi(-3), 1.0, 1e-16);
        assert!((val - 0.5).abs() < 1e-12);
    }

    #[test]
    fn half_line_from_origin() {
        // int_0^inf e^-r dr = 1
        let val = integrate_to_inf(&|r| (-r).exp(), 0.0, 1e-16);
        assert!((val - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simpson_log_matches_closed_form() {
        // int_{1e-6}^{1e6} e^{-x} dx = e^{-1e-6} - e^{-1e6} ~ 1
        let per_decade = 64usize;
        let decades = 12.0f64;
        let n = (decades * per_decade as f64) as usize + 1;
        let step = std::f64::consts::LN_10 / per_decade as f64;
        let l0 = (1e-6f64).ln();
        let x: Vec<f64> = (0..n).map(|j| (l0 + step * j as f64).exp()).collect();
        let y: Vec<f64> = x.iter().map(|xi| (-xi).exp()).collect();
        let val = simpson_log(&x, &y, step);
        let exact = (-1e-6f64).exp() - (-1e6f64).exp();
        assert!((val - exact).abs() < 1e-9, "got {val}, exact {exact}");
    }
}
