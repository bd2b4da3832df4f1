//! Least-squares power-law fitting on dyadic sweeps.

use crate::error::{Error, Result};

/// Result of fitting log(y) = slope*log(x) + intercept.
#[derive(Debug, Clone, Copy)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of log(y) around the fit line.
    pub residual: f64,
}

/// Fit a decay exponent through (x_i, y_i) pairs with x_i, y_i > 0.
pub fn fit_exponent(xs: &[f64], ys: &[f64]) -> Result<ExponentFit> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            len: ys.len(),
            n: xs.len(),
        });
    }
    if xs.len() < 3 {
        return Err(Error::invalid(format!(
            "exponent fit needs at least 3 points, got {}",
            xs.len()
        )));
    }
    let mut lx = Vec::with_capacity(xs.len());
    let mut ly = Vec::with_capacity(xs.len());
    for (&x, &y) in xs.iter().zip(ys.iter()) {
        if !(x > 0.0) || !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::invalid(format!(
                "fit points must be positive and finite, got ({x}, {y})"
            )));
        }
        lx.push(x.ln());
        ly.push(y.ln());
    }
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = lx.iter().zip(ly.iter()).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("all abscissae equal; slope undefined"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = lx
        .iter()
        .zip(ly.iter())
        .map(|(a, b)| {
            let p = slope * a + intercept;
            (b - p) * (b - p)
        })
        .sum();
    Ok(ExponentFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    })
}

/// Limit of a series that settles like v(t) = L + a t^{-p} with unknown
/// p > 0: p is recovered from three roughly dyadic samples of the tail by
/// bisection, then the last sample is corrected. Falls back to the final
/// value when the tail is flat, non-monotone, or too short to resolve p.
pub fn series_limit_power(times: &[f64], values: &[f64]) -> f64 {
    if times.len() != values.len() || times.is_empty() {
        return f64::NAN;
    }
    let last = values[values.len() - 1];
    if times.len() < 3 {
        return last;
    }
    let t3 = times[times.len() - 1];
    let pick = |target: f64| {
        times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - target).abs().partial_cmp(&(b.1 - target).abs()).unwrap())
            .unwrap()
            .0
    };
    let (i1, i2, i3) = (pick(t3 / 4.0), pick(t3 / 2.0), times.len() - 1);
    if i1 == i2 || i2 == i3 {
        return last;
    }
    let (t1, t2) = (times[i1], times[i2]);
    let (v1, v2, v3) = (values[i1], values[i2], values[i3]);
    if (v2 - v3).abs() <= 1e-12 * v3.abs() || (v1 - v2).abs() <= (v2 - v3).abs() {
        return last;
    }
    let target = (v1 - v2) / (v2 - v3);
    let model = |p: f64| (t1.powf(-p) - t2.powf(-p)) / (t2.powf(-p) - t3.powf(-p));
    let (mut lo, mut hi) = (0.05f64, 12.0f64);
    if (model(lo) - target).signum() == (model(hi) - target).signum() {
        return last;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if (model(mid) - target).signum() == (model(lo) - target).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = 0.5 * (lo + hi);
    let a = (v2 - v3) / (t2.powf(-p) - t3.powf(-p));
    v3 - a * t3.powf(-p)
}

/// Limit of a series whose drain mixes t^{-1/2} and t^{-1} (the half-integer
/// shell weights): least-squares fit of a quadratic in s = t^{-1/2} over the
/// settled part of the series (t >= t_max/3), evaluated at s = 0.
pub fn series_limit_half_integer(times: &[f64], values: &[f64]) -> f64 {
    if times.len() != values.len() || times.is_empty() {
        return f64::NAN;
    }
    let t_max = times[times.len() - 1];
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= t_max / 3.0 && **t > 0.0)
        .map(|(t, v)| (t.powf(-0.5), *v))
        .collect();
    if pts.len() < 5 {
        return values[values.len() - 1];
    }
    let mut m = vec![vec![0.0f64; 3]; 3];
    let mut rhs = vec![0.0f64; 3];
    for (s, v) in &pts {
        let basis = [1.0, *s, s * s];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
            rhs[i] += basis[i] * v;
        }
    }
    match crate::linalg::spd_solve(&m, &rhs) {
        Ok(sol) => sol[0],
        Err(_) => values[values.len() - 1],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let xs: Vec<f64> = (0..6).map(|k| 2.0f64.powi(k)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.5 * x.powf(-2.5)).collect();
        let f = fit_exponent(&xs, &ys).unwrap();
        assert!((f.slope + 2.5).abs() < 1e-12);
        assert!((f.intercept - 3.5f64.ln()).abs() < 1e-12);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn reports_residual_for_noisy_data() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys = [1.0, 0.26, 0.061, 0.0155];
        let f = fit_exponent(&xs, &ys).unwrap();
        assert!(f.slope < -1.9 && f.slope > -2.1, "slope {}", f.slope);
        assert!(f.residual > 1e-4);
    }

    #[test]
    fn rejects_short_or_invalid_input() {
        assert!(fit_exponent(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(fit_exponent(&[1.0, 2.0, 3.0], &[1.0, -2.0, 3.0]).is_err());
        assert!(fit_exponent(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn power_limit_recovers_synthetic_tail() {
        let times: Vec<f64> = (1..=20).map(|k| k as f64).collect();
        let vals: Vec<f64> = times.iter().map(|t| 7.0 + 3.0 * t.powf(-1.7)).collect();
        let lim = series_limit_power(&times, &vals);
        assert!((lim - 7.0).abs() < 1e-6, "limit {lim}");
    }

    #[test]
    fn power_limit_falls_back_on_flat_series() {
        let times = [1.0, 2.0, 4.0, 8.0];
        let vals = [3.0, 3.0, 3.0, 3.0];
        assert_eq!(series_limit_power(&times, &vals), 3.0);
    }

    #[test]
    fn half_integer_limit_recovers_mixed_drain() {
        let times: Vec<f64> = (1..=32).map(|k| 0.5 * k as f64).collect();
        let vals: Vec<f64> = times
            .iter()
            .map(|t| 11.0 + 2.0 / t.sqrt() + 5.0 / t)
            .collect();
        let lim = series_limit_half_integer(&times, &vals);
        assert!((lim - 11.0).abs() < 1e-9, "limit {lim}");
    }

    #[test]
    fn half_integer_limit_needs_enough_settled_points() {
        let times = [1.0, 2.0];
        let vals = [5.0, 4.0];
        assert_eq!(series_limit_half_integer(&times, &vals), 4.0);
    }
}
