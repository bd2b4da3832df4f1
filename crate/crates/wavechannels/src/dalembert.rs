//! Exact linear solution in N=3 via the classical reduction w = r*u to the
//! 1-d wave equation. Serves as an oracle for the finite-difference scheme.

use crate::data::RadialData;
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::quad::gl_panel;
use crate::state::StatePair;

/// Below this radius the centered formula loses digits to cancellation and we
/// switch to the r -> 0 limit (error O(r^2) against O(eps/r) for the formula).
const R_SWITCH: f64 = 1e-5;

fn check_exactable(init: &RadialData) -> Result<()> {
    init.dim().require_n(3)?;
    if init.has_sampled_part() {
        return Err(Error::RejectedInput {
            reason: "exact solution needs analytic data, got grid samples".into(),
        });
    }
    // w1 = r*u1 must be locally integrable for the spherical means to exist
    if let Some(a) = init.worst_velocity_power() {
        if a >= 2.0 {
            return Err(Error::RejectedInput {
                reason: format!("velocity tail r^-{a} is not locally integrable against r dr"),
            });
        }
    }
    Ok(())
}

// odd extension of r*u0 through the origin
fn w0(init: &RadialData, s: f64) -> f64 {
    s * init.u0_at(s.abs())
}

// d/ds of the odd extension; even in s
fn w0p(init: &RadialData, s: f64) -> f64 {
    let a = s.abs();
    init.u0_at(a) + a * init.du0_at(a)
}

/// E(x) = int_0^{|x|} y u1(y) dy; even in x because y*u1(|y|) is odd.
fn vel_integral(init: &RadialData, x: f64) -> f64 {
    let b = x.abs();
    if b == 0.0 {
        return 0.0;
    }
    // dyadic panels toward 0 absorb the admissible r^-a (a < 2) singularities
    let mut acc = 0.0;
    let mut hi = b;
    for _ in 0..60 {
        let lo = hi / 2.0;
        acc += gl_panel(&|y| y * init.u1_at(y), lo, hi);
        if hi < 1e-14 * b.max(1.0) {
            break;
        }
        hi = lo;
    }
    acc
}

/// Field value of the linear N=3 evolution of `init` at time t, radius r.
pub fn exact_n3(init: &RadialData, t: f64, r: f64) -> Result<f64> {
    check_exactable(init)?;
    if r < 0.0 {
        return Err(Error::invalid(format!("negative radius {r}")));
    }
    Ok(value_unchecked(init, t, r))
}

fn value_unchecked(init: &RadialData, t: f64, r: f64) -> f64 {
    if r <= R_SWITCH {
        // u(t,0) = u0(|t|) + |t| u0'(|t|) + t u1(|t|)
        let a = t.abs();
        return init.u0_at(a) + a * init.du0_at(a) + t * init.u1_at(a);
    }
    let pos = w0(init, r + t) + w0(init, r - t);
    let vel = vel_integral(init, r + t) - vel_integral(init, r - t);
    (pos + vel) / (2.0 * r)
}

fn velocity_unchecked(init: &RadialData, t: f64, r: f64) -> f64 {
    if r <= R_SWITCH {
        // centered difference in t; the analytic limit would need u0''
        let dt = 1e-5;
        return (value_unchecked(init, t + dt, r) - value_unchecked(init, t - dt, r))
            / (2.0 * dt);
    }
    let pos = w0p(init, r + t) - w0p(init, r - t);
    let vel = (r + t) * init.u1_at((r + t).abs()) + (r - t) * init.u1_at((r - t).abs());
    (pos + vel) / (2.0 * r)
}

/// Sample the exact solution (value and time derivative) on a grid.
pub fn exact_n3_state(init: &RadialData, t: f64, grid: RadialGrid) -> Result<StatePair> {
    check_exactable(init)?;
    let mut u0 = Vec::with_capacity(grid.len());
    let mut u1 = Vec::with_capacity(grid.len());
    // E(x) is needed at the sorted abscissae |r - t| and r + t; accumulate it
    // panel-by-panel instead of integrating from 0 every time
    let mut xs: Vec<f64> = grid
        .nodes()
        .flat_map(|r| [(r - t).abs(), (r + t).abs()])
        .collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    let mut e_at = std::collections::BTreeMap::new();
    let mut acc = if xs[0] == 0.0 {
        0.0
    } else {
        vel_integral(init, xs[0])
    };
    e_at.insert(xs[0].to_bits(), acc);
    for w in xs.windows(2) {
        acc += gl_panel(&|y| y * init.u1_at(y), w[0], w[1]);
        e_at.insert(w[1].to_bits(), acc);
    }
    for r in grid.nodes() {
        if r <= R_SWITCH {
            u0.push(value_unchecked(init, t, r));
            u1.push(velocity_unchecked(init, t, r));
            continue;
        }
        let pos = w0(init, r + t) + w0(init, r - t);
        let ea = e_at[&(r + t).abs().to_bits()];
        let eb = e_at[&(r - t).abs().to_bits()];
        u0.push((pos + ea - eb) / (2.0 * r));
        u1.push(velocity_unchecked(init, t, r));
    }
    StatePair::new(init.dim(), grid, u0, u1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dim::Dim;
    use crate::pspace::PowerPair;

    fn gaussian_data() -> RadialData {
        RadialData::analytic(
            Dim::new(3).unwrap(),
            |r| (-r * r).exp(),
            |r| -2.0 * r * (-r * r).exp(),
            |_| 0.0,
            8.0,
        )
        .unwrap()
    }

    #[test]
    fn time_zero_reproduces_data() {
        let init = gaussian_data();
        for r in [0.0, 0.3, 1.0, 2.7] {
            let v = exact_n3(&init, 0.0, r).unwrap();
            assert!((v - (-(r * r)).exp()).abs() < 1e-12, "r={r} v={v}");
        }
    }

    #[test]
    fn gaussian_matches_closed_form_inside_and_outside_cone() {
        let init = gaussian_data();
        for (t, r) in [(0.5f64, 2.0f64), (1.5, 0.5), (3.0, 1.0), (-1.0, 0.4)] {
            let want = ((r + t) * (-((r + t) * (r + t))).exp()
                + (r - t) * (-((r - t) * (r - t))).exp())
                / (2.0 * r);
            let got = exact_n3(&init, t, r).unwrap();
            assert!((got - want).abs() < 1e-12, "t={t} r={r}");
        }
    }

    #[test]
    fn inverse_r_is_static_outside_the_cone() {
        let init = RadialData::from_power_pairs(
            Dim::new(3).unwrap(),
            vec![PowerPair::position(1.0, 1.0).unwrap()],
        )
        .unwrap();
        for (t, r) in [(0.5, 1.0), (1.0, 1.5), (2.0, 2.5)] {
            let got = exact_n3(&init, t, r).unwrap();
            assert!((got - 1.0 / r).abs() < 1e-12, "t={t} r={r} got={got}");
        }
        // inside the cone the odd extension radiates the singularity away
        let inside = exact_n3(&init, 2.0, 1.0).unwrap();
        assert!(inside.abs() < 1e-12, "got {inside}");
    }

    #[test]
    fn gaussian_velocity_matches_closed_form() {
        // u1 = e^{-r^2}: E(x) = (1 - e^{-x^2})/2, so
        // u(t,r) = [e^{-(r-t)^2} - e^{-(r+t)^2}] / (4r)
        let init = RadialData::analytic(
            Dim::new(3).unwrap(),
            |_| 0.0,
            |_| 0.0,
            |r| (-r * r).exp(),
            8.0,
        )
        .unwrap();
        for (t, r) in [(0.7f64, 1.3f64), (2.0, 0.6), (1.0, 3.5)] {
            let want =
                ((-((r - t) * (r - t))).exp() - (-((r + t) * (r + t))).exp()) / (4.0 * r);
            let got = exact_n3(&init, t, r).unwrap();
            assert!((got - want).abs() < 1e-10, "t={t} r={r}");
        }
    }

    #[test]
    fn origin_limit_is_continuous() {
        let init = gaussian_data();
        let at_zero = exact_n3(&init, 0.8, 0.0).unwrap();
        let nearby = exact_n3(&init, 0.8, 2e-5).unwrap();
        assert!((at_zero - nearby).abs() < 1e-7, "{at_zero} vs {nearby}");
    }

    #[test]
    fn sampled_state_agrees_with_pointwise_values() {
        let init = gaussian_data();
        let g = RadialGrid::origin_to(4.0, 1.0 / 64.0).unwrap();
        let s = exact_n3_state(&init, 1.0, g).unwrap();
        for (j, r) in s.grid().nodes().enumerate().step_by(17) {
            let want = exact_n3(&init, 1.0, r).unwrap();
            assert!((s.u0()[j] - want).abs() < 1e-11, "r={r}");
        }
    }

    #[test]
    fn rejects_strongly_singular_velocity_tails() {
        let init = RadialData::from_power_pairs(
            Dim::new(3).unwrap(),
            vec![PowerPair::velocity(2.0, 1.0).unwrap()],
        )
        .unwrap();
        assert!(matches!(
            exact_n3(&init, 1.0, 1.0),
            Err(Error::RejectedInput { .. })
        ));
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let init = RadialData::analytic(
            Dim::new(5).unwrap(),
            |r| (-r * r).exp(),
            |r| -2.0 * r * (-r * r).exp(),
            |_| 0.0,
            8.0,
        )
        .unwrap();
        assert!(exact_n3(&init, 0.5, 1.0).is_err());
    }
}
