//! Named initial-data presets shared by the test harnesses and the CLI.

use crate::data::RadialData;
use crate::dim::Dim;
use crate::error::{Error, Result};
use crate::pspace::build_basis;
use crate::soliton::Soliton;

/// Smooth compactly supported bump profile centered at `center`, vanishing
/// identically outside |r - center| >= width, with unit peak.
pub fn bump_profile(center: f64, width: f64) -> impl Fn(f64) -> f64 + Send + Sync + Copy {
    move |r: f64| {
        let x = (r - center) / width;
        if x.abs() < 1.0 {
            (1.0 - 1.0 / (1.0 - x * x)).exp()
        } else {
            0.0
        }
    }
}

fn bump_profile_deriv(center: f64, width: f64) -> impl Fn(f64) -> f64 + Send + Sync + Copy {
    move |r: f64| {
        let x = (r - center) / width;
        if x.abs() < 1.0 {
            let d = 1.0 - x * x;
            (1.0 - 1.0 / d).exp() * (-2.0 * x / (d * d)) / width
        } else {
            0.0
        }
    }
}

/// Position-slot bump on [a, b]: (chi, 0) with chi supported on the interval.
pub fn bump(dim: Dim, a: f64, b: f64, amplitude: f64) -> Result<RadialData> {
    if !(b > a && a >= 0.0) {
        return Err(Error::invalid(format!("bad bump interval [{a}, {b}]")));
    }
    let center = 0.5 * (a + b);
    let width = 0.5 * (b - a);
    let f = bump_profile(center, width);
    let fp = bump_profile_deriv(center, width);
    RadialData::analytic(
        dim,
        move |r| amplitude * f(r),
        move |r| amplitude * fp(r),
        |_| 0.0,
        b,
    )
}

/// Velocity-slot bump on [a, b]: (0, chi).
pub fn velocity_bump(dim: Dim, a: f64, b: f64, amplitude: f64) -> Result<RadialData> {
    if !(b > a && a >= 0.0) {
        return Err(Error::invalid(format!("bad bump interval [{a}, {b}]")));
    }
    let center = 0.5 * (a + b);
    let width = 0.5 * (b - a);
    let f = bump_profile(center, width);
    RadialData::analytic(dim, |_| 0.0, |_| 0.0, move |r| amplitude * f(r), b)
}

/// Gaussian position data (e^{-r^2}, 0) with the stated support radius for
/// bookkeeping purposes (the tail below 1e-8 relative is treated as zero).
pub fn gaussian(dim: Dim, amplitude: f64) -> Result<RadialData> {
    RadialData::analytic(
        dim,
        move |r| amplitude * (-r * r).exp(),
        move |r| amplitude * -2.0 * r * (-r * r).exp(),
        |_| 0.0,
        6.5,
    )
}

/// Velocity Gaussian (0, r e^{-r^2}).
pub fn gaussian_velocity(dim: Dim, amplitude: f64) -> Result<RadialData> {
    RadialData::analytic(
        dim,
        |_| 0.0,
        |_| 0.0,
        move |r| amplitude * r * (-r * r).exp(),
        7.0,
    )
}

/// Ground-state soliton data (W_lambda, 0).
pub fn w_soliton(dim: Dim, lambda: f64) -> Result<RadialData> {
    Ok(RadialData::soliton(Soliton::new(dim, lambda, false)?))
}

/// The k-th asymptotic tail basis element, unit coefficient.
pub fn xi_tail(dim: Dim, k: usize) -> Result<RadialData> {
    let basis = build_basis(dim)?;
    if k == 0 || k > basis.m() {
        return Err(Error::invalid(format!(
            "tail index {k} out of range 1..={}",
            basis.m()
        )));
    }
    RadialData::from_power_pairs(dim, vec![*basis.element(k)])
}

/// Scaled tail plus a compact bump below `bump_hi`: the canonical
/// weakly-nonradiative-looking test instance.
pub fn tail_plus_bump(
    dim: Dim,
    k: usize,
    ell: f64,
    bump_lo: f64,
    bump_hi: f64,
    bump_amp: f64,
) -> Result<RadialData> {
    let basis = build_basis(dim)?;
    if k == 0 || k > basis.m() {
        return Err(Error::invalid(format!(
            "tail index {k} out of range 1..={}",
            basis.m()
        )));
    }
    let mut tail = *basis.element(k);
    tail.coeff *= ell;
    bump(dim, bump_lo, bump_hi, bump_amp)?.with_power_pairs(vec![tail])
}

/// Parse a preset descriptor as used by the CLI: `gaussian`, `gaussian_vel`,
/// `bump[a,b]`, `vbump[a,b]`, `w_soliton`, `w_soliton[lambda]`, `xi_tail[k]`,
/// `zero`. An optional leading `amp*` scales the data.
pub fn parse_preset(dim: Dim, descriptor: &str) -> Result<RadialData> {
    let s = descriptor.trim();
    let (amp, rest) = match s.split_once('*') {
        Some((a, rest)) => {
            let amp: f64 = a.trim().parse().map_err(|_| {
                Error::invalid(format!("bad amplitude prefix in preset `{s}`"))
            })?;
            (amp, rest.trim())
        }
        None => (1.0, s),
    };
    let (name, args) = match rest.find('[') {
        Some(i) => {
            let close = rest
                .rfind(']')
                .ok_or_else(|| Error::invalid(format!("unclosed bracket in `{s}`")))?;
            (
                &rest[..i],
                rest[i + 1..close]
                    .split(',')
                    .map(|v| v.trim().to_string())
                    .collect::<Vec<_>>(),
            )
        }
        None => (rest, Vec::new()),
    };
    let num = |i: usize| -> Result<f64> {
        args.get(i)
            .ok_or_else(|| Error::invalid(format!("preset `{name}` needs argument {i}")))?
            .parse()
            .map_err(|_| Error::invalid(format!("bad numeric argument in `{s}`")))
    };
    match name {
        "zero" => Ok(RadialData::zero(dim)),
        "gaussian" => gaussian(dim, amp),
        "gaussian_vel" => gaussian_velocity(dim, amp),
        "bump" => bump(dim, num(0)?, num(1)?, amp),
        "vbump" => velocity_bump(dim, num(0)?, num(1)?, amp),
        "w_soliton" => {
            let lambda = if args.is_empty() { 1.0 } else { num(0)? };
            w_soliton(dim, lambda)
        }
        "xi_tail" => {
            let k = num(0)? as usize;
            let mut d = xi_tail(dim, k)?;
            if amp != 1.0 {
                let mut ps = d.powers().to_vec();
                for p in &mut ps {
                    p.coeff *= amp;
                }
                d = RadialData::from_power_pairs(dim, ps)?;
            }
            Ok(d)
        }
        other => Err(Error::invalid(format!("unknown preset `{other}`"))),
    }
}
