//! Exact linear evolution of inverse-power data. The Laplacian iterates
//! Delta^j r^-a = [prod_{i<j} (a+2i)(a+2i+2-N)] r^-(a+2j) hit zero whenever
//! a = N - 2k for a positive integer k, so for the asymptotic tails the
//! time-Taylor series is a finite polynomial and the flow is closed-form.

use crate::dim::Dim;
use crate::error::{Error, Result};
use crate::pspace::{PowerPair, Slot};

const J_MAX: usize = 64;

/// Laplacian ladder factors L_j for r^-a in dimension N, up to (and
/// including) the first zero; None if the product never terminates.
fn ladder(dim: Dim, a: f64) -> Option<Vec<f64>> {
    let nf = dim.nf();
    let mut l = vec![1.0];
    for j in 0..J_MAX {
        let i = j as f64;
        let factor = (a + 2.0 * i) * (a + 2.0 * i + 2.0 - nf);
        let next = l[j] * factor;
        l.push(next);
        if next == 0.0 {
            return Some(l);
        }
    }
    None
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Evolve a finite sum of power pairs by time t under the linear flow.
/// Returns the snapshot (u0, u1) as a new list of power pairs.
pub fn flow_powers(dim: Dim, pairs: &[PowerPair], t: f64) -> Result<Vec<PowerPair>> {
    let mut out: Vec<PowerPair> = Vec::new();
    let mut push = |slot: Slot, a: f64, coeff: f64| {
        if coeff == 0.0 {
            return;
        }
        if let Some(p) = out
            .iter_mut()
            .find(|p| p.slot == slot && (p.a - a).abs() < 1e-12)
        {
            p.coeff += coeff;
        } else {
            out.push(PowerPair::new(slot, a, coeff).expect("valid power"));
        }
    };
    for p in pairs {
        let l = ladder(dim, p.a).ok_or_else(|| Error::RejectedInput {
            reason: format!(
                "the series for r^-{} does not truncate in dimension {}",
                p.a,
                dim.n()
            ),
        })?;
        match p.slot {
            Slot::Position => {
                // u(t) += sum_j t^{2j}/(2j)! L_j r^-(a+2j)
                for (j, lj) in l.iter().enumerate() {
                    if *lj == 0.0 {
                        break;
                    }
                    let a_j = p.a + 2.0 * j as f64;
                    let c0 = p.coeff * t.powi(2 * j as i32) / factorial(2 * j);
                    push(Slot::Position, a_j, c0 * lj);
                    if j >= 1 {
                        let c1 =
                            p.coeff * t.powi(2 * j as i32 - 1) / factorial(2 * j - 1);
                        push(Slot::Velocity, a_j, c1 * lj);
                    }
                }
            }
            Slot::Velocity => {
                // u(t) += sum_j t^{2j+1}/(2j+1)! L_j r^-(a+2j)
                for (j, lj) in l.iter().enumerate() {
                    if *lj == 0.0 {
                        break;
                    }
                    let a_j = p.a + 2.0 * j as f64;
                    let c0 = p.coeff * t.powi(2 * j as i32 + 1) / factorial(2 * j + 1);
                    push(Slot::Position, a_j, c0 * lj);
                    let c1 = p.coeff * t.powi(2 * j as i32) / factorial(2 * j);
                    push(Slot::Velocity, a_j, c1 * lj);
                }
            }
        }
    }
    Ok(out)
}

/// Closed-form exterior H energy of a power-pair snapshot beyond `radius`.
pub fn exterior_energy_of_powers(dim: Dim, pairs: &[PowerPair], radius: f64) -> Result<f64> {
    let mut total = 0.0;
    for (i, p) in pairs.iter().enumerate() {
        for q in &pairs[i..] {
            let inner = p.h_inner_exterior(q, dim, radius)?;
            total += if std::ptr::eq(p, q) { inner } else { 2.0 * inner };
        }
    }
    Ok(total)
}

/// Whether the linear flow of this power is static (harmonic position tail).
pub fn is_static(dim: Dim, p: &PowerPair) -> bool {
    p.slot == Slot::Position && (p.a - (dim.nf() - 2.0)).abs() < 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: u32) -> Dim {
        Dim::new(n).unwrap()
    }

    #[test]
    fn time_zero_is_identity() {
        let pairs = vec![
            PowerPair::position(3.0, 2.0).unwrap(),
            PowerPair::velocity(3.0, -1.5).unwrap(),
        ];
        let out = flow_powers(d(5), &pairs, 0.0).unwrap();
        assert_eq!(out.len(), 2);
        for p in &pairs {
            let q = out.iter().find(|q| q.slot == p.slot && q.a == p.a).unwrap();
            assert_eq!(q.coeff, p.coeff);
        }
    }

    #[test]
    fn harmonic_tails_are_static() {
        for n in [3u32, 5, 7] {
            let dim = d(n);
            let p = PowerPair::position(dim.nf() - 2.0, 1.0).unwrap();
            let out = flow_powers(dim, &[p], 1.7).unwrap();
            assert_eq!(out.len(), 1);
            assert_eq!(out[0].slot, Slot::Position);
            assert_eq!(out[0].a, dim.nf() - 2.0);
            assert!((out[0].coeff - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn n7_shallow_tail_flows_quadratically() {
        // Delta r^-3 = -6 r^-5 in N=7, Delta r^-5 = 0:
        // u(t) = r^-3 - 3 t^2 r^-5, du/dt = -6 t r^-5
        let t = 0.8;
        let out = flow_powers(d(7), &[PowerPair::position(3.0, 1.0).unwrap()], t).unwrap();
        let u0_3 = out
            .iter()
            .find(|p| p.slot == Slot::Position && p.a == 3.0)
            .unwrap();
        let u0_5 = out
            .iter()
            .find(|p| p.slot == Slot::Position && p.a == 5.0)
            .unwrap();
        let u1_5 = out
            .iter()
            .find(|p| p.slot == Slot::Velocity && p.a == 5.0)
            .unwrap();
        assert!((u0_3.coeff - 1.0).abs() < 1e-15);
        assert!((u0_5.coeff - (-3.0 * t * t)).abs() < 1e-14);
        assert!((u1_5.coeff - (-6.0 * t)).abs() < 1e-14);
        assert_eq!(out.len(), 3);
    }

    #[test]
    fn n5_velocity_tail_integrates_linearly() {
        // (0, r^-3) in N=5: u(t) = (t r^-3, r^-3)
        let t = 2.5;
        let out = flow_powers(d(5), &[PowerPair::velocity(3.0, 1.0).unwrap()], t).unwrap();
        assert_eq!(out.len(), 2);
        let pos = out.iter().find(|p| p.slot == Slot::Position).unwrap();
        let vel = out.iter().find(|p| p.slot == Slot::Velocity).unwrap();
        assert!((pos.coeff - t).abs() < 1e-15 && pos.a == 3.0);
        assert!((vel.coeff - 1.0).abs() < 1e-15 && vel.a == 3.0);
    }

    #[test]
    fn flowed_snapshot_solves_the_wave_equation_discretely() {
        // finite-difference residual of d_t^2 u = Delta u at interior points
        let dim = d(7);
        let pairs = vec![PowerPair::position(3.0, 1.0).unwrap()];
        let dt = 1e-4;
        for &(t, r) in &[(0.5f64, 2.0f64), (1.5, 3.7)] {
            let eval_u0 = |tt: f64, rr: f64| -> f64 {
                flow_powers(dim, &pairs, tt)
                    .unwrap()
                    .iter()
                    .map(|p| p.u0(rr))
                    .sum()
            };
            let utt =
                (eval_u0(t + dt, r) - 2.0 * eval_u0(t, r) + eval_u0(t - dt, r)) / (dt * dt);
            let dr = 1e-4;
            let lap = (eval_u0(t, r + dr) - 2.0 * eval_u0(t, r) + eval_u0(t, r - dr))
                / (dr * dr)
                + (dim.nf() - 1.0) / r * (eval_u0(t, r + dr) - eval_u0(t, r - dr))
                    / (2.0 * dr);
            assert!((utt - lap).abs() < 1e-5, "t={t} r={r} utt={utt} lap={lap}");
        }
    }

    #[test]
    fn exterior_energy_of_static_tail_decays_like_inverse_radius() {
        // (1/r, 0) in N=3: energy beyond rho is 1/rho
        let dim = d(3);
        let pairs = vec![PowerPair::position(1.0, 1.0).unwrap()];
        for rho in [1.0, 2.0, 8.0] {
            let e = exterior_energy_of_powers(dim, &pairs, rho).unwrap();
            assert!((e - 1.0 / rho).abs() < 1e-14, "rho={rho} e={e}");
        }
    }

    #[test]
    fn channel_of_velocity_tail_vanishes_at_late_times() {
        // N=5 xi_1 tail evolves to (t r^-3, r^-3); outside 1+t the energy is
        // 3t^2/(1+t)^3 + 1/(1+t), decaying to zero like 4/t
        let dim = d(5);
        let pairs = vec![PowerPair::velocity(3.0, 1.0).unwrap()];
        let mut prev = f64::INFINITY;
        for t in [0.0, 1.0, 4.0, 16.0, 1e5] {
            let snap = flow_powers(dim, &pairs, t).unwrap();
            let e = exterior_energy_of_powers(dim, &snap, 1.0 + t).unwrap();
            let want = 3.0 * t * t / (1.0 + t).powi(3) + 1.0 / (1.0 + t);
            assert!((e - want).abs() < 1e-12 * want.max(1.0), "t={t} e={e}");
            assert!(e < prev);
            prev = e;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn generic_power_is_rejected() {
        let r = flow_powers(d(5), &[PowerPair::position(2.2, 1.0).unwrap()], 1.0);
        assert!(matches!(r, Err(Error::RejectedInput { .. })));
    }
}
