//! Radial data as an additive decomposition: a smooth compactly supported
//! part (analytic closures or grid samples), a list of exact power-law tails,
//! and an optional soliton. Exterior norms and moments combine closed forms
//! for the power block with quadrature for everything else, so analytic tail
//! information is never lost to grid truncation.

use std::fmt;
use std::sync::Arc;

use crate::dim::Dim;
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::pspace::{PowerPair, Slot};
use crate::quad::{integrate, integrate_to_inf};
use crate::soliton::Soliton;
use crate::state::{window_integral, StatePair};

type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct AnalyticPart {
    u0: RadialFn,
    du0: RadialFn,
    u1: RadialFn,
    support: f64,
}

#[derive(Clone)]
pub enum SmoothPart {
    None,
    Analytic(AnalyticPart),
    Sampled(StatePair),
}

/// A radial pair (u0, u1) = smooth + sum of power tails + optional soliton.
#[derive(Clone)]
pub struct RadialData {
    dim: Dim,
    smooth: SmoothPart,
    powers: Vec<PowerPair>,
    soliton: Option<Soliton>,
}

impl fmt::Debug for RadialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let smooth = match &self.smooth {
            SmoothPart::None => "none".to_string(),
            SmoothPart::Analytic(a) => format!("analytic(support={})", a.support),
            SmoothPart::Sampled(s) => format!(
                "sampled([{}, {}], n={})",
                s.grid().r0(),
                s.grid().last(),
                s.grid().len()
            ),
        };
        f.debug_struct("RadialData")
            .field("dim", &self.dim)
            .field("smooth", &smooth)
            .field("powers", &self.powers)
            .field("soliton", &self.soliton)
            .finish()
    }
}

const GL_REL_TOL: f64 = 1e-13;

fn panels_for(a: f64, b: f64) -> usize {
    (((b - a) * 4.0).ceil() as usize).clamp(16, 4096)
}

impl RadialData {
    pub fn zero(dim: Dim) -> Self {
        RadialData {
            dim,
            smooth: SmoothPart::None,
            powers: Vec::new(),
            soliton: None,
        }
    }

    /// Smooth compact part from closures; u0, du0, u1 must all vanish at and
    /// beyond `support`. du0 is cross-checked against a difference quotient
    /// at a few radii to catch inconsistent inputs.
    pub fn analytic<F0, F0p, F1>(dim: Dim, u0: F0, du0: F0p, u1: F1, support: f64) -> Result<Self>
    where
        F0: Fn(f64) -> f64 + Send + Sync + 'static,
        F0p: Fn(f64) -> f64 + Send + Sync + 'static,
        F1: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(support > 0.0) || !support.is_finite() {
            return Err(Error::BadScale { value: support });
        }
        for probe in [support, support * 1.5] {
            if u0(probe).abs() > 1e-8 || du0(probe).abs() > 1e-8 || u1(probe).abs() > 1e-8 {
                return Err(Error::RejectedInput {
                    reason: format!("analytic part does not vanish at r = {probe}"),
                });
            }
        }
        for k in 1..=3 {
            let r = support * k as f64 / 5.0;
            let eps = 1e-5 * support.max(1.0);
            let fd = (u0(r + eps) - u0(r - eps)) / (2.0 * eps);
            let d = du0(r);
            if (d - fd).abs() > 1e-3 * (1.0 + d.abs() + fd.abs()) {
                return Err(Error::RejectedInput {
                    reason: format!("du0 inconsistent with u0 at r = {r}: {d} vs {fd}"),
                });
            }
        }
        Ok(RadialData {
            dim,
            smooth: SmoothPart::Analytic(AnalyticPart {
                u0: Arc::new(u0),
                du0: Arc::new(du0),
                u1: Arc::new(u1),
                support,
            }),
            powers: Vec::new(),
            soliton: None,
        })
    }

    pub fn sampled(state: StatePair) -> Self {
        RadialData {
            dim: state.dim(),
            smooth: SmoothPart::Sampled(state),
            powers: Vec::new(),
            soliton: None,
        }
    }

    pub fn from_power_pairs(dim: Dim, powers: Vec<PowerPair>) -> Result<Self> {
        RadialData::zero(dim).with_power_pairs(powers)
    }

    pub fn soliton(s: Soliton) -> Self {
        RadialData {
            dim: s.dim(),
            smooth: SmoothPart::None,
            powers: Vec::new(),
            soliton: Some(s),
        }
    }

    pub fn with_power_pairs(mut self, mut powers: Vec<PowerPair>) -> Result<Self> {
        for p in &powers {
            if !(p.a > 0.0) || !p.coeff.is_finite() {
                return Err(Error::RejectedInput {
                    reason: format!("bad power pair {p:?}"),
                });
            }
        }
        self.powers.append(&mut powers);
        Ok(self)
    }

    pub fn with_soliton(mut self, s: Soliton) -> Result<Self> {
        if s.dim() != self.dim {
            return Err(Error::invalid("soliton dimension mismatch"));
        }
        if self.soliton.is_some() {
            return Err(Error::invalid("data already has a soliton part"));
        }
        self.soliton = Some(s);
        Ok(self)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn powers(&self) -> &[PowerPair] {
        &self.powers
    }

    pub fn soliton_part(&self) -> Option<&Soliton> {
        self.soliton.as_ref()
    }

    pub fn smooth_part(&self) -> &SmoothPart {
        &self.smooth
    }

    pub fn has_sampled_part(&self) -> bool {
        matches!(self.smooth, SmoothPart::Sampled(_))
    }

    /// The same data with every power tail removed.
    pub fn without_powers(&self) -> RadialData {
        RadialData {
            dim: self.dim,
            smooth: self.smooth.clone(),
            powers: Vec::new(),
            soliton: self.soliton.clone(),
        }
    }

    /// Steepest inverse-power exponent among velocity-slot tails, if any.
    pub fn worst_velocity_power(&self) -> Option<f64> {
        self.powers
            .iter()
            .filter(|p| p.slot == Slot::Velocity && p.coeff != 0.0)
            .map(|p| p.a)
            .fold(None, |acc, a| Some(acc.map_or(a, |b: f64| b.max(a))))
    }

    pub fn has_powers(&self) -> bool {
        !self.powers.is_empty()
    }

    /// Right edge of the non-analytic (quadrature-needing) smooth region.
    fn smooth_end(&self) -> Option<f64> {
        match &self.smooth {
            SmoothPart::None => None,
            SmoothPart::Analytic(a) => Some(a.support),
            SmoothPart::Sampled(s) => Some(s.grid().last()),
        }
    }

    /// Outer edge of the compact smooth part, if any.
    pub fn smooth_support_end(&self) -> Option<f64> {
        self.smooth_end()
    }

    fn smooth_u0(&self, r: f64) -> f64 {
        match &self.smooth {
            SmoothPart::None => 0.0,
            SmoothPart::Analytic(a) => {
                if r < a.support {
                    (a.u0)(r)
                } else {
                    0.0
                }
            }
            SmoothPart::Sampled(s) => interp(s.grid(), s.u0(), r),
        }
    }

    fn smooth_du0(&self, r: f64) -> f64 {
        match &self.smooth {
            SmoothPart::None => 0.0,
            SmoothPart::Analytic(a) => {
                if r < a.support {
                    (a.du0)(r)
                } else {
                    0.0
                }
            }
            SmoothPart::Sampled(s) => interp(s.grid(), &s.du0(), r),
        }
    }

    fn smooth_u1(&self, r: f64) -> f64 {
        match &self.smooth {
            SmoothPart::None => 0.0,
            SmoothPart::Analytic(a) => {
                if r < a.support {
                    (a.u1)(r)
                } else {
                    0.0
                }
            }
            SmoothPart::Sampled(s) => interp(s.grid(), s.u1(), r),
        }
    }

    fn soliton_u0(&self, r: f64) -> f64 {
        self.soliton.as_ref().map_or(0.0, |s| s.value(r))
    }

    fn soliton_du0(&self, r: f64) -> f64 {
        self.soliton.as_ref().map_or(0.0, |s| s.deriv(r))
    }

    pub fn u0_at(&self, r: f64) -> f64 {
        let p: f64 = self.powers.iter().map(|q| q.u0(r)).sum();
        self.smooth_u0(r) + self.soliton_u0(r) + p
    }

    pub fn du0_at(&self, r: f64) -> f64 {
        let p: f64 = self.powers.iter().map(|q| q.du0(r)).sum();
        self.smooth_du0(r) + self.soliton_du0(r) + p
    }

    pub fn u1_at(&self, r: f64) -> f64 {
        let p: f64 = self.powers.iter().map(|q| q.u1(r)).sum();
        self.smooth_u1(r) + p
    }

    /// Sample onto a grid. Power tails are singular at the origin, so a grid
    /// touching r = 0 is rejected when tails are present (the wave solver
    /// applies its own interior extension instead).
    pub fn sample_on(&self, grid: &RadialGrid) -> Result<StatePair> {
        if grid.starts_at_origin() && self.has_powers() {
            return Err(Error::RejectedInput {
                reason: "power tails are singular at the origin; sample on r > 0 or extend"
                    .to_string(),
            });
        }
        StatePair::from_fn(self.dim, grid.clone(), |r| self.u0_at(r), |r| self.u1_at(r))
    }

    /// H-preserving rescaling f -> f_(lambda), exact on every part.
    pub fn rescaled(&self, lambda: f64) -> Result<RadialData> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::BadScale { value: lambda });
        }
        let smooth = match &self.smooth {
            SmoothPart::None => SmoothPart::None,
            SmoothPart::Sampled(s) => SmoothPart::Sampled(s.rescaled(lambda)?),
            SmoothPart::Analytic(a) => {
                let n = self.dim.nf();
                let (c0, c1) = (lambda.powf(1.0 - n / 2.0), lambda.powf(-n / 2.0));
                let (u0, du0, u1) = (a.u0.clone(), a.du0.clone(), a.u1.clone());
                SmoothPart::Analytic(AnalyticPart {
                    u0: Arc::new(move |r| c0 * u0(r / lambda)),
                    du0: Arc::new({
                        let s = c0 / lambda;
                        move |r| s * du0(r / lambda)
                    }),
                    u1: Arc::new(move |r| c1 * u1(r / lambda)),
                    support: a.support * lambda,
                })
            }
        };
        Ok(RadialData {
            dim: self.dim,
            smooth,
            powers: self
                .powers
                .iter()
                .map(|p| p.rescaled(self.dim, lambda))
                .collect(),
            soliton: self.soliton.as_ref().map(|s| s.rescaled(lambda)),
        })
    }

    /// d_r u0 and u1 of the non-power parts (smooth + soliton).
    fn rest_fields(&self, r: f64) -> (f64, f64) {
        (
            self.smooth_du0(r) + self.soliton_du0(r),
            self.smooth_u1(r),
        )
    }

    fn powers_fields(&self, r: f64) -> (f64, f64) {
        let mut du = 0.0;
        let mut v = 0.0;
        for p in &self.powers {
            match p.slot {
                Slot::Position => du += p.du0(r),
                Slot::Velocity => v += p.u1(r),
            }
        }
        (du, v)
    }

    /// Mixed + rest H-density at r: everything except the closed-form
    /// power x power block.
    fn mixed_density(&self, r: f64) -> f64 {
        let (pdu, pv) = self.powers_fields(r);
        let (rdu, rv) = self.rest_fields(r);
        (2.0 * pdu * rdu + rdu * rdu + 2.0 * pv * rv + rv * rv) * r.powf(self.dim.nf() - 1.0)
    }

    /// Soliton-involving density beyond the smooth region.
    fn tail_density(&self, r: f64) -> f64 {
        let (pdu, _) = self.powers_fields(r);
        let sdu = self.soliton_du0(r);
        (2.0 * pdu * sdu + sdu * sdu) * r.powf(self.dim.nf() - 1.0)
    }

    /// Squared H(R) norm over (R, infinity). Closed form for the power
    /// block, Gauss-Legendre / trapezoid quadrature for the rest.
    pub fn h_norm_sq_exterior(&self, radius: f64) -> Result<f64> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::BadScale { value: radius });
        }
        if radius == 0.0 && self.has_powers() {
            return Err(Error::Divergent {
                what: "power tails have infinite energy down to r = 0".to_string(),
            });
        }
        let mut total = 0.0;
        for (i, p) in self.powers.iter().enumerate() {
            for (j, q) in self.powers.iter().enumerate().skip(i) {
                let v = p.h_inner_exterior(q, self.dim, radius)?;
                total += if i == j { v } else { 2.0 * v };
            }
        }
        match &self.smooth {
            SmoothPart::None => {
                if self.soliton.is_some() {
                    total += integrate_to_inf(&|r| self.tail_density(r), radius, GL_REL_TOL);
                }
            }
            SmoothPart::Analytic(a) => {
                if radius < a.support {
                    total += integrate(
                        &|r| self.mixed_density(r),
                        radius,
                        a.support,
                        panels_for(radius, a.support),
                    );
                }
                if self.soliton.is_some() {
                    let start = radius.max(a.support);
                    total += integrate_to_inf(&|r| self.tail_density(r), start, GL_REL_TOL);
                }
            }
            SmoothPart::Sampled(s) => {
                let g = s.grid();
                if radius < g.r0() && (self.soliton.is_some() || self.has_powers()) {
                    total += integrate(
                        &|r| self.tail_density(r),
                        radius,
                        g.r0(),
                        panels_for(radius, g.r0()),
                    );
                }
                let du = s.du0();
                let nf = self.dim.nf();
                let w: Vec<f64> = g
                    .nodes()
                    .enumerate()
                    .map(|(j, r)| {
                        let (pdu, pv) = self.powers_fields(r);
                        let sdu = self.soliton_du0(r);
                        let rdu = du[j] + sdu;
                        let rv = s.u1()[j];
                        (2.0 * pdu * rdu + rdu * rdu + 2.0 * pv * rv + rv * rv)
                            * r.powf(nf - 1.0)
                    })
                    .collect();
                total += window_integral(g, &w, radius, g.last());
                // sampled data is dropped beyond its grid: demand it is small there
                let jn = g.len() - 1;
                let end_density = (du[jn] * du[jn] + s.u1()[jn] * s.u1()[jn])
                    * g.last().powf(nf - 1.0);
                let peak = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let tail = end_density * g.last();
                let limit = 1e-4 * total.abs() + 1e-13 * peak * g.last();
                if tail > limit && radius < g.last() {
                    return Err(Error::TailTruncation { tail, limit });
                }
                if self.soliton.is_some() {
                    let start = radius.max(g.last());
                    total += integrate_to_inf(&|r| self.tail_density(r), start, GL_REL_TOL);
                }
            }
        }
        Ok(total)
    }

    /// Exterior H(R) moment against a probe power pair.
    pub fn h_moment_exterior(&self, probe: &PowerPair, radius: f64) -> Result<f64> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::BadScale { value: radius });
        }
        let mut total = 0.0;
        for p in &self.powers {
            total += probe.h_inner_exterior(p, self.dim, radius)?;
        }
        let nf = self.dim.nf();
        // soliton beyond the smooth window (the window integrals below pick
        // up the soliton inside it)
        if self.soliton.is_some() && probe.slot == Slot::Position {
            let start_tail = self.smooth_end().map_or(radius, |e| e.max(radius));
            total += integrate_to_inf(
                &|r| probe.du0(r) * self.soliton_du0(r) * r.powf(nf - 1.0),
                start_tail,
                GL_REL_TOL,
            );
        }
        match &self.smooth {
            SmoothPart::None => {}
            SmoothPart::Analytic(a) => {
                if radius < a.support {
                    total += integrate(
                        &|r| {
                            (probe.du0(r) * (self.smooth_du0(r) + self.soliton_du0(r))
                                + probe.u1(r) * self.smooth_u1(r))
                                * r.powf(nf - 1.0)
                        },
                        radius,
                        a.support,
                        panels_for(radius, a.support),
                    );
                }
            }
            SmoothPart::Sampled(s) => {
                let g = s.grid();
                if radius < g.r0() && self.soliton.is_some() && probe.slot == Slot::Position {
                    total += integrate(
                        &|r| probe.du0(r) * self.soliton_du0(r) * r.powf(nf - 1.0),
                        radius,
                        g.r0(),
                        panels_for(radius, g.r0()),
                    );
                }
                let du = s.du0();
                let w: Vec<f64> = g
                    .nodes()
                    .enumerate()
                    .map(|(j, r)| {
                        (probe.du0(r) * (du[j] + self.soliton_du0(r))
                            + probe.u1(r) * s.u1()[j])
                            * r.powf(nf - 1.0)
                    })
                    .collect();
                total += window_integral(g, &w, radius, g.last());
            }
        }
        Ok(total)
    }
}

/// Linear interpolation of node values; zero outside the grid.
fn interp(grid: &RadialGrid, y: &[f64], r: f64) -> f64 {
    if r < grid.r0() || r > grid.last() {
        return 0.0;
    }
    let t = (r - grid.r0()) / grid.h();
    let j = (t.floor() as usize).min(grid.len() - 2);
    let frac = t - j as f64;
    y[j] * (1.0 - frac) + y[j + 1] * frac
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::soliton::w_tail_coefficient;

    fn d(n: u32) -> Dim {
        Dim::new(n).unwrap()
    }

    #[test]
    fn power_norm_matches_closed_form() {
        // N=3, (1/r, 0): ||.||^2_{H(R)} = 1/R
        let data =
            RadialData::from_power_pairs(d(3), vec![PowerPair::position(1.0, 1.0).unwrap()])
                .unwrap();
        for radius in [0.5, 1.0, 4.0] {
            let v = data.h_norm_sq_exterior(radius).unwrap();
            assert!((v - 1.0 / radius).abs() < 1e-14);
        }
    }

    #[test]
    fn soliton_norm_matches_quadrature_reference() {
        // N=5 ground state: compare two radii via the dyadic integrator and
        // monotonicity sanity
        let data = RadialData::soliton(Soliton::ground(d(5)));
        let a = data.h_norm_sq_exterior(1.0).unwrap();
        let b = data.h_norm_sq_exterior(2.0).unwrap();
        assert!(a > b && b > 0.0);
        // large-R: ||W||^2 ~ 9 ell^2 / (3 R^3) = 3 ell^2 / R^3 from W' ~ -3 ell r^-4
        let ell = w_tail_coefficient(d(5));
        let far = data.h_norm_sq_exterior(200.0).unwrap();
        let expect = 3.0 * ell * ell / 200.0f64.powi(3);
        assert!((far / expect - 1.0).abs() < 0.05, "far={far} expect={expect}");
    }

    #[test]
    fn mixed_power_soliton_norm_is_additive_consistently() {
        // ||W + c Xi||^2 = ||W||^2 + 2<W, c Xi> + ||c Xi||^2 ; all three
        // routes must agree with a direct fine-grid quadrature
        let dim = d(5);
        let pair = PowerPair::position(3.0, 0.7).unwrap();
        let data = RadialData::soliton(Soliton::ground(dim))
            .with_power_pairs(vec![pair])
            .unwrap();
        let radius = 2.0;
        let total = data.h_norm_sq_exterior(radius).unwrap();
        // brute reference: dense trapezoid out to r = 4000
        let h = 1.0 / 64.0;
        let n = (4000.0 / h) as usize;
        let mut acc = 0.0;
        for j in 0..n {
            let r = radius + h * (j as f64 + 0.5);
            let du = -3.0 * 0.7 * r.powf(-4.0) + w_profile_deriv_local(r);
            acc += du * du * r.powf(4.0) * h;
        }
        fn w_profile_deriv_local(r: f64) -> f64 {
            crate::soliton::w_profile_deriv(Dim::new(5).unwrap(), r)
        }
        assert!((total - acc).abs() < 2e-4 * acc, "total={total} ref={acc}");
    }

    #[test]
    fn analytic_gaussian_norm_matches_closed_form() {
        // N=3, u0 = e^{-r^2}: int_0^inf (2 r e^{-r^2})^2 r^2 dr = (3/8) sqrt(pi/2)
        let data = RadialData::analytic(
            d(3),
            |r: f64| (-r * r).exp(),
            |r: f64| -2.0 * r * (-r * r).exp(),
            |_| 0.0,
            12.0,
        )
        .unwrap();
        let v = data.h_norm_sq_exterior(0.0).unwrap();
        let expect = 0.375 * (std::f64::consts::PI / 2.0).sqrt();
        assert!((v - expect).abs() < 1e-12, "v={v} expect={expect}");
    }

    #[test]
    fn rejects_analytic_part_that_does_not_vanish() {
        let r = RadialData::analytic(d(3), |_| 1.0, |_| 0.0, |_| 0.0, 5.0);
        assert!(matches!(r, Err(Error::RejectedInput { .. })));
    }

    #[test]
    fn rejects_inconsistent_derivative() {
        let r = RadialData::analytic(
            d(3),
            |r: f64| (-r * r).exp(),
            |r: f64| 2.0 * r * (-r * r).exp(), // wrong sign
            |_| 0.0,
            12.0,
        );
        assert!(matches!(r, Err(Error::RejectedInput { .. })));
    }

    #[test]
    fn sampling_power_tail_at_origin_is_rejected() {
        let data =
            RadialData::from_power_pairs(d(3), vec![PowerPair::position(1.0, 1.0).unwrap()])
                .unwrap();
        let g = RadialGrid::origin_to(2.0, 0.25).unwrap();
        assert!(data.sample_on(&g).is_err());
        let g2 = RadialGrid::new(1.0, 0.25, 8).unwrap();
        let s = data.sample_on(&g2).unwrap();
        assert!((s.u0()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rescaling_preserves_exterior_norm() {
        let dim = d(5);
        let data = RadialData::analytic(
            dim,
            |r: f64| (-(r - 2.0) * (r - 2.0) * 3.0).exp() - (-(14.0f64 - 2.0) * 12.0 * 3.0).exp(),
            |r: f64| -6.0 * (r - 2.0) * (-(r - 2.0) * (r - 2.0) * 3.0).exp(),
            |r: f64| r * (-r * r).exp(),
            14.0,
        );
        // the subtracted constant is ~e^-432, vanishing for all purposes
        let data = data
            .unwrap()
            .with_power_pairs(vec![PowerPair::velocity(3.0, 0.4).unwrap()])
            .unwrap()
            .with_soliton(Soliton::ground(dim))
            .unwrap();
        let base = data.h_norm_sq_exterior(1.0).unwrap();
        for lambda in [0.5, 2.0] {
            let scaled = data.rescaled(lambda).unwrap();
            let v = scaled.h_norm_sq_exterior(lambda).unwrap();
            assert!(
                (v - base).abs() < 1e-9 * base,
                "lambda={lambda} v={v} base={base}"
            );
        }
    }

    #[test]
    fn sampled_norm_agrees_with_analytic_route() {
        let dim = d(3);
        let g = RadialGrid::origin_to(12.0, 1.0 / 512.0).unwrap();
        let s = StatePair::from_fn(
            dim,
            g,
            |r| (-r * r).exp(),
            |r| r * (-r * r / 2.0).exp(),
        )
        .unwrap();
        let via_samples = RadialData::sampled(s).h_norm_sq_exterior(0.5).unwrap();
        let via_analytic = RadialData::analytic(
            dim,
            |r: f64| (-r * r).exp(),
            |r: f64| -2.0 * r * (-r * r).exp(),
            |r: f64| r * (-r * r / 2.0).exp(),
            12.0,
        )
        .unwrap()
        .h_norm_sq_exterior(0.5)
        .unwrap();
        assert!(
            (via_samples - via_analytic).abs() < 1e-4 * via_analytic,
            "sampled={via_samples} analytic={via_analytic}"
        );
    }

    #[test]
    fn moment_of_power_tail_against_probe() {
        // N=3 probe (1/r,0) against data (1/r + e^{-r} diff-consistent, 0)
        let dim = d(3);
        let data = RadialData::analytic(
            dim,
            |r: f64| (-r).exp(),
            |r: f64| -(-r).exp(),
            |_| 0.0,
            45.0,
        )
        .unwrap()
        .with_power_pairs(vec![PowerPair::position(1.0, 1.0).unwrap()])
        .unwrap();
        let probe = PowerPair::position(1.0, 1.0).unwrap();
        let m = data.h_moment_exterior(&probe, 1.0).unwrap();
        let expect = 1.0 + (-1.0f64).exp();
        assert!((m - expect).abs() < 1e-10, "m={m} expect={expect}");
    }

    #[test]
    fn truncated_sampled_tail_is_flagged() {
        // samples of 1/r chopped at r=10 with no analytic tail: that is a
        // modeling error the guard must catch
        let dim = d(3);
        let g = RadialGrid::new(1.0, 1.0 / 64.0, 577).unwrap();
        let s = StatePair::from_fn(dim, g, |r| 1.0 / r, |_| 0.0).unwrap();
        let r = RadialData::sampled(s).h_norm_sq_exterior(1.0);
        assert!(matches!(r, Err(Error::TailTruncation { .. })));
    }
}
