//! The nonradiative power-law space P(R) for odd N: generators, exact Gram
//! matrices, projection coordinates theta_k(R), and the coordinate/norm
//! equivalence along the scaling flow.

use crate::data::RadialData;
use crate::dim::Dim;
use crate::error::{Error, Result};
use crate::linalg::{spd_solve, sym_eigenvalues};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Position,
    Velocity,
}

/// An exact power-law pair: coeff*(r^-a, 0) for Slot::Position, and
/// coeff*(0, r^-a) for Slot::Velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPair {
    pub slot: Slot,
    pub a: f64,
    pub coeff: f64,
}

impl PowerPair {
    pub fn new(slot: Slot, a: f64, coeff: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::invalid(format!("decay exponent must be > 0, got {a}")));
        }
        if !coeff.is_finite() {
            return Err(Error::invalid("power coefficient must be finite"));
        }
        Ok(PowerPair { slot, a, coeff })
    }

    pub fn position(a: f64, coeff: f64) -> Result<Self> {
        PowerPair::new(Slot::Position, a, coeff)
    }

    pub fn velocity(a: f64, coeff: f64) -> Result<Self> {
        PowerPair::new(Slot::Velocity, a, coeff)
    }

    pub fn u0(&self, r: f64) -> f64 {
        match self.slot {
            Slot::Position => self.coeff * r.powf(-self.a),
            Slot::Velocity => 0.0,
        }
    }

    pub fn du0(&self, r: f64) -> f64 {
        match self.slot {
            Slot::Position => -self.a * self.coeff * r.powf(-self.a - 1.0),
            Slot::Velocity => 0.0,
        }
    }

    pub fn u1(&self, r: f64) -> f64 {
        match self.slot {
            Slot::Velocity => self.coeff * r.powf(-self.a),
            Slot::Position => 0.0,
        }
    }

    /// Coefficient after the H-preserving rescaling f -> f_(lambda).
    pub fn rescaled(&self, dim: Dim, lambda: f64) -> PowerPair {
        let n = dim.nf();
        let e = match self.slot {
            Slot::Position => 1.0 - n / 2.0 + self.a,
            Slot::Velocity => -n / 2.0 + self.a,
        };
        PowerPair {
            slot: self.slot,
            a: self.a,
            coeff: self.coeff * lambda.powf(e),
        }
    }

    /// Exact H(R) inner product of two power pairs over (R, infinity).
    pub fn h_inner_exterior(&self, other: &PowerPair, dim: Dim, radius: f64) -> Result<f64> {
        if self.slot != other.slot {
            return Ok(0.0);
        }
        let n = dim.nf();
        let (a, b) = (self.a, other.a);
        let cc = self.coeff * other.coeff;
        match self.slot {
            Slot::Position => {
                let p = a + b + 2.0 - n;
                if p <= 0.0 {
                    return Err(Error::Divergent {
                        what: format!("position pair integral, exponent {p} <= 0"),
                    });
                }
                Ok(cc * a * b / p * radius.powf(-p))
            }
            Slot::Velocity => {
                let p = a + b - n;
                if p <= 0.0 {
                    return Err(Error::Divergent {
                        what: format!("velocity pair integral, exponent {p} <= 0"),
                    });
                }
                Ok(cc / p * radius.powf(-p))
            }
        }
    }

    pub fn h_norm_sq_exterior(&self, dim: Dim, radius: f64) -> Result<f64> {
        self.h_inner_exterior(self, dim, radius)
    }
}

/// Ordered generators Xi_1,...,Xi_m of P(R), m = (N-1)/2, with the norm
/// constants c_k so that ||Xi_k||_{H(R)} = c_k / R^{k-1/2}.
#[derive(Debug, Clone, PartialEq)]
pub struct PBasis {
    dim: Dim,
    elements: Vec<PowerPair>,
    c: Vec<f64>,
}

pub fn build_basis(dim: Dim) -> Result<PBasis> {
    let m = dim.require_odd()? as usize;
    let n = dim.n() as i64;
    let mut slots: Vec<Option<(PowerPair, f64)>> = vec![None; m];
    // position generators (r^{2k1-N}, 0), k1 = 1..floor((N+2)/4)
    for k1 in 1..=((n + 2) / 4) {
        let a = (n - 2 * k1) as f64;
        let k = (n - 4 * k1 + 3) / 2;
        let c = a / ((n - 4 * k1 + 2) as f64).sqrt();
        slots[(k - 1) as usize] = Some((PowerPair::position(a, 1.0)?, c));
    }
    // velocity generators (0, r^{2k2-N}), k2 = 1..floor(N/4)
    for k2 in 1..=(n / 4) {
        let a = (n - 2 * k2) as f64;
        let k = (n - 4 * k2 + 1) / 2;
        let c = 1.0 / ((n - 4 * k2) as f64).sqrt();
        slots[(k - 1) as usize] = Some((PowerPair::velocity(a, 1.0)?, c));
    }
    let mut elements = Vec::with_capacity(m);
    let mut c = Vec::with_capacity(m);
    for (k, slot) in slots.into_iter().enumerate() {
        let (pair, ck) =
            slot.ok_or_else(|| Error::invalid(format!("basis slot k={} unfilled", k + 1)))?;
        elements.push(pair);
        c.push(ck);
    }
    Ok(PBasis { dim, elements, c })
}

impl PBasis {
    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn m(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[PowerPair] {
        &self.elements
    }

    /// Norm constants c_k.
    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// Generator Xi_k, k = 1..m.
    pub fn element(&self, k: usize) -> &PowerPair {
        &self.elements[k - 1]
    }
}

/// Exact Gram matrix of (Xi_1,...,Xi_m) in H(R).
pub fn gram(basis: &PBasis, radius: f64) -> Result<Vec<Vec<f64>>> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::BadScale { value: radius });
    }
    let m = basis.m();
    let mut g = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let v = basis.elements[i].h_inner_exterior(&basis.elements[j], basis.dim, radius)?;
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    Ok(g)
}

/// A point of P(R): coordinates theta in the (Xi_k) basis, tagged with the
/// shell radius it was computed at.
#[derive(Debug, Clone, PartialEq)]
pub struct PElement {
    pub basis: PBasis,
    pub theta: Vec<f64>,
    pub radius: f64,
}

impl PElement {
    pub fn new(basis: PBasis, theta: Vec<f64>, radius: f64) -> Result<Self> {
        if theta.len() != basis.m() {
            return Err(Error::LengthMismatch {
                len: theta.len(),
                n: basis.m(),
            });
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("coordinates must be finite"));
        }
        if !(radius > 0.0) {
            return Err(Error::BadScale { value: radius });
        }
        Ok(PElement {
            basis,
            theta,
            radius,
        })
    }

    /// The element as a list of concrete power pairs sum theta_k Xi_k.
    pub fn to_power_pairs(&self) -> Vec<PowerPair> {
        self.basis
            .elements
            .iter()
            .zip(self.theta.iter())
            .filter(|(_, t)| **t != 0.0)
            .map(|(e, t)| PowerPair {
                slot: e.slot,
                a: e.a,
                coeff: *t,
            })
            .collect()
    }

    /// Exact H(radius) norm via the Gram quadratic form.
    pub fn h_norm(&self) -> Result<f64> {
        let g = gram(&self.basis, self.radius)?;
        let mut q = 0.0;
        for i in 0..self.theta.len() {
            for j in 0..self.theta.len() {
                q += self.theta[i] * g[i][j] * self.theta[j];
            }
        }
        Ok(q.max(0.0).sqrt())
    }
}

/// Result of projecting a state onto P(R).
#[derive(Debug, Clone)]
pub struct Projection {
    pub element: PElement,
    pub residual_sq: f64,
}

const RESIDUAL_CLAMP_REL: f64 = 1e-12;

/// Orthogonal projection of a state onto P(R): Gram solve against the
/// exterior moments <state, Xi_k>_{H(R)}; residual is
/// ||state||^2 - theta.b, clamped to 0 below 1e-12 relative.
pub fn project(state: &RadialData, basis: &PBasis, radius: f64) -> Result<Projection> {
    if state.dim() != basis.dim {
        return Err(Error::invalid(format!(
            "state dimension {} does not match basis {}",
            state.dim(),
            basis.dim
        )));
    }
    let moments: Vec<f64> = basis
        .elements
        .iter()
        .map(|e| state.h_moment_exterior(e, radius))
        .collect::<Result<_>>()?;
    // precondition through the scaling flow: gram(R) = D gram(1) D with
    // D_k = R^{1/2-k}, so solving at R = 1 keeps the condition number fixed
    // along dyadic sweeps instead of growing like R^{2(m-1)}
    let g1 = gram(basis, 1.0)?;
    let scaled_moments: Vec<f64> = moments
        .iter()
        .enumerate()
        .map(|(i, b)| b * radius.powf(i as f64 + 0.5))
        .collect();
    let y = spd_solve(&g1, &scaled_moments)?;
    let theta: Vec<f64> = y
        .iter()
        .enumerate()
        .map(|(i, yk)| yk * radius.powf(i as f64 + 0.5))
        .collect();
    let norm_sq = state.h_norm_sq_exterior(radius)?;
    let projected: f64 = theta.iter().zip(moments.iter()).map(|(t, b)| t * b).sum();
    let mut residual_sq = norm_sq - projected;
    if residual_sq < RESIDUAL_CLAMP_REL * norm_sq.max(1e-300) {
        residual_sq = 0.0;
    }
    Ok(Projection {
        element: PElement::new(basis.clone(), theta, radius)?,
        residual_sq,
    })
}

/// Coordinate/norm comparison transported along the scaling flow.
#[derive(Debug, Clone, Copy)]
pub struct CoordEquiv {
    /// ||U||_{H(R)} / sum_k |theta_k| R^{-(k-1/2)} after transporting the
    /// element from its own radius to R.
    pub ratio: f64,
    /// Window floor 1/C*.
    pub lower: f64,
    /// Window ceiling C*.
    pub upper: f64,
}

/// Fixed per-dimension window [1/C*, C*] from the eigenvalues of the R=1 Gram.
pub fn coord_window(dim: Dim) -> Result<(f64, f64)> {
    let basis = build_basis(dim)?;
    let eig = sym_eigenvalues(&gram(&basis, 1.0)?)?;
    let m = basis.m() as f64;
    let lam_min = eig[0];
    let lam_max = eig[eig.len() - 1];
    if lam_min <= 0.0 {
        return Err(Error::invalid("Gram not positive definite"));
    }
    let c_star = lam_max.sqrt().max((m / lam_min).sqrt()).max(1.0);
    Ok((1.0 / c_star, c_star))
}

/// Ratio of the exact H(R) norm to the weighted coordinate sum
/// sum_k |theta_k| / R^{k-1/2}, after moving the element along the scaling
/// flow from element.radius to the requested radius (theta_k picks up
/// (R/element.radius)^{k-1/2}); the ratio is then R-independent.
pub fn coord_norm_equiv(element: &PElement, radius: f64) -> Result<CoordEquiv> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::BadScale { value: radius });
    }
    let (lower, upper) = coord_window(element.basis.dim)?;
    let lam = radius / element.radius;
    let theta_r: Vec<f64> = element
        .theta
        .iter()
        .enumerate()
        .map(|(i, t)| t * lam.powf(i as f64 + 0.5))
        .collect();
    let transported = PElement::new(element.basis.clone(), theta_r.clone(), radius)?;
    let norm = transported.h_norm()?;
    let coord_sum: f64 = theta_r
        .iter()
        .enumerate()
        .map(|(i, t)| t.abs() * radius.powf(-(i as f64 + 0.5)))
        .sum();
    let ratio = if norm == 0.0 && coord_sum == 0.0 {
        1.0
    } else {
        norm / coord_sum
    };
    Ok(CoordEquiv {
        ratio,
        lower,
        upper,
    })
}

/// One row of a dyadic projection sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub radius: f64,
    pub theta: Vec<f64>,
    pub residual_sq: f64,
}

/// Projections at R0, 2 R0, 4 R0, ... (levels rows).
pub fn dyadic_sweep(
    state: &RadialData,
    basis: &PBasis,
    r0: f64,
    levels: usize,
) -> Result<Vec<SweepRow>> {
    if levels == 0 {
        return Err(Error::invalid("dyadic sweep needs at least one level"));
    }
    let mut rows = Vec::with_capacity(levels);
    for n in 0..levels {
        let radius = r0 * (1u64 << n) as f64;
        let p = project(state, basis, radius)?;
        rows.push(SweepRow {
            radius,
            theta: p.element.theta,
            residual_sq: p.residual_sq,
        });
    }
    Ok(rows)
}
