use crate::dim::Dim;
use crate::error::{Error, Result};

/// Ground state profile W(r) = (1 + r^2/(N(N-2)))^{-(N-2)/2}.
///
/// This is the unique radial stationary solution (up to sign and scaling) of
/// the energy-critical focusing equation: -DW = W^{(N+2)/(N-2)} exactly, which
/// pins the exponent to -(N-2)/2. W decays like (N(N-2))^{(N-2)/2} r^{-(N-2)}.
pub fn w_profile(dim: Dim, r: f64) -> f64 {
    let n = dim.nf();
    let c = n * (n - 2.0);
    (1.0 + r * r / c).powf(-(n - 2.0) / 2.0)
}

/// dW/dr = -(r/N) (1 + r^2/(N(N-2)))^{-N/2}.
pub fn w_profile_deriv(dim: Dim, r: f64) -> f64 {
    let n = dim.nf();
    let c = n * (n - 2.0);
    -(r / n) * (1.0 + r * r / c).powf(-n / 2.0)
}

/// d^2W/dr^2 = -(1/N) g^{-N/2} + (r^2/(N(N-2))) g^{-(N+2)/2}, g = 1 + r^2/(N(N-2)).
pub fn w_profile_second_deriv(dim: Dim, r: f64) -> f64 {
    let n = dim.nf();
    let c = n * (n - 2.0);
    let g = 1.0 + r * r / c;
    -(1.0 / n) * g.powf(-n / 2.0) + (r * r / c) * g.powf(-(n + 2.0) / 2.0)
}

/// Tail coefficient: r^{N-2} W(r) -> (N(N-2))^{(N-2)/2} as r -> infinity.
pub fn w_tail_coefficient(dim: Dim) -> f64 {
    let n = dim.nf();
    (n * (n - 2.0)).powf((n - 2.0) / 2.0)
}

/// Scaled ground state sign * lambda^{-(N-2)/2} W(r/lambda).
pub fn eval_w(dim: Dim, lambda: f64, r: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::BadScale { value: lambda });
    }
    let n = dim.nf();
    Ok(lambda.powf(-(n - 2.0) / 2.0) * w_profile(dim, r / lambda))
}

/// A signed, rescaled copy of the ground state: sign * W_{(lambda)}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Soliton {
    dim: Dim,
    lambda: f64,
    sign: f64,
}

impl Soliton {
    pub fn new(dim: Dim, lambda: f64, negative: bool) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::BadScale { value: lambda });
        }
        Ok(Soliton {
            dim,
            lambda,
            sign: if negative { -1.0 } else { 1.0 },
        })
    }

    pub fn ground(dim: Dim) -> Self {
        Soliton {
            dim,
            lambda: 1.0,
            sign: 1.0,
        }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }

    fn amp(&self) -> f64 {
        let n = self.dim.nf();
        self.sign * self.lambda.powf(-(n - 2.0) / 2.0)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.amp() * w_profile(self.dim, r / self.lambda)
    }

    pub fn deriv(&self, r: f64) -> f64 {
        self.amp() / self.lambda * w_profile_deriv(self.dim, r / self.lambda)
    }

    /// The H-preserving rescaling acts on solitons by composing scales:
    /// (sign W_{(l0)})_{(l)} = sign W_{(l l0)}.
    pub fn rescaled(&self, lambda: f64) -> Soliton {
        Soliton {
            dim: self.dim,
            lambda: self.lambda * lambda,
            sign: self.sign,
        }
    }

    /// Radial Laplacian W'' + (N-1)/r W' of the scaled profile; at r=0 the
    /// limit N W''(0) is used.
    pub fn laplacian(&self, r: f64) -> f64 {
        let dim = self.dim;
        let n = dim.nf();
        let s = r / self.lambda;
        let amp2 = self.amp() / (self.lambda * self.lambda);
        if r == 0.0 {
            return amp2 * n * w_profile_second_deriv(dim, 0.0);
        }
        amp2 * (w_profile_second_deriv(dim, s) + (n - 1.0) / s * w_profile_deriv(dim, s))
    }
}
