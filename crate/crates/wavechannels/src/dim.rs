use crate::error::{Error, Result};

/// Spatial dimension N >= 3 of the radial problem.
///
/// In odd dimension m = (N-1)/2 is the dimension of the nonradiative
/// power-law space P(R).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dim {
    n: u32,
}

impl Dim {
    pub fn new(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::BadDim { n: n as i64 });
        }
        Ok(Dim { n })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    pub fn is_odd(&self) -> bool {
        self.n % 2 == 1
    }

    /// m = (N-1)/2, defined only for odd N.
    pub fn m(&self) -> Option<u32> {
        if self.is_odd() {
            Some((self.n - 1) / 2)
        } else {
            None
        }
    }

    pub fn require_odd(&self) -> Result<u32> {
        self.m().ok_or(Error::NeedOdd { n: self.n })
    }

    pub fn require_even(&self) -> Result<()> {
        if self.is_odd() {
            Err(Error::NeedEven { n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn require_n(&self, n: u32) -> Result<()> {
        if self.n == n {
            Ok(())
        } else {
            Err(Error::BadDim { n: self.n as i64 })
        }
    }

    /// Exponent p = 4/(N-2) of the energy-critical focusing nonlinearity
    /// F(u) = |u|^p u.
    pub fn critical_exponent(&self) -> f64 {
        4.0 / (self.nf() - 2.0)
    }
}

impl std::fmt::Display for Dim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "N={}", self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_dimension_below_three() {
        assert!(Dim::new(2).is_err());
        assert!(Dim::new(0).is_err());
        assert!(Dim::new(3).is_ok());
    }

    #[test]
    fn m_defined_only_for_odd() {
        assert_eq!(Dim::new(3).unwrap().m(), Some(1));
        assert_eq!(Dim::new(5).unwrap().m(), Some(2));
        assert_eq!(Dim::new(7).unwrap().m(), Some(3));
        assert_eq!(Dim::new(9).unwrap().m(), Some(4));
        assert_eq!(Dim::new(4).unwrap().m(), None);
        assert_eq!(Dim::new(6).unwrap().m(), None);
    }

    #[test]
    fn critical_exponent_values() {
        assert_eq!(Dim::new(3).unwrap().critical_exponent(), 4.0);
        assert_eq!(Dim::new(4).unwrap().critical_exponent(), 2.0);
        assert!((Dim::new(5).unwrap().critical_exponent() - 4.0 / 3.0).abs() < 1e-15);
    }
}
