//! Extended-real values.
//!
//! Optimal values of minimization problems are `+inf` when infeasible and
//! `-inf` when unbounded (and symmetrically for maximization). Those states
//! are carried explicitly instead of as sentinel floats.

use std::fmt;

/// A real number extended with `-inf` and `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_pos_inf(self) -> bool {
        matches!(self, ExtReal::PosInf)
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, ExtReal::NegInf)
    }

    /// Finite value, panicking on infinities. Use when a preceding check
    /// guarantees finiteness.
    pub fn unwrap_finite(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            other => panic!("expected finite value, got {other}"),
        }
    }

    /// Equality up to an absolute tolerance; infinities compare by kind.
    pub fn approx_eq(self, other: ExtReal, tol: f64) -> bool {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => (a - b).abs() <= tol,
            (a, b) => a == b,
        }
    }

    pub fn neg(self) -> ExtReal {
        match self {
            ExtReal::NegInf => ExtReal::PosInf,
            ExtReal::Finite(v) => ExtReal::Finite(-v),
            ExtReal::PosInf => ExtReal::NegInf,
        }
    }

    /// Total order: -inf < finite < +inf.
    pub fn total_cmp(&self, other: &ExtReal) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        use ExtReal::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Equal,
            (NegInf, _) => Less,
            (_, NegInf) => Greater,
            (PosInf, _) => Greater,
            (_, PosInf) => Less,
            (Finite(a), Finite(b)) => a.total_cmp(b),
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self.total_cmp(&other) == std::cmp::Ordering::Less {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if self.total_cmp(&other) == std::cmp::Ordering::Greater {
            other
        } else {
            self
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => write!(f, "+inf"),
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtReal::PosInf
        } else if v == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(v)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_extremes() {
        assert!(ExtReal::NegInf.total_cmp(&ExtReal::Finite(-1e300)).is_lt());
        assert!(ExtReal::PosInf.total_cmp(&ExtReal::Finite(1e300)).is_gt());
        assert_eq!(
            ExtReal::Finite(2.0).max(ExtReal::Finite(3.0)),
            ExtReal::Finite(3.0)
        );
        assert_eq!(ExtReal::PosInf.neg(), ExtReal::NegInf);
    }

    #[test]
    fn approx_eq_mixes() {
        assert!(ExtReal::Finite(1.0).approx_eq(ExtReal::Finite(1.0 + 1e-9), 1e-6));
        assert!(!ExtReal::Finite(1.0).approx_eq(ExtReal::PosInf, 1e-6));
        assert!(ExtReal::PosInf.approx_eq(ExtReal::PosInf, 0.0));
    }
}
