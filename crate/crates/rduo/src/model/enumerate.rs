//! Exhaustive enumeration of an uncertainty set's binary points.

use super::MixedIntegerSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnumerationError {
    #[error("scenario dimension {dim} exceeds the enumeration cap {cap}; the exhaustive oracle is unavailable at this size")]
    CapExceeded { dim: usize, cap: usize },
    #[error("the uncertainty set must have only binary variables")]
    NotBinary,
}

/// All binary points satisfying the set's constraints, in lexicographic
/// order (componentwise, first coordinate most significant).
pub fn enumerate_uncertainty(
    set: &MixedIntegerSet,
    cap: usize,
) -> Result<Vec<Vec<f64>>, EnumerationError> {
    if !set.all_binary() {
        return Err(EnumerationError::NotBinary);
    }
    let dim = set.dim();
    if dim > cap {
        return Err(EnumerationError::CapExceeded { dim, cap });
    }
    let mut out = Vec::new();
    let mut point = vec![0.0; dim];
    for mask in 0u64..(1u64 << dim) {
        for (j, p) in point.iter_mut().enumerate() {
            // Lexicographic order: the first coordinate is the most
            // significant bit of the counter.
            *p = if mask >> (dim - 1 - j) & 1 == 1 { 1.0 } else { 0.0 };
        }
        if set.is_point_feasible(&point, 1e-9) {
            out.push(point.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::RowSense;

    #[test]
    fn budget_one_excludes_pair() {
        let mut set = MixedIntegerSet::binary(2);
        set.add_row(&[(0, 1.0), (1, 1.0)], RowSense::Le, 1.0);
        let pts = enumerate_uncertainty(&set, 20).unwrap();
        assert_eq!(
            pts,
            vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]
        );
    }

    #[test]
    fn slack_budget_gives_full_cube() {
        let mut set = MixedIntegerSet::binary(3);
        set.add_row(&[(0, 1.0), (1, 1.0), (2, 1.0)], RowSense::Le, 3.0);
        let pts = enumerate_uncertainty(&set, 20).unwrap();
        assert_eq!(pts.len(), 8);
        // Lexicographic adjacency spot check.
        assert_eq!(pts[1], vec![0.0, 0.0, 1.0]);
        assert_eq!(pts[4], vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn cap_refusal() {
        let set = MixedIntegerSet::binary(21);
        assert!(matches!(
            enumerate_uncertainty(&set, 20),
            Err(EnumerationError::CapExceeded { .. })
        ));
    }

    #[test]
    fn filter_soundness() {
        // Every returned point satisfies the constraints; every excluded
        // binary point violates one.
        let mut set = MixedIntegerSet::binary(4);
        set.add_row(&[(0, 1.0), (1, 1.0), (2, 1.0), (3, 1.0)], RowSense::Le, 2.0);
        set.add_row(&[(0, 1.0), (3, 1.0)], RowSense::Le, 1.0);
        let pts = enumerate_uncertainty(&set, 20).unwrap();
        for p in &pts {
            assert!(set.is_point_feasible(p, 1e-9));
        }
        let full = enumerate_uncertainty(&MixedIntegerSet::binary(4), 20).unwrap();
        for p in &full {
            if !pts.contains(p) {
                assert!(!set.is_point_feasible(p, 1e-9));
            }
        }
    }
}
