use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const PAIR_FEATURE_DIM: usize = 10;

/// Features of a candidate arc from child `i` (1-based) to parent `j`
/// (`0` is the wall) in an `n`-token sentence:
/// `[i/n, j/n, Δ=1, Δ=2, 3≤Δ≤5, 6≤Δ≤10, Δ≥11, i<j, i>j, wall]` with `Δ = |i - j|`.
/// For the wall only the first and last entries are nonzero.
pub fn pair_features<S: Scalar>(child: usize, parent: usize, n: usize) -> Result<[S; PAIR_FEATURE_DIM]> {
    if child == 0 || child > n {
        return Err(Error::OutOfRange {
            index: child,
            len: n + 1,
        });
    }
    if parent > n {
        return Err(Error::OutOfRange {
            index: parent,
            len: n + 1,
        });
    }
    if child == parent {
        return Err(Error::InvalidArgument(format!("child and parent are both {child}")));
    }
    let mut f = [S::zero(); PAIR_FEATURE_DIM];
    let nf = n as f64;
    f[0] = S::lit(child as f64 / nf);
    if parent == 0 {
        f[9] = S::one();
        return Ok(f);
    }
    f[1] = S::lit(parent as f64 / nf);
    let bucket = match child.abs_diff(parent) {
        1 => 2,
        2 => 3,
        3..=5 => 4,
        6..=10 => 5,
        _ => 6,
    };
    f[bucket] = S::one();
    if child < parent {
        f[7] = S::one();
    } else {
        f[8] = S::one();
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reported_examples() {
        let f: [f64; 10] = pair_features(2, 5, 10).unwrap();
        assert_eq!(f, [0.2, 0.5, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let f: [f64; 10] = pair_features(3, 0, 10).unwrap();
        assert_eq!(f, [0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let f: [f64; 10] = pair_features(7, 6, 8).unwrap();
        assert_eq!(f, [0.875, 0.75, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn far_arcs() {
        let f: [f64; 10] = pair_features(1, 12, 12).unwrap();
        assert_eq!(f[6], 1.0);
        let f: [f64; 10] = pair_features(10, 4, 12).unwrap();
        assert_eq!(f[5], 1.0);
    }

    #[test]
    fn invalid_indices() {
        assert!(pair_features::<f64>(3, 3, 5).is_err());
        assert!(pair_features::<f64>(0, 2, 5).is_err());
        assert!(pair_features::<f64>(6, 2, 5).is_err());
        assert!(pair_features::<f64>(2, 6, 5).is_err());
    }
}
