//! Hilbert-space locality: how far a matrix couples basis labels.
//!
//! An operator is "local in Hilbert space" when it only connects basis
//! states whose labels are close. The bandwidth is the largest label
//! distance carrying a non-negligible entry. The headline figure treats
//! labels cyclically, so a wrap-around coupling (such as the cyclic
//! shift's corner entry) still counts as nearest-neighbor; the plain
//! linear distance is reported alongside.

use serde::Serialize;

use crate::error::{SimError, SimResult};
use crate::linalg::{self, CMatrix};

/// Entries with magnitude at or below this threshold count as zero.
pub const BANDWIDTH_TOL: f64 = 1e-12;

/// Label-distance summary of a matrix's couplings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BandwidthReport {
    /// Max over nonzero entries of `min(|i-j|, n-|i-j|)`.
    pub cyclic: usize,
    /// Max over nonzero entries of `|i-j|`.
    pub linear: usize,
}

/// Measures the bandwidth of `a`, optionally after relabeling basis
/// index `i` to `ordering[i]`.
pub fn hilbert_bandwidth(
    a: &CMatrix,
    ordering: Option<&[usize]>,
) -> SimResult<BandwidthReport> {
    let n = linalg::check_square(a, "bandwidth input")?;
    if let Some(perm) = ordering {
        if perm.len() != n {
            return Err(SimError::DimensionMismatch(format!(
                "ordering has {} entries, matrix has {n}",
                perm.len()
            )));
        }
        let mut seen = vec![false; n];
        for &target in perm {
            if target >= n || seen[target] {
                return Err(SimError::InvalidArgument(
                    "ordering is not a permutation of 0..n".into(),
                ));
            }
            seen[target] = true;
        }
    }
    let relabel = |i: usize| ordering.map_or(i, |perm| perm[i]);
    let mut cyclic = 0usize;
    let mut linear = 0usize;
    for i in 0..n {
        for j in 0..n {
            if a[[i, j]].norm() > BANDWIDTH_TOL {
                let dist = relabel(i).abs_diff(relabel(j));
                linear = linear.max(dist);
                cyclic = cyclic.max(dist.min(n - dist));
            }
        }
    }
    Ok(BandwidthReport { cyclic, linear })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ginibre, C64};
    use crate::models::walk::shift_operator;
    use ndarray::Array2;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// CNOT on 3 qubits, basis index `b2 b1 b0` with bit 2 most
    /// significant.
    fn cnot3(control_bit: usize, target_bit: usize) -> CMatrix {
        let mut u = Array2::zeros((8, 8));
        for input in 0..8usize {
            let output = if (input >> control_bit) & 1 == 1 {
                input ^ (1 << target_bit)
            } else {
                input
            };
            u[[output, input]] = c(1.0, 0.0);
        }
        u
    }

    #[test]
    fn identity_has_zero_bandwidth() {
        let report = hilbert_bandwidth(&linalg::identity(9), None).unwrap();
        assert_eq!(report, BandwidthReport { cyclic: 0, linear: 0 });
    }

    #[test]
    fn cyclic_shift_is_nearest_neighbor_up_to_the_wrap() {
        for d in [5usize, 17] {
            let report = hilbert_bandwidth(&shift_operator(d), None).unwrap();
            assert_eq!(report.cyclic, 1);
            assert_eq!(report.linear, d - 1);
        }
    }

    #[test]
    fn cnot_bandwidth_depends_on_which_bit_controls() {
        // Control on the most significant bit, target least significant:
        // flips happen inside the upper half, adjacent labels.
        let report = hilbert_bandwidth(&cnot3(2, 0), None).unwrap();
        assert_eq!(report.cyclic, 1);
        assert_eq!(report.linear, 1);
        // Control least significant, target most significant: couples
        // labels 4 apart.
        let report = hilbert_bandwidth(&cnot3(0, 2), None).unwrap();
        assert_eq!(report.cyclic, 4);
        assert_eq!(report.linear, 4);
    }

    #[test]
    fn banded_matrix_reports_its_band() {
        let n = 9;
        let width = 2usize;
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let dense = ginibre(n, &mut rng);
        let mut banded = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                if i.abs_diff(j) <= width {
                    banded[[i, j]] = dense[[i, j]] + c(1.0, 0.0);
                }
            }
        }
        let report = hilbert_bandwidth(&banded, None).unwrap();
        assert_eq!(report, BandwidthReport { cyclic: width, linear: width });
    }

    #[test]
    fn relabeling_matches_explicit_conjugation() {
        let n = 7;
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = ginibre(n, &mut rng);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        // B[perm[i], perm[j]] = A[i, j].
        let mut b = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                b[[perm[i], perm[j]]] = a[[i, j]];
            }
        }
        let via_ordering = hilbert_bandwidth(&a, Some(&perm)).unwrap();
        let via_matrix = hilbert_bandwidth(&b, None).unwrap();
        assert_eq!(via_ordering, via_matrix);
    }

    #[test]
    fn threshold_separates_noise_from_structure() {
        let n = 6;
        let mut a: CMatrix = Array2::zeros((n, n));
        a[[0, 0]] = c(1.0, 0.0);
        a[[0, n - 1]] = c(1e-13, 0.0);
        let report = hilbert_bandwidth(&a, None).unwrap();
        assert_eq!(report.linear, 0, "sub-threshold entry counted");
        a[[0, n - 1]] = c(1e-11, 0.0);
        let report = hilbert_bandwidth(&a, None).unwrap();
        assert_eq!(report.linear, n - 1);
        assert_eq!(report.cyclic, 1);
    }

    #[test]
    fn bad_orderings_are_rejected() {
        let a = linalg::identity(3);
        assert!(hilbert_bandwidth(&a, Some(&[0, 1])).is_err());
        assert!(hilbert_bandwidth(&a, Some(&[0, 1, 1])).is_err());
        assert!(hilbert_bandwidth(&a, Some(&[0, 1, 3])).is_err());
    }
}
