//! Spectral-radius estimation and an exact ρ(F) ≤ 1 certificate for
//! nonnegative matrices.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::{det_rational, DenseMatrix};
use crate::rational::{to_f64, Rational};

/// Largest order for which the exhaustive principal-minor certificate runs
/// (2^n - 1 exact determinants).
pub const MINOR_CERTIFICATE_LIMIT: usize = 12;

#[derive(Clone, Debug)]
pub struct SpectralEstimate {
    pub estimate: f64,
    /// Exact Perron brackets: min and max row sum.
    pub row_sum_min: Rational,
    pub row_sum_max: Rational,
    pub iterations: usize,
    pub converged: bool,
}

/// Power iteration for an entrywise nonnegative matrix, started from the
/// all-ones vector, with exact row-sum brackets alongside the float estimate.
pub fn spectral_radius_estimate(
    f: &DenseMatrix<Rational>,
    tol: f64,
) -> Result<SpectralEstimate> {
    let n = f.order();
    require_nonnegative(f)?;
    let mut row_sums = Vec::with_capacity(n);
    for i in 0..n {
        let mut s = Rational::zero();
        for j in 0..n {
            s += f.get(i, j);
        }
        row_sums.push(s);
    }
    let row_sum_min = row_sums.iter().min().unwrap().clone();
    let row_sum_max = row_sums.iter().max().unwrap().clone();

    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| to_f64(f.get(i, j))).collect())
        .collect();
    let mut x = vec![1.0f64; n];
    let mut estimate = to_f64(&row_sum_max);
    let max_iter = 100_000;
    for it in 1..=max_iter {
        let y: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| a[i][j] * x[j]).sum())
            .collect();
        let norm = y.iter().cloned().fold(0.0f64, f64::max);
        if norm == 0.0 {
            // F^k e = 0 with e positive forces F nilpotent, so rho = 0.
            return Ok(SpectralEstimate {
                estimate: 0.0,
                row_sum_min,
                row_sum_max,
                iterations: it,
                converged: true,
            });
        }
        // Collatz-Wielandt ratios over the positive components.
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..n {
            if x[i] > 0.0 {
                let r = y[i] / x[i];
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
        let next = 0.5 * (lo + hi);
        let close = (hi - lo) <= tol * hi.max(1e-300);
        let settled = (next - estimate).abs() <= tol * next.abs().max(1e-300);
        estimate = next;
        x = y.iter().map(|v| v / norm).collect();
        if close || (it > 1 && settled) {
            return Ok(SpectralEstimate {
                estimate,
                row_sum_min,
                row_sum_max,
                iterations: it,
                converged: true,
            });
        }
    }
    Ok(SpectralEstimate {
        estimate,
        row_sum_min,
        row_sum_max,
        iterations: max_iter,
        converged: false,
    })
}

/// A principal minor of I - F that is negative, disproving ρ(F) ≤ 1.
#[derive(Clone, Debug)]
pub struct MinorViolation {
    pub indices: Vec<usize>,
    pub minor: Rational,
}

#[derive(Clone, Debug)]
pub enum CertificateResult {
    /// Exact outcome of the principal-minor test on I - F: ρ(F) ≤ 1 holds
    /// iff every principal minor is nonnegative.
    Certified {
        holds: bool,
        violation: Option<MinorViolation>,
    },
    /// Order exceeded the exhaustive-minor limit. Only the sufficient
    /// row-sum test and the power-iteration estimate are reported.
    Uncertified {
        row_sums_le_one: bool,
        rho_estimate: f64,
    },
}

impl CertificateResult {
    pub fn is_certified_true(&self) -> bool {
        matches!(self, CertificateResult::Certified { holds: true, .. })
    }
}

/// Decides ρ(F) ≤ 1 exactly for nonnegative F of order ≤ 12 by checking all
/// principal minors of the Z-matrix I - F.
pub fn certify_rho_le_one(f: &DenseMatrix<Rational>) -> Result<CertificateResult> {
    certify_rho_le_one_with_limit(f, MINOR_CERTIFICATE_LIMIT)
}

pub fn certify_rho_le_one_with_limit(
    f: &DenseMatrix<Rational>,
    limit: usize,
) -> Result<CertificateResult> {
    let n = f.order();
    require_nonnegative(f)?;
    if n > limit {
        let est = spectral_radius_estimate(f, 1e-12)?;
        let row_sums_le_one = est.row_sum_max <= Rational::from_integer(1.into());
        return Ok(CertificateResult::Uncertified {
            row_sums_le_one,
            rho_estimate: est.estimate,
        });
    }
    let i_minus_f = DenseMatrix::from_fn(n, |i, j| {
        if i == j {
            Rational::from_integer(1.into()) - f.get(i, j)
        } else {
            -f.get(i, j).clone()
        }
    });
    for subset in 1u32..(1u32 << n) {
        let indices: Vec<usize> = (0..n).filter(|&i| subset >> i & 1 == 1).collect();
        let minor = det_rational(&i_minus_f.principal_submatrix(&indices));
        if minor.is_negative() {
            return Ok(CertificateResult::Certified {
                holds: false,
                violation: Some(MinorViolation { indices, minor }),
            });
        }
    }
    Ok(CertificateResult::Certified {
        holds: true,
        violation: None,
    })
}

fn require_nonnegative(f: &DenseMatrix<Rational>) -> Result<()> {
    for i in 0..f.order() {
        for j in 0..f.order() {
            if f.get(i, j).is_negative() {
                return Err(Error::NotNonnegative { i, j });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn toeplitz(n: usize, diag: Rational, off: Rational) -> DenseMatrix<Rational> {
        DenseMatrix::from_fn(n, |i, j| if i == j { diag.clone() } else { off.clone() })
    }

    #[test]
    fn all_ones_scaled_matrix() {
        // F = (1/8) J over order 4: rho = 1/2, row sums all 1/2.
        let f = toeplitz(4, rat(1, 8), rat(1, 8));
        let est = spectral_radius_estimate(&f, 1e-12).unwrap();
        assert!((est.estimate - 0.5).abs() < 1e-10);
        assert_eq!(est.row_sum_min, rat(1, 2));
        assert_eq!(est.row_sum_max, rat(1, 2));
        assert!(est.converged);
    }

    #[test]
    fn zero_matrix() {
        let f = toeplitz(3, rat_int(0), rat_int(0));
        let est = spectral_radius_estimate(&f, 1e-12).unwrap();
        assert_eq!(est.estimate, 0.0);
    }

    #[test]
    fn toeplitz_perron_root() {
        // diag 1/4, off 1/8, n = 5: rho = delta + (n-1) eps = 3/4.
        let f = toeplitz(5, rat(1, 4), rat(1, 8));
        let est = spectral_radius_estimate(&f, 1e-12).unwrap();
        assert!((est.estimate - 0.75).abs() < 1e-10);
    }

    #[test]
    fn negative_entry_rejected() {
        let f = toeplitz(2, rat_int(1), rat_int(-1));
        assert!(matches!(
            spectral_radius_estimate(&f, 1e-9),
            Err(Error::NotNonnegative { .. })
        ));
    }

    #[test]
    fn certificate_boundary_case() {
        // F = (1/4) J over order 4: rho = 1 exactly, still certified.
        let f = toeplitz(4, rat(1, 4), rat(1, 4));
        assert!(certify_rho_le_one(&f).unwrap().is_certified_true());
    }

    #[test]
    fn certificate_rejects_double_identity() {
        let f = toeplitz(3, rat_int(2), rat_int(0));
        match certify_rho_le_one(&f).unwrap() {
            CertificateResult::Certified { holds, violation } => {
                assert!(!holds);
                let v = violation.unwrap();
                assert!(v.minor.is_negative());
            }
            _ => panic!("expected a certified refutation"),
        }
    }

    #[test]
    fn certificate_toeplitz_at_the_boundary() {
        // delta + (n-1) eps = 1 with delta = 1/4, eps = 1/4, n = 4.
        let f = toeplitz(4, rat(1, 4), rat(1, 4));
        assert!(certify_rho_le_one(&f).unwrap().is_certified_true());
    }

    #[test]
    fn row_sum_dominance_implies_certified() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.gen_range(1..=5);
            // random nonnegative rows with sum <= 1
            let f = DenseMatrix::from_fn(n, |_, _| {
                rat(rng.gen_range(0..=16), 16 * n as i64)
            });
            assert!(certify_rho_le_one(&f).unwrap().is_certified_true());
        }
    }

    #[test]
    fn certificate_rejects_all_ones() {
        // J has rho = n > 1
        let f = toeplitz(4, rat_int(1), rat_int(1));
        match certify_rho_le_one(&f).unwrap() {
            CertificateResult::Certified { holds, .. } => assert!(!holds),
            _ => panic!("expected a certified refutation"),
        }
    }

    #[test]
    fn estimate_stays_inside_the_row_sum_brackets() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let n = rng.gen_range(1..=6);
            let f = DenseMatrix::from_fn(n, |_, _| rat(rng.gen_range(0..=32), 32));
            let est = spectral_radius_estimate(&f, 1e-12).unwrap();
            let lo = crate::rational::to_f64(&est.row_sum_min);
            let hi = crate::rational::to_f64(&est.row_sum_max);
            assert!(
                est.estimate >= lo - 1e-9 && est.estimate <= hi + 1e-9,
                "estimate {} outside [{lo}, {hi}]",
                est.estimate
            );
        }
    }

    #[test]
    fn oversized_order_falls_back() {
        let f = toeplitz(13, rat(1, 16), rat(1, 16));
        match certify_rho_le_one(&f).unwrap() {
            CertificateResult::Uncertified {
                row_sums_le_one, ..
            } => assert!(row_sums_le_one),
            _ => panic!("expected the uncertified fallback"),
        }
    }
}
