//! Log-determinant via the trace power series
//! log det(I - E) = -Σ_k Tr(E^k)/k, certified through a row-sum tail bound.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::{max_abs_row_sum, DenseMatrix};
use crate::rational::{to_f64, Rational};

#[derive(Clone, Debug)]
pub struct FredholmResult {
    pub log_det: f64,
    pub terms_used: usize,
    /// Certified bound on the truncation error of the series.
    pub tail_bound: f64,
}

/// Evaluates log det(I - E) by summing exact traces of E^k until the
/// geometric tail (driven by r = max absolute row sum, an upper bound for
/// ρ(E)) certifies a truncation error below `tol`.
pub fn fredholm_log_det(
    e: &DenseMatrix<Rational>,
    tol: f64,
    max_terms: usize,
) -> Result<FredholmResult> {
    assert!(tol > 0.0, "tolerance must be positive");
    let n = e.order();
    let r = max_abs_row_sum(e);
    if r >= Rational::one() {
        // The row-sum bound cannot certify convergence.
        return Err(Error::NonConvergent { max_terms });
    }
    let n_rat = Rational::from_integer((n as i64).into());
    let one_minus_r = Rational::one() - &r;
    let mut power = e.clone();
    let mut sum = 0.0f64;
    let mut r_pow = r.clone();
    for k in 1..=max_terms {
        let mut trace = Rational::zero();
        for i in 0..n {
            trace += power.get(i, i);
        }
        sum -= to_f64(&trace) / k as f64;
        // |sum_{j>k} Tr(E^j)/j| <= n * r^(k+1) / ((k+1)(1-r))
        let tail = &n_rat * &r_pow * &r
            / (Rational::from_integer(((k + 1) as i64).into()) * &one_minus_r);
        let tail_f = to_f64(&tail);
        if tail_f < tol {
            return Ok(FredholmResult {
                log_det: sum,
                terms_used: k,
                tail_bound: tail_f,
            });
        }
        r_pow *= &r;
        power = power.mul(e);
    }
    Err(Error::NonConvergent { max_terms })
}
