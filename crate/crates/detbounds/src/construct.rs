//! Witness and extremal matrix constructions: uniform Toeplitz
//! perturbations, skew-triangular perturbations of the identity, and
//! skew-Hadamard matrices built from the base orders, Paley quadratic
//! residues over prime fields, and order doubling.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::pattern::SignPattern;
use crate::poly::EpsPolynomial;
use crate::rational::Rational;

/// F = (delta - eps) I + eps J: diagonal entries delta, off-diagonal eps.
pub fn toeplitz_f(n: usize, delta: &Rational, eps: &Rational) -> DenseMatrix<Rational> {
    assert!(n >= 1);
    let m = DenseMatrix::from_fn(n, |i, j| {
        if i == j {
            delta.clone()
        } else {
            eps.clone()
        }
    });
    debug_assert_eq!(
        crate::matrix::det_rational(&DenseMatrix::identity(n).sub(&m)),
        toeplitz_det_closed_form(n, delta, eps)
    );
    m
}

/// det(I - F) for the Toeplitz perturbation:
/// (1 - delta - (n-1)eps)(1 - delta + eps)^(n-1).
pub fn toeplitz_det_closed_form(n: usize, delta: &Rational, eps: &Rational) -> Rational {
    let one = Rational::one();
    let n1e = Rational::from_integer(BigInt::from(n as i64 - 1)) * eps;
    (&one - delta - n1e) * crate::rational::pow_i(&(&one - delta + eps), n as i32 - 1)
}

/// I + eps(U - U^T), or (1 + eps) I + eps(U - U^T) when `inflate`, where U is
/// the strictly upper triangular all-ones matrix.
pub fn skew_tri(n: usize, eps: &Rational, inflate: bool) -> DenseMatrix<Rational> {
    assert!(n >= 1);
    let diag = if inflate {
        Rational::one() + eps
    } else {
        Rational::one()
    };
    DenseMatrix::from_fn(n, |i, j| {
        if i == j {
            diag.clone()
        } else if i < j {
            eps.clone()
        } else {
            -eps.clone()
        }
    })
}

/// The sign pattern of the skew-triangular construction: + above the
/// diagonal, - below.
pub fn skew_tri_pattern(n: usize) -> SignPattern {
    let mut p = SignPattern::all_plus(n);
    for i in 0..n {
        for j in 0..i {
            p = p.with_sign(i, j, true);
        }
    }
    p
}

/// Exact determinant polynomial of the skew-triangular construction.
pub fn skew_tri_symbolic(n: usize, inflate: bool) -> EpsPolynomial {
    let diag = if inflate {
        EpsPolynomial::from_int_coeffs(&[1, 1])
    } else {
        EpsPolynomial::one()
    };
    if n <= crate::pattern::MAX_PATTERN_ORDER {
        crate::pattern::det_poly(&skew_tri_pattern(n), &vec![diag; n])
    } else {
        let eps = EpsPolynomial::eps();
        let m = DenseMatrix::from_fn(n, |i, j| {
            if i == j {
                diag.clone()
            } else if i < j {
                eps.clone()
            } else {
                -&eps
            }
        });
        crate::matrix::det_symbolic(&m)
    }
}

/// A verified skew-Hadamard matrix: entries ±1 with H + H^T = 2I and
/// H H^T = nI, both checked exactly at construction.
#[derive(Clone, Debug)]
pub struct SkewHadamard {
    matrix: DenseMatrix<Rational>,
}

impl SkewHadamard {
    pub fn order(&self) -> usize {
        self.matrix.order()
    }

    pub fn matrix(&self) -> &DenseMatrix<Rational> {
        &self.matrix
    }

    /// Compact row form: one string of '+'/'-' per row.
    pub fn compact_rows(&self) -> Vec<String> {
        let n = self.order();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if self.matrix.get(i, j).is_one() {
                            '+'
                        } else {
                            '-'
                        }
                    })
                    .collect()
            })
            .collect()
    }

    fn checked(matrix: DenseMatrix<Rational>) -> Result<Self> {
        if verify_skew_hadamard(&matrix) {
            Ok(SkewHadamard { matrix })
        } else {
            Err(Error::HypothesisViolated {
                detail: "construction failed the skew-Hadamard identities".into(),
            })
        }
    }
}

/// Exact check of both defining identities for a ±1 matrix.
pub fn verify_skew_hadamard(m: &DenseMatrix<Rational>) -> bool {
    let n = m.order();
    let one = Rational::one();
    for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j);
            if v != &one && v != &(-one.clone()) {
                return false;
            }
            // H + H^T = 2I, entrywise
            let s = m.get(i, j) + m.get(j, i);
            let expect = if i == j {
                Rational::from_integer(2.into())
            } else {
                Rational::zero()
            };
            if s != expect {
                return false;
            }
        }
    }
    let gram = m.mul(&m.transpose());
    let n_rat = Rational::from_integer(BigInt::from(n as i64));
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { n_rat.clone() } else { Rational::zero() };
            if gram.get(i, j) != &expect {
                return false;
            }
        }
    }
    true
}

/// Builds a skew-Hadamard matrix of order n, trying the base orders, then
/// the Paley quadratic-residue construction (n - 1 an odd prime ≡ 3 mod 4),
/// then doubling from order n/2. Output is deterministic per order.
pub fn skew_hadamard(n: usize) -> Result<SkewHadamard> {
    if n == 0 {
        return Err(Error::InvalidOrder { n });
    }
    if n > 2 && n % 4 != 0 {
        return Err(Error::InvalidOrder { n });
    }
    if n == 1 {
        return SkewHadamard::checked(DenseMatrix::from_fn(1, |_, _| Rational::one()));
    }
    if n == 2 {
        let one = Rational::one;
        return SkewHadamard::checked(
            DenseMatrix::from_rows(vec![vec![one(), one()], vec![-one(), one()]]).unwrap(),
        );
    }
    let mut tried = Vec::new();
    tried.push("base orders 1 and 2".to_string());
    if is_prime(n - 1) && (n - 1) % 4 == 3 {
        return SkewHadamard::checked(paley(n - 1));
    }
    tried.push(format!(
        "Paley (order-1 = {} is not a prime ≡ 3 mod 4)",
        n - 1
    ));
    if n % 2 == 0 {
        match skew_hadamard(n / 2) {
            Ok(half) => return SkewHadamard::checked(double(&half)),
            Err(_) => tried.push(format!("doubling (order {} unconstructible)", n / 2)),
        }
    }
    Err(Error::Unconstructible {
        n,
        tried: tried.join("; "),
    })
}

/// Paley construction over GF(q) for a prime q ≡ 3 (mod 4): H = I + S with
/// S = [[0, e^T], [-e, Q]] and Q the quadratic-residue sign matrix
/// q_ij = chi(j - i).
fn paley(q: usize) -> DenseMatrix<Rational> {
    let chi = residue_characters(q);
    let n = q + 1;
    let one = Rational::one();
    DenseMatrix::from_fn(n, |i, j| {
        if i == j {
            return one.clone();
        }
        let s = match (i, j) {
            (0, _) => 1,
            (_, 0) => -1,
            _ => chi[(q + j - i) % q],
        };
        if s > 0 {
            one.clone()
        } else {
            -one.clone()
        }
    })
}

/// chi[k] = +1 if k is a nonzero quadratic residue mod q, -1 if not, 0 at 0.
fn residue_characters(q: usize) -> Vec<i32> {
    let mut chi = vec![-1i32; q];
    chi[0] = 0;
    for x in 1..q {
        chi[(x * x) % q] = 1;
    }
    chi
}

fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Order doubling: from H of order m, the block matrix [[H, H], [-H^T, H^T]]
/// is skew-Hadamard of order 2m.
fn double(h: &SkewHadamard) -> DenseMatrix<Rational> {
    let m = h.order();
    DenseMatrix::from_fn(2 * m, |i, j| match (i < m, j < m) {
        (true, true) => h.matrix.get(i, j).clone(),
        (true, false) => h.matrix.get(i, j - m).clone(),
        (false, true) => -h.matrix.get(j, i - m).clone(),
        (false, false) => h.matrix.get(j - m, i - m).clone(),
    })
}

/// A(eps) = (1 - eps) I + eps H. Since diag(H) = I the diagonal stays 1 and
/// A^T A = (1 + (n-1) eps^2) I exactly.
pub fn perturb_identity(h: &SkewHadamard, eps: &Rational) -> DenseMatrix<Rational> {
    let n = h.order();
    DenseMatrix::from_fn(n, |i, j| {
        if i == j {
            Rational::one()
        } else {
            h.matrix.get(i, j) * eps
        }
    })
}

/// The off-diagonal sign pattern of a skew-Hadamard matrix, for symbolic
/// work on (1 - eps) I + eps H at small orders.
pub fn hadamard_pattern(h: &SkewHadamard) -> Option<SignPattern> {
    let n = h.order();
    if n > crate::pattern::MAX_PATTERN_ORDER {
        return None;
    }
    let mut p = SignPattern::all_plus(n);
    for i in 0..n {
        for j in 0..n {
            if i != j && !h.matrix.get(i, j).is_one() {
                p = p.with_sign(i, j, true);
            }
        }
    }
    Some(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::det_rational;
    use crate::rational::{rat, rat_int};

    #[test]
    fn toeplitz_matches_closed_form() {
        let f = toeplitz_f(3, &rat_int(0), &rat(1, 4));
        let det = det_rational(&DenseMatrix::identity(3).sub(&f));
        assert_eq!(det, rat(25, 32));
        assert_eq!(det, toeplitz_det_closed_form(3, &rat_int(0), &rat(1, 4)));
    }

    #[test]
    fn toeplitz_special_cases() {
        // delta = eps gives eps*J; delta = 0 gives eps*(J - I).
        let f = toeplitz_f(4, &rat(1, 8), &rat(1, 8));
        assert_eq!(f.get(0, 0), &rat(1, 8));
        assert_eq!(f.get(0, 1), &rat(1, 8));
        let g = toeplitz_f(4, &rat_int(0), &rat(1, 8));
        assert_eq!(g.get(0, 0), &rat_int(0));
        assert_eq!(g.get(1, 0), &rat(1, 8));
    }

    #[test]
    fn toeplitz_closed_form_random_grid() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let n = rng.gen_range(1..=10);
            let delta = rat(rng.gen_range(0..=8), 64);
            let eps = rat(rng.gen_range(0..=6), 16 * n as i64);
            let f = toeplitz_f(n, &delta, &eps);
            let det = det_rational(&DenseMatrix::identity(n).sub(&f));
            assert_eq!(det, toeplitz_det_closed_form(n, &delta, &eps));
        }
    }

    #[test]
    fn skew_tri_determinants() {
        // order 2: 1 + eps^2
        assert_eq!(
            skew_tri_symbolic(2, false),
            EpsPolynomial::from_int_coeffs(&[1, 0, 1])
        );
        // order 5: 1 + 10 eps^2 + 5 eps^4
        assert_eq!(
            skew_tri_symbolic(5, false),
            EpsPolynomial::from_int_coeffs(&[1, 0, 10, 0, 5])
        );
        // order 3 inflated: ((1 + 2 eps)^3 + 1)/2 = 1 + 3e + 6e^2 + 4e^3
        assert_eq!(
            skew_tri_symbolic(3, true),
            EpsPolynomial::from_int_coeffs(&[1, 3, 6, 4])
        );
        // rational instantiation agrees
        let eps = rat(2, 7);
        let det = det_rational(&skew_tri(6, &eps, false));
        assert_eq!(det, skew_tri_symbolic(6, false).eval(&eps));
        let det = det_rational(&skew_tri(4, &eps, true));
        assert_eq!(det, skew_tri_symbolic(4, true).eval(&eps));
    }

    #[test]
    fn skew_tri_closed_form_up_to_twelve() {
        for n in 1..=12 {
            let got = skew_tri_symbolic(n, false);
            let expect = (&crate::poly::binomial_shift_pow(&rat_int(1), n as u32)
                + &crate::poly::binomial_shift_pow(&rat_int(-1), n as u32))
                .scale(&rat(1, 2));
            assert_eq!(got, expect, "order {n}");
        }
    }

    #[test]
    fn base_skew_hadamard_orders() {
        let h2 = skew_hadamard(2).unwrap();
        assert_eq!(h2.compact_rows(), vec!["++", "-+"]);
        assert_eq!(skew_hadamard(1).unwrap().order(), 1);
    }

    #[test]
    fn paley_order_twelve() {
        let h = skew_hadamard(12).unwrap();
        assert!(verify_skew_hadamard(h.matrix()));
    }

    #[test]
    fn doubling_order_sixteen() {
        let h = skew_hadamard(16).unwrap();
        assert!(verify_skew_hadamard(h.matrix()));
    }

    #[test]
    fn constructible_orders_up_to_sixty_four() {
        for n in (4..=64).step_by(4) {
            match skew_hadamard(n) {
                Ok(h) => {
                    assert!(verify_skew_hadamard(h.matrix()), "order {n}");
                }
                Err(Error::Unconstructible { .. }) => {
                    // prime-field Paley plus doubling misses these orders
                    assert!([28, 36, 52, 56].contains(&n), "order {n}");
                }
                Err(e) => panic!("unexpected error at order {n}: {e}"),
            }
        }
    }

    #[test]
    fn invalid_orders_rejected() {
        assert!(matches!(
            skew_hadamard(3),
            Err(Error::InvalidOrder { n: 3 })
        ));
        assert!(matches!(
            skew_hadamard(6),
            Err(Error::InvalidOrder { n: 6 })
        ));
    }

    #[test]
    fn verify_rejects_non_skew_inputs() {
        assert!(!verify_skew_hadamard(&DenseMatrix::identity(3)));
        // symmetric Hadamard fails H + H^T = 2I
        let sym = DenseMatrix::from_rows(vec![
            vec![rat_int(1), rat_int(1)],
            vec![rat_int(1), rat_int(-1)],
        ])
        .unwrap();
        assert!(!verify_skew_hadamard(&sym));
    }

    #[test]
    fn perturbation_properties() {
        let h = skew_hadamard(4).unwrap();
        // eps = 0 gives the identity
        assert_eq!(perturb_identity(&h, &rat_int(0)), DenseMatrix::identity(4));
        // eps = 1 restores H with det = n^(n/2)
        let at_one = perturb_identity(&h, &rat_int(1));
        assert_eq!(&at_one, h.matrix());
        assert_eq!(det_rational(&at_one), rat_int(16));
        // A^T A = (1 + (n-1) eps^2) I
        let eps = rat(3, 5);
        let a = perturb_identity(&h, &eps);
        let gram = a.transpose().mul(&a);
        let scale = rat_int(1) + rat_int(3) * &eps * &eps;
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { scale.clone() } else { rat_int(0) };
                assert_eq!(gram.get(i, j), &expect);
            }
        }
        // symbolic determinant is (1 + 3 eps^2)^2
        let pat = hadamard_pattern(&h).unwrap();
        assert_eq!(
            crate::pattern::det_poly(&pat, &crate::pattern::unit_diag(4)),
            EpsPolynomial::from_int_coeffs(&[1, 0, 6, 0, 9])
        );
    }
}
