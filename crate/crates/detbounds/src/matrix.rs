//! Dense square matrices over exact scalars, with fraction-free determinants.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::EpsPolynomial;
use crate::rational::Rational;

/// Scalars that support the exact divisions arising in fraction-free
/// elimination.
pub trait ExactRing:
    Clone
    + PartialEq
    + Zero
    + One
    + std::ops::Neg<Output = Self>
    + std::ops::Sub<Output = Self>
{
    /// Division known to be exact in this ring.
    fn exact_div(&self, rhs: &Self) -> Self;
}

impl ExactRing for Rational {
    fn exact_div(&self, rhs: &Self) -> Self {
        self / rhs
    }
}

impl ExactRing for BigInt {
    fn exact_div(&self, rhs: &Self) -> Self {
        let (q, r) = self.div_rem(rhs);
        debug_assert!(r.is_zero(), "inexact integer division in elimination");
        q
    }
}

impl Zero for EpsPolynomial {
    fn zero() -> Self {
        EpsPolynomial::zero()
    }
    fn is_zero(&self) -> bool {
        EpsPolynomial::is_zero(self)
    }
}

impl One for EpsPolynomial {
    fn one() -> Self {
        EpsPolynomial::one()
    }
}

impl ExactRing for EpsPolynomial {
    fn exact_div(&self, rhs: &Self) -> Self {
        EpsPolynomial::exact_div(self, rhs)
    }
}

/// A square matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: ExactRing> DenseMatrix<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(n >= 1, "matrix order must be at least 1");
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        DenseMatrix { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parse("matrix must be square and nonempty".into()));
        }
        Ok(DenseMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        DenseMatrix::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> Self {
        DenseMatrix::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        DenseMatrix::from_fn(self.n, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.n {
                acc = acc + self.get(i, k).clone() * rhs.get(k, j).clone();
            }
            acc
        })
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        DenseMatrix::from_fn(self.n, |i, j| self.get(i, j).clone() - rhs.get(i, j).clone())
    }

    pub fn map<U: ExactRing>(&self, mut f: impl FnMut(&T) -> U) -> DenseMatrix<U> {
        DenseMatrix::from_fn(self.n, |i, j| f(self.get(i, j)))
    }

    /// The principal submatrix indexed by `rows` (used for minor tests).
    pub fn principal_submatrix(&self, rows: &[usize]) -> Self {
        DenseMatrix::from_fn(rows.len(), |i, j| self.get(rows[i], rows[j]).clone())
    }
}

impl<T: ExactRing + fmt::Debug> fmt::Debug for DenseMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:?}", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Fraction-free (Bareiss) determinant over any exact ring. Row swaps flip
/// the sign; every interior division is exact by the Sylvester identity.
pub fn det_bareiss<T: ExactRing>(m: &DenseMatrix<T>) -> T {
    let n = m.order();
    let mut a: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j).clone()).collect())
        .collect();
    let mut sign_flip = false;
    let mut prev_pivot = T::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign_flip = !sign_flip;
                }
                None => return T::zero(),
            }
        }
        let pivot = a[k][k].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let t = pivot.clone() * a[i][j].clone() - a[i][k].clone() * a[k][j].clone();
                a[i][j] = t.exact_div(&prev_pivot);
            }
            a[i][k] = T::zero();
        }
        prev_pivot = pivot;
    }
    let d = a[n - 1][n - 1].clone();
    if sign_flip {
        -d
    } else {
        d
    }
}

/// Exact determinant of a rational matrix. Rows are scaled to integers first
/// so the elimination runs over big integers.
pub fn det_rational(m: &DenseMatrix<Rational>) -> Rational {
    let n = m.order();
    let mut scale = BigInt::one();
    let int_matrix = DenseMatrix::from_fn(n, |i, j| {
        let _ = (i, j);
        BigInt::zero()
    });
    let mut int_matrix = int_matrix;
    for i in 0..n {
        let mut row_lcm = BigInt::one();
        for j in 0..n {
            row_lcm = row_lcm.lcm(m.get(i, j).denom());
        }
        for j in 0..n {
            let e = m.get(i, j);
            int_matrix.set(i, j, e.numer() * (&row_lcm / e.denom()));
        }
        scale *= row_lcm;
    }
    Rational::new(det_bareiss(&int_matrix), scale)
}

/// Exact symbolic determinant of a polynomial matrix (fraction-free
/// elimination over the polynomial ring).
pub fn det_symbolic(m: &DenseMatrix<EpsPolynomial>) -> EpsPolynomial {
    det_bareiss(m)
}

/// Parses the matrix text format: a line with the order, then that many rows
/// of whitespace-separated rationals.
pub fn parse_matrix(text: &str) -> Result<DenseMatrix<Rational>> {
    let mut tokens = text.split_whitespace();
    let n: usize = tokens
        .next()
        .ok_or_else(|| Error::Parse("empty matrix input".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad order: {e}")))?;
    if n == 0 {
        return Err(Error::Parse("matrix order must be positive".into()));
    }
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let mut row = Vec::with_capacity(n);
        for _ in 0..n {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::Parse("missing matrix entries".into()))?;
            row.push(crate::rational::parse_rational(tok)?);
        }
        rows.push(row);
    }
    if tokens.next().is_some() {
        return Err(Error::Parse("trailing tokens after matrix".into()));
    }
    DenseMatrix::from_rows(rows)
}

pub fn format_matrix(m: &DenseMatrix<Rational>) -> String {
    let mut out = format!("{}\n", m.order());
    for i in 0..m.order() {
        let row: Vec<String> = (0..m.order()).map(|j| m.get(i, j).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Largest absolute row sum, an exact upper bound for the spectral radius.
pub fn max_abs_row_sum(m: &DenseMatrix<Rational>) -> Rational {
    (0..m.order())
        .map(|i| {
            (0..m.order())
                .map(|j| m.get(i, j).abs())
                .fold(Rational::zero(), |a, b| a + b)
        })
        .max()
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn j_minus_i_scaled(n: usize, s: Rational) -> DenseMatrix<Rational> {
        DenseMatrix::from_fn(n, |i, j| if i == j { Rational::zero() } else { s.clone() })
    }

    #[test]
    fn identity_determinant() {
        let m = DenseMatrix::<Rational>::identity(3);
        assert_eq!(det_rational(&m), rat_int(1));
    }

    #[test]
    fn singular_at_one_over_n() {
        // I - (1/3) J over order 3 has determinant 1 - n*eps = 0.
        let m = DenseMatrix::from_fn(3, |i, j| {
            if i == j {
                rat(2, 3)
            } else {
                rat(-1, 3)
            }
        });
        assert_eq!(det_rational(&m), rat_int(0));
    }

    #[test]
    fn four_by_four_extremal_matrix_at_an_eighth() {
        // The order-5 extremal pattern evaluated at eps = 1/8; determinant is
        // the polynomial 1 + 10 eps^2 + 21 eps^4 at 1/8, i.e. 4757/4096.
        let e = rat(1, 8);
        let signs: [[i64; 5]; 5] = [
            [0, 1, 1, 1, 1],
            [-1, 0, 1, -1, 1],
            [-1, -1, 0, 1, 1],
            [-1, 1, -1, 0, -1],
            [-1, -1, -1, 1, 0],
        ];
        let m = DenseMatrix::from_fn(5, |i, j| {
            if i == j {
                rat_int(1)
            } else {
                rat_int(signs[i][j]) * &e
            }
        });
        assert_eq!(det_rational(&m), rat(4757, 4096));
        let approx = crate::rational::to_f64(&det_rational(&m));
        assert!((approx - 1.16138).abs() < 1e-4);
    }

    #[test]
    fn pivoting_handles_leading_zeros() {
        let m = DenseMatrix::from_rows(vec![
            vec![rat_int(0), rat_int(1)],
            vec![rat_int(1), rat_int(0)],
        ])
        .unwrap();
        assert_eq!(det_rational(&m), rat_int(-1));
    }

    #[test]
    fn symbolic_determinant_matches_rational_instantiation() {
        // det(I + eps(J - I)) for n = 3 symbolically, then at eps = 1/4.
        let eps = EpsPolynomial::eps();
        let m = DenseMatrix::from_fn(3, |i, j| {
            if i == j {
                EpsPolynomial::one()
            } else {
                eps.clone()
            }
        });
        let p = det_symbolic(&m);
        let inst = j_minus_i_scaled(3, rat(1, 4));
        let with_diag = DenseMatrix::from_fn(3, |i, j| {
            if i == j {
                rat_int(1)
            } else {
                inst.get(i, j).clone()
            }
        });
        assert_eq!(p.eval(&rat(1, 4)), det_rational(&with_diag));
    }

    #[test]
    fn parse_format_roundtrip() {
        let text = "3\n1 1/2 -2\n0 1 3/4\n-1/3 0 1\n";
        let m = parse_matrix(text).unwrap();
        assert_eq!(format_matrix(&m), text);
        assert!(parse_matrix("2\n1 2\n3\n").is_err());
    }
}
