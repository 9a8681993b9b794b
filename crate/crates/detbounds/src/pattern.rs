//! Bit-packed sign patterns for unit-diagonal matrices with ±ε off-diagonal
//! entries, and their exact symbolic determinants.
//!
//! A pattern stores one bit per off-diagonal position in row-major order
//! (diagonal skipped); a set bit means a minus sign. The determinant of such
//! a matrix is a polynomial in ε whose ε^k coefficient sums sign(σ)·∏ signs
//! over the permutations σ moving exactly k points, so one popcount per
//! permutation gives the contribution.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::matrix::{det_symbolic, DenseMatrix};
use crate::poly::EpsPolynomial;
use crate::rational::Rational;
use num_traits::One;

/// Largest order with a cached permutation table (7! = 5040 entries).
pub const MAX_PERM_TABLE_ORDER: usize = 7;

/// Largest order a bit-packed pattern can hold: n(n-1) <= 128.
pub const MAX_PATTERN_ORDER: usize = 11;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SignPattern {
    n: usize,
    bits: u128,
}

impl SignPattern {
    pub fn all_plus(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_PATTERN_ORDER);
        SignPattern { n, bits: 0 }
    }

    pub fn from_bits(n: usize, bits: u128) -> Self {
        assert!(n >= 1 && n <= MAX_PATTERN_ORDER);
        debug_assert!(n * (n - 1) == 128 || bits >> (n * (n - 1)) == 0);
        SignPattern { n, bits }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u128 {
        self.bits
    }

    /// Bit index of off-diagonal position (i, j), row-major, diagonal skipped.
    pub fn bit_index(n: usize, i: usize, j: usize) -> usize {
        debug_assert!(i != j && i < n && j < n);
        i * (n - 1) + if j < i { j } else { j - 1 }
    }

    /// Sign at (i, j): +1 or -1 off the diagonal, +1 on it.
    pub fn sign(&self, i: usize, j: usize) -> i32 {
        if i == j {
            return 1;
        }
        if self.bits >> Self::bit_index(self.n, i, j) & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn with_sign(mut self, i: usize, j: usize, negative: bool) -> Self {
        let k = Self::bit_index(self.n, i, j);
        if negative {
            self.bits |= 1u128 << k;
        } else {
            self.bits &= !(1u128 << k);
        }
        self
    }

    /// Text form: one row per line, '.' on the diagonal, '+'/'-' elsewhere.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.n * (self.n + 1));
        for i in 0..self.n {
            for j in 0..self.n {
                out.push(if i == j {
                    '.'
                } else if self.sign(i, j) > 0 {
                    '+'
                } else {
                    '-'
                });
            }
            if i + 1 < self.n {
                out.push('\n');
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let rows: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let n = rows.len();
        if n == 0 || n > MAX_PATTERN_ORDER {
            return Err(Error::Parse(format!("bad pattern order {n}")));
        }
        let mut p = SignPattern::all_plus(n);
        for (i, row) in rows.iter().enumerate() {
            let chars: Vec<char> = row.chars().collect();
            if chars.len() != n {
                return Err(Error::Parse(format!("pattern row {i} has wrong length")));
            }
            for (j, c) in chars.iter().enumerate() {
                match (i == j, c) {
                    (true, '.') => {}
                    (false, '+') => {}
                    (false, '-') => p = p.with_sign(i, j, true),
                    _ => {
                        return Err(Error::Parse(format!(
                            "unexpected character {c:?} at ({i},{j})"
                        )))
                    }
                }
            }
        }
        Ok(p)
    }

    /// The matrix I + ε·S at a concrete rational ε.
    pub fn to_eps_matrix(&self, eps: &Rational) -> DenseMatrix<Rational> {
        DenseMatrix::from_fn(self.n, |i, j| {
            if i == j {
                Rational::one()
            } else if self.sign(i, j) > 0 {
                eps.clone()
            } else {
                -eps.clone()
            }
        })
    }

    /// The symbolic matrix with the given diagonal and ±ε off the diagonal.
    pub fn to_poly_matrix(&self, diag: &[EpsPolynomial]) -> DenseMatrix<EpsPolynomial> {
        assert_eq!(diag.len(), self.n);
        let eps = EpsPolynomial::eps();
        DenseMatrix::from_fn(self.n, |i, j| {
            if i == j {
                diag[i].clone()
            } else if self.sign(i, j) > 0 {
                eps.clone()
            } else {
                -&eps
            }
        })
    }
}

impl Ord for SignPattern {
    /// Lexicographic over the row-major sign sequence with '+' < '-'.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.n.cmp(&other.n) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let diff = self.bits ^ other.bits;
        if diff == 0 {
            return Ordering::Equal;
        }
        let k = diff.trailing_zeros();
        if self.bits >> k & 1 == 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl PartialOrd for SignPattern {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One permutation's contribution shape: the off-diagonal bit mask it reads,
/// how many points it moves, and its parity sign.
#[derive(Clone, Copy)]
pub struct PermEntry {
    pub mask: u64,
    pub moved: u8,
    pub sign: i8,
}

pub struct PermTable {
    pub n: usize,
    pub entries: Vec<PermEntry>,
}

impl PermTable {
    fn build(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_PERM_TABLE_ORDER);
        let mut entries = Vec::new();
        let mut perm: Vec<usize> = (0..n).collect();
        permute(&mut perm, 0, &mut |p| {
            let mut mask = 0u64;
            let mut moved = 0u8;
            for (i, &pi) in p.iter().enumerate() {
                if pi != i {
                    mask |= 1u64 << SignPattern::bit_index(n, i, pi);
                    moved += 1;
                }
            }
            entries.push(PermEntry {
                mask,
                moved,
                sign: permutation_sign(p),
            });
        });
        PermTable { n, entries }
    }
}

fn permutation_sign(p: &[usize]) -> i8 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1i8;
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

fn permute(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

/// Shared, lazily built permutation tables.
pub fn perm_table(n: usize) -> Arc<PermTable> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<PermTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(PermTable::build(n)))
        .clone()
}

/// Integer determinant coefficients (by ε-degree) of the unit-diagonal
/// matrix I + εS for a pattern's low 64 sign bits. The hot path of the
/// exhaustive search.
pub fn det_pattern_coeffs(bits: u64, table: &PermTable) -> [i64; 8] {
    let mut coeffs = [0i64; 8];
    for e in &table.entries {
        let minus_parity = (bits & e.mask).count_ones() & 1;
        let c = if minus_parity == 1 {
            -(e.sign as i64)
        } else {
            e.sign as i64
        };
        coeffs[e.moved as usize] += c;
    }
    coeffs
}

/// Exact determinant of the matrix with the given diagonal polynomials and
/// sign(i,j)·ε off the diagonal.
///
/// Unit and constant diagonals of order <= 7 go through the permutation
/// table; everything else falls back to fraction-free symbolic elimination.
/// Both routes are exact and agree.
pub fn det_poly(pattern: &SignPattern, diag: &[EpsPolynomial]) -> EpsPolynomial {
    let n = pattern.order();
    assert_eq!(diag.len(), n, "diagonal length must match the order");
    let uniform = diag.iter().all(|d| d == &diag[0]);
    if uniform && n <= MAX_PERM_TABLE_ORDER {
        let table = perm_table(n);
        let coeffs = det_pattern_coeffs(pattern.bits() as u64, &table);
        let d = &diag[0];
        if d == &EpsPolynomial::one() {
            return EpsPolynomial::from_int_coeffs(&coeffs[..=n]);
        }
        // sum_k coeff_k * eps^k * d^(n-k)
        let mut acc = EpsPolynomial::zero();
        for (k, &c) in coeffs.iter().enumerate().take(n + 1) {
            if c == 0 {
                continue;
            }
            let mut term = vec![0i64; k + 1];
            term[k] = c;
            acc += &(&EpsPolynomial::from_int_coeffs(&term) * &d.pow((n - k) as u32));
        }
        return acc;
    }
    det_symbolic(&pattern.to_poly_matrix(diag))
}

/// Unit diagonal of length n.
pub fn unit_diag(n: usize) -> Vec<EpsPolynomial> {
    vec![EpsPolynomial::one(); n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::det_rational;
    use crate::rational::{rat, rat_int};

    #[test]
    fn order_two_antisymmetric_pair() {
        // signs (s12, s21) = (+, -) give 1 + eps^2.
        let p = SignPattern::all_plus(2).with_sign(1, 0, true);
        assert_eq!(
            det_poly(&p, &unit_diag(2)),
            EpsPolynomial::from_int_coeffs(&[1, 0, 1])
        );
    }

    #[test]
    fn order_one_is_unity() {
        let p = SignPattern::all_plus(1);
        assert_eq!(det_poly(&p, &unit_diag(1)), EpsPolynomial::one());
    }

    #[test]
    fn order_four_skew_pattern() {
        let text = ".+++\n-.+-\n--.+\n-+-.";
        let p = SignPattern::from_text(text).unwrap();
        assert_eq!(p.to_text(), text);
        assert_eq!(
            det_poly(&p, &unit_diag(4)),
            EpsPolynomial::from_int_coeffs(&[1, 0, 6, 0, 9])
        );
    }

    #[test]
    fn order_three_cyclic_pattern() {
        let p = SignPattern::from_text(".++\n-.+\n+-.").unwrap();
        assert_eq!(
            det_poly(&p, &unit_diag(3)),
            EpsPolynomial::from_int_coeffs(&[1, 0, 1, 2])
        );
    }

    #[test]
    fn symbolic_matches_rational_instantiation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..=6);
            let mut p = SignPattern::all_plus(n);
            for i in 0..n {
                for j in 0..n {
                    if i != j && rng.gen::<bool>() {
                        p = p.with_sign(i, j, true);
                    }
                }
            }
            let poly = det_poly(&p, &unit_diag(n));
            assert!(poly.degree().unwrap_or(0) <= n);
            assert_eq!(poly.coeff(0), rat_int(1));
            let eps = rat(rng.gen_range(-8..=8), rng.gen_range(1..=9));
            assert_eq!(poly.eval(&eps), det_rational(&p.to_eps_matrix(&eps)));
        }
    }

    #[test]
    fn uniform_diagonal_route_matches_elimination() {
        // diagonal 1 + eps everywhere, compare table route against Bareiss.
        let p = SignPattern::from_text(".+-\n-.+\n+-.").unwrap();
        let d = EpsPolynomial::from_int_coeffs(&[1, 1]);
        let diag = vec![d.clone(), d.clone(), d];
        let via_table = det_poly(&p, &diag);
        let via_elim = det_symbolic(&p.to_poly_matrix(&diag));
        assert_eq!(via_table, via_elim);
    }

    #[test]
    fn lexicographic_order_prefers_plus() {
        let a = SignPattern::all_plus(3);
        let b = SignPattern::all_plus(3).with_sign(0, 1, true);
        let c = SignPattern::all_plus(3).with_sign(2, 1, true);
        assert!(a < b);
        assert!(a < c);
        // the earliest differing position decides: b has '-' at (0,1) where
        // c still has '+'
        assert!(c < b);
    }
}
