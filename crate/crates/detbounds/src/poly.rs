//! Univariate polynomials in the perturbation parameter with exact rational
//! coefficients.
//!
//! Coefficients are stored low degree first and kept canonical (no trailing
//! zero), so structural equality is polynomial equality. The zero polynomial
//! has an empty coefficient list.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EpsPolynomial {
    coeffs: Vec<Rational>,
}

impl EpsPolynomial {
    pub fn zero() -> Self {
        EpsPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        EpsPolynomial::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        EpsPolynomial::from_coeffs(vec![c])
    }

    /// The monomial ε.
    pub fn eps() -> Self {
        EpsPolynomial::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    /// Builds from coefficients (degree 0 first), trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        EpsPolynomial { coeffs }
    }

    pub fn from_int_coeffs(coeffs: &[i64]) -> Self {
        EpsPolynomial::from_coeffs(
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading_coeff(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    /// Exact evaluation by Horner's rule.
    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + crate::rational::to_f64(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return EpsPolynomial::zero();
        }
        EpsPolynomial::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return EpsPolynomial::zero();
        }
        EpsPolynomial::from_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = EpsPolynomial::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// Euclidean division: self = q * div + r with deg r < deg div.
    pub fn divrem(&self, div: &Self) -> (Self, Self) {
        assert!(!div.is_zero(), "division by the zero polynomial");
        let dd = div.degree().unwrap();
        let lead = div.leading_coeff();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let factor = rem.last().unwrap() / &lead;
            for (i, c) in div.coeffs.iter().enumerate() {
                let t = c * &factor;
                rem[k + i] -= t;
            }
            debug_assert!(rem.last().unwrap().is_zero());
            rem.pop();
            quot[k] = factor;
        }
        (
            EpsPolynomial::from_coeffs(quot),
            EpsPolynomial::from_coeffs(rem),
        )
    }

    /// Division that must be exact; panics on a nonzero remainder.
    pub fn exact_div(&self, div: &Self) -> Self {
        let (q, r) = self.divrem(div);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// GCD by Euclid's algorithm, normalized to be primitive with a positive
    /// leading coefficient.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.primitive();
        }
        a.primitive()
    }

    /// The square-free part self / gcd(self, self'). Root set is unchanged.
    pub fn square_free_part(&self) -> Self {
        if self.is_zero() || self.degree() == Some(0) {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            self.primitive()
        } else {
            self.exact_div(&g).primitive()
        }
    }

    /// Scales by a positive rational to integer coefficients with gcd 1.
    /// Signs are preserved, so sign sequences (Sturm chains) are unchanged.
    pub fn positive_primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut denom_lcm = BigInt::one();
        for c in &self.coeffs {
            denom_lcm = denom_lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&denom_lcm / c.denom()))
            .collect();
        let mut g = BigInt::zero();
        for v in &ints {
            g = g.gcd(v);
        }
        EpsPolynomial::from_coeffs(
            ints.into_iter()
                .map(|v| Rational::from_integer(v / &g))
                .collect(),
        )
    }

    /// Scales to integer coefficients with gcd 1 and a positive leading
    /// coefficient. The zero polynomial is returned unchanged.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut denom_lcm = BigInt::one();
        for c in &self.coeffs {
            denom_lcm = denom_lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&denom_lcm / c.denom()))
            .collect();
        let mut g = BigInt::zero();
        for v in &ints {
            g = g.gcd(v);
        }
        let flip = if ints.last().unwrap().is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        let div = g * flip;
        EpsPolynomial::from_coeffs(
            ints.into_iter()
                .map(|v| Rational::from_integer(v / &div))
                .collect(),
        )
    }

    /// Removes the ε^m factor; returns (m, remaining polynomial).
    pub fn split_root_at_zero(&self) -> (usize, Self) {
        if self.is_zero() {
            return (0, self.clone());
        }
        let m = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        (m, EpsPolynomial::from_coeffs(self.coeffs[m..].to_vec()))
    }

    /// Deflates an exact root: self / (ε - r). Panics if r is not a root.
    pub fn deflate_root(&self, r: &Rational) -> Self {
        let lin = EpsPolynomial::from_coeffs(vec![-r.clone(), Rational::one()]);
        self.exact_div(&lin)
    }

    /// Coefficient array in the external "[c0, c1, ...]" form: integers are
    /// bare, other rationals are "p/q" strings.
    pub fn coeff_list_string(&self) -> String {
        let body: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!("[{}]", body.join(", "))
    }

    /// Human form, e.g. "1 + 10 eps^2 + 21 eps^4".
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let var = match k {
                0 => String::new(),
                1 => " eps".to_string(),
                _ => format!(" eps^{k}"),
            };
            let coeff = if k > 0 && mag.is_one() {
                String::new()
            } else {
                mag.to_string()
            };
            let term = format!("{coeff}{var}");
            let term = term.trim_start().to_string();
            if parts.is_empty() {
                parts.push(if c.is_negative() {
                    format!("-{term}")
                } else {
                    term
                });
            } else if c.is_negative() {
                parts.push(format!("- {term}"));
            } else {
                parts.push(format!("+ {term}"));
            }
        }
        parts.join(" ")
    }
}

impl fmt::Debug for EpsPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff_list_string())
    }
}

impl fmt::Display for EpsPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff_list_string())
    }
}

impl Add for &EpsPolynomial {
    type Output = EpsPolynomial;
    fn add(self, rhs: &EpsPolynomial) -> EpsPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + rhs.coeff(k));
        }
        EpsPolynomial::from_coeffs(out)
    }
}

impl Sub for &EpsPolynomial {
    type Output = EpsPolynomial;
    fn sub(self, rhs: &EpsPolynomial) -> EpsPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) - rhs.coeff(k));
        }
        EpsPolynomial::from_coeffs(out)
    }
}

impl Mul for &EpsPolynomial {
    type Output = EpsPolynomial;
    fn mul(self, rhs: &EpsPolynomial) -> EpsPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return EpsPolynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        EpsPolynomial::from_coeffs(out)
    }
}

impl Neg for &EpsPolynomial {
    type Output = EpsPolynomial;
    fn neg(self) -> EpsPolynomial {
        EpsPolynomial::from_coeffs(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

macro_rules! forward_owned_ops {
    ($($trait:ident :: $method:ident),*) => {$(
        impl $trait for EpsPolynomial {
            type Output = EpsPolynomial;
            fn $method(self, rhs: EpsPolynomial) -> EpsPolynomial {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned_ops!(Add::add, Sub::sub, Mul::mul);

impl Neg for EpsPolynomial {
    type Output = EpsPolynomial;
    fn neg(self) -> EpsPolynomial {
        -&self
    }
}

impl AddAssign<&EpsPolynomial> for EpsPolynomial {
    fn add_assign(&mut self, rhs: &EpsPolynomial) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&EpsPolynomial> for EpsPolynomial {
    fn sub_assign(&mut self, rhs: &EpsPolynomial) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&EpsPolynomial> for EpsPolynomial {
    fn mul_assign(&mut self, rhs: &EpsPolynomial) {
        *self = &*self * rhs;
    }
}

/// Expansion of (1 + c·ε)^n.
pub fn binomial_shift_pow(c: &Rational, n: u32) -> EpsPolynomial {
    EpsPolynomial::from_coeffs(vec![Rational::one(), c.clone()]).pow(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    #[test]
    fn canonical_form_trims_trailing_zeros() {
        let p = EpsPolynomial::from_coeffs(vec![rat_int(1), rat_int(0), rat_int(0)]);
        assert_eq!(p.degree(), Some(0));
        assert!(EpsPolynomial::from_coeffs(vec![rat_int(0)]).is_zero());
        assert_eq!(EpsPolynomial::zero().degree(), None);
    }

    #[test]
    fn evaluation_is_exact() {
        // 1 + 10 eps^2 + 21 eps^4 at eps = 1/8 is 4757/4096.
        let p = EpsPolynomial::from_int_coeffs(&[1, 0, 10, 0, 21]);
        assert_eq!(p.eval(&rat(1, 8)), rat(4757, 4096));
    }

    #[test]
    fn divrem_roundtrip() {
        let a = EpsPolynomial::from_int_coeffs(&[-3, 5, 5, 17]);
        let b = EpsPolynomial::from_int_coeffs(&[1, 2]);
        let (q, r) = a.divrem(&b);
        assert_eq!(&(&q * &b) + &r, a);
    }

    #[test]
    fn square_free_strips_multiplicity() {
        // (eps - 1)^2 (eps + 2) -> primitive square-free has roots {1, -2}.
        let lin1 = EpsPolynomial::from_int_coeffs(&[-1, 1]);
        let lin2 = EpsPolynomial::from_int_coeffs(&[2, 1]);
        let p = &(&lin1 * &lin1) * &lin2;
        let sf = p.square_free_part();
        assert_eq!(sf, &lin1 * &lin2);
    }

    #[test]
    fn deflation_and_zero_split() {
        let p = EpsPolynomial::from_int_coeffs(&[0, 0, 2, -2]); // 2e^2 - 2e^3
        let (m, rest) = p.split_root_at_zero();
        assert_eq!(m, 2);
        assert_eq!(rest, EpsPolynomial::from_int_coeffs(&[2, -2]));
        assert_eq!(
            rest.deflate_root(&rat_int(1)),
            EpsPolynomial::from_int_coeffs(&[-2])
        );
    }

    #[test]
    fn pretty_and_list_forms() {
        let p = EpsPolynomial::from_int_coeffs(&[1, 0, 10, 0, 21]);
        assert_eq!(p.coeff_list_string(), "[1, 0, 10, 0, 21]");
        assert_eq!(p.pretty(), "1 + 10 eps^2 + 21 eps^4");
        let q = EpsPolynomial::from_coeffs(vec![rat(1, 2), rat_int(-1)]);
        assert_eq!(q.pretty(), "1/2 - eps");
    }
}
