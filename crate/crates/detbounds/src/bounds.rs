//! The catalogue of closed-form determinant bounds for A = I - E with
//! |e_ij| <= eps off the diagonal and a diagonal perturbation delta, plus the
//! dominance comparison between the square-root upper bound and 1/(1 - n*eps).
//!
//! Exact values are primary; binary64 mirrors are for display. Entries whose
//! hypotheses fail for the queried (n, eps, delta) are flagged invalid with
//! the violated inequality text rather than omitted.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix};
use crate::poly::EpsPolynomial;
use crate::rational::{exp_bounds, parse_rational, pow_i, to_f64, Rational};

/// A bound value in exact form. Non-integer exponents keep their base and
/// exponent as rationals so comparisons near ties can be re-run at any
/// precision.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactExpr {
    Rational(Rational),
    /// base^exp with base >= 0.
    Pow { base: Rational, exp: Rational },
    /// coeff * e^exponent.
    ExpTimes { coeff: Rational, exponent: Rational },
}

impl ExactExpr {
    pub fn to_f64(&self) -> f64 {
        match self {
            ExactExpr::Rational(x) => to_f64(x),
            ExactExpr::Pow { base, exp } => to_f64(base).powf(to_f64(exp)),
            ExactExpr::ExpTimes { coeff, exponent } => to_f64(coeff) * to_f64(exponent).exp(),
        }
    }

    /// Certified enclosure by exact rationals; width shrinks as
    /// `precision_bits` grows.
    pub fn enclosure(&self, precision_bits: u32) -> (Rational, Rational) {
        match self {
            ExactExpr::Rational(x) => (x.clone(), x.clone()),
            ExactExpr::Pow { base, exp } => {
                debug_assert!(!base.is_negative());
                let (p, q) = (exp.numer().clone(), exp.denom().clone());
                // value^q = base^p exactly; bracket the q-th root by bisection.
                let target = rational_pow_big(base, &p);
                qth_root_enclosure(&target, &q, precision_bits)
            }
            ExactExpr::ExpTimes { coeff, exponent } => {
                let (lo, hi) = exp_bounds(exponent, precision_bits);
                if coeff.is_negative() {
                    (coeff * hi, coeff * lo)
                } else {
                    (coeff * lo, coeff * hi)
                }
            }
        }
    }

    /// Exact three-way comparison with a rational.
    pub fn cmp_rational(&self, x: &Rational) -> Ordering {
        match self {
            ExactExpr::Rational(v) => v.cmp(x),
            ExactExpr::Pow { base, exp } => {
                debug_assert!(!base.is_negative());
                if x.is_negative() {
                    return if base.is_zero() && exp.is_positive() {
                        Rational::zero().cmp(x)
                    } else {
                        Ordering::Greater
                    };
                }
                // base^(p/q) vs x  <=>  base^p vs x^q (q > 0, both sides >= 0)
                let p = exp.numer();
                let q = exp.denom();
                rational_pow_big(base, p).cmp(&rational_pow_big(x, q))
            }
            ExactExpr::ExpTimes { coeff, exponent } => {
                if exponent.is_zero() {
                    return coeff.cmp(x);
                }
                if coeff.is_zero() {
                    return Rational::zero().cmp(x);
                }
                // coeff * e^t is irrational here, so refinement terminates.
                let mut bits = 64;
                loop {
                    let (lo, hi) = self.enclosure(bits);
                    if &lo > x {
                        return Ordering::Greater;
                    }
                    if &hi < x {
                        return Ordering::Less;
                    }
                    bits *= 2;
                    assert!(bits <= 1 << 16, "comparison failed to separate");
                }
            }
        }
    }

    /// Certified three-way comparison between two exact expressions.
    pub fn cmp_expr(&self, other: &ExactExpr) -> Ordering {
        if let ExactExpr::Rational(x) = other {
            return self.cmp_rational(x);
        }
        if let ExactExpr::Rational(x) = self {
            return other.cmp_rational(x).reverse();
        }
        if let (
            ExactExpr::Pow { base: b1, exp: e1 },
            ExactExpr::Pow { base: b2, exp: e2 },
        ) = (self, other)
        {
            // b1^(p1/q1) vs b2^(p2/q2): raise both to lcm(q1, q2).
            let l = e1.denom().lcm(e2.denom());
            let k1 = e1.numer() * (&l / e1.denom());
            let k2 = e2.numer() * (&l / e2.denom());
            return rational_pow_big(b1, &k1).cmp(&rational_pow_big(b2, &k2));
        }
        // At least one transcendental side: refine enclosures. Exact ties are
        // caught by the structural checks above or are impossible.
        let mut bits = 64;
        loop {
            let (alo, ahi) = self.enclosure(bits);
            let (blo, bhi) = other.enclosure(bits);
            if ahi < blo {
                return Ordering::Less;
            }
            if alo > bhi {
                return Ordering::Greater;
            }
            if alo == bhi && ahi == blo {
                return Ordering::Equal;
            }
            bits *= 2;
            assert!(bits <= 1 << 16, "comparison failed to separate");
        }
    }
}

fn rational_pow_big(base: &Rational, k: &BigInt) -> Rational {
    use num_traits::ToPrimitive;
    let ki = k.to_i32().expect("exponent fits in i32");
    pow_i(base, ki)
}

/// Brackets target^(1/q) for target >= 0, q >= 1.
fn qth_root_enclosure(target: &Rational, q: &BigInt, precision_bits: u32) -> (Rational, Rational) {
    if target.is_zero() {
        return (Rational::zero(), Rational::zero());
    }
    let width = Rational::new(BigInt::one(), BigInt::one() << precision_bits);
    let one = Rational::one();
    let (mut lo, mut hi) = if target >= &one {
        (one.clone(), target.clone())
    } else {
        (target.clone(), one.clone())
    };
    while &hi - &lo > width {
        let mid = (&lo + &hi) / Rational::from_integer(2.into());
        if &rational_pow_big(&mid, q) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    Lower,
    Upper,
}

#[derive(Clone, Debug)]
pub struct BoundEntry {
    pub kind: BoundKind,
    pub exact: ExactExpr,
    pub float: f64,
    pub valid: bool,
    pub hypothesis: String,
}

#[derive(Clone, Debug)]
pub struct BoundTable {
    pub n: usize,
    pub eps: Rational,
    pub delta: Option<Rational>,
    pub entries: BTreeMap<String, BoundEntry>,
}

impl BoundTable {
    fn insert(&mut self, name: &str, kind: BoundKind, exact: ExactExpr, valid: bool, hyp: &str) {
        let float = exact.to_f64();
        self.entries.insert(
            name.to_string(),
            BoundEntry {
                kind,
                exact,
                float,
                valid,
                hypothesis: hyp.to_string(),
            },
        );
    }

    pub fn entry(&self, name: &str) -> Option<&BoundEntry> {
        self.entries.get(name)
    }

    pub fn valid_entries(&self, kind: BoundKind) -> impl Iterator<Item = (&String, &BoundEntry)> {
        self.entries
            .iter()
            .filter(move |(_, e)| e.valid && e.kind == kind)
    }
}

fn nm1_eps(n: usize, eps: &Rational) -> Rational {
    Rational::from_integer(BigInt::from(n as i64 - 1)) * eps
}

/// Every lower bound in the catalogue at (n, eps, delta). delta defaults
/// to 0, the zero-diagonal regime.
pub fn lower_bound_table(n: usize, eps: &Rational, delta: Option<&Rational>) -> BoundTable {
    assert!(n >= 1, "order must be positive");
    assert!(!eps.is_negative(), "eps must be nonnegative");
    let d = delta.cloned().unwrap_or_else(Rational::zero);
    assert!(!d.is_negative(), "delta must be nonnegative");
    let one = Rational::one();
    let zero_diag = d.is_zero();
    let ne = Rational::from_integer(BigInt::from(n as i64)) * eps;
    let n1e = nm1_eps(n, eps);

    let mut t = BoundTable {
        n,
        eps: eps.clone(),
        delta: delta.cloned(),
        entries: BTreeMap::new(),
    };

    let strict = n1e < one;
    let weak = n1e <= one;

    // (1 - (n-1)eps)^n
    t.insert(
        "gerschgorin_ostrowski",
        BoundKind::Lower,
        ExactExpr::Rational(pow_i(&(&one - &n1e), n as i32)),
        zero_diag && strict,
        "diag(E) = 0 and (n-1)*eps < 1",
    );
    // (1 - (n-1)^2 eps^2)^floor(n/2)
    let sq = pow_i(&n1e, 2);
    t.insert(
        "ostrowski_satz6_lower",
        BoundKind::Lower,
        ExactExpr::Rational(pow_i(&(&one - &sq), (n / 2) as i32)),
        zero_diag && strict,
        "diag(E) = 0 and (n-1)*eps < 1",
    );
    // e^{n(n-1)eps} (1 - (n-1)eps)^n
    t.insert(
        "von_koch",
        BoundKind::Lower,
        ExactExpr::ExpTimes {
            coeff: pow_i(&(&one - &n1e), n as i32),
            exponent: Rational::from_integer(BigInt::from((n * (n - 1)) as i64)) * eps,
        },
        zero_diag && strict,
        "diag(E) = 0 and (n-1)*eps < 1",
    );
    // 1 - n*eps
    t.insert(
        "ostrowski55_lower",
        BoundKind::Lower,
        ExactExpr::Rational(&one - &ne),
        d <= *eps && ne <= one,
        "|e_ij| <= eps for all i,j (needs delta <= eps) and n*eps <= 1",
    );
    // (1 - delta - (n-1)eps)(1 - delta + eps)^(n-1)
    let lemma1 = (&one - &d - &n1e) * pow_i(&(&one - &d + eps), n as i32 - 1);
    t.insert(
        "lemma1",
        BoundKind::Lower,
        ExactExpr::Rational(lemma1),
        &d + &n1e <= one,
        "|e_ii| <= delta (or one-sided e_ii <= delta) and delta + (n-1)*eps <= 1",
    );
    // (1 - (n-1)eps)(1 + eps)^(n-1)
    t.insert(
        "cor3",
        BoundKind::Lower,
        ExactExpr::Rational((&one - &n1e) * pow_i(&(&one + eps), n as i32 - 1)),
        zero_diag && weak,
        "diag(E) = 0 and (n-1)*eps <= 1",
    );
    // 1 - (n-1)^2 eps^2
    t.insert(
        "remark2_quadratic",
        BoundKind::Lower,
        ExactExpr::Rational(&one - &sq),
        zero_diag && weak,
        "diag(E) = 0 and (n-1)*eps <= 1",
    );
    t
}

/// Every upper bound in the catalogue at (n, eps).
pub fn upper_bound_table(n: usize, eps: &Rational) -> BoundTable {
    assert!(n >= 1, "order must be positive");
    assert!(!eps.is_negative(), "eps must be nonnegative");
    let one = Rational::one();
    let ne = Rational::from_integer(BigInt::from(n as i64)) * eps;
    let n1e = nm1_eps(n, eps);
    let mut t = BoundTable {
        n,
        eps: eps.clone(),
        delta: None,
        entries: BTreeMap::new(),
    };

    // (1 + (n-1)^2 eps^2)^floor(n/2)
    t.insert(
        "ostrowski_satz6_upper",
        BoundKind::Upper,
        ExactExpr::Rational(pow_i(&(&one + &pow_i(&n1e, 2)), (n / 2) as i32)),
        n1e <= one,
        "diag(E) = 0 and (n-1)*eps <= 1",
    );
    // 1/(1 - n*eps); the raw value is still shown when invalid (negative for
    // n*eps > 1), except at the pole where 0 stands in.
    let o55_valid = ne < one;
    t.insert(
        "ostrowski55_upper",
        BoundKind::Upper,
        if ne == one {
            ExactExpr::Rational(Rational::zero())
        } else {
            ExactExpr::Rational((&one - &ne).recip())
        },
        o55_valid,
        "|e_ij| <= eps for all i,j and n*eps < 1",
    );
    // (1 + 2 eps + n eps^2)^(n/2)
    let base1 = &one + Rational::from_integer(2.into()) * eps + &ne * eps;
    t.insert(
        "upper1",
        BoundKind::Upper,
        half_power(&base1, n),
        true,
        "|e_ij| <= eps for all i,j",
    );
    // (1 + (n-1) eps^2)^(n/2)
    let base2 = &one + &n1e * eps;
    t.insert(
        "upper2",
        BoundKind::Upper,
        half_power(&base2, n),
        true,
        "diag(E) = 0",
    );
    t
}

/// base^(n/2): exact rational for even n, a power descriptor for odd n.
fn half_power(base: &Rational, n: usize) -> ExactExpr {
    if n % 2 == 0 {
        ExactExpr::Rational(pow_i(base, (n / 2) as i32))
    } else {
        ExactExpr::Pow {
            base: base.clone(),
            exp: Rational::new(BigInt::from(n as i64), BigInt::from(2)),
        }
    }
}

/// Row-dominance product bound: for h_i = |a_ii| - Σ_{j≠i} |a_ij| all
/// positive, |det(A)| >= h_1 h_2 ... h_n.
pub fn ostrowski_product_bound(a: &DenseMatrix<Rational>) -> Result<Rational> {
    let n = a.order();
    let mut product = Rational::one();
    for i in 0..n {
        let mut h = a.get(i, i).abs();
        for j in 0..n {
            if j != i {
                h -= a.get(i, j).abs();
            }
        }
        if !h.is_positive() {
            return Err(Error::NotDiagonallyDominant {
                i,
                h: h.to_string(),
            });
        }
        product *= h;
    }
    Ok(product)
}

/// Scaled lower bound for |a_ij| <= eps*|a_ii|:
/// |det(A)| >= (Π |a_ii|) (1 - (n-1)eps)(1 + eps)^(n-1).
pub fn theorem3_lower_bound(a: &DenseMatrix<Rational>, eps: &Rational) -> Result<Rational> {
    let n = a.order();
    for i in 0..n {
        for j in 0..n {
            if i != j && a.get(i, j).abs() > eps * a.get(i, i).abs() {
                return Err(Error::HypothesisViolated {
                    detail: format!("|a_{i}{j}| > eps*|a_{i}{i}|"),
                });
            }
        }
    }
    let mut diag_product = Rational::one();
    for i in 0..n {
        diag_product *= a.get(i, i).abs();
    }
    let one = Rational::one();
    Ok(diag_product * (&one - nm1_eps(n, eps)) * pow_i(&(&one + eps), n as i32 - 1))
}

#[derive(Clone, Debug)]
pub struct Lemma2Gap {
    /// (1 + 2 eps + n eps^2)^(n/2), display mirror.
    pub lhs: f64,
    /// 1/(1 - n eps), exact.
    pub rhs: Rational,
    /// lhs < rhs, decided exactly: (1+2e+ne^2)^n (1-ne)^2 < 1.
    pub holds: bool,
}

pub fn lemma2_gap(n: usize, eps: &Rational) -> Result<Lemma2Gap> {
    let one = Rational::one();
    let ne = Rational::from_integer(BigInt::from(n as i64)) * eps;
    if ne >= one {
        return Err(Error::HypothesisViolated {
            detail: format!("n*eps = {ne} >= 1"),
        });
    }
    let base = &one + Rational::from_integer(2.into()) * eps + &ne * eps;
    let lhs_expr = half_power(&base, n);
    let rhs = (&one - &ne).recip();
    let holds = pow_i(&base, n as i32) * pow_i(&(&one - &ne), 2) < one;
    Ok(Lemma2Gap {
        lhs: lhs_expr.to_f64(),
        rhs,
        holds,
    })
}

#[derive(Clone, Debug)]
pub struct AttainableDets {
    /// ((1 + 2 eps)^n + 1)/2, as an exact polynomial.
    pub u1: EpsPolynomial,
    /// ((1 + eps)^n + (1 - eps)^n)/2, as an exact polynomial.
    pub u2: EpsPolynomial,
    pub u1_at_eps: Rational,
    pub u2_at_eps: Rational,
}

/// Closed forms of the two attainable large determinants, certified against
/// the symbolic determinants of their defining matrices for small orders.
pub fn attainable_upper_dets(n: usize, eps: &Rational) -> AttainableDets {
    assert!(n >= 1);
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let u1 = (&crate::poly::binomial_shift_pow(&Rational::from_integer(2.into()), n as u32)
        + &EpsPolynomial::one())
        .scale(&half);
    let u2 = (&crate::poly::binomial_shift_pow(&Rational::one(), n as u32)
        + &crate::poly::binomial_shift_pow(&-Rational::one(), n as u32))
        .scale(&half);
    if n <= 12 {
        let plain = crate::construct::skew_tri_symbolic(n, false);
        let inflated = crate::construct::skew_tri_symbolic(n, true);
        assert_eq!(u2, plain, "closed form must match the constructed matrix");
        assert_eq!(u1, inflated, "closed form must match the constructed matrix");
    }
    AttainableDets {
        u1_at_eps: u1.eval(eps),
        u2_at_eps: u2.eval(eps),
        u1,
        u2,
    }
}

// --- JSON wire form -------------------------------------------------------

#[derive(Serialize, Deserialize, PartialEq, Debug)]
pub struct BoundTableJson {
    pub n: usize,
    pub eps: String,
    pub delta: Option<String>,
    pub entries: BTreeMap<String, BoundEntryJson>,
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
pub struct BoundEntryJson {
    pub exact: serde_json::Value,
    pub float: f64,
    pub kind: String,
    pub valid: bool,
    pub hypothesis: String,
}

impl ExactExpr {
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        match self {
            ExactExpr::Rational(x) => json!(x.to_string()),
            ExactExpr::Pow { base, exp } => {
                json!({"base": base.to_string(), "exp": exp.to_string()})
            }
            ExactExpr::ExpTimes { coeff, exponent } => {
                json!({"coeff": coeff.to_string(), "exponent": exponent.to_string()})
            }
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        if let Some(s) = v.as_str() {
            return Ok(ExactExpr::Rational(parse_rational(s)?));
        }
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("bad exact expression".into()))?;
        let field = |k: &str| -> Result<Rational> {
            parse_rational(
                obj.get(k)
                    .and_then(|x| x.as_str())
                    .ok_or_else(|| Error::Parse(format!("missing field {k}")))?,
            )
        };
        if obj.contains_key("base") {
            Ok(ExactExpr::Pow {
                base: field("base")?,
                exp: field("exp")?,
            })
        } else {
            Ok(ExactExpr::ExpTimes {
                coeff: field("coeff")?,
                exponent: field("exponent")?,
            })
        }
    }
}

impl BoundTable {
    pub fn to_json(&self) -> BoundTableJson {
        BoundTableJson {
            n: self.n,
            eps: self.eps.to_string(),
            delta: self.delta.as_ref().map(|d| d.to_string()),
            entries: self
                .entries
                .iter()
                .map(|(name, e)| {
                    (
                        name.clone(),
                        BoundEntryJson {
                            exact: e.exact.to_json(),
                            float: e.float,
                            kind: match e.kind {
                                BoundKind::Lower => "lower".to_string(),
                                BoundKind::Upper => "upper".to_string(),
                            },
                            valid: e.valid,
                            hypothesis: e.hypothesis.clone(),
                        },
                    )
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    #[test]
    fn reference_lower_table() {
        let t = lower_bound_table(5, &rat(1, 8), None);
        let exact = |name: &str| match &t.entry(name).unwrap().exact {
            ExactExpr::Rational(x) => x.clone(),
            other => panic!("expected a rational for {name}, got {other:?}"),
        };
        assert_eq!(exact("gerschgorin_ostrowski"), rat(1, 32));
        assert_eq!(exact("ostrowski_satz6_lower"), rat(9, 16));
        assert_eq!(exact("remark2_quadratic"), rat(3, 4));
        assert_eq!(exact("cor3"), rat(6561, 8192));
        assert_eq!(exact("ostrowski55_lower"), rat(3, 8));
        let vk = t.entry("von_koch").unwrap();
        assert!((vk.float - 0.3807).abs() < 1e-4);
        assert!(t.entries.values().all(|e| e.valid));
    }

    #[test]
    fn unperturbed_identity_gives_all_ones() {
        let t = lower_bound_table(4, &rat_int(0), None);
        for (name, e) in &t.entries {
            assert!(
                (e.float - 1.0).abs() < 1e-15,
                "{name} should be 1 at eps = 0"
            );
            assert_eq!(e.exact.cmp_rational(&rat_int(1)), Ordering::Equal);
        }
    }

    #[test]
    fn diagonal_perturbation_flags_zero_diag_entries() {
        let t = lower_bound_table(5, &rat(1, 8), Some(&rat(1, 8)));
        assert!(!t.entry("gerschgorin_ostrowski").unwrap().valid);
        assert!(!t.entry("cor3").unwrap().valid);
        let o55 = t.entry("ostrowski55_lower").unwrap();
        assert!(o55.valid);
        assert_eq!(
            o55.exact.cmp_rational(&rat(3, 8)),
            Ordering::Equal
        );
        let l1 = t.entry("lemma1").unwrap();
        assert_eq!(l1.exact.cmp_rational(&rat(3, 8)), Ordering::Equal);
    }

    #[test]
    fn reference_upper_table() {
        let t = upper_bound_table(5, &rat(1, 8));
        match &t.entry("ostrowski_satz6_upper").unwrap().exact {
            ExactExpr::Rational(x) => assert_eq!(x, &rat(25, 16)),
            _ => panic!(),
        }
        match &t.entry("ostrowski55_upper").unwrap().exact {
            ExactExpr::Rational(x) => assert_eq!(x, &rat(8, 3)),
            _ => panic!(),
        }
        let u2 = t.entry("upper2").unwrap();
        assert!((u2.float - 1.16365).abs() < 1e-5);
        let u1 = t.entry("upper1").unwrap();
        assert!((u1.float - 2.033).abs() < 1e-3);
    }

    #[test]
    fn hadamard_case_at_eps_one() {
        let t = upper_bound_table(4, &rat_int(1));
        match &t.entry("upper2").unwrap().exact {
            ExactExpr::Rational(x) => assert_eq!(x, &rat_int(16)),
            _ => panic!("even order should be exact"),
        }
        assert!(!t.entry("ostrowski55_upper").unwrap().valid);
    }

    #[test]
    fn product_bound_examples() {
        // I - (1/4)(J - I) over order 3: h_i = 1/2, product 1/8.
        let a = DenseMatrix::from_fn(3, |i, j| if i == j { rat_int(1) } else { rat(-1, 4) });
        assert_eq!(ostrowski_product_bound(&a).unwrap(), rat(1, 8));
        assert!(crate::matrix::det_rational(&a) >= rat(1, 8));

        let d = DenseMatrix::from_rows(vec![
            vec![rat_int(2), rat_int(0)],
            vec![rat_int(0), rat_int(3)],
        ])
        .unwrap();
        assert_eq!(ostrowski_product_bound(&d).unwrap(), rat_int(6));

        let a5 = DenseMatrix::from_fn(5, |i, j| if i == j { rat_int(1) } else { rat(-1, 8) });
        assert_eq!(ostrowski_product_bound(&a5).unwrap(), rat(1, 32));

        let flat = DenseMatrix::from_fn(2, |_, _| rat_int(1));
        assert!(ostrowski_product_bound(&flat).is_err());
    }

    #[test]
    fn scaled_bound_examples() {
        let a = DenseMatrix::from_fn(5, |i, j| if i == j { rat_int(1) } else { rat(1, 8) });
        assert_eq!(
            theorem3_lower_bound(&a, &rat(1, 8)).unwrap(),
            rat(6561, 8192)
        );
        let d = DenseMatrix::from_rows(vec![
            vec![rat_int(-3), rat_int(0)],
            vec![rat_int(0), rat_int(4)],
        ])
        .unwrap();
        assert_eq!(theorem3_lower_bound(&d, &rat_int(0)).unwrap(), rat_int(12));
        // (n-1)eps = 1/2 with unit diagonal: bound is (1/2)(1+eps)^(n-1) >= 3/4
        let n = 5;
        let eps = rat(1, 8);
        let a = DenseMatrix::from_fn(n, |i, j| if i == j { rat_int(1) } else { eps.clone() });
        let b = theorem3_lower_bound(&a, &eps).unwrap();
        assert!(b >= rat(3, 4));
        // hypothesis violation carries the offending position
        let bad = DenseMatrix::from_rows(vec![
            vec![rat_int(1), rat_int(1)],
            vec![rat_int(0), rat_int(1)],
        ])
        .unwrap();
        assert!(matches!(
            theorem3_lower_bound(&bad, &rat(1, 2)),
            Err(Error::HypothesisViolated { .. })
        ));
    }

    #[test]
    fn row_dominance_bounds_stay_below_the_determinant() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(61);
        for _ in 0..60 {
            let n = rng.gen_range(1..=6);
            let eps = rat(rng.gen_range(0..=7), 8 * n as i64);
            let a = DenseMatrix::from_fn(n, |i, j| {
                if i == j {
                    rat_int(1)
                } else {
                    rat(rng.gen_range(-16..=16), 16) * &eps
                }
            });
            let det = crate::matrix::det_rational(&a).abs();
            if let Ok(product) = ostrowski_product_bound(&a) {
                assert!(product <= det, "product bound exceeded |det|");
            }
            if let Ok(scaled) = theorem3_lower_bound(&a, &eps) {
                assert!(scaled <= det, "scaled bound exceeded |det|");
            }
        }
    }

    #[test]
    fn gap_examples() {
        let g = lemma2_gap(5, &rat(1, 8)).unwrap();
        assert!((g.lhs - 2.033).abs() < 1e-3);
        assert_eq!(g.rhs, rat(8, 3));
        assert!(g.holds);

        let g1 = lemma2_gap(1, &rat(1, 2)).unwrap();
        assert!((g1.lhs - 1.5).abs() < 1e-12);
        assert_eq!(g1.rhs, rat_int(2));
        assert!(g1.holds);

        // eps = 0 boundary: equality, so strict dominance fails
        let g0 = lemma2_gap(3, &rat_int(0)).unwrap();
        assert!(!g0.holds);

        assert!(lemma2_gap(4, &rat(1, 4)).is_err());
    }

    #[test]
    fn attainable_closed_forms() {
        let a5 = attainable_upper_dets(5, &rat_int(0));
        assert_eq!(a5.u2, EpsPolynomial::from_int_coeffs(&[1, 0, 10, 0, 5]));
        assert_eq!(a5.u1_at_eps, rat_int(1));
        assert_eq!(a5.u2_at_eps, rat_int(1));
        let a6 = attainable_upper_dets(6, &rat(1, 2));
        assert_eq!(a6.u2, EpsPolynomial::from_int_coeffs(&[1, 0, 15, 0, 15, 0, 1]));
        let a3 = attainable_upper_dets(3, &rat_int(1));
        assert_eq!(a3.u1, EpsPolynomial::from_int_coeffs(&[1, 3, 6, 4]));
    }

    #[test]
    fn certified_comparisons() {
        // upper1 < ostrowski55_upper on a few cells (strict dominance).
        for (n, eps) in [(2usize, rat(1, 4)), (5, rat(1, 8)), (9, rat(1, 16))] {
            let t = upper_bound_table(n, &eps);
            let u1 = &t.entry("upper1").unwrap().exact;
            let o = match &t.entry("ostrowski55_upper").unwrap().exact {
                ExactExpr::Rational(x) => x.clone(),
                _ => panic!(),
            };
            assert_eq!(u1.cmp_rational(&o), Ordering::Less, "n={n}");
        }
        // von Koch >= plain Gerschgorin product form for n > 1
        let t = lower_bound_table(5, &rat(1, 8), None);
        let vk = &t.entry("von_koch").unwrap().exact;
        let g = match &t.entry("gerschgorin_ostrowski").unwrap().exact {
            ExactExpr::Rational(x) => x.clone(),
            _ => panic!(),
        };
        assert_eq!(vk.cmp_rational(&g), Ordering::Greater);
    }
}
