//! Exact real-root isolation on an open rational interval.
//!
//! Rational roots are screened first (divisor candidates of the integer
//! primitive form) and reported exactly; the remaining roots are isolated by
//! Sturm-sequence bisection down to a configured width, with every sign
//! computed in exact arithmetic. Brackets are kept strictly inside the query
//! interval so callers can sample signs at bracket endpoints.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::EpsPolynomial;
use crate::rational::{sign, Rational};

/// Default isolation width 2^-32.
pub fn default_width() -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << 32)
}

/// An isolated real root: either an exact rational root, or an interval with
/// opposite exact signs of `polynomial` at its endpoints.
#[derive(Clone, Debug)]
pub struct RootBracket {
    /// The isolating polynomial: square-free with rational roots removed for
    /// interval brackets, the queried polynomial for exact roots.
    pub polynomial: EpsPolynomial,
    pub lo: Rational,
    pub hi: Rational,
    pub exact_root: Option<Rational>,
}

impl RootBracket {
    fn exact(p: &EpsPolynomial, r: Rational) -> Self {
        debug_assert!(p.eval(&r).is_zero());
        RootBracket {
            polynomial: p.clone(),
            lo: r.clone(),
            hi: r.clone(),
            exact_root: Some(r),
        }
    }

    /// A representative point (the exact root or the interval midpoint).
    pub fn position(&self) -> Rational {
        match &self.exact_root {
            Some(r) => r.clone(),
            None => (&self.lo + &self.hi) / Rational::from_integer(BigInt::from(2)),
        }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}

pub fn isolate_roots(
    p: &EpsPolynomial,
    lo: &Rational,
    hi: &Rational,
) -> Result<Vec<RootBracket>> {
    isolate_roots_with_width(p, lo, hi, &default_width())
}

/// Isolates every real root of `p` in the open interval (lo, hi).
pub fn isolate_roots_with_width(
    p: &EpsPolynomial,
    lo: &Rational,
    hi: &Rational,
    width: &Rational,
) -> Result<Vec<RootBracket>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    assert!(lo < hi, "isolation interval must be nonempty");
    let mut out: Vec<RootBracket> = Vec::new();
    if p.degree() == Some(0) {
        return Ok(out);
    }

    let sf = p.square_free_part();
    let (zero_mult, mut q) = sf.split_root_at_zero();
    if zero_mult > 0 && lo < &Rational::zero() && &Rational::zero() < hi {
        out.push(RootBracket::exact(p, Rational::zero()));
    }

    // Exact rational roots, by divisor screening where feasible plus direct
    // endpoint/midpoint hits below.
    for r in rational_roots(&q) {
        q = q.deflate_root(&r);
        if lo < &r && &r < hi {
            out.push(RootBracket::exact(p, r));
        }
    }
    while !q.is_zero() && q.degree() > Some(0) && q.eval(lo).is_zero() {
        q = q.deflate_root(lo);
    }
    while !q.is_zero() && q.degree() > Some(0) && q.eval(hi).is_zero() {
        q = q.deflate_root(hi);
    }

    'outer: loop {
        if q.degree().unwrap_or(0) == 0 {
            break;
        }
        let chain = sturm_chain(&q);
        let v_lo = sign_variations(&chain, lo);
        let v_hi = sign_variations(&chain, hi);
        if v_lo == v_hi {
            break;
        }
        // Work stack of (a, b, variations at a, variations at b).
        let mut stack = vec![(lo.clone(), hi.clone(), v_lo, v_hi)];
        let mut brackets: Vec<(Rational, Rational)> = Vec::new();
        while let Some((a, b, va, vb)) = stack.pop() {
            let count = va - vb;
            if count == 0 {
                continue;
            }
            if count == 1 {
                match shrink_bracket(&q, &a, &b, lo, hi, width) {
                    Shrink::Bracket(x, y) => brackets.push((x, y)),
                    Shrink::ExactRoot(r) => {
                        // A rational root that escaped screening; deflate and
                        // restart on the reduced polynomial.
                        q = q.deflate_root(&r);
                        if lo < &r && &r < hi {
                            out.push(RootBracket::exact(p, r));
                        }
                        continue 'outer;
                    }
                }
                continue;
            }
            let mid = midpoint(&a, &b);
            if q.eval(&mid).is_zero() {
                q = q.deflate_root(&mid);
                out.push(RootBracket::exact(p, mid));
                continue 'outer;
            }
            let vm = sign_variations(&chain, &mid);
            stack.push((a, mid.clone(), va, vm));
            stack.push((mid, b, vm, vb));
        }
        let exact_positions: Vec<Rational> = out
            .iter()
            .filter_map(|r| r.exact_root.clone())
            .collect();
        for (x, y) in brackets {
            let (x, y) = refine_away_from(&q, p, x, y, &exact_positions);
            out.push(RootBracket {
                polynomial: q.clone(),
                lo: x,
                hi: y,
                exact_root: None,
            });
        }
        break;
    }

    out.sort_by(|a, b| a.position().cmp(&b.position()));
    Ok(out)
}

/// Shrinks a bracket of a root of `q` until it excludes every exact rational
/// root of `p` and neither endpoint is a root of `p`. `q` has no rational
/// roots, so any rational subdivision point has a well-defined sign of q; the
/// finitely many rational roots of `p` are dodged by trying nearby dyadic
/// points.
fn refine_away_from(
    q: &EpsPolynomial,
    p: &EpsPolynomial,
    mut lo: Rational,
    mut hi: Rational,
    avoid: &[Rational],
) -> (Rational, Rational) {
    let needs_work = |lo: &Rational, hi: &Rational| {
        p.eval(lo).is_zero()
            || p.eval(hi).is_zero()
            || avoid.iter().any(|r| lo <= r && r <= hi)
    };
    let sign_lo = sign(&q.eval(&lo));
    while needs_work(&lo, &hi) {
        let mut mid = midpoint(&lo, &hi);
        let mut step = 0;
        while p.eval(&mid).is_zero() {
            // dodge a rational root of p; q(mid) is never zero
            mid = midpoint(&lo, &mid);
            step += 1;
            assert!(step < 128, "could not find a non-root subdivision point");
        }
        if sign(&q.eval(&mid)) == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

enum Shrink {
    Bracket(Rational, Rational),
    ExactRoot(Rational),
}

/// Bisects an interval known to contain exactly one simple root of `q` until
/// it is narrower than `width` and strictly inside (lo, hi).
fn shrink_bracket(
    q: &EpsPolynomial,
    a: &Rational,
    b: &Rational,
    lo: &Rational,
    hi: &Rational,
    width: &Rational,
) -> Shrink {
    let mut a = a.clone();
    let mut b = b.clone();
    let sign_a = sign(&q.eval(&a));
    debug_assert!(sign_a != 0 && sign(&q.eval(&b)) != 0);
    while &(&b - &a) > width || &a == lo || &b == hi {
        let mid = midpoint(&a, &b);
        let sign_mid = sign(&q.eval(&mid));
        if sign_mid == 0 {
            return Shrink::ExactRoot(mid);
        }
        if sign_mid == sign_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    Shrink::Bracket(a, b)
}

fn midpoint(a: &Rational, b: &Rational) -> Rational {
    (a + b) / Rational::from_integer(BigInt::from(2))
}

/// Sturm sequence of a square-free polynomial, normalized by positive
/// scalars only.
fn sturm_chain(q: &EpsPolynomial) -> Vec<EpsPolynomial> {
    let mut chain = vec![q.positive_primitive(), q.derivative().positive_primitive()];
    loop {
        let last = &chain[chain.len() - 1];
        if last.is_zero() {
            chain.pop();
            return chain;
        }
        let prev = &chain[chain.len() - 2];
        let (_, r) = prev.divrem(last);
        if r.is_zero() {
            return chain;
        }
        chain.push((-&r).positive_primitive());
    }
}

fn sign_variations(chain: &[EpsPolynomial], x: &Rational) -> usize {
    let mut count = 0;
    let mut last = 0;
    for p in chain {
        let s = sign(&p.eval(x));
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Rational roots of an integer-primitive polynomial with a nonzero constant
/// term, found by divisor screening. Skipped (empty) when the outer
/// coefficients are too large to factor cheaply; bisection then reports any
/// remaining rational root when a midpoint hits it.
fn rational_roots(q: &EpsPolynomial) -> Vec<Rational> {
    let mut roots = Vec::new();
    if q.degree().unwrap_or(0) == 0 {
        return roots;
    }
    let qz = q.positive_primitive();
    let a0 = qz.coeff(0).numer().abs();
    let ad = qz.leading_coeff().numer().abs();
    let limit = BigInt::from(1_000_000_000_000u64);
    if a0 > limit || ad > limit {
        return roots;
    }
    let mut q_work = qz;
    for u in divisors(&a0) {
        for v in divisors(&ad) {
            for s in [1i64, -1] {
                let cand = Rational::new(&u * BigInt::from(s), v.clone());
                while q_work.degree().unwrap_or(0) > 0 && q_work.eval(&cand).is_zero() {
                    roots.push(cand.clone());
                    q_work = q_work.deflate_root(&cand);
                }
            }
        }
    }
    roots.sort();
    roots.dedup();
    roots
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.to_u64().expect("divisor bound checked by caller");
    debug_assert!(n > 0);
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            small.push(BigInt::from(d));
            if d != n / d {
                large.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Descartes-style certificate that `p` has no root in the open interval
/// (a, b). Returns the constant sign of p on (a, b) when certified, None when
/// inconclusive. A zero polynomial yields Some(0).
pub fn constant_sign_on(p: &EpsPolynomial, a: &Rational, b: &Rational) -> Option<i32> {
    if p.is_zero() {
        return Some(0);
    }
    if p.degree() == Some(0) {
        return Some(sign(&p.coeff(0)));
    }
    // Map (a, b) onto (0, inf) and count coefficient sign variations of
    // (1+t)^d p((a + b t)/(1 + t)); zero variations certifies no roots.
    let shifted = taylor_shift(p.coeffs().to_vec(), a);
    let span = b - a;
    let scaled: Vec<Rational> = shifted
        .iter()
        .enumerate()
        .map(|(k, c)| c * crate::rational::pow_i(&span, k as i32))
        .collect();
    let reversed: Vec<Rational> = scaled.into_iter().rev().collect();
    let transformed = taylor_shift(reversed, &Rational::one());
    let mut variations = 0;
    let mut last = 0;
    for c in &transformed {
        let s = sign(c);
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            variations += 1;
        }
        last = s;
    }
    if variations > 0 {
        return None;
    }
    Some(sign(&p.eval(&midpoint(a, b))))
}

/// In-place Taylor shift: coefficients of p(x + a).
fn taylor_shift(mut coeffs: Vec<Rational>, a: &Rational) -> Vec<Rational> {
    if a.is_zero() || coeffs.is_empty() {
        return coeffs;
    }
    let d = coeffs.len() - 1;
    for k in 0..d {
        for j in (k..d).rev() {
            let t = &coeffs[j + 1] * a;
            coeffs[j] += t;
        }
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int, to_f64};

    #[test]
    fn crossover_cubic_is_isolated_tightly() {
        let p = EpsPolynomial::from_int_coeffs(&[-3, 5, 5, 17]);
        let roots = isolate_roots(&p, &rat_int(0), &rat_int(1)).unwrap();
        assert_eq!(roots.len(), 1);
        let r = &roots[0];
        assert!(r.exact_root.is_none());
        assert!(r.width() <= default_width());
        let mid = to_f64(&r.position());
        assert!((mid - 0.3437).abs() < 1e-3);
        // opposite exact signs at the bracket endpoints
        assert_eq!(
            sign(&r.polynomial.eval(&r.lo)) * sign(&r.polynomial.eval(&r.hi)),
            -1
        );
        // strictly interior
        assert!(r.lo > rat_int(0) && r.hi < rat_int(1));
    }

    #[test]
    fn exact_rational_root_is_reported() {
        // 2e^2 - 2e^3 on (0, 2): the only interior root is exactly 1.
        let p = EpsPolynomial::from_int_coeffs(&[0, 0, 2, -2]);
        let roots = isolate_roots(&p, &rat_int(0), &rat_int(2)).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].exact_root, Some(rat_int(1)));
    }

    #[test]
    fn no_real_roots() {
        let p = EpsPolynomial::from_int_coeffs(&[1, 0, 1]);
        assert!(isolate_roots(&p, &rat_int(0), &rat_int(2))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        assert!(matches!(
            isolate_roots(&EpsPolynomial::zero(), &rat_int(0), &rat_int(1)),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn endpoint_roots_are_excluded() {
        // roots at 0 and 1, neither inside (0, 1)
        let p = EpsPolynomial::from_int_coeffs(&[0, -1, 1]); // e(e-1)
        assert!(isolate_roots(&p, &rat_int(0), &rat_int(1))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn multiple_roots_and_fractional_roots() {
        // (3e - 1)(5e - 3)(e^2 + 1): exact roots 1/3 and 3/5.
        let p = &(&EpsPolynomial::from_int_coeffs(&[-1, 3])
            * &EpsPolynomial::from_int_coeffs(&[-3, 5]))
            * &EpsPolynomial::from_int_coeffs(&[1, 0, 1]);
        let roots = isolate_roots(&p, &rat_int(0), &rat_int(2)).unwrap();
        let exact: Vec<_> = roots.iter().filter_map(|r| r.exact_root.clone()).collect();
        assert_eq!(exact, vec![rat(1, 3), rat(3, 5)]);
    }

    #[test]
    fn repeated_roots_isolated_once() {
        // (e - 1/2)^2 (e - 5/4): square-free handling collapses the double root.
        let lin = EpsPolynomial::from_int_coeffs(&[-1, 2]);
        let p = &(&lin * &lin) * &EpsPolynomial::from_int_coeffs(&[-5, 4]);
        let roots = isolate_roots(&p, &rat_int(0), &rat_int(2)).unwrap();
        let exact: Vec<_> = roots.iter().filter_map(|r| r.exact_root.clone()).collect();
        assert_eq!(exact, vec![rat(1, 2), rat(5, 4)]);
    }

    #[test]
    fn irrational_pair() {
        // e^2 - 2 has one root in (0, 2) and one in (-2, 0).
        let p = EpsPolynomial::from_int_coeffs(&[-2, 0, 1]);
        let roots = isolate_roots(&p, &rat_int(-2), &rat_int(2)).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((to_f64(&roots[0].position()) + std::f64::consts::SQRT_2).abs() < 1e-6);
        assert!((to_f64(&roots[1].position()) - std::f64::consts::SQRT_2).abs() < 1e-6);
    }

    #[test]
    fn descartes_certificate() {
        let p = EpsPolynomial::from_int_coeffs(&[-3, 5, 5, 17]);
        // no roots in (1/2, 1): cubic is positive there
        assert_eq!(constant_sign_on(&p, &rat(1, 2), &rat_int(1)), Some(1));
        // root inside (0, 1/2) keeps it inconclusive or impossible to certify
        assert_eq!(constant_sign_on(&p, &rat_int(0), &rat(1, 2)), None);
        assert_eq!(
            constant_sign_on(&EpsPolynomial::zero(), &rat_int(0), &rat_int(1)),
            Some(0)
        );
    }
}
