//! Exact upper envelopes of determinant polynomials over a half-open
//! interval (lo, hi].
//!
//! The envelope is built by certified insertion: for each piece the sign of
//! the difference polynomial is decided either by a no-root certificate on
//! the open piece, or by isolating the difference's roots and sampling one
//! exact sign per root-free region. Piece boundaries at irrational
//! crossovers are placed at the right end of an isolating bracket of the
//! configured width, and the bracket itself is reported as the breakpoint.

use num_traits::{Signed, Zero};

use crate::error::Result;
use crate::pattern::SignPattern;
use crate::poly::EpsPolynomial;
use crate::rational::{sign, Rational};
use crate::roots::{constant_sign_on, isolate_roots_with_width, RootBracket};

#[derive(Clone, Debug)]
pub struct Piece {
    /// Open left endpoint.
    pub lo: Rational,
    /// Closed right endpoint.
    pub hi: Rational,
    pub poly: EpsPolynomial,
    pub witness: SignPattern,
}

#[derive(Clone, Debug)]
pub struct Envelope {
    pub domain_lo: Rational,
    pub domain_hi: Rational,
    /// Pieces tile (domain_lo, domain_hi]; adjacent pieces carry distinct
    /// polynomials.
    pub pieces: Vec<Piece>,
    /// One crossover record between each pair of adjacent pieces.
    pub breakpoints: Vec<RootBracket>,
}

impl Envelope {
    /// The piece whose half-open interval contains x.
    pub fn piece_containing(&self, x: &Rational) -> Option<&Piece> {
        self.pieces.iter().find(|p| &p.lo < x && x <= &p.hi)
    }

    pub fn value_at(&self, x: &Rational) -> Option<Rational> {
        self.piece_containing(x).map(|p| p.poly.eval(x))
    }
}

pub struct EnvelopeBuilder {
    domain_lo: Rational,
    domain_hi: Rational,
    width: Rational,
    pieces: Vec<Piece>,
}

impl EnvelopeBuilder {
    pub fn new(
        domain_lo: Rational,
        domain_hi: Rational,
        width: Rational,
        poly: EpsPolynomial,
        witness: SignPattern,
    ) -> Self {
        assert!(domain_lo < domain_hi, "empty envelope domain");
        EnvelopeBuilder {
            pieces: vec![Piece {
                lo: domain_lo.clone(),
                hi: domain_hi.clone(),
                poly,
                witness,
            }],
            domain_lo,
            domain_hi,
            width,
        }
    }

    /// Inserts a candidate polynomial, keeping the exact pointwise maximum.
    /// Ties on whole pieces keep the lexicographically smaller witness.
    pub fn insert(&mut self, q: &EpsPolynomial, w: &SignPattern) -> Result<()> {
        let mut new_pieces: Vec<Piece> = Vec::with_capacity(self.pieces.len());
        fn push(pieces: &mut Vec<Piece>, piece: Piece) {
            if let Some(last) = pieces.last_mut() {
                if last.poly == piece.poly {
                    last.hi = piece.hi;
                    if piece.witness < last.witness {
                        last.witness = piece.witness;
                    }
                    return;
                }
            }
            pieces.push(piece);
        }

        for piece in std::mem::take(&mut self.pieces) {
            let d = &piece.poly - q;
            if d.is_zero() {
                let mut piece = piece;
                if *w < piece.witness {
                    piece.witness = *w;
                }
                push(&mut new_pieces, piece);
                continue;
            }
            if let Some(s) = constant_sign_on(&d, &piece.lo, &piece.hi) {
                debug_assert!(s != 0);
                let winner = if s > 0 {
                    piece
                } else {
                    Piece {
                        lo: piece.lo,
                        hi: piece.hi,
                        poly: q.clone(),
                        witness: *w,
                    }
                };
                push(&mut new_pieces, winner);
                continue;
            }
            // Roots of the difference split the piece into sign-isolated
            // regions; one exact sign sample per region decides its winner.
            // Cut at exact roots, or at the right end of an isolating
            // bracket. The bulk sign of a region is read strictly left of
            // its root: at the midpoint before an exact root, or at the
            // bracket's left end (never a root of d by the isolation
            // contract, and the stretch up to the bracketed root is
            // root-free).
            let roots = isolate_roots_with_width(&d, &piece.lo, &piece.hi, &self.width)
                .expect("difference polynomial is nonzero");
            let mut region_lo = piece.lo.clone();
            let two = Rational::from_integer(2.into());
            let emit = |pieces: &mut Vec<Piece>, lo: Rational, hi: Rational, s: i32| {
                let winner = if s > 0 {
                    Piece {
                        lo,
                        hi,
                        poly: piece.poly.clone(),
                        witness: piece.witness,
                    }
                } else {
                    Piece {
                        lo,
                        hi,
                        poly: q.clone(),
                        witness: *w,
                    }
                };
                push(pieces, winner);
            };
            for r in &roots {
                let (cut, sample) = match &r.exact_root {
                    Some(x) => (x.clone(), (&region_lo + x) / &two),
                    None => (r.hi.clone(), r.lo.clone()),
                };
                debug_assert!(cut > region_lo, "cuts must be strictly increasing");
                let s = sign(&d.eval(&sample));
                debug_assert!(s != 0, "sample landed on a root");
                emit(&mut new_pieces, region_lo.clone(), cut.clone(), s);
                region_lo = cut;
            }
            let sample = (&region_lo + &piece.hi) / &two;
            let s = sign(&d.eval(&sample));
            debug_assert!(s != 0);
            emit(&mut new_pieces, region_lo, piece.hi.clone(), s);
        }
        self.pieces = new_pieces;
        Ok(())
    }

    /// Merges another builder's envelope into this one.
    pub fn merge(&mut self, other: &EnvelopeBuilder) -> Result<()> {
        for piece in &other.pieces {
            self.insert(&piece.poly, &piece.witness)?;
        }
        Ok(())
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Resolves breakpoint records against the final adjacent differences
    /// and returns the finished envelope.
    pub fn finalize(self) -> Result<Envelope> {
        let mut breakpoints = Vec::with_capacity(self.pieces.len().saturating_sub(1));
        for i in 0..self.pieces.len().saturating_sub(1) {
            let left = &self.pieces[i];
            let right = &self.pieces[i + 1];
            let d = (&left.poly - &right.poly).primitive();
            debug_assert!(!d.is_zero());
            let cut = &left.hi;
            if d.eval(cut).is_zero() {
                breakpoints.push(RootBracket {
                    polynomial: d,
                    lo: cut.clone(),
                    hi: cut.clone(),
                    exact_root: Some(cut.clone()),
                });
            } else {
                let roots = isolate_roots_with_width(&d, &left.lo, &right.hi, &self.width)?;
                assert!(
                    !roots.is_empty(),
                    "adjacent pieces must cross between their supports"
                );
                let nearest = roots
                    .into_iter()
                    .min_by(|a, b| {
                        let da = (a.position() - cut).abs();
                        let db = (b.position() - cut).abs();
                        da.cmp(&db).then_with(|| a.position().cmp(&b.position()))
                    })
                    .unwrap();
                breakpoints.push(nearest);
            }
        }
        Ok(Envelope {
            domain_lo: self.domain_lo,
            domain_hi: self.domain_hi,
            pieces: self.pieces,
            breakpoints,
        })
    }
}

/// Exact upper envelope of a list of candidate polynomials over
/// (domain_lo, domain_hi], with the default breakpoint isolation width.
pub fn envelope_of(
    candidates: &[(EpsPolynomial, SignPattern)],
    domain_lo: &Rational,
    domain_hi: &Rational,
) -> Result<Envelope> {
    envelope_of_with_width(
        candidates,
        domain_lo,
        domain_hi,
        &crate::roots::default_width(),
    )
}

pub fn envelope_of_with_width(
    candidates: &[(EpsPolynomial, SignPattern)],
    domain_lo: &Rational,
    domain_hi: &Rational,
    width: &Rational,
) -> Result<Envelope> {
    assert!(!candidates.is_empty(), "envelope of an empty family");
    let (first_poly, first_witness) = &candidates[0];
    let mut builder = EnvelopeBuilder::new(
        domain_lo.clone(),
        domain_hi.clone(),
        width.clone(),
        first_poly.clone(),
        *first_witness,
    );
    for (poly, witness) in &candidates[1..] {
        builder.insert(poly, witness)?;
    }
    builder.finalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int, to_f64};

    fn pat(n: usize, tag: u128) -> SignPattern {
        SignPattern::from_bits(n, tag)
    }

    #[test]
    fn single_polynomial_yields_one_piece() {
        let p = EpsPolynomial::from_int_coeffs(&[1, 0, 3]);
        let env = envelope_of(&[(p.clone(), pat(3, 0))], &rat_int(0), &rat_int(2)).unwrap();
        assert_eq!(env.pieces.len(), 1);
        assert!(env.breakpoints.is_empty());
        assert_eq!(env.pieces[0].poly, p);
    }

    #[test]
    fn order_three_crossover_at_one() {
        // {1 + 3e^2, 1 + e^2 + 2e^3} cross exactly at 1.
        let a = EpsPolynomial::from_int_coeffs(&[1, 0, 3]);
        let b = EpsPolynomial::from_int_coeffs(&[1, 0, 1, 2]);
        let env = envelope_of(
            &[(a.clone(), pat(3, 0)), (b.clone(), pat(3, 1))],
            &rat_int(0),
            &rat_int(2),
        )
        .unwrap();
        assert_eq!(env.pieces.len(), 2);
        assert_eq!(env.pieces[0].poly, a);
        assert_eq!(env.pieces[0].hi, rat_int(1));
        assert_eq!(env.pieces[1].poly, b);
        assert_eq!(env.breakpoints[0].exact_root, Some(rat_int(1)));
    }

    #[test]
    fn irrational_crossover_is_bracketed() {
        // The order-6 leaders cross at the real zero of 17e^3 + 5e^2 + 5e - 3.
        let a = EpsPolynomial::from_int_coeffs(&[1, 0, 15, 0, 63, 0, 81]);
        let b = EpsPolynomial::from_int_coeffs(&[1, 0, 3, 32, 63, 48, 13]);
        let env = envelope_of(
            &[(a.clone(), pat(6, 0)), (b.clone(), pat(6, 1))],
            &rat_int(0),
            &rat_int(1),
        )
        .unwrap();
        assert_eq!(env.pieces.len(), 2);
        let bp = &env.breakpoints[0];
        assert!(bp.exact_root.is_none());
        assert_eq!(
            bp.polynomial,
            EpsPolynomial::from_int_coeffs(&[-3, 5, 5, 17])
        );
        assert!((to_f64(&bp.position()) - 0.3437).abs() < 1e-3);
        assert!(bp.width() <= crate::roots::default_width());
        // pieces tile the domain around the bracket cut
        assert_eq!(env.pieces[0].hi, env.pieces[1].lo);
    }

    #[test]
    fn tie_keeps_smaller_witness() {
        let p = EpsPolynomial::from_int_coeffs(&[1, 0, 1]);
        let env = envelope_of(
            &[(p.clone(), pat(2, 1)), (p.clone(), pat(2, 0))],
            &rat_int(0),
            &rat_int(2),
        )
        .unwrap();
        assert_eq!(env.pieces.len(), 1);
        assert_eq!(env.pieces[0].witness, pat(2, 0));
    }

    #[test]
    fn dominated_candidate_changes_nothing() {
        let a = EpsPolynomial::from_int_coeffs(&[1, 0, 6, 0, 9]);
        let b = EpsPolynomial::from_int_coeffs(&[1, 0, 2]);
        let env = envelope_of(
            &[(a.clone(), pat(4, 0)), (b, pat(4, 9))],
            &rat_int(0),
            &rat_int(2),
        )
        .unwrap();
        assert_eq!(env.pieces.len(), 1);
        assert_eq!(env.pieces[0].poly, a);
    }

    #[test]
    fn value_queries() {
        let a = EpsPolynomial::from_int_coeffs(&[1, 0, 3]);
        let b = EpsPolynomial::from_int_coeffs(&[1, 0, 1, 2]);
        let env = envelope_of(
            &[(a, pat(3, 0)), (b, pat(3, 1))],
            &rat_int(0),
            &rat_int(2),
        )
        .unwrap();
        assert_eq!(env.value_at(&rat(1, 2)), Some(rat(7, 4)));
        assert_eq!(env.value_at(&rat_int(2)), Some(rat_int(21)));
        assert_eq!(env.value_at(&rat_int(0)), None); // open at the left end
    }

    #[test]
    fn insertion_order_does_not_matter() {
        let polys = [
            EpsPolynomial::from_int_coeffs(&[1, 0, 10, 0, 21]),
            EpsPolynomial::from_int_coeffs(&[1, 0, 8, 6, 15, 18]),
            EpsPolynomial::from_int_coeffs(&[1, 0, 2, 16, 21, 8]),
            EpsPolynomial::from_int_coeffs(&[1, 0, 0, 10, 15, 22]),
        ];
        let mut permuted: Vec<(EpsPolynomial, SignPattern)> = polys
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), pat(5, i as u128)))
            .collect();
        let reference = envelope_of(&permuted, &rat_int(0), &rat_int(2)).unwrap();
        permuted.reverse();
        let reversed = envelope_of(&permuted, &rat_int(0), &rat_int(2)).unwrap();
        assert_eq!(reference.pieces.len(), reversed.pieces.len());
        for (x, y) in reference.pieces.iter().zip(reversed.pieces.iter()) {
            assert_eq!(x.poly, y.poly);
            assert_eq!(x.lo, y.lo);
            assert_eq!(x.hi, y.hi);
        }
    }
}
