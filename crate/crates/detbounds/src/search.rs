//! Exhaustive search for the maximal determinant polynomial over
//! unit-diagonal ±ε matrices, as an exact piecewise envelope in ε.
//!
//! The space is reduced by symmetry to patterns with an all-plus first row
//! and a first column of k plus signs followed by n-k minus signs, giving
//! n·2^((n-1)(n-2)) candidates. Workers scan disjoint chunks of that space,
//! deduplicate determinant coefficient vectors, fold them into local
//! envelopes, and the local envelopes merge associatively into the global
//! one; the result is independent of the partition.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::envelope::{Envelope, EnvelopeBuilder};
use crate::error::{Error, Result};
use crate::pattern::{det_pattern_coeffs, perm_table, SignPattern};
use crate::poly::EpsPolynomial;
use crate::rational::{parse_rational, rat_int, Rational};

/// Hard ceiling for the symmetry-reduced search (7 is already ~7.5e9
/// patterns; 6 is the largest practical order).
pub const MAX_SEARCH_ORDER: usize = 7;

/// Orders above this get a resource warning from the CLI.
pub const COMFORTABLE_SEARCH_ORDER: usize = 6;

/// Brute-force (unreduced) enumeration limit for the symmetry oracle.
pub const MAX_FULL_SPACE_ORDER: usize = 4;

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub domain_hi: Rational,
    /// Breakpoint isolation width.
    pub width: Rational,
    /// Worker count; 0 uses the global thread pool as-is.
    pub threads: usize,
    pub deadline: Option<Duration>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            domain_hi: rat_int(2),
            width: crate::roots::default_width(),
            threads: 0,
            deadline: None,
        }
    }
}

/// n · 2^((n-1)(n-2)), the size of the symmetry-reduced space.
pub fn canonical_pattern_count(n: usize) -> u128 {
    (n as u128) << ((n - 1).saturating_mul(n.saturating_sub(2)))
}

/// Bit indices of the free positions (neither first row nor first column nor
/// diagonal), row-major.
fn free_positions(n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity((n - 1).saturating_mul(n.saturating_sub(2)));
    for i in 1..n {
        for j in 1..n {
            if i != j {
                out.push(SignPattern::bit_index(n, i, j));
            }
        }
    }
    out
}

/// First-column bits for k leading plus signs: rows k..n-1 are minus.
fn first_column_bits(n: usize, k: usize) -> u128 {
    let mut bits = 0u128;
    for i in k..n {
        bits |= 1u128 << SignPattern::bit_index(n, i, 0);
    }
    bits
}

fn spread(counter: u128, free: &[usize]) -> u128 {
    let mut bits = 0u128;
    let mut c = counter;
    let mut b = 0;
    while c != 0 {
        if c & 1 == 1 {
            bits |= 1u128 << free[b];
        }
        c >>= 1;
        b += 1;
    }
    bits
}

/// The canonical patterns in deterministic order: k ascending, then the free
/// bits as a binary counter.
pub fn canonical_patterns(n: usize) -> Result<impl Iterator<Item = SignPattern>> {
    if n == 0 || n > MAX_SEARCH_ORDER {
        return Err(Error::OrderTooLarge {
            n,
            limit: MAX_SEARCH_ORDER,
        });
    }
    let free = free_positions(n);
    let per_k: u128 = 1 << free.len();
    Ok((1..=n).flat_map(move |k| {
        let base = first_column_bits(n, k);
        let free = free.clone();
        (0..per_k).map(move |c| SignPattern::from_bits(n, base | spread(c, &free)))
    }))
}

/// One worker chunk: a fixed k and a fixed high part of the free counter.
struct Chunk {
    base_bits: u128,
    low_bits: u32,
}

fn chunks_for(n: usize, chunk_low_bits: u32) -> Vec<Chunk> {
    let free = free_positions(n);
    let m = free.len() as u32;
    let low = chunk_low_bits.min(m);
    let high = m - low;
    let mut chunks = Vec::new();
    for k in 1..=n {
        let col = first_column_bits(n, k);
        for hi in 0..(1u128 << high) {
            chunks.push(Chunk {
                base_bits: col | spread(hi << low, &free),
                low_bits: low,
            });
        }
    }
    chunks
}

/// Scans one chunk, deduplicating determinant coefficient vectors with
/// their minimal witnesses.
fn scan_chunk(
    n: usize,
    chunk: &Chunk,
    free: &[usize],
    table: &crate::pattern::PermTable,
) -> HashMap<[i64; 8], SignPattern> {
    let mut seen: HashMap<[i64; 8], SignPattern> = HashMap::new();
    for c in 0..(1u128 << chunk.low_bits) {
        let bits = chunk.base_bits | spread(c, free);
        let coeffs = det_pattern_coeffs(bits as u64, table);
        let pat = SignPattern::from_bits(n, bits);
        seen.entry(coeffs)
            .and_modify(|w| {
                if pat < *w {
                    *w = pat;
                }
            })
            .or_insert(pat);
    }
    seen
}

fn merge_maps(
    mut a: HashMap<[i64; 8], SignPattern>,
    b: HashMap<[i64; 8], SignPattern>,
) -> HashMap<[i64; 8], SignPattern> {
    if a.len() < b.len() {
        return merge_maps(b, a);
    }
    for (coeffs, pat) in b {
        a.entry(coeffs)
            .and_modify(|w| {
                if pat < *w {
                    *w = pat;
                }
            })
            .or_insert(pat);
    }
    a
}

/// Builds the envelope from deduplicated integer coefficient vectors.
/// Candidates coefficientwise below an already-inserted piece polynomial are
/// discarded without further work (they are below the running envelope
/// everywhere on eps > 0); the rest go through the certified insertion.
fn envelope_from_candidates(
    n: usize,
    mut candidates: Vec<([i64; 8], SignPattern)>,
    config: &SearchConfig,
) -> Result<Envelope> {
    let hi = &config.domain_hi;
    let (p, q) = (
        i128::try_from(hi.numer().clone()).unwrap_or(i128::MAX),
        i128::try_from(hi.denom().clone()).unwrap_or(1),
    );
    let eval_scaled = |coeffs: &[i64; 8]| -> i128 {
        let mut acc: i128 = 0;
        for k in (0..=n).rev() {
            acc = acc * p + coeffs[k] as i128 * q.pow((n - k) as u32);
        }
        acc
    };
    candidates.sort_by(|a, b| eval_scaled(&b.0).cmp(&eval_scaled(&a.0)).then(b.0.cmp(&a.0)));
    let mut iter = candidates.into_iter();
    let (first_coeffs, first_witness) = iter.next().expect("candidate set is nonempty");
    let mut builder = EnvelopeBuilder::new(
        Rational::from_integer(0.into()),
        config.domain_hi.clone(),
        config.width.clone(),
        EpsPolynomial::from_int_coeffs(&first_coeffs[..=n]),
        first_witness,
    );
    let mut dominators: Vec<[i64; 8]> = vec![first_coeffs];
    for (coeffs, witness) in iter {
        let dominated = dominators
            .iter()
            .any(|d| (0..=n).all(|k| d[k] >= coeffs[k]));
        if dominated {
            continue;
        }
        let pieces_before = builder.pieces().len();
        builder.insert(&EpsPolynomial::from_int_coeffs(&coeffs[..=n]), &witness)?;
        if builder.pieces().len() != pieces_before
            || builder.pieces().iter().any(|p| p.witness == witness)
        {
            dominators.push(coeffs);
        }
    }
    builder.finalize()
}

pub fn search_maxdet(n: usize, domain_hi: &Rational) -> Result<Envelope> {
    search_maxdet_with(
        n,
        &SearchConfig {
            domain_hi: domain_hi.clone(),
            ..SearchConfig::default()
        },
    )
}

/// The exact maximal-determinant envelope over (0, domain_hi] for the full
/// unit-diagonal ±ε space at order n (canonically reduced).
pub fn search_maxdet_with(n: usize, config: &SearchConfig) -> Result<Envelope> {
    if n == 0 || n > MAX_SEARCH_ORDER {
        return Err(Error::OrderTooLarge {
            n,
            limit: MAX_SEARCH_ORDER,
        });
    }
    assert!(config.domain_hi > Rational::from_integer(0.into()));
    let table = perm_table(n);
    let free = free_positions(n);
    // Chunks of at most 2^16 patterns keep worker maps small.
    let chunks = chunks_for(n, 16);
    let start = Instant::now();

    let run = |chunks: &[Chunk]| -> Result<HashMap<[i64; 8], SignPattern>> {
        let maps: Result<Vec<_>> = chunks
            .par_iter()
            .map(|chunk| {
                if let Some(deadline) = config.deadline {
                    if start.elapsed() > deadline {
                        return Err(Error::Timeout);
                    }
                }
                Ok(scan_chunk(n, chunk, &free, &table))
            })
            .collect();
        Ok(maps?
            .into_iter()
            .fold(HashMap::new(), merge_maps))
    };

    let seen = if config.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::Parse(format!("thread pool: {e}")))?;
        pool.install(|| run(&chunks))?
    } else {
        run(&chunks)?
    };

    envelope_from_candidates(n, seen.into_iter().collect(), config)
}

/// Envelope over every pattern/// Envelope over every pattern of the unreduced 2^(n(n-1)) space; the oracle
/// for the symmetry reduction.
pub fn full_space_envelope(n: usize, domain_hi: &Rational) -> Result<Envelope> {
    if n == 0 || n > MAX_FULL_SPACE_ORDER {
        return Err(Error::OrderTooLarge {
            n,
            limit: MAX_FULL_SPACE_ORDER,
        });
    }
    let table = perm_table(n);
    let bits_total = n * (n - 1);
    let mut seen: HashMap<[i64; 8], SignPattern> = HashMap::new();
    for bits in 0..(1u128 << bits_total) {
        let coeffs = det_pattern_coeffs(bits as u64, &table);
        let pat = SignPattern::from_bits(n, bits);
        seen.entry(coeffs)
            .and_modify(|w| {
                if pat < *w {
                    *w = pat;
                }
            })
            .or_insert(pat);
    }
    let config = SearchConfig {
        domain_hi: domain_hi.clone(),
        ..SearchConfig::default()
    };
    envelope_from_candidates(n, seen.into_iter().collect(), &config)
}

/// The maximal determinant of ±1 matrices of order n, read off the envelope
/// piece containing ε = 1.
pub fn maxdet_at_one(n: usize) -> Result<BigInt> {
    if n == 0 || n > COMFORTABLE_SEARCH_ORDER {
        return Err(Error::OrderTooLarge {
            n,
            limit: COMFORTABLE_SEARCH_ORDER,
        });
    }
    let env = search_maxdet(n, &rat_int(2))?;
    let one = rat_int(1);
    let value = env
        .value_at(&one)
        .expect("1 lies inside the search domain");
    assert!(value.is_integer(), "determinant at eps = 1 must be integral");
    Ok(value.to_integer())
}

/// Every canonical pattern whose determinant polynomial equals the given
/// piece polynomial (the optional all-witnesses report, small orders only).
pub fn all_canonical_witnesses(n: usize, poly: &EpsPolynomial) -> Result<Vec<SignPattern>> {
    if n > MAX_FULL_SPACE_ORDER {
        return Err(Error::OrderTooLarge {
            n,
            limit: MAX_FULL_SPACE_ORDER,
        });
    }
    let table = perm_table(n);
    let mut out = Vec::new();
    for pat in canonical_patterns(n)? {
        let coeffs = det_pattern_coeffs(pat.bits() as u64, &table);
        if &EpsPolynomial::from_int_coeffs(&coeffs[..=n]) == poly {
            out.push(pat);
        }
    }
    Ok(out)
}

// --- JSON wire form -------------------------------------------------------

#[derive(Serialize, Deserialize, PartialEq, Debug)]
pub struct EnvelopeJson {
    pub n: usize,
    pub pieces: Vec<PieceJson>,
    pub breakpoints: Vec<BreakpointJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub all_witnesses: Option<Vec<Vec<String>>>,
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
pub struct PieceJson {
    pub interval: [String; 2],
    pub poly: Vec<serde_json::Value>,
    pub witness: String,
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
pub struct BreakpointJson {
    pub cubic_or_poly: Vec<serde_json::Value>,
    pub bracket: [String; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

fn coeff_json(c: &Rational) -> serde_json::Value {
    if c.is_integer() {
        if let Ok(v) = i64::try_from(c.to_integer()) {
            return serde_json::json!(v);
        }
    }
    serde_json::json!(c.to_string())
}

pub fn poly_json(p: &EpsPolynomial) -> Vec<serde_json::Value> {
    p.coeffs().iter().map(coeff_json).collect()
}

pub fn envelope_to_json(n: usize, env: &Envelope, all_witnesses: bool) -> Result<EnvelopeJson> {
    let witnesses = if all_witnesses {
        let mut per_piece = Vec::new();
        for piece in &env.pieces {
            let pats = all_canonical_witnesses(n, &piece.poly)?;
            per_piece.push(pats.iter().map(|p| p.to_text()).collect());
        }
        Some(per_piece)
    } else {
        None
    };
    Ok(EnvelopeJson {
        n,
        pieces: env
            .pieces
            .iter()
            .map(|p| PieceJson {
                interval: [p.lo.to_string(), p.hi.to_string()],
                poly: poly_json(&p.poly),
                witness: p.witness.to_text(),
            })
            .collect(),
        breakpoints: env
            .breakpoints
            .iter()
            .map(|b| BreakpointJson {
                cubic_or_poly: poly_json(&b.polynomial),
                bracket: [b.lo.to_string(), b.hi.to_string()],
                exact: b.exact_root.as_ref().map(|r| r.to_string()),
            })
            .collect(),
        all_witnesses: witnesses,
    })
}

pub fn poly_from_json(values: &[serde_json::Value]) -> Result<EpsPolynomial> {
    let mut coeffs = Vec::with_capacity(values.len());
    for v in values {
        if let Some(x) = v.as_i64() {
            coeffs.push(Rational::from_integer(x.into()));
        } else if let Some(s) = v.as_str() {
            coeffs.push(parse_rational(s)?);
        } else {
            return Err(Error::Parse(format!("bad coefficient {v}")));
        }
    }
    Ok(EpsPolynomial::from_coeffs(coeffs))
}
