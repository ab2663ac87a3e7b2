//! Binary itineraries of the unstable separatrix.
//!
//! A sequence starts with the departure symbol (`1` for `0 -> mu`, `0` for
//! `0 -> -mu`) and then records, for every iterate `x_1, x_2, ...`, a `1` when
//! `sign(x_n) = sign(mu)` and a `0` otherwise. Reaching the origin ends the
//! sequence, so an orbit homoclinic after `n` excursions (`F^{n-1}(mu) = 0`)
//! has a terminated code of length `n`: `[1 1]` for `0 -> mu -> 0`.

use crate::error::{MapError, Result};
use crate::map::{self, Branch, MapParams, Status, Variant, DIVERGENCE_GUARD};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSequence {
    /// Symbols, each `0` or `1`.
    pub bits: Vec<u8>,
    /// The generating orbit reached the origin.
    pub terminated: bool,
    pub source_status: Status,
}

impl SymbolSequence {
    /// A free-standing sequence that did not come from an orbit.
    pub fn from_bits(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        SymbolSequence { bits, terminated: false, source_status: Status::MaxIterations }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// `"1101"`-style rendering.
    pub fn to_bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
    }
}

/// Encode the separatrix leaving the origin along `branch` into at most
/// `max_len` symbols.
pub fn encode(params: &MapParams, branch: Branch, max_len: usize, zero_eps: f64) -> Result<SymbolSequence> {
    let mu = params.mu();
    if mu == 0.0 {
        return Err(MapError::DegenerateParameter);
    }
    if max_len == 0 {
        return Err(MapError::InvalidParams("max_len must be at least 1".into()));
    }
    let positive = mu > 0.0;
    let mut bits = Vec::with_capacity(max_len);
    bits.push(match branch {
        Branch::Positive => 1,
        Branch::Negative => 0,
    });
    let mut x = map::step_from_origin(params, branch)?;
    let mut status = Status::MaxIterations;
    while bits.len() < max_len {
        if !x.is_finite() || x.abs() > DIVERGENCE_GUARD {
            status = Status::Diverged;
            break;
        }
        if x.abs() < zero_eps {
            status = Status::ReachedZero;
            break;
        }
        if params.variant() == Variant::OneSided && x <= 0.0 {
            status = Status::LeftDomain;
            break;
        }
        bits.push(u8::from((x > 0.0) == positive));
        if bits.len() == max_len {
            break;
        }
        x = map::step(params, x).unwrap_or(f64::INFINITY);
    }
    Ok(SymbolSequence { bits, terminated: status == Status::ReachedZero, source_status: status })
}

/// Longest all-ones prefix, as used for one-sided orbits with `mu > 0`.
pub fn truncate_one_sided(seq: &SymbolSequence) -> SymbolSequence {
    let keep = seq.bits.iter().take_while(|&&b| b == 1).count();
    let untouched = keep == seq.bits.len();
    SymbolSequence {
        bits: seq.bits[..keep].to_vec(),
        terminated: seq.terminated && untouched,
        source_status: seq.source_status,
    }
}

/// `sum_i S_i / 2^i` over `[0, 1)`.
///
/// The sum is truncated (rounded toward zero) to the 53 significant bits
/// that follow the leading one, so the result is exact for codes that fit in
/// a double and never rounds up to 1.
pub fn embed(seq: &SymbolSequence) -> f64 {
    embed_bits(&seq.bits)
}

pub fn embed_bits(bits: &[u8]) -> f64 {
    let Some(lead) = bits.iter().position(|&b| b == 1) else {
        return 0.0;
    };
    let mantissa = bits[lead..]
        .iter()
        .take(53)
        .enumerate()
        .fold(0u64, |m, (j, &b)| m | (u64::from(b) << (52 - j)));
    let exponent = i32::try_from(lead + 53).unwrap_or(i32::MAX);
    mantissa as f64 * 2f64.powi(-exponent)
}

/// Phrase count of the left-to-right partition into shortest substrings not
/// already seen as a phrase; a trailing phrase that repeats an earlier one is
/// not counted. `0101 1001 0111` splits as `0|1|01|10|010|11|(1)` and scores 6.
pub fn lempel_ziv(seq: &SymbolSequence) -> Result<usize> {
    lempel_ziv_bits(&seq.bits)
}

pub fn lempel_ziv_bits(bits: &[u8]) -> Result<usize> {
    if bits.is_empty() {
        return Err(MapError::EmptySequence { len: 0, min: 1 });
    }
    // Binary trie of phrases; child index 0 means absent (0 is the root).
    let mut trie: Vec<[u32; 2]> = vec![[0, 0]];
    let mut node = 0usize;
    let mut phrases = 0usize;
    for &b in bits {
        let b = usize::from(b & 1);
        match trie[node][b] {
            0 => {
                let id = trie.len() as u32;
                trie.push([0, 0]);
                trie[node][b] = id;
                phrases += 1;
                node = 0;
            }
            child => node = child as usize,
        }
    }
    Ok(phrases)
}

/// `ln(N) / N * C` for a sequence of length `N >= 2`.
pub fn normalized_lz(seq: &SymbolSequence) -> Result<f64> {
    let n = seq.len();
    if n < 2 {
        return Err(MapError::EmptySequence { len: n, min: 2 });
    }
    let c = lempel_ziv(seq)? as f64;
    let n = n as f64;
    Ok(n.ln() / n * c)
}
