//! Bijective coding of finite sequences of naturals.
//!
//! The empty sequence has code 0 and `encode([a] ++ rest) = pair(a, encode(rest))`,
//! where `pair` is the Cantor diagonal pairing shifted by one so that it maps
//! pairs onto the positive naturals. Sequence codes are `u64`; operations that
//! can leave the representable range return a domain error rather than wrap.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Cantor diagonal pairing shifted onto the positive naturals:
/// `pair(m, n) = (m+n)(m+n+1)/2 + n + 1`.
pub fn pair(m: u64, n: u64) -> Result<u64> {
    let w = (m as u128) + (n as u128);
    let c = w * (w + 1) / 2 + n as u128 + 1;
    if c > u64::MAX as u128 {
        return Err(Error::domain(format!("pair({m},{n}) exceeds the u64 code space")));
    }
    Ok(c as u64)
}

/// Inverse of [`pair`]. `unpair(0)` is a domain error: 0 codes the empty
/// sequence, not a pair.
pub fn unpair(c: u64) -> Result<(u64, u64)> {
    if c == 0 {
        return Err(Error::domain("0 codes the empty sequence, not a pair"));
    }
    let z = (c - 1) as u128;
    // w = floor((sqrt(8z+1) - 1) / 2), computed exactly.
    let mut w = (((8.0 * z as f64 + 1.0).sqrt() - 1.0) / 2.0) as u128;
    while w * (w + 1) / 2 > z {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    let n = z - w * (w + 1) / 2;
    let m = w - n;
    Ok((m as u64, n as u64))
}

/// Code of the list `items`.
pub fn encode(items: &[u64]) -> Result<u64> {
    let mut code = 0u64;
    for &a in items.iter().rev() {
        code = pair(a, code)?;
    }
    Ok(code)
}

/// List coded by `n`. Terminates because the right component of `unpair`
/// is strictly smaller than its argument.
pub fn decode(n: u64) -> Vec<u64> {
    let mut items = Vec::new();
    let mut c = n;
    while c != 0 {
        let (head, rest) = unpair(c).expect("nonzero code");
        items.push(head);
        c = rest;
    }
    items
}

/// Number of entries of the sequence coded by `s`.
pub fn length(s: u64) -> u64 {
    let mut c = s;
    let mut len = 0;
    while c != 0 {
        let (_, rest) = unpair(c).expect("nonzero code");
        len += 1;
        c = rest;
    }
    len
}

/// Entry `i` of the sequence coded by `s`.
pub fn at(s: u64, i: u64) -> Result<u64> {
    let items = decode(s);
    items
        .get(i as usize)
        .copied()
        .ok_or_else(|| Error::domain(format!("index {i} out of range for sequence of length {}", items.len())))
}

/// Code of the length-`i` initial part of `s`.
pub fn initial(s: u64, i: u64) -> Result<u64> {
    let items = decode(s);
    if i as usize > items.len() {
        return Err(Error::domain(format!(
            "initial part of length {i} requested from sequence of length {}",
            items.len()
        )));
    }
    encode(&items[..i as usize])
}

/// Concatenation of the coded sequences.
pub fn concat(s: u64, t: u64) -> Result<u64> {
    let mut items = decode(s);
    items.extend(decode(t));
    encode(&items)
}

/// `s ⊑ t`: s is an initial part of t.
pub fn is_prefix(s: u64, t: u64) -> bool {
    let a = decode(s);
    let b = decode(t);
    a.len() <= b.len() && a[..] == b[..a.len()]
}

/// `s ⊏ t`: s is a proper initial part of t.
pub fn is_proper_prefix(s: u64, t: u64) -> bool {
    s != t && is_prefix(s, t)
}

/// `s ⊥ t`: neither is an initial part of the other.
pub fn incompatible(s: u64, t: u64) -> bool {
    !is_prefix(s, t) && !is_prefix(t, s)
}

/// Whether every entry of the coded sequence is 0 or 1.
pub fn is_binary(s: u64) -> bool {
    decode(s).iter().all(|&v| v <= 1)
}

/// Kleene-Brouwer comparison: `Less` when `t` is a proper initial part of `s`,
/// or `s` and `t` first differ at a position where `s` is smaller. A strict
/// linear order on sequence codes.
pub fn kb_compare(s: u64, t: u64) -> Ordering {
    if s == t {
        return Ordering::Equal;
    }
    let a = decode(s);
    let b = decode(t);
    for i in 0..a.len().min(b.len()) {
        match a[i].cmp(&b[i]) {
            Ordering::Equal => continue,
            ord => return ord,
        }
    }
    // One is a proper initial part of the other; the longer comes first.
    if a.len() > b.len() {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// `s ≤* t`: equal length and coordinatewise ≤.
pub fn pointwise_le(s: u64, t: u64) -> bool {
    let a = decode(s);
    let b = decode(t);
    a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| x <= y)
}

/// Splits the coded sequence into its even-position and odd-position parts.
/// The first part has length ceil(len/2), the second floor(len/2).
pub fn interleave_parts(s: u64) -> (u64, u64) {
    let items = decode(s);
    let evens: Vec<u64> = items.iter().step_by(2).copied().collect();
    let odds: Vec<u64> = items.iter().skip(1).step_by(2).copied().collect();
    (
        encode(&evens).expect("part code no larger than whole"),
        encode(&odds).expect("part code no larger than whole"),
    )
}

/// Relation report for a pair of sequence codes, as emitted by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeqRelReport {
    pub s: Vec<u64>,
    pub t: Vec<u64>,
    pub is_prefix: bool,
    pub is_proper_prefix: bool,
    pub incompatible: bool,
    pub concat: u64,
    pub length_s: u64,
    pub length_t: u64,
    pub is_binary_s: bool,
    pub is_binary_t: bool,
}

pub fn seq_rel(s: u64, t: u64) -> Result<SeqRelReport> {
    Ok(SeqRelReport {
        s: decode(s),
        t: decode(t),
        is_prefix: is_prefix(s, t),
        is_proper_prefix: is_proper_prefix(s, t),
        incompatible: incompatible(s, t),
        concat: concat(s, t)?,
        length_s: length(s),
        length_t: length(t),
        is_binary_s: is_binary(s),
        is_binary_t: is_binary(t),
    })
}

/// Code of the constant-zero sequence of length `n`.
pub fn zeros(n: u64) -> Result<u64> {
    encode(&vec![0; n as usize])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_base_cases() {
        assert_eq!(pair(0, 0).unwrap(), 1);
        assert_eq!(pair(1, 0).unwrap(), 2);
        assert_eq!(pair(0, 1).unwrap(), 3);
        assert_eq!(unpair(5).unwrap(), (1, 1));
        assert!(unpair(0).is_err());
    }

    #[test]
    fn pair_couples_with_encode() {
        // pair(n, s) = encode([n] ++ decode(s))
        for n in 0..12 {
            for s in 0..200 {
                let mut items = vec![n];
                items.extend(decode(s));
                assert_eq!(pair(n, s).unwrap(), encode(&items).unwrap());
            }
        }
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode(&[]).unwrap(), 0);
        assert_eq!(encode(&[0]).unwrap(), 1);
        assert_eq!(encode(&[1]).unwrap(), 2);
        assert_eq!(decode(3), vec![0, 0]);
    }

    #[test]
    fn round_trips() {
        for n in 0..5000 {
            assert_eq!(encode(&decode(n)).unwrap(), n);
        }
    }

    #[test]
    fn relations() {
        let e0 = encode(&[0]).unwrap();
        let e00 = encode(&[0, 0]).unwrap();
        let e1 = encode(&[1]).unwrap();
        assert!(is_proper_prefix(e0, e00));
        assert!(incompatible(e0, e1));
        assert_eq!(concat(e0, e1).unwrap(), encode(&[0, 1]).unwrap());
        assert!(at(e0, 1).is_err());
    }

    #[test]
    fn kb_examples() {
        let e0 = encode(&[0]).unwrap();
        let e00 = encode(&[0, 0]).unwrap();
        let e1 = encode(&[1]).unwrap();
        assert_eq!(kb_compare(e00, e0), Ordering::Less);
        assert_eq!(kb_compare(e0, e1), Ordering::Less);
        for s in 0..50 {
            assert_eq!(kb_compare(s, s), Ordering::Equal);
        }
    }

    #[test]
    fn pointwise_le_examples() {
        assert!(pointwise_le(encode(&[0, 1]).unwrap(), encode(&[2, 1]).unwrap()));
        assert!(!pointwise_le(encode(&[0]).unwrap(), encode(&[0, 0]).unwrap()));
        assert!(!pointwise_le(encode(&[1]).unwrap(), encode(&[0]).unwrap()));
    }

    #[test]
    fn interleave_part_examples() {
        assert_eq!(interleave_parts(0), (0, 0));
        let s = encode(&[5, 7]).unwrap();
        assert_eq!(
            interleave_parts(s),
            (encode(&[5]).unwrap(), encode(&[7]).unwrap())
        );
        let s = encode(&[5, 7, 9]).unwrap();
        assert_eq!(
            interleave_parts(s),
            (encode(&[5, 9]).unwrap(), encode(&[7]).unwrap())
        );
    }
}
