//! Finitely-described points of Baire space and coded continuous functionals.
//!
//! A [`StreamSpec`] denotes a total function from naturals to naturals. Every
//! variant except `Apply` is total without fuel; `Apply` evaluates a coded
//! functional at a point and may exhaust its fuel without firing, which is
//! reported as a distinct outcome (never conflated with refutation).
//!
//! Indices of interest are usually sequence codes, and codes of long
//! sequences overflow any fixed-width integer (their bit size doubles per
//! entry). Evaluation therefore comes in two forms: [`StreamSpec::eval`] at a
//! literal `u64` index, and [`StreamSpec::node_value`] at a decoded move
//! vector, which routes through the structure of the spec without ever
//! materializing the code of the index.

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::seqcode;
use crate::trees::RegularTree;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Shared evaluation cache for an `Apply` node. Equality and serialization
/// ignore it; the contract is observational purity.
#[derive(Debug, Default, Clone)]
pub struct Memo(Arc<Mutex<HashMap<u64, u64>>>);

impl PartialEq for Memo {
    fn eq(&self, _: &Memo) -> bool {
        true
    }
}
impl Eq for Memo {}

impl Memo {
    fn get(&self, n: u64) -> Option<u64> {
        self.0.lock().unwrap().get(&n).copied()
    }
    fn put(&self, n: u64, v: u64) {
        self.0.lock().unwrap().insert(n, v);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StreamSpec {
    /// The constant stream.
    #[serde(rename = "const")]
    Const(u64),
    /// Eventually periodic values: `prefix` then `cycle` repeated.
    #[serde(rename = "ev")]
    EvPeriodic { prefix: Vec<u64>, cycle: Vec<u64> },
    /// Characteristic code of a regular tree: 0 exactly on its nodes.
    #[serde(rename = "treechar")]
    TreeChar(Arc<RegularTree>),
    /// Even indices from the first stream, odd from the second.
    #[serde(rename = "interleave")]
    Interleave { a: Box<StreamSpec>, b: Box<StreamSpec> },
    /// The m-th subsequence: value at n is `a` at `⟨m⟩∗n`.
    #[serde(rename = "subseq")]
    Subseq { a: Box<StreamSpec>, m: u64 },
    /// Even part: value at n is `a` at 2n.
    #[serde(rename = "part1")]
    PartI(Box<StreamSpec>),
    /// Odd part: value at n is `a` at 2n+1.
    #[serde(rename = "part2")]
    PartII(Box<StreamSpec>),
    /// Localization at a node: value at s is `a` at `u∗s`.
    #[serde(rename = "localize")]
    Localize { a: Box<StreamSpec>, u: u64 },
    /// Application of a coded functional to a point, evaluated lazily.
    #[serde(rename = "apply")]
    Apply {
        code: Box<StreamSpec>,
        arg: Box<StreamSpec>,
        #[serde(skip, default)]
        memo: Memo,
    },
    /// Named finitely-parameterized streams (reduction constructions and
    /// small plumbing like prepending a finite sequence to a point).
    #[serde(rename = "kernel")]
    Kernel(Box<Kernel>),
}

impl StreamSpec {
    pub fn ev_periodic(prefix: Vec<u64>, cycle: Vec<u64>) -> StreamSpec {
        assert!(!cycle.is_empty(), "cycle must be non-empty");
        StreamSpec::EvPeriodic { prefix, cycle }
    }

    /// The constant-m point written `m̲`.
    pub fn constant(m: u64) -> StreamSpec {
        StreamSpec::Const(m)
    }

    pub fn zero() -> StreamSpec {
        StreamSpec::Const(0)
    }

    pub fn tree_char(tree: RegularTree) -> StreamSpec {
        StreamSpec::TreeChar(Arc::new(tree))
    }

    pub fn interleave(a: StreamSpec, b: StreamSpec) -> StreamSpec {
        StreamSpec::Interleave { a: Box::new(a), b: Box::new(b) }
    }

    pub fn subseq(a: StreamSpec, m: u64) -> StreamSpec {
        StreamSpec::Subseq { a: Box::new(a), m }
    }

    pub fn localize(a: StreamSpec, u: u64) -> StreamSpec {
        StreamSpec::Localize { a: Box::new(a), u }
    }

    pub fn apply(code: StreamSpec, arg: StreamSpec) -> StreamSpec {
        StreamSpec::Apply {
            code: Box::new(code),
            arg: Box::new(arg),
            memo: Memo::default(),
        }
    }

    pub fn kernel(k: Kernel) -> StreamSpec {
        StreamSpec::Kernel(Box::new(k))
    }

    /// Bar predicate firing on every sequence of length at least `k`.
    pub fn length_at_least(k: u64) -> StreamSpec {
        StreamSpec::kernel(Kernel::LengthAtLeast { min: k })
    }

    /// Value at the literal index `n`.
    pub fn eval(&self, n: u64, fuel: u64) -> Result<u64> {
        match self {
            StreamSpec::Const(m) => Ok(*m),
            StreamSpec::EvPeriodic { prefix, cycle } => {
                let n = n as usize;
                Ok(if n < prefix.len() {
                    prefix[n]
                } else {
                    cycle[(n - prefix.len()) % cycle.len()]
                })
            }
            StreamSpec::TreeChar(t) => Ok(if t.node_member(n) { 0 } else { 1 }),
            StreamSpec::Interleave { a, b } => {
                if n % 2 == 0 {
                    a.eval(n / 2, fuel)
                } else {
                    b.eval(n / 2, fuel)
                }
            }
            StreamSpec::Subseq { a, m } => a.eval(seqcode::pair(*m, n)?, fuel),
            StreamSpec::PartI(a) => a.eval(
                n.checked_mul(2)
                    .ok_or_else(|| Error::domain("index overflow in even part"))?,
                fuel,
            ),
            StreamSpec::PartII(a) => a.eval(
                n.checked_mul(2)
                    .and_then(|x| x.checked_add(1))
                    .ok_or_else(|| Error::domain("index overflow in odd part"))?,
                fuel,
            ),
            StreamSpec::Localize { a, u } => a.eval(seqcode::concat(*u, n)?, fuel),
            StreamSpec::Apply { code, arg, memo } => {
                if let Some(v) = memo.get(n) {
                    return Ok(v);
                }
                let v = apply_coord(code, arg, &seqcode::decode(n), fuel)?;
                memo.put(n, v);
                Ok(v)
            }
            StreamSpec::Kernel(k) => k.value(n, fuel),
        }
    }

    /// Value at the index `encode(moves)`, computed structurally where
    /// possible so that nodes far too deep for any fixed-width code can still
    /// be inspected.
    pub fn node_value(&self, moves: &[u64], fuel: u64) -> Result<u64> {
        match self {
            StreamSpec::Const(m) => Ok(*m),
            StreamSpec::TreeChar(t) => Ok(if t.node_member_moves(moves) { 0 } else { 1 }),
            StreamSpec::EvPeriodic { prefix: _, cycle } => {
                match seqcode::encode(moves) {
                    Ok(n) => self.eval(n, fuel),
                    Err(_) => {
                        // Beyond the u64 code space the cycle position of the
                        // index is not representable; a constant cycle is
                        // still decidable.
                        if cycle.iter().all(|&v| v == cycle[0]) {
                            Ok(cycle[0])
                        } else {
                            Err(Error::domain(
                                "eventually periodic stream queried past the representable code space",
                            ))
                        }
                    }
                }
            }
            StreamSpec::Subseq { a, m } => {
                let mut inner = Vec::with_capacity(moves.len() + 1);
                inner.push(*m);
                inner.extend_from_slice(moves);
                a.node_value(&inner, fuel)
            }
            StreamSpec::Localize { a, u } => {
                let mut inner = seqcode::decode(*u);
                inner.extend_from_slice(moves);
                a.node_value(&inner, fuel)
            }
            StreamSpec::Apply { code, arg, .. } => apply_coord(code, arg, moves, fuel),
            StreamSpec::Kernel(k) => k.node_value(moves, fuel),
            _ => {
                let n = seqcode::encode(moves)?;
                self.eval(n, fuel)
            }
        }
    }

    /// First index below `bound` where the two streams differ. Absence means
    /// "not apart up to the bound", not equality.
    pub fn apart(&self, other: &StreamSpec, bound: u64, fuel: u64) -> Result<Option<u64>> {
        for n in 0..bound {
            if self.eval(n, fuel)? != other.eval(n, fuel)? {
                return Ok(Some(n));
            }
        }
        Ok(None)
    }

    /// First `n` values.
    pub fn values(&self, n: u64, fuel: u64) -> Result<Vec<u64>> {
        (0..n).map(|i| self.eval(i, fuel)).collect()
    }

    /// Code of the length-`n` prefix.
    pub fn prefix_code(&self, n: u64, fuel: u64) -> Result<u64> {
        seqcode::encode(&self.values(n, fuel)?)
    }
}

/// `(code|arg)(t)` with the coordinate given as a decoded move vector: the
/// value of the coded functional's t-th coordinate at the point `arg`.
///
/// Kernel codes evaluate the coordinate directly from their defining clause;
/// other codes are searched literally along the argument's prefix codes up to
/// the fuel bound.
pub fn apply_coord(
    code: &StreamSpec,
    arg: &StreamSpec,
    coord: &[u64],
    fuel: u64,
) -> Result<u64> {
    if let StreamSpec::Kernel(k) = code {
        return k.apply_value(arg, coord, fuel);
    }
    let coord_code = seqcode::encode(coord)?;
    let mut index: Vec<u64> = vec![coord_code];
    for k in 0..=fuel {
        let raw = code.node_value(&index, fuel)?;
        if raw != 0 {
            return Ok(raw - 1);
        }
        index.push(arg.eval(k, fuel)?);
    }
    Err(Error::fuel(
        format!("coordinate {coord:?} of the applied functional never fired"),
        fuel,
    ))
}

/// A stream read as the neighborhood code of a continuous functional: the
/// code of a function to the naturals fires at the first prefix with nonzero
/// value; the code of a function to Baire space acts through its
/// subsequences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Functional(pub StreamSpec);

impl Functional {
    /// γ(α): the value at the least firing prefix, searched up to `fuel`.
    pub fn eval_at(&self, alpha: &StreamSpec, fuel: u64) -> Result<u64> {
        if fuel == 0 {
            return Err(Error::domain("eval_at requires fuel at least 1"));
        }
        let mut values: Vec<u64> = Vec::new();
        for n in 0..=fuel {
            let raw = self.0.node_value(&values, fuel)?;
            if raw != 0 {
                return Ok(raw - 1);
            }
            if n < fuel {
                values.push(alpha.eval(n, fuel)?);
            }
        }
        Err(Error::fuel("no modulus found within bound", fuel))
    }

    /// γ|α as a lazy stream; failures are deferred to evaluation.
    pub fn apply(&self, alpha: &StreamSpec) -> StreamSpec {
        StreamSpec::apply(self.0.clone(), alpha.clone())
    }

    /// (γ|α)(t) with a decoded coordinate.
    pub fn apply_at(&self, alpha: &StreamSpec, coord: &[u64], fuel: u64) -> Result<u64> {
        apply_coord(&self.0, alpha, coord, fuel)
    }

    /// γ|s: the longest output determined by the finite input `s`. Returns
    /// the code of the empty sequence when nothing is determined.
    pub fn finite_apply(&self, s: u64, fuel: u64) -> Result<u64> {
        seqcode::encode(&self.finite_apply_moves(&seqcode::decode(s), fuel)?)
    }

    /// The moves-level form of the finite application, free of the u64 code
    /// range on both sides.
    pub fn finite_apply_moves(&self, input: &[u64], fuel: u64) -> Result<Vec<u64>> {
        let mut out: Vec<u64> = Vec::new();
        'coords: for j in 0..input.len() as u64 {
            for p in 0..=input.len() {
                let mut index = vec![j];
                index.extend_from_slice(&input[..p]);
                let raw = self.0.node_value(&index, fuel)?;
                if raw != 0 {
                    out.push(raw - 1);
                    continue 'coords;
                }
            }
            break;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::RegularTree;

    #[test]
    fn periodic_and_compositional() {
        let zero = StreamSpec::ev_periodic(vec![], vec![0]);
        assert_eq!(zero.eval(17, 10).unwrap(), 0);
        let i = StreamSpec::interleave(StreamSpec::Const(3), StreamSpec::Const(4));
        assert_eq!(i.eval(6, 10).unwrap(), 3);
        assert_eq!(i.eval(7, 10).unwrap(), 4);
        // Subseq{a, m} at n equals a at J(m, n).
        let s = StreamSpec::subseq(i.clone(), 2);
        for n in 0..20 {
            assert_eq!(
                s.eval(n, 10).unwrap(),
                i.eval(seqcode::pair(2, n).unwrap(), 10).unwrap()
            );
        }
        // PartI at n equals a at 2n.
        let p = StreamSpec::PartI(Box::new(i.clone()));
        for n in 0..20 {
            assert_eq!(p.eval(n, 10).unwrap(), 3);
        }
    }

    #[test]
    fn tree_char_values() {
        let c = StreamSpec::tree_char(RegularTree::cantor());
        let n = seqcode::encode(&[0, 1, 0]).unwrap();
        assert_eq!(c.eval(n, 10).unwrap(), 0);
        let n = seqcode::encode(&[0, 2]).unwrap();
        assert_eq!(c.eval(n, 10).unwrap(), 1);
        assert_eq!(c.node_value(&[0, 1, 0], 10).unwrap(), 0);
    }

    #[test]
    fn localize_semantics() {
        // (^u α)(s) = α(u∗s)
        let t = StreamSpec::tree_char(RegularTree::cantor());
        let u = seqcode::encode(&[1]).unwrap();
        let l = StreamSpec::localize(t.clone(), u);
        for s in 0..50 {
            assert_eq!(
                l.eval(s, 10).unwrap(),
                t.eval(seqcode::concat(u, s).unwrap(), 10).unwrap()
            );
        }
    }

    #[test]
    fn eval_at_constant_code() {
        // A code firing at the empty prefix with raw value 5 evaluates to 4.
        let gamma = Functional(StreamSpec::Const(5));
        assert_eq!(gamma.eval_at(&StreamSpec::zero(), 1).unwrap(), 4);
    }

    #[test]
    fn eval_at_identity_code() {
        use crate::kernel::Kernel;
        let k = StreamSpec::kernel(Kernel::Identity);
        let gamma = Functional(StreamSpec::subseq(k, 2));
        let alpha = StreamSpec::ev_periodic(vec![7, 8, 9], vec![0]);
        assert_eq!(gamma.eval_at(&alpha, 5).unwrap(), 9);
    }

    #[test]
    fn eval_at_never_fires() {
        // Characteristic code of a tree, along one of its paths: all zeros.
        let gamma = Functional(StreamSpec::tree_char(RegularTree::single_path(&[], &[0])));
        let err = gamma.eval_at(&StreamSpec::zero(), 20).unwrap_err();
        assert!(matches!(err, Error::FuelExhausted { .. }));
    }

    #[test]
    fn apply_identity_is_pointwise() {
        use crate::kernel::Kernel;
        let k = Functional(StreamSpec::kernel(Kernel::Identity));
        let alpha = StreamSpec::ev_periodic(vec![4, 5], vec![1, 2]);
        let applied = k.apply(&alpha);
        for n in 0..30 {
            assert_eq!(applied.eval(n, 50).unwrap(), alpha.eval(n, 50).unwrap());
        }
    }

    #[test]
    fn finite_apply_identity() {
        use crate::kernel::Kernel;
        let k = Functional(StreamSpec::kernel(Kernel::Identity));
        let s = seqcode::encode(&[4, 5]).unwrap();
        assert_eq!(k.finite_apply(s, 10).unwrap(), s);
        assert_eq!(k.finite_apply(0, 10).unwrap(), 0);
        // A code firing only at depth 10 determines nothing on length 3.
        let deep = Functional(StreamSpec::length_at_least(10));
        let s = seqcode::encode(&[1, 2, 3]).unwrap();
        assert_eq!(deep.finite_apply(s, 10).unwrap(), 0);
    }

    #[test]
    fn finite_apply_monotone_and_consistent() {
        use crate::kernel::Kernel;
        let k = Functional(StreamSpec::kernel(Kernel::Identity));
        let alpha = StreamSpec::ev_periodic(vec![2, 0, 1], vec![3]);
        let applied = k.apply(&alpha);
        for m in 0..6u64 {
            let s = alpha.prefix_code(m, 10).unwrap();
            let out = k.finite_apply(s, 10).unwrap();
            // γ|(ᾱm) is an initial part of γ|α.
            let out_items = seqcode::decode(out);
            for (i, v) in out_items.iter().enumerate() {
                assert_eq!(*v, applied.eval(i as u64, 10).unwrap());
            }
            // Monotone under ⊑.
            if m > 0 {
                let prev = k.finite_apply(alpha.prefix_code(m - 1, 10).unwrap(), 10).unwrap();
                assert!(seqcode::is_prefix(prev, out));
            }
        }
    }

    #[test]
    fn apart_examples() {
        let zero = StreamSpec::zero();
        let one = StreamSpec::Const(1);
        assert_eq!(zero.apart(&one, 1, 10).unwrap(), Some(0));
        assert_eq!(zero.apart(&zero.clone(), 100, 10).unwrap(), None);
        let spike = StreamSpec::ev_periodic(vec![0, 0, 3], vec![0]);
        assert_eq!(spike.apart(&zero, 10, 10).unwrap(), Some(2));
    }

    #[test]
    fn node_value_matches_eval_on_small_codes() {
        let specs = [
            StreamSpec::ev_periodic(vec![9, 1], vec![4, 7, 2]),
            StreamSpec::tree_char(RegularTree::cantor()),
            StreamSpec::subseq(StreamSpec::ev_periodic(vec![], vec![5, 6]), 3),
        ];
        for spec in &specs {
            for n in 0..200u64 {
                let moves = seqcode::decode(n);
                assert_eq!(
                    spec.node_value(&moves, 10).unwrap(),
                    spec.eval(n, 10).unwrap()
                );
            }
        }
    }

    #[test]
    fn node_value_beyond_u64() {
        // The code of 40 moves is astronomically large; a constant cycle is
        // still decidable, a non-constant one reports a domain error.
        let deep = vec![1u64; 40];
        let flat = StreamSpec::ev_periodic(vec![9], vec![4]);
        assert_eq!(flat.node_value(&deep, 10).unwrap(), 4);
        let wobble = StreamSpec::ev_periodic(vec![9], vec![4, 7]);
        assert!(wobble.node_value(&deep, 10).is_err());
    }

    #[test]
    fn json_round_trip() {
        let spec = StreamSpec::apply(
            StreamSpec::kernel(crate::kernel::Kernel::Identity),
            StreamSpec::ev_periodic(vec![1], vec![0, 2]),
        );
        let json = serde_json::to_string(&spec).unwrap();
        let back: StreamSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, back);
    }
}
