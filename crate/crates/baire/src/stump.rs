//! Eventually periodic stump notations.
//!
//! A stump is a well-founded tree notation: either empty, or a node whose
//! child sequence is eventually periodic (`prefix` then `cycle` repeated).
//! The induced characteristic code sends every sequence to 1 for the empty
//! stump; a node sends the empty sequence to 0 and delegates `⟨n⟩∗u` to child
//! `n` at `u`.
//!
//! Inclusion of codes (`subset`) is the exclusion-set order: `a ⊆ b` when
//! every sequence excluded by `a` (code value 1) is excluded by `b`. This is
//! REVERSE inclusion of the admitted trees — exclusions grow along ⊆. All
//! hereditarily-increasing and hull reasoning below uses this code sense.
//!
//! Values are kept in canonical form (minimal cycle period, no absorbable
//! prefix suffix, children canonical), so structural equality decides
//! equality of the induced codes within the representation class.

use crate::error::{Error, Result};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stump {
    Empty,
    Node(Arc<NodeData>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeData {
    pub prefix: Vec<Stump>,
    pub cycle: Vec<Stump>,
}

impl Stump {
    pub fn empty() -> Stump {
        Stump::Empty
    }

    /// Canonicalizing constructor. `cycle` must be non-empty.
    pub fn node(prefix: Vec<Stump>, cycle: Vec<Stump>) -> Stump {
        assert!(!cycle.is_empty(), "stump cycle must be non-empty");
        let mut prefix = prefix;
        let mut cycle = cycle;
        // Minimal period.
        for d in 1..cycle.len() {
            if cycle.len() % d == 0 && (0..cycle.len()).all(|i| cycle[i] == cycle[i % d]) {
                cycle.truncate(d);
                break;
            }
        }
        // Absorb a prefix suffix that agrees with the rotated cycle.
        while let Some(last) = prefix.last() {
            if *last == cycle[cycle.len() - 1] {
                prefix.pop();
                cycle.rotate_right(1);
            } else {
                break;
            }
        }
        Stump::Node(Arc::new(NodeData { prefix, cycle }))
    }

    /// The stump with all children equal to `s` (the successor notation).
    pub fn successor(s: &Stump) -> Stump {
        Stump::node(vec![], vec![s.clone()])
    }

    /// The stump excluding every sequence of length ≥ 1 (all children empty).
    pub fn one_star() -> Stump {
        Stump::successor(&Stump::empty())
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Stump::Empty)
    }

    /// (prefix length, cycle length) of the child table; (0, 1) for the empty
    /// stump, whose child table is never consulted.
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Stump::Empty => (0, 1),
            Stump::Node(d) => (d.prefix.len(), d.cycle.len()),
        }
    }

    pub fn child_slot_count(&self) -> usize {
        let (p, c) = self.shape();
        p + c
    }

    /// Child `n`; the empty stump reports empty children.
    pub fn child(&self, n: u64) -> Stump {
        match self {
            Stump::Empty => Stump::Empty,
            Stump::Node(d) => {
                let n = n as usize;
                if n < d.prefix.len() {
                    d.prefix[n].clone()
                } else {
                    d.cycle[(n - d.prefix.len()) % d.cycle.len()].clone()
                }
            }
        }
    }

    /// One entry per child slot (prefix then cycle). Quantifiers over children
    /// reduce to these.
    pub fn child_representatives(&self) -> Vec<Stump> {
        match self {
            Stump::Empty => vec![],
            Stump::Node(d) => d.prefix.iter().chain(d.cycle.iter()).cloned().collect(),
        }
    }

    /// Normalization is performed by the constructors; exposed for re-reading
    /// untrusted representations.
    pub fn normalize(&self) -> Stump {
        match self {
            Stump::Empty => Stump::Empty,
            Stump::Node(d) => Stump::node(
                d.prefix.iter().map(|s| s.normalize()).collect(),
                d.cycle.iter().map(|s| s.normalize()).collect(),
            ),
        }
    }

    /// Value of the induced characteristic code at the coded sequence `moves`.
    pub fn code_at(&self, moves: &[u64]) -> u64 {
        match self {
            Stump::Empty => 1,
            Stump::Node(_) => match moves.split_first() {
                None => 0,
                Some((&n, rest)) => self.child(n).code_at(rest),
            },
        }
    }

    /// Syntactic size, used as a recursion measure and test weight.
    pub fn size(&self) -> usize {
        match self {
            Stump::Empty => 1,
            Stump::Node(d) => {
                1 + d
                    .prefix
                    .iter()
                    .chain(d.cycle.iter())
                    .map(|s| s.size())
                    .sum::<usize>()
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Order
// ---------------------------------------------------------------------------

#[derive(Default)]
struct OrderCtx {
    leq: HashMap<(Stump, Stump), bool>,
    lt: HashMap<(Stump, Stump), bool>,
}

impl OrderCtx {
    fn leq(&mut self, a: &Stump, b: &Stump) -> bool {
        if a.is_empty() {
            return true;
        }
        let key = (a.clone(), b.clone());
        if let Some(&v) = self.leq.get(&key) {
            return v;
        }
        let v = a.child_representatives().iter().all(|c| self.lt(c, b));
        self.leq.insert(key, v);
        v
    }

    fn lt(&mut self, a: &Stump, b: &Stump) -> bool {
        if b.is_empty() {
            return false;
        }
        let key = (a.clone(), b.clone());
        if let Some(&v) = self.lt.get(&key) {
            return v;
        }
        let v = b.child_representatives().iter().any(|d| self.leq(a, d));
        self.lt.insert(key, v);
        v
    }
}

/// `a ≤ b`: a is empty, or every child of a is strictly below b.
pub fn leq(a: &Stump, b: &Stump) -> bool {
    OrderCtx::default().leq(a, b)
}

/// `a < b`: b is non-empty and a is below some child of b.
pub fn lt(a: &Stump, b: &Stump) -> bool {
    OrderCtx::default().lt(a, b)
}

/// Mutual ≤ (the order-equivalence reading of stump equality).
pub fn mutually_le(a: &Stump, b: &Stump) -> bool {
    let mut ctx = OrderCtx::default();
    ctx.leq(a, b) && ctx.leq(b, a)
}

// ---------------------------------------------------------------------------
// Code lattice
// ---------------------------------------------------------------------------

/// `a ⊆ b` in the code sense: wherever a's code is 1, b's code is 1.
pub fn subset(a: &Stump, b: &Stump) -> bool {
    if b.is_empty() {
        return true;
    }
    if a.is_empty() {
        return false;
    }
    aligned_children(a, b).iter().all(|(ca, cb)| subset(ca, cb))
}

/// Childwise alignment of two non-empty stumps over the combined shape.
fn aligned_children(a: &Stump, b: &Stump) -> Vec<(Stump, Stump)> {
    let (pa, ca) = a.shape();
    let (pb, cb) = b.shape();
    let prefix = pa.max(pb);
    let cycle = lcm(ca, cb);
    (0..prefix + cycle)
        .map(|i| (a.child(i as u64), b.child(i as u64)))
        .collect()
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    a / gcd(a, b) * b
}

/// Builds a non-empty stump from its aligned child list.
fn from_aligned(a: &Stump, b: &Stump, f: &mut impl FnMut(&Stump, &Stump) -> Stump) -> Stump {
    let (pa, ca) = a.shape();
    let (pb, cb) = b.shape();
    let prefix_len = pa.max(pb);
    let cycle_len = lcm(ca, cb);
    let children: Vec<Stump> = (0..prefix_len + cycle_len)
        .map(|i| f(&a.child(i as u64), &b.child(i as u64)))
        .collect();
    Stump::node(
        children[..prefix_len].to_vec(),
        children[prefix_len..].to_vec(),
    )
}

/// Union in the sense of the displayed `α ∪ β` (code is 1 where both are 1):
/// the admitted trees unite.
pub fn tree_union(a: &Stump, b: &Stump) -> Stump {
    if a.is_empty() {
        return b.clone();
    }
    if b.is_empty() {
        return a.clone();
    }
    from_aligned(a, b, &mut |x, y| tree_union(x, y))
}

/// Union of the exclusion sets (code is 1 where either is 1): the admitted
/// trees intersect. This is the union used by the hull's child identity.
pub fn exclusion_union(a: &Stump, b: &Stump) -> Stump {
    if a.is_empty() || b.is_empty() {
        return Stump::Empty;
    }
    from_aligned(a, b, &mut |x, y| exclusion_union(x, y))
}

// ---------------------------------------------------------------------------
// Natural sum
// ---------------------------------------------------------------------------

#[derive(Default)]
struct SumCtx {
    memo: HashMap<(Stump, Stump), Stump>,
}

impl SumCtx {
    fn sum(&mut self, a: &Stump, b: &Stump) -> Stump {
        if a.is_empty() {
            return b.clone();
        }
        if b.is_empty() {
            return a.clone();
        }
        let key = (a.clone(), b.clone());
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let (pa, ca) = a.shape();
        let (pb, cb) = b.shape();
        let prefix_len = 2 * pa.max(pb);
        let cycle_len = 2 * lcm(ca, cb);
        let children: Vec<Stump> = (0..prefix_len + cycle_len)
            .map(|i| {
                let m = (i / 2) as u64;
                if i % 2 == 0 {
                    self.sum(&a.child(m), b)
                } else {
                    self.sum(a, &b.child(m))
                }
            })
            .collect();
        let result = Stump::node(
            children[..prefix_len].to_vec(),
            children[prefix_len..].to_vec(),
        );
        self.memo.insert(key, result.clone());
        result
    }
}

/// Natural (Hessenberg) sum: even children are `aᵐ ⊕ b`, odd children are
/// `a ⊕ bᵐ`.
pub fn natural_sum(a: &Stump, b: &Stump) -> Stump {
    SumCtx::default().sum(a, b)
}

/// Left fold of the natural sum over a non-empty list.
pub fn iterated_sum(list: &[Stump]) -> Result<Stump> {
    let (first, rest) = list
        .split_first()
        .ok_or_else(|| Error::domain("iterated sum of an empty list"))?;
    let mut ctx = SumCtx::default();
    let mut acc = first.clone();
    for s in rest {
        acc = ctx.sum(&acc, s);
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Hull
// ---------------------------------------------------------------------------

/// Hereditarily increasing hull: the code is 1 at `t` exactly when some
/// `s ≤* t` has code 1. Child `n` is the exclusion-union of the hulls of the
/// children up to `n`; the child sequence stabilizes once every child slot has
/// contributed.
pub fn hull(s: &Stump) -> Stump {
    let mut memo = HashMap::new();
    hull_memo(s, &mut memo)
}

fn hull_memo(s: &Stump, memo: &mut HashMap<Stump, Stump>) -> Stump {
    if s.is_empty() {
        return Stump::Empty;
    }
    if let Some(hit) = memo.get(s) {
        return hit.clone();
    }
    let slots = s.child_slot_count();
    let mut children = Vec::with_capacity(slots);
    let mut acc: Option<Stump> = None;
    for i in 0..slots {
        let h = hull_memo(&s.child(i as u64), memo);
        acc = Some(match acc {
            None => h,
            Some(cur) => exclusion_union(&cur, &h),
        });
        children.push(acc.clone().unwrap());
    }
    let last = children.last().cloned().expect("at least one child slot");
    let result = Stump::node(children[..slots - 1].to_vec(), vec![last]);
    memo.insert(s.clone(), result.clone());
    result
}

// ---------------------------------------------------------------------------
// Predicates
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateReport {
    pub is_empty: bool,
    pub is_nonzero: bool,
    pub is_hereditarily_increasing: bool,
    pub is_hereditarily_repetitive: bool,
    pub is_weakly_comparative: bool,
}

/// Non-zero stumps: 1*, or a stump all of whose children are non-zero.
pub fn is_nonzero(s: &Stump) -> bool {
    if *s == Stump::one_star() {
        return true;
    }
    if s.is_empty() {
        return false;
    }
    s.child_representatives().iter().all(is_nonzero)
}

/// Hereditarily increasing: children ⊆-increase (code sense) and are
/// themselves hereditarily increasing. The empty stump is the base case.
pub fn is_hereditarily_increasing(s: &Stump) -> bool {
    if s.is_empty() {
        return true;
    }
    let slots = s.child_slot_count() as u64;
    (0..slots).all(|i| subset(&s.child(i), &s.child(i + 1)))
        && s.child_representatives().iter().all(is_hereditarily_increasing)
}

/// Hereditarily repetitive: every child recurs later (canonical-code
/// equality), hereditarily.
pub fn is_hereditarily_repetitive(s: &Stump) -> bool {
    match s {
        Stump::Empty => true,
        Stump::Node(d) => {
            let recurs = d.prefix.iter().enumerate().all(|(m, c)| {
                d.prefix[m + 1..].contains(c) || d.cycle.contains(c)
            });
            recurs && s.child_representatives().iter().all(is_hereditarily_repetitive)
        }
    }
}

/// Weakly comparative: every two children are both below some child.
pub fn is_weakly_comparative(s: &Stump) -> bool {
    let reps = s.child_representatives();
    let mut ctx = OrderCtx::default();
    reps.iter().all(|a| {
        reps.iter().all(|b| {
            reps.iter()
                .any(|d| ctx.leq(a, d) && ctx.leq(b, d))
        })
    })
}

pub fn predicates(s: &Stump) -> PredicateReport {
    PredicateReport {
        is_empty: s.is_empty(),
        is_nonzero: is_nonzero(s),
        is_hereditarily_increasing: is_hereditarily_increasing(s),
        is_hereditarily_repetitive: is_hereditarily_repetitive(s),
        is_weakly_comparative: is_weakly_comparative(s),
    }
}

// ---------------------------------------------------------------------------
// Embeddings (finite-branching fragment)
// ---------------------------------------------------------------------------

/// Whether every cycle, hereditarily, consists of empty stumps — then the
/// admitted node set of the code is finite.
pub fn is_finite_branching(s: &Stump) -> bool {
    match s {
        Stump::Empty => true,
        Stump::Node(d) => {
            d.cycle.iter().all(|c| c.is_empty()) && d.prefix.iter().all(is_finite_branching)
        }
    }
}

/// Admitted nodes of the code restricted to one move per child slot
/// (parents first). Because children repeat periodically, any strictly
/// ⊏-monotone map of admitted node sets normalizes to a map of these
/// representatives and conversely extends from them, so the embedding search
/// is exact on the whole eventually-periodic class. For finite-branching
/// stumps this is the full admitted node set.
pub fn admitted_nodes(s: &Stump) -> Vec<Vec<u64>> {
    fn go(s: &Stump, at: Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if s.is_empty() {
            return;
        }
        out.push(at.clone());
        for i in 0..s.child_slot_count() as u64 {
            let child = s.child(i);
            if !child.is_empty() {
                let mut next = at.clone();
                next.push(i);
                go(&child, next, out);
            }
        }
    }
    let mut out = Vec::new();
    go(s, vec![], &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// A strictly ⊏-monotone map between admitted node sets, as (source code,
/// image code) pairs over the slot representatives.
pub type EmbeddingTable = Vec<(u64, u64)>;

/// Searches for a strictly ⊏-monotone map from the admitted nodes of `a` into
/// the admitted nodes of `b` by exhaustive memoized backtracking. Subtrees of
/// a node are independent, so the search is polynomial in the representative
/// node counts.
pub fn embeds(a: &Stump, b: &Stump) -> Result<Option<EmbeddingTable>> {
    let src = admitted_nodes(a);
    let dst = admitted_nodes(b);
    if src.is_empty() {
        return Ok(Some(vec![]));
    }
    if dst.is_empty() {
        return Ok(None);
    }
    let src_children: Vec<Vec<usize>> = children_table(&src);
    let dst_children: Vec<Vec<usize>> = children_table(&dst);
    // dst descendants per node, for image candidates of child nodes.
    let mut dst_desc: Vec<Vec<usize>> = vec![vec![]; dst.len()];
    for i in (0..dst.len()).rev() {
        let mut d = Vec::new();
        for &c in &dst_children[i] {
            d.push(c);
            d.extend(dst_desc[c].iter().copied());
        }
        dst_desc[i] = d;
    }
    let mut memo: HashMap<(usize, usize), bool> = HashMap::new();
    fn ok(
        s: usize,
        d: usize,
        src_children: &[Vec<usize>],
        dst_children: &[Vec<usize>],
        dst_desc: &[Vec<usize>],
        memo: &mut HashMap<(usize, usize), bool>,
    ) -> bool {
        if let Some(&v) = memo.get(&(s, d)) {
            return v;
        }
        let v = src_children[s].iter().all(|&c| {
            dst_desc[d]
                .iter()
                .any(|&d2| ok(c, d2, src_children, dst_children, dst_desc, memo))
        });
        memo.insert((s, d), v);
        v
    }
    let root_image = (0..dst.len())
        .find(|&d| ok(0, d, &src_children, &dst_children, &dst_desc, &mut memo));
    let root_image = match root_image {
        Some(d) => d,
        None => return Ok(None),
    };
    // Reconstruct a witness table parents-first.
    let mut assignment: Vec<usize> = vec![usize::MAX; src.len()];
    assignment[0] = root_image;
    let mut stack = vec![0usize];
    while let Some(s) = stack.pop() {
        let d = assignment[s];
        for &c in &src_children[s] {
            let img = dst_desc[d]
                .iter()
                .copied()
                .find(|&d2| ok(c, d2, &src_children, &dst_children, &dst_desc, &mut memo))
                .expect("witness exists for verified embedding");
            assignment[c] = img;
            stack.push(c);
        }
    }
    let table = src
        .iter()
        .zip(&assignment)
        .map(|(node, &j)| {
            Ok((
                crate::seqcode::encode(node)?,
                crate::seqcode::encode(&dst[j])?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(table))
}

/// Immediate-child index table for a parents-first node list.
fn children_table(nodes: &[Vec<u64>]) -> Vec<Vec<usize>> {
    let mut table = vec![vec![]; nodes.len()];
    for (i, node) in nodes.iter().enumerate() {
        if !node.is_empty() {
            let parent = &node[..node.len() - 1];
            let p = nodes.iter().position(|x| x == parent).expect("parent listed");
            table[p].push(i);
        }
    }
    table
}

// ---------------------------------------------------------------------------
// Critical extension
// ---------------------------------------------------------------------------

/// Finite truncation of the critical extension: children iterate
/// `τ⁰ = hull(s)`, `τ^{n+1} = hull(τⁿ ⊕ τⁿ)` up to depth `k`, then repeat the
/// last child. Each listed child is ≤ the next.
pub fn critical_extension(s: &Stump, k: u64) -> Result<Stump> {
    if k == 0 {
        return Err(Error::domain("critical extension needs depth at least 1"));
    }
    let mut taus = vec![hull(s)];
    for _ in 1..k {
        let prev = taus.last().unwrap();
        taus.push(hull(&natural_sum(prev, prev)));
    }
    let last = taus.last().cloned().unwrap();
    Ok(Stump::node(taus, vec![last]))
}

// ---------------------------------------------------------------------------
// Serialization: {"empty": true} | {"prefix": […], "cycle": […]}
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum StumpRepr {
    Empty { empty: bool },
    Node { prefix: Vec<StumpRepr>, cycle: Vec<StumpRepr> },
}

impl From<&Stump> for StumpRepr {
    fn from(s: &Stump) -> StumpRepr {
        match s {
            Stump::Empty => StumpRepr::Empty { empty: true },
            Stump::Node(d) => StumpRepr::Node {
                prefix: d.prefix.iter().map(StumpRepr::from).collect(),
                cycle: d.cycle.iter().map(StumpRepr::from).collect(),
            },
        }
    }
}

impl StumpRepr {
    fn build(self) -> std::result::Result<Stump, String> {
        match self {
            StumpRepr::Empty { empty } => {
                if empty {
                    Ok(Stump::Empty)
                } else {
                    Err("\"empty\": false is not a stump".into())
                }
            }
            StumpRepr::Node { prefix, cycle } => {
                if cycle.is_empty() {
                    return Err("stump cycle must be non-empty".into());
                }
                let prefix = prefix
                    .into_iter()
                    .map(StumpRepr::build)
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                let cycle = cycle
                    .into_iter()
                    .map(StumpRepr::build)
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                Ok(Stump::node(prefix, cycle))
            }
        }
    }
}

impl Serialize for Stump {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        StumpRepr::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Stump {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = StumpRepr::deserialize(deserializer)?;
        repr.build().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Stump {
        Stump::one_star()
    }

    #[test]
    fn normalize_examples() {
        let e = Stump::empty();
        // Absorbable prefix.
        assert_eq!(
            Stump::node(vec![e.clone()], vec![e.clone()]),
            Stump::node(vec![], vec![e.clone()])
        );
        // Period reduction.
        assert_eq!(
            Stump::node(vec![], vec![one(), one()]),
            Stump::node(vec![], vec![one()])
        );
        assert_eq!(e.normalize(), e);
    }

    #[test]
    fn order_examples() {
        let e = Stump::empty();
        for s in [e.clone(), one(), Stump::successor(&one())] {
            assert!(leq(&e, &s));
            assert!(leq(&s, &s));
            assert!(!lt(&s, &s));
        }
        assert!(lt(&one(), &Stump::successor(&one())));
        assert!(!lt(&one(), &one()));
    }

    #[test]
    fn successor_examples() {
        let s = Stump::successor(&Stump::empty());
        assert_eq!(s, one());
        for x in [Stump::empty(), one(), Stump::successor(&one())] {
            assert!(lt(&x, &Stump::successor(&x)));
        }
    }

    #[test]
    fn sum_examples() {
        let e = Stump::empty();
        let s = Stump::node(vec![one()], vec![e.clone()]);
        assert_eq!(natural_sum(&e, &s), s);
        assert_eq!(natural_sum(&s, &e), s);
        // 1* ⊕ 1* has every child Empty⊕1* or 1*⊕Empty = 1*.
        assert_eq!(natural_sum(&one(), &one()), Stump::successor(&one()));
        // Strict child inequality.
        let a = Stump::successor(&one());
        let b = one();
        for c in a.child_representatives() {
            assert!(lt(&natural_sum(&c, &b), &natural_sum(&a, &b)));
        }
    }

    #[test]
    fn union_examples() {
        let e = Stump::empty();
        let s = Stump::successor(&one());
        assert_eq!(tree_union(&e, &s), s);
        assert_eq!(tree_union(&s, &s), s);
        assert_eq!(tree_union(&one(), &s), s);
        assert_eq!(exclusion_union(&one(), &s), one());
    }

    #[test]
    fn hull_examples() {
        assert_eq!(hull(&Stump::empty()), Stump::empty());
        assert_eq!(hull(&one()), one());
        // Children (Empty, 1*, Empty, …): the excluded ⟨0⟩ forces every ⟨n⟩
        // to be excluded under ≤*.
        let s = Stump::node(vec![Stump::empty(), one()], vec![Stump::empty()]);
        assert_eq!(hull(&s), one());
    }

    /// All lists pointwise ≤ `t`.
    fn dominated(t: &[u64]) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for &bound in t {
            let mut next = Vec::new();
            for u in &out {
                for v in 0..=bound {
                    let mut w = u.clone();
                    w.push(v);
                    next.push(w);
                }
            }
            out = next;
        }
        out
    }

    /// All lists of length ≤ `len` with entries < `max`.
    fn small_lists(len: usize, max: u64) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        let mut layer = vec![vec![]];
        for _ in 0..len {
            let mut next = Vec::new();
            for u in &layer {
                for v in 0..max {
                    let mut w = u.clone();
                    w.push(v);
                    next.push(w);
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    #[test]
    fn hull_matches_pointwise_definition() {
        let pool = [
            one(),
            Stump::successor(&one()),
            Stump::node(vec![Stump::empty(), one()], vec![Stump::empty()]),
            Stump::node(vec![Stump::successor(&one())], vec![one()]),
        ];
        for s in &pool {
            let h = hull(s);
            for t in small_lists(3, 7) {
                let expect = dominated(&t).iter().any(|u| s.code_at(u) == 1);
                assert_eq!(h.code_at(&t) == 1, expect, "stump {s:?} at {t:?}");
            }
        }
    }

    #[test]
    fn predicate_examples() {
        assert!(predicates(&one()).is_hereditarily_increasing);
        let bad = Stump::node(vec![Stump::empty(), one()], vec![Stump::empty()]);
        assert!(!predicates(&bad).is_hereditarily_increasing);
        assert!(predicates(&Stump::successor(&one())).is_hereditarily_repetitive);
        assert!(is_nonzero(&one()));
        assert!(!is_nonzero(&Stump::empty()));
        assert!(is_nonzero(&Stump::successor(&one())));
    }

    #[test]
    fn embed_examples() {
        let e = Stump::empty();
        assert_eq!(embeds(&e, &one()).unwrap(), Some(vec![]));
        let s1 = Stump::successor(&one());
        assert!(embeds(&one(), &s1).unwrap().is_some());
        assert!(embeds(&s1, &one()).unwrap().is_none());
        // Eventually periodic branching works through slot representatives.
        assert!(embeds(&s1, &s1).unwrap().is_some());
        let s2 = Stump::successor(&s1);
        assert!(embeds(&s2, &s1).unwrap().is_none());
        assert!(embeds(&s1, &s2).unwrap().is_some());
    }

    #[test]
    fn embed_agrees_with_leq() {
        let e = Stump::empty();
        let mut pool = vec![e.clone(), one(), Stump::successor(&one())];
        pool.push(Stump::node(vec![one()], vec![e.clone()]));
        pool.push(Stump::node(vec![e.clone(), one()], vec![e.clone()]));
        pool.push(Stump::node(vec![], vec![Stump::successor(&one())]));
        pool.push(Stump::node(vec![Stump::successor(&one()), one()], vec![e.clone()]));
        for a in &pool {
            for b in &pool {
                assert_eq!(
                    leq(a, b),
                    embeds(a, b).unwrap().is_some(),
                    "order/embedding mismatch for {a:?} vs {b:?}"
                );
            }
        }
    }

    #[test]
    fn critical_extension_examples() {
        let t = critical_extension(&Stump::empty(), 1).unwrap();
        assert_eq!(t.child(0), Stump::empty());
        let t = critical_extension(&one(), 3).unwrap();
        assert_eq!(t.child(0), hull(&one()));
        assert_eq!(t.child(1), hull(&natural_sum(&t.child(0), &t.child(0))));
        let slots = t.child_slot_count() as u64;
        for i in 0..slots {
            assert!(leq(&t.child(i), &t.child(i + 1)));
            // The hull grows in the code-⊆ sense.
            assert!(subset(&t.child(i), &hull(&t.child(i))));
        }
    }

    #[test]
    fn json_round_trip() {
        let s = Stump::node(vec![Stump::empty(), one()], vec![Stump::successor(&one())]);
        let json = serde_json::to_string(&s).unwrap();
        let back: Stump = serde_json::from_str(&json).unwrap();
        assert_eq!(s, back);
        let parsed: Stump = serde_json::from_str("{\"empty\":true}").unwrap();
        assert!(parsed.is_empty());
    }
}
