//! Named acceptance suites.
//!
//! Each suite checks one acceptance criterion with exact integer assertions
//! and reports a pass/fail line. The random material is seeded and
//! reproducible.

use crate::check::{as_tree, check_membership, NamedSet, Verdict};
use crate::error::{Error, Result};
use crate::kernel::{self, Kernel};
use crate::reductions::{
    self, apply_reduction, build, transport_witness, Direction, Params, ReductionName,
    Witness,
};
use crate::seqcode;
use crate::stream::{Functional, StreamSpec};
use crate::stump::{self, Stump};
use crate::trees::{bar01, CbFamily, InfinitePath, PointEnumeration, RegularTree, State, Tail};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: String,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    fn pass(id: &str, detail: String) -> Self {
        CriterionResult { id: id.to_string(), passed: true, detail }
    }
    fn fail(id: &str, detail: String) -> Self {
        CriterionResult { id: id.to_string(), passed: false, detail }
    }
}

pub const SUITE_NAMES: &[&str] = &[
    "codec",
    "kb-order",
    "stump-order",
    "embedding",
    "natural-sum",
    "hull",
    "cb-derivative",
    "fan-realizer",
    "bar01",
    "reduction-roundtrips",
    "fixed-point",
    "boundedness",
    "range-code",
];

/// Runs one named suite (or all of them for "all") with the given seed.
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<CriterionResult>> {
    match name {
        "all" => {
            let mut out = Vec::new();
            for n in SUITE_NAMES {
                out.extend(run_suite(n, seed)?);
            }
            Ok(out)
        }
        "codec" => Ok(vec![codec_suite()?]),
        "kb-order" => Ok(vec![kb_suite(seed)?]),
        "stump-order" => Ok(vec![stump_order_suite(seed)?]),
        "embedding" => Ok(vec![embedding_suite(seed)?]),
        "natural-sum" => Ok(vec![natural_sum_suite(seed)?]),
        "hull" => Ok(vec![hull_suite(seed)?]),
        "cb-derivative" => Ok(vec![cb_suite(seed)?]),
        "fan-realizer" => Ok(vec![fan_suite()?]),
        "bar01" => Ok(vec![bar01_suite()?]),
        "reduction-roundtrips" => Ok(roundtrip_suite(seed)?),
        "fixed-point" => Ok(vec![fixed_point_suite(seed)?]),
        "boundedness" => Ok(vec![boundedness_suite(seed)?]),
        "range-code" => Ok(vec![range_code_suite(seed)?]),
        other => Err(Error::domain(format!("unknown suite '{other}'"))),
    }
}

// ---------------------------------------------------------------------------
// Random material
// ---------------------------------------------------------------------------

pub fn rng_for(seed: u64, salt: u64) -> StdRng {
    StdRng::seed_from_u64(seed ^ (salt.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

/// A random stump of bounded depth and branching.
pub fn random_stump(rng: &mut StdRng, depth: u32, branch: u64) -> Stump {
    if depth == 0 || rng.gen_bool(0.25) {
        return Stump::Empty;
    }
    let pl = rng.gen_range(0..=branch.min(2)) as usize;
    let cl = rng.gen_range(1..=branch.max(1)).min(2) as usize;
    let prefix = (0..pl).map(|_| random_stump(rng, depth - 1, branch)).collect();
    let cycle = (0..cl).map(|_| random_stump(rng, depth - 1, branch)).collect();
    Stump::node(prefix, cycle)
}

/// A random finite-branching stump (all cycles empty) with a bounded admitted
/// node count.
pub fn random_finite_stump(rng: &mut StdRng, max_nodes: usize) -> Stump {
    loop {
        let s = random_finite_stump_inner(rng, 3);
        if stump::admitted_nodes(&s).len() <= max_nodes {
            return s;
        }
    }
}

fn random_finite_stump_inner(rng: &mut StdRng, depth: u32) -> Stump {
    if depth == 0 || rng.gen_bool(0.35) {
        return Stump::Empty;
    }
    let pl = rng.gen_range(0..=3usize);
    let prefix = (0..pl)
        .map(|_| random_finite_stump_inner(rng, depth - 1))
        .collect();
    Stump::node(prefix, vec![Stump::Empty])
}

/// A random pruned, non-empty regular tree.
pub fn random_tree(rng: &mut StdRng, max_states: usize, max_move: u64) -> RegularTree {
    loop {
        let n = rng.gen_range(1..=max_states);
        let mut states = Vec::with_capacity(n);
        for _ in 0..n {
            let edges = rng.gen_range(1..=2usize);
            let mut explicit = BTreeMap::new();
            for _ in 0..edges {
                explicit.insert(rng.gen_range(0..=max_move), rng.gen_range(0..n));
            }
            let tail = if rng.gen_bool(0.15) {
                Some(Tail { from: max_move + 1, period: vec![Some(rng.gen_range(0..n))] })
            } else {
                None
            };
            states.push(State { explicit, tail });
        }
        let t = RegularTree { states, root: Some(0) }.prune();
        if !t.is_empty() {
            return t;
        }
    }
}

/// A random pruned, non-empty fan (finitely many children everywhere).
pub fn random_fan(rng: &mut StdRng, max_states: usize, max_move: u64) -> RegularTree {
    loop {
        let n = rng.gen_range(1..=max_states);
        let mut states = Vec::with_capacity(n);
        for _ in 0..n {
            let edges = rng.gen_range(1..=3usize);
            let mut explicit = BTreeMap::new();
            for _ in 0..edges {
                explicit.insert(rng.gen_range(0..=max_move), rng.gen_range(0..n));
            }
            states.push(State { explicit, tail: None });
        }
        let t = RegularTree { states, root: Some(0) }.prune();
        if !t.is_empty() {
            return t;
        }
    }
}

/// A random well-founded tree presentation: layered states, each layer only
/// pointing downward, the last layer dead. The node set is non-trivial but no
/// infinite path exists.
pub fn random_well_founded(rng: &mut StdRng, depth: usize, max_move: u64) -> RegularTree {
    let mut states = Vec::new();
    for layer in 0..depth {
        let edges = rng.gen_range(1..=2usize);
        let mut explicit = BTreeMap::new();
        if layer + 1 < depth {
            for _ in 0..edges {
                explicit.insert(rng.gen_range(0..=max_move), layer + 1);
            }
        }
        states.push(State { explicit, tail: None });
    }
    RegularTree { states, root: Some(0) }
}

/// A random eventually periodic point with small values.
pub fn random_point(rng: &mut StdRng, max_value: u64) -> InfinitePath {
    let pl = rng.gen_range(0..=3usize);
    let cl = rng.gen_range(1..=3usize);
    InfinitePath {
        prefix: (0..pl).map(|_| rng.gen_range(0..=max_value)).collect(),
        cycle: (0..cl).map(|_| rng.gen_range(0..=max_value)).collect(),
    }
}

/// A random eventually periodic member of a pruned tree.
pub fn random_member(rng: &mut StdRng, tree: &RegularTree) -> InfinitePath {
    let root = tree.root.expect("non-empty tree");
    let mut state = root;
    let mut visited: Vec<usize> = vec![root];
    let mut moves: Vec<u64> = Vec::new();
    loop {
        let mut edges = tree.states[state].edge_representatives();
        edges.sort_unstable();
        let (mv, next) = edges[rng.gen_range(0..edges.len())];
        if let Some(pos) = visited.iter().position(|&v| v == next) {
            moves.push(mv);
            return InfinitePath {
                prefix: moves[..pos].to_vec(),
                cycle: moves[pos..].to_vec(),
            };
        }
        moves.push(mv);
        visited.push(next);
        state = next;
    }
}

impl InfinitePath {
    /// The subsequence at `offset, offset+step, offset+2·step, …`.
    pub fn stride(&self, offset: usize, step: usize) -> InfinitePath {
        let p = self.prefix.len();
        let c = self.cycle.len();
        // Number of strided entries before the cycle region stabilizes.
        let lead = p.div_ceil(step.max(1));
        let orbit = c / gcd(c, step % c.max(1) + if step % c.max(1) == 0 { c } else { 0 });
        let orbit = if orbit == 0 { 1 } else { orbit };
        let prefix: Vec<u64> = (0..lead)
            .map(|i| self.value((offset + step * i) as u64))
            .collect();
        let cycle: Vec<u64> = (0..orbit.max(1))
            .map(|i| self.value((offset + step * (lead + i)) as u64))
            .collect();
        InfinitePath { prefix, cycle }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// The interleaved pair tree of two trees: even moves walk the left tree,
/// odd moves the right one.
pub fn pair_tree(left: &RegularTree, right: &RegularTree) -> RegularTree {
    let (lr, rr) = match (left.root, right.root) {
        (Some(l), Some(r)) => (l, r),
        _ => return RegularTree::empty(),
    };
    // state encoding: (left state, right state, parity)
    let mut index = std::collections::HashMap::new();
    let mut states: Vec<State> = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    index.insert((lr, rr, 0u8), 0usize);
    states.push(State::default());
    queue.push_back((lr, rr, 0u8));
    while let Some((l, r, par)) = queue.pop_front() {
        let id = index[&(l, r, par)];
        let source = if par == 0 { &left.states[l] } else { &right.states[r] };
        let mut resolve = |states: &mut Vec<State>,
                           queue: &mut std::collections::VecDeque<(usize, usize, u8)>,
                           key: (usize, usize, u8)| {
            *index.entry(key).or_insert_with(|| {
                states.push(State::default());
                queue.push_back(key);
                states.len() - 1
            })
        };
        let explicit: BTreeMap<u64, usize> = source
            .explicit
            .iter()
            .map(|(&mv, &q)| {
                let key = if par == 0 { (q, r, 1) } else { (l, q, 0) };
                (mv, resolve(&mut states, &mut queue, key))
            })
            .collect();
        let tail = source.tail.as_ref().map(|t| Tail {
            from: t.from,
            period: t
                .period
                .iter()
                .map(|x| {
                    x.map(|q| {
                        let key = if par == 0 { (q, r, 1) } else { (l, q, 0) };
                        resolve(&mut states, &mut queue, key)
                    })
                })
                .collect(),
        });
        states[id] = State { explicit, tail };
    }
    RegularTree { states, root: Some(0) }.prune()
}

// ---------------------------------------------------------------------------
// Criterion 1: codec laws
// ---------------------------------------------------------------------------

fn codec_suite() -> Result<CriterionResult> {
    let id = "codec";
    // Round trips for codes below 10^5.
    for n in 0..100_000u64 {
        let items = seqcode::decode(n);
        if seqcode::encode(&items)? != n {
            return Ok(CriterionResult::fail(id, format!("decode/encode broke at {n}")));
        }
        if n >= 1 {
            let (a, b) = seqcode::unpair(n)?;
            if seqcode::pair(a, b)? != n {
                return Ok(CriterionResult::fail(id, format!("unpair/pair broke at {n}")));
            }
        }
    }
    // Lists of length ≤ 5 with entries ≤ 6.
    let mut layer: Vec<Vec<u64>> = vec![vec![]];
    for _ in 0..5 {
        let mut next = Vec::new();
        for l in &layer {
            for v in 0..=6u64 {
                let mut x = l.clone();
                x.push(v);
                next.push(x);
            }
        }
        for l in &next {
            let code = seqcode::encode(l)?;
            if seqcode::decode(code) != *l {
                return Ok(CriterionResult::fail(id, format!("list round trip broke at {l:?}")));
            }
        }
        layer = next;
    }
    // Pairing couples with sequence coding on the same range.
    for a in 0..=6u64 {
        for s in 0..2000u64 {
            let mut items = vec![a];
            items.extend(seqcode::decode(s));
            if seqcode::pair(a, s)? != seqcode::encode(&items)? {
                return Ok(CriterionResult::fail(
                    id,
                    format!("pair({a},{s}) differs from the prefixed code"),
                ));
            }
        }
    }
    Ok(CriterionResult::pass(
        id,
        "codec round trips exhaustive below 1e5; list round trips to length 5; pairing couples with prefixing".into(),
    ))
}

// ---------------------------------------------------------------------------
// Criterion 2: KB linear order
// ---------------------------------------------------------------------------

fn kb_suite(seed: u64) -> Result<CriterionResult> {
    let id = "kb-order";
    let mut rng = rng_for(seed, 2);
    use std::cmp::Ordering;
    for i in 0..10_000 {
        let a = rng.gen_range(0..1_000_000u64);
        let b = rng.gen_range(0..1_000_000u64);
        let c = rng.gen_range(0..1_000_000u64);
        // Trichotomy.
        let ab = seqcode::kb_compare(a, b);
        let ba = seqcode::kb_compare(b, a);
        if ab.reverse() != ba || (ab == Ordering::Equal) != (a == b) {
            return Ok(CriterionResult::fail(id, format!("trichotomy broke on ({a},{b}) at {i}")));
        }
        // Transitivity.
        if seqcode::kb_compare(a, b) != Ordering::Greater
            && seqcode::kb_compare(b, c) != Ordering::Greater
            && seqcode::kb_compare(a, c) == Ordering::Greater
        {
            return Ok(CriterionResult::fail(id, format!("transitivity broke on ({a},{b},{c})")));
        }
        // Strict initial parts come later in the order.
        if seqcode::is_proper_prefix(b, a) && seqcode::kb_compare(a, b) != Ordering::Less {
            return Ok(CriterionResult::fail(id, format!("prefix clause broke on ({a},{b})")));
        }
    }
    Ok(CriterionResult::pass(id, "trichotomy and transitivity on 10^4 seeded triples".into()))
}

// ---------------------------------------------------------------------------
// Criterion 3: stump order laws
// ---------------------------------------------------------------------------

fn stump_order_suite(seed: u64) -> Result<CriterionResult> {
    let id = "stump-order";
    let mut rng = rng_for(seed, 3);
    let pool: Vec<Stump> = (0..60).map(|_| random_stump(&mut rng, 4, 3)).collect();
    for i in 0..1000 {
        let s = &pool[rng.gen_range(0..pool.len())];
        let t = &pool[rng.gen_range(0..pool.len())];
        let r = &pool[rng.gen_range(0..pool.len())];
        if !stump::leq(s, s) || stump::lt(s, s) {
            return Ok(CriterionResult::fail(id, format!("reflexivity broke at {i}")));
        }
        if stump::lt(s, t) && !stump::leq(s, t) {
            return Ok(CriterionResult::fail(id, format!("lt-implies-leq broke at {i}")));
        }
        if stump::leq(s, t) && stump::lt(t, r) && !stump::lt(s, r) {
            return Ok(CriterionResult::fail(id, format!("leq-lt transitivity broke at {i}")));
        }
        if stump::lt(s, t) && stump::leq(t, r) && !stump::lt(s, r) {
            return Ok(CriterionResult::fail(id, format!("lt-leq transitivity broke at {i}")));
        }
        if stump::leq(s, t) && stump::leq(t, r) && !stump::leq(s, r) {
            return Ok(CriterionResult::fail(id, format!("leq transitivity broke at {i}")));
        }
    }
    Ok(CriterionResult::pass(id, "five order laws on 10^3 seeded triples".into()))
}

// ---------------------------------------------------------------------------
// Criterion 4: order agrees with embedding
// ---------------------------------------------------------------------------

fn embedding_suite(seed: u64) -> Result<CriterionResult> {
    let id = "embedding";
    let mut rng = rng_for(seed, 4);
    for i in 0..500 {
        let a = random_finite_stump(&mut rng, 12);
        let b = random_finite_stump(&mut rng, 12);
        let order = stump::leq(&a, &b);
        let table = stump::embeds(&a, &b)?;
        if order != table.is_some() {
            return Ok(CriterionResult::fail(
                id,
                format!("order/embedding disagree at {i}: {a:?} vs {b:?}"),
            ));
        }
        if let Some(table) = table {
            // The witness table is strictly monotone on prefix pairs.
            for (s1, i1) in &table {
                for (s2, i2) in &table {
                    if seqcode::is_proper_prefix(*s1, *s2)
                        && !seqcode::is_proper_prefix(*i1, *i2)
                    {
                        return Ok(CriterionResult::fail(
                            id,
                            format!("witness table not monotone at {i}"),
                        ));
                    }
                }
            }
        }
    }
    Ok(CriterionResult::pass(
        id,
        "order coincides with embedding existence on 500 seeded finite-branching pairs".into(),
    ))
}

// ---------------------------------------------------------------------------
// Criterion 5: natural sum laws
// ---------------------------------------------------------------------------

fn natural_sum_suite(seed: u64) -> Result<CriterionResult> {
    let id = "natural-sum";
    let mut rng = rng_for(seed, 5);
    for i in 0..200 {
        let a = random_stump(&mut rng, 3, 2);
        let b = random_stump(&mut rng, 3, 2);
        let c = random_stump(&mut rng, 3, 2);
        let ab = stump::natural_sum(&a, &b);
        // Child strict inequalities.
        if !a.is_empty() && !b.is_empty() {
            for child in a.child_representatives() {
                if !stump::lt(&stump::natural_sum(&child, &b), &ab) {
                    return Ok(CriterionResult::fail(id, format!("left child law broke at {i}")));
                }
            }
            for child in b.child_representatives() {
                if !stump::lt(&stump::natural_sum(&a, &child), &ab) {
                    return Ok(CriterionResult::fail(id, format!("right child law broke at {i}")));
                }
            }
        }
        // Commutativity and associativity as mutual order.
        let ba = stump::natural_sum(&b, &a);
        if !stump::mutually_le(&ab, &ba) {
            return Ok(CriterionResult::fail(id, format!("commutativity broke at {i}")));
        }
        let ab_c = stump::natural_sum(&ab, &c);
        let a_bc = stump::natural_sum(&a, &stump::natural_sum(&b, &c));
        if !stump::mutually_le(&ab_c, &a_bc) {
            return Ok(CriterionResult::fail(id, format!("associativity broke at {i}")));
        }
    }
    Ok(CriterionResult::pass(
        id,
        "child inequalities, commutativity and associativity on 200 seeded triples".into(),
    ))
}

// ---------------------------------------------------------------------------
// Criterion 6: hull laws
// ---------------------------------------------------------------------------

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

fn hull_suite(seed: u64) -> Result<CriterionResult> {
    let id = "hull";
    let mut rng = rng_for(seed, 6);
    let probes = small_lists(5, 3);
    for i in 0..200 {
        let s = random_stump(&mut rng, 3, 2);
        let h = stump::hull(&s);
        // Growth in the code sense.
        if !stump::subset(&s, &h) {
            return Ok(CriterionResult::fail(id, format!("hull growth broke at {i}")));
        }
        // The defining characterization on representation nodes to depth 5.
        for t in &probes {
            let expect = dominated(t).iter().any(|u| s.code_at(u) == 1);
            if (h.code_at(t) == 1) != expect {
                return Ok(CriterionResult::fail(
                    id,
                    format!("hull characterization broke at {i} on {t:?}"),
                ));
            }
        }
        // Hull output is hereditarily increasing.
        if !stump::is_hereditarily_increasing(&h) {
            return Ok(CriterionResult::fail(id, format!("hull output not increasing at {i}")));
        }
        // Union preserves the hereditarily increasing class.
        let s2 = random_stump(&mut rng, 3, 2);
        let h2 = stump::hull(&s2);
        if !stump::is_hereditarily_increasing(&stump::tree_union(&h, &h2)) {
            return Ok(CriterionResult::fail(id, format!("union of hulls not increasing at {i}")));
        }
    }
    Ok(CriterionResult::pass(
        id,
        "hull growth, characterization to depth 5, hereditary increase, union closure on 200 seeded stumps".into(),
    ))
}

// ---------------------------------------------------------------------------
// Criterion 7: iterated derivative implications
// ---------------------------------------------------------------------------

fn cb_suite(seed: u64) -> Result<CriterionResult> {
    let id = "cb-derivative";
    let mut rng = rng_for(seed, 7);
    let pool: Vec<Stump> = (0..40).map(|_| random_stump(&mut rng, 3, 2)).collect();
    let closures: Vec<RegularTree> = pool
        .iter()
        .map(|s| PointEnumeration { family: CbFamily::Cb, stump: s.clone() }.closure())
        .collect();
    for (i, sigma) in pool.iter().enumerate() {
        for tau in pool.iter() {
            let derived = closures[i].der(tau);
            if stump::leq(sigma, tau) && !derived.is_empty() {
                return Ok(CriterionResult::fail(
                    id,
                    format!("expected empty derivative for {sigma:?} under {tau:?}"),
                ));
            }
            if stump::lt(tau, sigma) && !derived.point_member(&[], &[0]) {
                return Ok(CriterionResult::fail(
                    id,
                    format!("zero point missing from derivative of {sigma:?} under {tau:?}"),
                ));
            }
        }
    }
    // Spot anchors.
    let one = Stump::one_star();
    let cb_one = PointEnumeration { family: CbFamily::Cb, stump: one.clone() }.closure();
    if !cb_one.der(&one).is_empty() {
        return Ok(CriterionResult::fail(id, "anchor: derivative of the one-star set not empty".into()));
    }
    let s_one = Stump::successor(&one);
    let cb_s = PointEnumeration { family: CbFamily::Cb, stump: s_one }.closure();
    if !cb_s.der(&one).point_member(&[], &[0]) {
        return Ok(CriterionResult::fail(id, "anchor: zero point missing after one derivative".into()));
    }
    Ok(CriterionResult::pass(
        id,
        "derivative implications on all ordered pairs from a 40-stump pool, plus spot anchors".into(),
    ))
}

// ---------------------------------------------------------------------------
// Criterion 8: fan realizer
// ---------------------------------------------------------------------------

fn fan_suite() -> Result<CriterionResult> {
    let id = "fan-realizer";
    let bar5 = StreamSpec::length_at_least(5);
    let out = RegularTree::cantor().bar_extract(&bar5, 16)?;
    if out.len() != 32 {
        return Ok(CriterionResult::fail(id, format!("expected 32 extracted codes, got {}", out.len())));
    }
    let closure = PointEnumeration { family: CbFamily::CbStar, stump: Stump::one_star() }.closure();
    let bar2 = StreamSpec::length_at_least(2);
    let mut got = closure.bar_extract(&bar2, 16)?;
    got.sort_unstable();
    let mut expect = vec![
        seqcode::encode(&[0, 0])?,
        seqcode::encode(&[0, 1])?,
        seqcode::encode(&[1, 0])?,
    ];
    expect.sort_unstable();
    if got != expect {
        return Ok(CriterionResult::fail(id, format!("closure bar mismatch: {got:?}")));
    }
    Ok(CriterionResult::pass(
        id,
        "binary fan extracts 32 codes at depth 5; the special closure extracts its three depth-2 nodes".into(),
    ))
}

// ---------------------------------------------------------------------------
// Criterion 9: the canonical binary bars
// ---------------------------------------------------------------------------

fn bar01_suite() -> Result<CriterionResult> {
    let id = "bar01";
    for n in 0..=10u64 {
        let bar = bar01(n)?;
        if bar.len() as u64 != n + 1 {
            return Ok(CriterionResult::fail(id, format!("bar01({n}) has {} elements", bar.len())));
        }
        for (i, &a) in bar.iter().enumerate() {
            for &b in &bar[i + 1..] {
                if !seqcode::incompatible(a, b) {
                    return Ok(CriterionResult::fail(id, format!("bar01({n}) is not thin")));
                }
            }
        }
        for word in kernel::binary_nodes(n + 1) {
            let code = seqcode::encode(&word)?;
            let hits = bar.iter().filter(|&&b| seqcode::is_prefix(b, code)).count();
            if hits != 1 {
                return Ok(CriterionResult::fail(
                    id,
                    format!("binary word {word:?} extends {hits} elements of bar01({n})"),
                ));
            }
        }
    }
    Ok(CriterionResult::pass(id, "thinness and exact cover for the first eleven bars".into()))
}

// ---------------------------------------------------------------------------
// Criterion 10: reduction witness round trips
// ---------------------------------------------------------------------------

struct Outcome {
    checked: u64,
}

fn expect(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::domain(format!("check failed: {what}")))
    }
}

fn verdict_holds(v: &Verdict, what: &str) -> Result<()> {
    match v {
        Verdict::Holds { .. } => Ok(()),
        other => Err(Error::domain(format!("{what}: expected holds, got {other:?}"))),
    }
}

fn verdict_fails(v: &Verdict, what: &str) -> Result<()> {
    match v {
        Verdict::Fails { .. } => Ok(()),
        other => Err(Error::domain(format!("{what}: expected fails, got {other:?}"))),
    }
}

/// Checks the output stream stays zero along a point's prefixes.
fn admits_to_depth(out: &StreamSpec, point: &StreamSpec, depth: u64, fuel: u64) -> Result<()> {
    for n in 0..=depth {
        let node = point.values(n, fuel)?;
        let v = out.node_value(&node, fuel)?;
        if v != 0 {
            return Err(Error::domain(format!("output forbids the witness at depth {n}")));
        }
    }
    Ok(())
}

fn points_agree(a: &StreamSpec, b: &StreamSpec, depth: u64, fuel: u64) -> Result<()> {
    for n in 0..depth {
        let va = a.eval(n, fuel)?;
        let vb = b.eval(n, fuel)?;
        if va != vb {
            return Err(Error::domain(format!("points disagree at {n}: {va} vs {vb}")));
        }
    }
    Ok(())
}

fn roundtrip_one(name: ReductionName, rng: &mut StdRng) -> Result<Outcome> {
    use ReductionName::*;
    let fuel: u64 = 12;
    let mut checked = 0u64;
    match name {
        Sigma11ToE11 | StrongReduceToE11 => {
            // Positive: planted pair path. The section through the left part
            // admits the right part.
            let d = random_tree(rng, 4, 3);
            let delta = random_member(rng, &d);
            let alpha = delta.stride(0, 2).to_stream();
            let beta = delta.stride(1, 2).to_stream();
            let r = build(name, Params::Tree(d.clone()))?;
            let w = transport_witness(&r, Direction::Forward, &alpha, &Witness::Point(beta.clone()), fuel)?;
            let out = apply_reduction(&r, &alpha);
            verdict_holds(&check_membership(&NamedSet::E11, &out, fuel)?, "section path")?;
            transport_witness(&r, Direction::Backward, &alpha, &w, fuel)?;
            checked += 1;
            // Negative: a well-founded pair tree gives a well-founded section.
            let wf = random_well_founded(rng, 4, 2);
            let r2 = build(name, Params::Tree(wf))?;
            let alpha2 = random_point(rng, 2).to_stream();
            let out2 = apply_reduction(&r2, &alpha2);
            verdict_fails(&check_membership(&NamedSet::E11, &out2, fuel)?, "well-founded section")?;
            checked += 1;
        }
        Pi11ToA11 => {
            // Positive: well-founded pair tree, any point is in the universal
            // projection; the section code is total.
            let wf = random_well_founded(rng, 4, 2);
            let r = build(name, Params::Tree(wf))?;
            let alpha = random_point(rng, 2).to_stream();
            let out = apply_reduction(&r, &alpha);
            verdict_holds(&check_membership(&NamedSet::A11, &out, fuel)?, "total section")?;
            checked += 1;
            // Negative: a planted pair path refutes totality.
            let d = random_tree(rng, 4, 3);
            let delta = random_member(rng, &d);
            let alpha2 = delta.stride(0, 2).to_stream();
            let beta2 = delta.stride(1, 2).to_stream();
            let r2 = build(name, Params::Tree(d))?;
            transport_witness(&r2, Direction::Forward, &alpha2, &Witness::Point(beta2), fuel)?;
            let out2 = apply_reduction(&r2, &alpha2);
            verdict_fails(&check_membership(&NamedSet::A11, &out2, fuel)?, "refuted section")?;
            checked += 1;
        }
        AnalyticUnion => {
            let k = rng.gen_range(1..=3usize);
            let trees: Vec<RegularTree> = (0..k).map(|_| random_tree(rng, 3, 2)).collect();
            let i = rng.gen_range(0..k) as u64;
            let zeta = random_member(rng, &trees[i as usize]).to_stream();
            let r = build(name, Params::Trees(trees.clone()))?;
            let w = transport_witness(
                &r,
                Direction::Forward,
                &StreamSpec::zero(),
                &Witness::Indexed { index: i, point: zeta },
                fuel,
            )?;
            let mu = match &w {
                Witness::Point(p) => p.clone(),
                _ => return Err(Error::domain("expected a point witness")),
            };
            admits_to_depth(&r.forward.0, &mu, fuel, fuel)?;
            // Backward recovers the branch and a pair path in it.
            let back = transport_witness(&r, Direction::Backward, &StreamSpec::zero(), &w, fuel)?;
            match back {
                Witness::Indexed { index, point } => {
                    expect(index % k as u64 == i, "recovered branch index")?;
                    let tree = &trees[(index % k as u64) as usize];
                    for n in 0..=fuel {
                        expect(
                            tree.node_member_moves(&point.values(n, fuel)?),
                            "recovered pair path admitted",
                        )?;
                    }
                }
                _ => return Err(Error::domain("expected an indexed witness")),
            }
            checked += 1;
        }
        AnalyticIntersection | CoanalyticIntersection => {
            let k = rng.gen_range(1..=2usize);
            let left = random_tree(rng, 3, 2);
            let rights: Vec<RegularTree> = (0..k).map(|_| random_tree(rng, 3, 2)).collect();
            let trees: Vec<RegularTree> = rights.iter().map(|r| pair_tree(&left, r)).collect();
            if trees.iter().any(|t| t.is_empty()) {
                return Err(Error::domain("degenerate pair tree"));
            }
            let xi = random_member(rng, &left).to_stream();
            let rhos: Vec<StreamSpec> = rights
                .iter()
                .map(|t| random_member(rng, t).to_stream())
                .collect();
            let mut parts = vec![xi];
            parts.extend(rhos);
            let bundle = StreamSpec::kernel(Kernel::SubseqBundle {
                parts,
                rest: Box::new(StreamSpec::zero()),
                at_zero: 0,
            });
            let r = build(name, Params::Trees(trees))?;
            let w = transport_witness(&r, Direction::Forward, &StreamSpec::zero(), &Witness::Point(bundle), fuel)?;
            let mu = match &w {
                Witness::Point(p) => p.clone(),
                _ => unreachable!(),
            };
            // For the closed intersection the witness stays admitted; for the
            // open intersection the code must never fire along it.
            admits_to_depth(&r.forward.0, &mu, fuel, fuel)?;
            checked += 1;
        }
        SouslinCode => {
            let left = random_tree(rng, 3, 2);
            let right = random_tree(rng, 3, 2);
            let p = pair_tree(&left, &right);
            if p.is_empty() {
                return Err(Error::domain("degenerate pair tree"));
            }
            let r = build(name, Params::Trees(vec![p.clone()]))?;
            let alpha = random_member(rng, &left).to_stream();
            let rho = random_member(rng, &right).to_stream();
            // Branch point zero, the same path along every level.
            let g = StreamSpec::kernel(Kernel::SubseqBundle {
                parts: vec![
                    StreamSpec::zero(),
                    StreamSpec::kernel(Kernel::SubseqBundle {
                        parts: vec![],
                        rest: Box::new(rho),
                        at_zero: 0,
                    }),
                ],
                rest: Box::new(StreamSpec::zero()),
                at_zero: 0,
            });
            let w = transport_witness(&r, Direction::Forward, &alpha, &Witness::Point(g), fuel)?;
            let pair_point = match &w {
                Witness::Point(p) => p.clone(),
                _ => unreachable!(),
            };
            admits_to_depth(&r.forward.0, &pair_point, fuel, fuel)?;
            checked += 1;
        }
        E11ToShareInf | A11ToSinkAlmostFin => {
            let fuel = 24;
            // Negative-for-sink / positive-for-share: a planted path.
            let t = random_tree(rng, 4, 3);
            let path = random_member(rng, &t);
            let alpha = StreamSpec::TreeChar(Arc::new(t.clone()));
            let r = build(name, Params::None)?;
            let w = transport_witness(&r, Direction::Forward, &alpha, &Witness::Point(path.to_stream()), fuel)?;
            let eps = match &w {
                Witness::Point(p) => p.clone(),
                _ => unreachable!(),
            };
            verdict_holds(&check_membership(&NamedSet::Inf, &eps, fuel)?, "planted point is infinite")?;
            let out = apply_reduction(&r, &alpha);
            admits_to_depth(&out, &eps, fuel, fuel)?;
            let back = transport_witness(&r, Direction::Backward, &alpha, &w, fuel)?;
            match back {
                Witness::Point(b) => points_agree(&b, &path.to_stream(), 8, fuel)?,
                _ => unreachable!(),
            }
            verdict_fails(
                &check_membership(&NamedSet::SinkAlmostFin, &out, fuel)?,
                "planted output does not sink",
            )?;
            checked += 1;
            // Positive sink: a well-founded base.
            let wf = random_well_founded(rng, 4, 2);
            let alpha2 = StreamSpec::TreeChar(Arc::new(wf));
            let out2 = apply_reduction(&r, &alpha2);
            verdict_holds(
                &check_membership(&NamedSet::SinkAlmostFin, &out2, fuel)?,
                "well-founded base sinks",
            )?;
            checked += 1;
        }
        E11ToUnc => {
            let fuel = 5;
            let t = random_tree(rng, 3, 2);
            let path = random_member(rng, &t);
            let alpha = StreamSpec::TreeChar(Arc::new(t.clone()));
            let r = build(name, Params::None)?;
            let w = transport_witness(&r, Direction::Forward, &alpha, &Witness::Point(path.to_stream()), fuel)?;
            let ladder = match &w {
                Witness::Point(p) => p.clone(),
                _ => unreachable!(),
            };
            let out = apply_reduction(&r, &alpha);
            admits_to_depth(&out, &ladder, fuel, 12)?;
            // And its sibling (+2 flavor) is also admitted: the split pair.
            let sibling = StreamSpec::kernel(Kernel::PrefixCodeLadder {
                prefix: path.prefix.clone(),
                cycle: path.cycle.clone(),
                offset: 2,
            });
            admits_to_depth(&out, &sibling, fuel, 12)?;
            let back = transport_witness(&r, Direction::Backward, &alpha, &w, fuel)?;
            match back {
                Witness::Node(node) => {
                    expect(t.node_member_moves(&node), "recovered node admitted")?;
                    expect(node == path.values(node.len() as u64), "recovered node on the path")?;
                }
                _ => unreachable!(),
            }
            checked += 1;
        }
        A11ToSinkFin => {
            let r = build(name, Params::None)?;
            // Positive: well-founded base sinks.
            let wf = random_well_founded(rng, 4, 2);
            let alpha = StreamSpec::TreeChar(Arc::new(wf));
            let out = apply_reduction(&r, &alpha);
            verdict_holds(&check_membership(&NamedSet::SinkFin, &out, fuel)?, "well-founded base sinks")?;
            checked += 1;
            // Negative: a planted path gives a persistent member.
            let t = random_tree(rng, 4, 3);
            let path = random_member(rng, &t);
            let alpha2 = StreamSpec::TreeChar(Arc::new(t.clone()));
            let w = transport_witness(&r, Direction::Forward, &alpha2, &Witness::Point(path.to_stream()), fuel)?;
            let member = match &w {
                Witness::Point(p) => p.clone(),
                _ => unreachable!(),
            };
            let out2 = apply_reduction(&r, &alpha2);
            admits_to_depth(&out2, &member, fuel, fuel)?;
            verdict_fails(&check_membership(&NamedSet::Fin, &member, fuel)?, "woven member is not finitary")?;
            verdict_fails(&check_membership(&NamedSet::SinkFin, &out2, fuel)?, "planted output does not sink")?;
            let back = transport_witness(&r, Direction::Backward, &alpha2, &w, fuel)?;
            match back {
                Witness::Point(b) => points_agree(&b, &path.to_stream(), 8, fuel)?,
                _ => unreachable!(),
            }
            checked += 1;
        }
        FinSink01Pair => {
            let r = build(name, Params::None)?;
            // Finitary point: the support fan sinks.
            let pre: Vec<u64> = (0..rng.gen_range(0..4)).map(|_| rng.gen_range(0..2)).collect();
            let fin = StreamSpec::ev_periodic(pre, vec![0]);
            let out = apply_reduction(&r, &fin);
            verdict_holds(&check_membership(&NamedSet::SinkFin, &out, fuel)?, "finitary support sinks")?;
            checked += 1;
            // Infinite point: it does not.
            let inf = StreamSpec::ev_periodic(vec![], vec![rng.gen_range(0..2), 1]);
            let out2 = apply_reduction(&r, &inf);
            verdict_fails(&check_membership(&NamedSet::SinkFin, &out2, fuel)?, "infinite support does not sink")?;
            checked += 1;
            // Companion: a subfan code maps to a finitary point exactly when
            // it sinks.
            let base = match as_tree(&out) {
                Some(t) => t,
                None => return Err(Error::domain("support fan not extractable")),
            };
            let width_point = fan_width_point(&base)?;
            verdict_holds(&check_membership(&NamedSet::Fin, &width_point.to_stream(), fuel)?, "width point finitary")?;
            let companion = &r.companions[0].1;
            let applied = companion.apply(&StreamSpec::TreeChar(Arc::new(base)));
            points_agree(&applied, &width_point.to_stream(), 8, 30)?;
            checked += 1;
        }
        A11ToE11Bang => {
            let r = build(name, Params::None)?;
            // Positive: a well-founded code leaves only the zero ray.
            let wf = random_well_founded(rng, 4, 2);
            let alpha = StreamSpec::TreeChar(Arc::new(wf));
            let out = apply_reduction(&r, &alpha);
            let v = check_membership(&NamedSet::E11Bang, &out, fuel)?;
            verdict_holds(&v, "well-founded base leaves a unique path")?;
            match v {
                Verdict::Holds { witness: Some(crate::check::WitnessOut::Path(p)) } => {
                    expect(p.values(6) == vec![0; 6], "unique path is the zero ray")?;
                }
                _ => return Err(Error::domain("missing path witness")),
            }
            checked += 1;
            // Negative: a planted path gives a second path.
            let t = random_tree(rng, 4, 3);
            let path = random_member(rng, &t);
            let alpha2 = StreamSpec::TreeChar(Arc::new(t.clone()));
            let w = transport_witness(&r, Direction::Forward, &alpha2, &Witness::Point(path.to_stream()), fuel)?;
            let second = match &w {
                Witness::Point(p) => p.clone(),
                _ => unreachable!(),
            };
            let out2 = apply_reduction(&r, &alpha2);
            admits_to_depth(&out2, &second, fuel, fuel)?;
            verdict_fails(&check_membership(&NamedSet::E11Bang, &out2, fuel)?, "two paths")?;
            let back = transport_witness(&r, Direction::Backward, &alpha2, &w, fuel)?;
            match back {
                Witness::Point(b) => points_agree(&b, &path.to_stream(), 8, fuel)?,
                _ => unreachable!(),
            }
            checked += 1;
        }
        E2BangChain => {
            let r = build(name, Params::None)?;
            // Main map: a total-sections bundle gains a unique vanishing
            // section at slot 0.
            let k = rng.gen_range(1..=3usize);
            let parts: Vec<StreamSpec> = (0..k)
                .map(|_| {
                    let mut p = random_point(rng, 2);
                    p.cycle = vec![rng.gen_range(1..=2)];
                    p.to_stream()
                })
                .collect();
            let alpha = StreamSpec::kernel(Kernel::SubseqBundle {
                parts,
                rest: Box::new(StreamSpec::Const(1)),
                at_zero: 0,
            });
            verdict_holds(&check_membership(&NamedSet::A2, &alpha, fuel)?, "source in the total-sections set")?;
            let out = apply_reduction(&r, &alpha);
            // Section 0 vanishes; sections 1..k+1 keep a nonzero value.
            let s0 = StreamSpec::subseq(out.clone(), 0);
            for n in 0..fuel {
                expect(s0.eval(n, fuel)? == 0, "shifted-in section vanishes")?;
            }
            for m in 1..=(k as u64 + 1) {
                let sm = StreamSpec::subseq(out.clone(), m);
                let mut nonzero = false;
                for n in 0..fuel {
                    if sm.eval(n, fuel)? != 0 {
                        nonzero = true;
                        break;
                    }
                }
                expect(nonzero, "shifted sections keep their values")?;
            }
            checked += 1;
            // Chain tail: constant rays turn a unique-vanishing bundle into a
            // unique path.
            let zero_at = rng.gen_range(0..3u64);
            let mut parts2: Vec<StreamSpec> = Vec::new();
            for m in 0..3u64 {
                if m == zero_at {
                    parts2.push(StreamSpec::zero());
                } else {
                    parts2.push(StreamSpec::ev_periodic(
                        vec![0; rng.gen_range(0..3) as usize],
                        vec![1],
                    ));
                }
            }
            let bundle = StreamSpec::kernel(Kernel::SubseqBundle {
                parts: parts2,
                rest: Box::new(StreamSpec::Const(1)),
                at_zero: 0,
            });
            verdict_holds(&check_membership(&NamedSet::E2Bang, &bundle, fuel)?, "unique vanishing section")?;
            let rays = &r.companions[1].1;
            let out2 = rays.apply(&bundle);
            let v = check_membership(&NamedSet::E11Bang, &out2, fuel)?;
            verdict_holds(&v, "constant rays leave a unique path")?;
            match v {
                Verdict::Holds { witness: Some(crate::check::WitnessOut::Path(p)) } => {
                    expect(
                        p.values(4) == vec![zero_at; 4],
                        "unique path is the vanishing ray",
                    )?;
                }
                _ => return Err(Error::domain("missing path witness")),
            }
            checked += 1;
        }
        E2BangSurjection => {
            let fuel = 30;
            let r = build(name, Params::None)?;
            let d = rng.gen_range(0..3u64);
            let mut parts: Vec<StreamSpec> = Vec::new();
            // Subsequence 0 carries the target index at 0 and ladder codes.
            let mut head = vec![d];
            head.extend((0..3).map(|_| rng.gen_range(0..6)));
            parts.push(StreamSpec::ev_periodic(head, vec![1]));
            for _ in 0..3 {
                parts.push(random_point(rng, 2).to_stream());
            }
            let alpha = StreamSpec::kernel(Kernel::SubseqBundle {
                parts,
                rest: Box::new(StreamSpec::Const(1)),
                at_zero: 0,
            });
            let out = apply_reduction(&r, &alpha);
            let sd = StreamSpec::subseq(out.clone(), d);
            for n in 0..8 {
                expect(sd.eval(n, fuel)? == 0, "chosen section vanishes")?;
            }
            for m in 0..4u64 {
                if m == d {
                    continue;
                }
                let sm = StreamSpec::subseq(out.clone(), m);
                let mut nonzero = false;
                for n in 0..12 {
                    if sm.eval(n, fuel)? != 0 {
                        nonzero = true;
                        break;
                    }
                }
                expect(nonzero, "other sections carry their peak")?;
            }
            checked += 1;
            // Strong injectivity on a planted apartness at the copied head.
            let alpha2 = StreamSpec::kernel(Kernel::Prepend {
                prefix: vec![alpha.eval(0, fuel)? + 1],
                tail: Box::new(StreamSpec::kernel(Kernel::Drop {
                    a: Box::new(alpha.clone()),
                    count: 1,
                })),
            });
            let out2 = apply_reduction(&r, &alpha2);
            expect(
                out.apart(&out2, 4, fuel)?.is_some(),
                "apart inputs give apart outputs",
            )?;
            checked += 1;
        }
        ShareSingleton => {
            let r = build(name, Params::None)?;
            let alpha = random_point(rng, 3);
            let out = apply_reduction(&r, &alpha.to_stream());
            let single = RegularTree::single_path(&alpha.prefix, &alpha.cycle);
            verdict_holds(
                &check_membership(&NamedSet::ShareOf { tree: single }, &out, fuel)?,
                "singleton shares with itself",
            )?;
            let w = transport_witness(&r, Direction::Forward, &alpha.to_stream(), &Witness::Point(alpha.to_stream()), fuel)?;
            match &w {
                Witness::Point(p) => admits_to_depth(&out, p, fuel, fuel)?,
                _ => unreachable!(),
            }
            transport_witness(&r, Direction::Backward, &alpha.to_stream(), &w, fuel)?;
            // An apart candidate is rejected.
            let mut other = alpha.clone();
            other.prefix.insert(0, alpha.value(0) + 1);
            let bad = transport_witness(
                &r,
                Direction::Backward,
                &alpha.to_stream(),
                &Witness::Point(other.to_stream()),
                fuel,
            );
            expect(bad.is_err(), "apart candidate rejected")?;
            checked += 1;
        }
        ShareSumIso => {
            let width = rng.gen_range(1..=3u64);
            let family: Vec<RegularTree> = (0..width).map(|_| random_tree(rng, 3, 2)).collect();
            // The planted form: each family member under its spine node.
            let planted = planted_family_tree(&family);
            let r = build(name, Params::Width(width))?;
            let i = rng.gen_range(0..width);
            let x = random_member(rng, &family[i as usize]);
            let mut member_prefix = vec![0u64; i as usize];
            member_prefix.push(1);
            member_prefix.extend(&x.prefix);
            let member = InfinitePath { prefix: member_prefix, cycle: x.cycle.clone() };
            let alpha = StreamSpec::TreeChar(Arc::new(planted.clone()));
            let w = transport_witness(&r, Direction::Forward, &alpha, &Witness::Point(member.to_stream()), fuel)?;
            let out = apply_reduction(&r, &alpha);
            match &w {
                Witness::Point(p) => {
                    admits_to_depth(&out, p, fuel, fuel)?;
                    expect(p.eval(0, fuel)? == i, "collapsed member selects its branch")?;
                }
                _ => unreachable!(),
            }
            // Expansion goes the other way.
            let branch = branch_family_tree(&family);
            let beta = StreamSpec::TreeChar(Arc::new(branch));
            let expanded = r.companions[0].1.apply(&beta);
            admits_to_depth(&expanded, &member.to_stream(), fuel, fuel)?;
            let back = transport_witness(&r, Direction::Backward, &alpha, &w, fuel)?;
            match back {
                Witness::Point(b) => points_agree(&b, &member.to_stream(), 8, fuel)?,
                _ => unreachable!(),
            }
            checked += 1;
        }
        PerfectToInjection => {
            let fuel = 8;
            let p = loop {
                let k = random_tree(rng, 4, 2).perfect_kernel();
                if !k.is_empty() {
                    break k;
                }
            };
            let r = build(name, Params::Tree(p.clone()))?;
            let b = {
                let mut pt = random_point(rng, 1);
                pt.cycle = vec![rng.gen_range(0..2)];
                pt
            };
            let w = transport_witness(&r, Direction::Forward, &b.to_stream(), &Witness::Point(b.to_stream()), fuel)?;
            let image = match &w {
                Witness::Point(p) => p.clone(),
                _ => unreachable!(),
            };
            for n in 0..=fuel {
                expect(p.node_member_moves(&image.values(n, fuel)?), "image admitted by the perfect tree")?;
            }
            // Strong injectivity: flip one input bit.
            let mut flipped = b.clone();
            flipped.prefix = b.values(3);
            flipped.prefix[2] = 1 - flipped.prefix[2];
            let image2 = apply_reduction(&r, &flipped.to_stream());
            expect(
                image.apart(&image2, 40, fuel)?.is_some(),
                "apart binary inputs give apart images",
            )?;
            checked += 1;
        }
        InjectionRangeCode => {
            let fuel = 10;
            // A simple strongly injective map: prepend a random prefix.
            let prefix: Vec<u64> = (0..rng.gen_range(0..3)).map(|_| rng.gen_range(0..2)).collect();
            let gamma = prepend_code(&prefix);
            let r = build(name, Params::Stream(gamma.clone()))?;
            let b = {
                let mut pt = random_point(rng, 1);
                pt.cycle = vec![rng.gen_range(0..2)];
                pt
            };
            let w = transport_witness(&r, Direction::Forward, &b.to_stream(), &Witness::Point(b.to_stream()), fuel)?;
            let node = match &w {
                Witness::Node(n) => n.clone(),
                _ => unreachable!(),
            };
            expect(
                r.forward.0.node_value(&node, fuel)? == 0,
                "image node carried by the range code",
            )?;
            // Backward: recover the preimage prefix of the actual image point.
            let eps = StreamSpec::kernel(Kernel::Prepend {
                prefix: prefix.clone(),
                tail: Box::new(b.to_stream()),
            });
            let back = transport_witness(&r, Direction::Backward, &b.to_stream(), &Witness::Point(eps), fuel)?;
            match back {
                Witness::Node(n) => expect(n == b.values(n.len() as u64), "recovered preimage prefix")?,
                _ => unreachable!(),
            }
            checked += 1;
        }
        FanSurjection => {
            let fuel = 16;
            let fan = random_fan(rng, 3, 2);
            let r = build(name, Params::Tree(fan.clone()))?;
            let member = random_member(rng, &fan);
            let back = transport_witness(&r, Direction::Backward, &StreamSpec::zero(), &Witness::Point(member.to_stream()), fuel)?;
            let preimage = match &back {
                Witness::Point(p) => p.clone(),
                _ => unreachable!(),
            };
            let w = transport_witness(&r, Direction::Forward, &StreamSpec::zero(), &back, fuel)?;
            match &w {
                Witness::Point(image) => points_agree(image, &member.to_stream(), fuel, 60)?,
                _ => unreachable!(),
            }
            // The preimage is binary.
            for n in 0..fuel {
                expect(preimage.eval(n, fuel)? <= 1, "preimage is binary")?;
            }
            checked += 1;
        }
        FanShareReduction => {
            let fan = random_fan(rng, 3, 2);
            let r = build(name, Params::Tree(fan.clone()))?;
            // Positive: the base is the singleton of a fan member.
            let member = random_member(rng, &fan.prune());
            let base = RegularTree::single_path(&member.prefix, &member.cycle);
            let beta = StreamSpec::TreeChar(Arc::new(base));
            let out = apply_reduction(&r, &beta);
            let w = transport_witness(&r, Direction::Forward, &beta, &Witness::Point(member.to_stream()), fuel)?;
            match &w {
                Witness::Point(b) => admits_to_depth(&out, b, fuel, 40)?,
                _ => unreachable!(),
            }
            verdict_holds(
                &check_membership(&NamedSet::ShareOf { tree: RegularTree::cantor() }, &out, fuel)?,
                "reduced code shares with the binary tree",
            )?;
            let back = transport_witness(&r, Direction::Backward, &beta, &w, fuel)?;
            match back {
                Witness::Point(img) => points_agree(&img, &member.to_stream(), 8, 60)?,
                _ => unreachable!(),
            }
            checked += 1;
            // Negative: a base disjoint from the fan.
            let outside = RegularTree::single_path(&[9], &[9]);
            let beta2 = StreamSpec::TreeChar(Arc::new(outside));
            let out2 = apply_reduction(&r, &beta2);
            verdict_fails(
                &check_membership(&NamedSet::ShareOf { tree: RegularTree::cantor() }, &out2, fuel)?,
                "disjoint base yields an empty code",
            )?;
            checked += 1;
        }
        RangeEnumeration => {
            let fuel = 10;
            let fan = random_fan(rng, 3, 2);
            let gamma = StreamSpec::kernel(Kernel::FanBlocks { fan: Arc::new(fan) });
            let r = build(name, Params::Stream(gamma.clone()))?;
            let b = {
                let mut pt = random_point(rng, 1);
                pt.cycle = vec![rng.gen_range(0..2)];
                pt
            };
            let w = transport_witness(&r, Direction::Forward, &b.to_stream(), &Witness::Point(b.to_stream()), fuel)?;
            match w {
                Witness::Indexed { index, .. } => {
                    let v = r.forward.0.eval(index, 40)?;
                    expect(v > 0, "enumeration hits the image node")?;
                    // The enumerated node is a genuine image prefix.
                    let f = Functional(gamma);
                    let node = seqcode::decode(v - 1);
                    let image = f.finite_apply_moves(&b.values(fuel), 40)?;
                    expect(
                        image.len() >= node.len() && image[..node.len()] == node[..],
                        "enumerated node on the image",
                    )?;
                }
                _ => unreachable!(),
            }
            checked += 1;
        }
        EnumerationToSurjection => {
            let fuel = 6;
            let tree = random_fan(rng, 3, 2);
            let delta = StreamSpec::kernel(Kernel::TreeNodeEnum { tree: Arc::new(tree.clone()) });
            let r = build(name, Params::Stream(delta))?;
            let x = random_point(rng, 3).to_stream();
            let w = transport_witness(&r, Direction::Forward, &x, &Witness::Point(x.clone()), fuel)?;
            match &w {
                Witness::Point(out) => {
                    for n in 0..=fuel {
                        expect(
                            tree.node_member_moves(&out.values(n, fuel)?),
                            "surjection lands in the tree",
                        )?;
                    }
                }
                _ => unreachable!(),
            }
            checked += 1;
        }
        StrictDisjunctionConjunction => {
            let fans: Vec<RegularTree> = (0..2).map(|_| random_fan(rng, 3, 2)).collect();
            let codes: Vec<StreamSpec> = fans
                .iter()
                .map(|f| StreamSpec::kernel(Kernel::FanBlocks { fan: Arc::new(f.clone()) }))
                .collect();
            let r = build(name, Params::Streams(codes.clone()))?;
            let i = rng.gen_range(0..2u64);
            let preimage = {
                let mut pt = random_point(rng, 1);
                pt.cycle = vec![rng.gen_range(0..2)];
                pt
            };
            // Bundle whose section i is the chosen preimage.
            let body = StreamSpec::kernel(Kernel::SubseqBundle {
                parts: vec![preimage.to_stream(), preimage.to_stream()],
                rest: Box::new(StreamSpec::zero()),
                at_zero: 0,
            });
            let w = transport_witness(
                &r,
                Direction::Forward,
                &StreamSpec::zero(),
                &Witness::Indexed { index: i, point: body.clone() },
                fuel,
            )?;
            match &w {
                Witness::Point(out) => {
                    // Section i of the output is the fan image of section i.
                    let expected = Functional(codes[i as usize].clone())
                        .apply(&StreamSpec::subseq(body.clone(), i));
                    points_agree(
                        &StreamSpec::subseq(out.clone(), i),
                        &expected,
                        6,
                        60,
                    )?;
                }
                _ => unreachable!(),
            }
            // Conjunction companion: every section runs through its code.
            let conj = &r.companions[0].1;
            let out2 = conj.apply(&body);
            for m in 0..2u64 {
                let expected = Functional(codes[m as usize].clone())
                    .apply(&StreamSpec::subseq(body.clone(), m));
                points_agree(&StreamSpec::subseq(out2.clone(), m), &expected, 6, 60)?;
            }
            checked += 1;
        }
        StrictProjection => {
            let fan = random_fan(rng, 3, 2);
            let gamma = StreamSpec::kernel(Kernel::FanBlocks { fan: Arc::new(fan) });
            let r = build(name, Params::Stream(gamma.clone()))?;
            let b = {
                let mut pt = random_point(rng, 1);
                pt.cycle = vec![rng.gen_range(0..2)];
                pt
            };
            let w = transport_witness(&r, Direction::Forward, &b.to_stream(), &Witness::Point(b.to_stream()), fuel)?;
            match &w {
                Witness::Point(out) => {
                    let full = Functional(gamma).apply(&b.to_stream());
                    let first = StreamSpec::subseq(full, 0);
                    points_agree(out, &first, 6, 60)?;
                }
                _ => unreachable!(),
            }
            checked += 1;
        }
        FixedPoint => {
            let gamma = StreamSpec::kernel(Kernel::Identity);
            let alpha = reductions::fixed_point(&gamma);
            let beta = random_point(rng, 2).to_stream();
            for d in [2u64, 4, 6] {
                let (lhs, rhs) = kernel::fixed_point_forbids(&gamma, &alpha, &beta, d, 20)?;
                expect(lhs == rhs, "depth-matched forbids equivalence")?;
            }
            checked += 1;
        }
        Diagonal => {
            // A constant family: the diagonal exceeds its value by one.
            let value = {
                let mut pt = random_point(rng, 3);
                pt.cycle = vec![rng.gen_range(1..4)];
                pt
            };
            let gamma = StreamSpec::kernel(Kernel::ConstCode {
                value: Box::new(value.to_stream()),
            });
            let r = build(name, Params::Stream(gamma.clone()))?;
            let beta = random_point(rng, 2).to_stream();
            let diag = Functional(r.forward.0.clone());
            let got = diag.eval_at(&beta, 20)?;
            // (γ|β)(β) for the constant family is the value stream applied to β.
            let inner = Functional(value.to_stream()).eval_at(&beta, 20)?;
            expect(got == inner + 1, "diagonal exceeds the family value by one")?;
            // Apartness from the family member at some index.
            let member = value.to_stream();
            let mut found = false;
            for n in 0..200u64 {
                if r.forward.0.eval(n, 20)? != member.eval(n, 20)? {
                    found = true;
                    break;
                }
            }
            expect(found, "diagonal apart from the family member")?;
            checked += 1;
        }
        Boundedness => {
            // A constant family over a finite tree: every admitted node
            // embeds.
            let wf = random_well_founded(rng, 3, 2);
            let x = StreamSpec::TreeChar(Arc::new(wf.clone()));
            let gamma = StreamSpec::kernel(Kernel::ConstCode { value: Box::new(x) });
            let alpha = reductions::boundedness_stream(&gamma);
            let beta = random_point(rng, 2).to_stream();
            for node in enumerate_nodes(&wf, 3) {
                let image = reductions::boundedness_embed(&beta, &node, 20)?;
                expect(
                    alpha.node_value(&image, 20)? == 0,
                    "embedded node admitted by the bound",
                )?;
                expect(image.len() == 2 * node.len(), "embedding is strictly monotone")?;
            }
            checked += 1;
        }
    }
    Ok(Outcome { checked })
}

/// The eventually periodic point of length-indexed fan width flags (whether
/// some binary node of each length has an admitted 1-extension).
fn fan_width_point(tree: &RegularTree) -> Result<InfinitePath> {
    let pruned = tree.prune();
    let root = match pruned.root {
        Some(r) => r,
        None => return Ok(InfinitePath { prefix: vec![], cycle: vec![0] }),
    };
    let mut sets: Vec<Vec<usize>> = vec![vec![root]];
    let mut values: Vec<u64> = Vec::new();
    loop {
        let cur = sets.last().unwrap().clone();
        let has_one = cur
            .iter()
            .any(|&q| pruned.states[q].target(1).is_some());
        values.push(u64::from(has_one));
        let mut next: Vec<usize> = cur
            .iter()
            .flat_map(|&q| [pruned.states[q].target(0), pruned.states[q].target(1)])
            .flatten()
            .collect();
        next.sort_unstable();
        next.dedup();
        if let Some(at) = sets.iter().position(|s| *s == next) {
            let cycle = values[at..].to_vec();
            let prefix = values[..at].to_vec();
            return Ok(InfinitePath {
                prefix,
                cycle: if cycle.is_empty() { vec![0] } else { cycle },
            });
        }
        sets.push(next);
    }
}

/// Tree with each family member planted under its spine node.
fn planted_family_tree(family: &[RegularTree]) -> RegularTree {
    let mut states: Vec<State> = Vec::new();
    let mut roots: Vec<Option<usize>> = Vec::new();
    for t in family {
        let offset = states.len();
        for st in &t.states {
            let mut s = st.clone();
            s.explicit = s.explicit.iter().map(|(&m, &q)| (m, q + offset)).collect();
            if let Some(tail) = &mut s.tail {
                tail.period = tail.period.iter().map(|x| x.map(|q| q + offset)).collect();
            }
            states.push(s);
        }
        roots.push(t.root.map(|r| r + offset));
    }
    let spine_base = states.len();
    for (i, root) in roots.iter().enumerate() {
        let mut st = State::default();
        if i + 1 < roots.len() {
            st.explicit.insert(0, spine_base + i + 1);
        }
        if let Some(r) = root {
            st.explicit.insert(1, *r);
        }
        states.push(st);
    }
    RegularTree { states, root: Some(spine_base) }.prune()
}

/// Tree whose root move i leads into family member i.
fn branch_family_tree(family: &[RegularTree]) -> RegularTree {
    let mut states: Vec<State> = Vec::new();
    let mut roots: Vec<Option<usize>> = Vec::new();
    for t in family {
        let offset = states.len();
        for st in &t.states {
            let mut s = st.clone();
            s.explicit = s.explicit.iter().map(|(&m, &q)| (m, q + offset)).collect();
            if let Some(tail) = &mut s.tail {
                tail.period = tail.period.iter().map(|x| x.map(|q| q + offset)).collect();
            }
            states.push(s);
        }
        roots.push(t.root.map(|r| r + offset));
    }
    let root_id = states.len();
    let mut root = State::default();
    for (i, r) in roots.iter().enumerate() {
        if let Some(r) = r {
            root.explicit.insert(i as u64, *r);
        }
    }
    states.push(root);
    RegularTree { states, root: Some(root_id) }.prune()
}

/// The code of the function prepending a fixed finite sequence.
fn prepend_code(prefix: &[u64]) -> StreamSpec {
    StreamSpec::kernel(Kernel::PrependCode { prefix: prefix.to_vec() })
}

/// Nodes of a tree presentation up to a depth (finite for layered trees).
fn enumerate_nodes(tree: &RegularTree, depth: u64) -> Vec<Vec<u64>> {
    let mut out = vec![];
    let root = match tree.root {
        Some(r) => r,
        None => return out,
    };
    let mut layer: Vec<(Vec<u64>, usize)> = vec![(vec![], root)];
    for _ in 0..=depth {
        let mut next = Vec::new();
        for (node, q) in &layer {
            out.push(node.clone());
            for (mv, t) in tree.states[*q].edge_representatives() {
                let mut ext = node.clone();
                ext.push(mv);
                next.push((ext, t));
            }
        }
        layer = next;
    }
    out
}

fn roundtrip_suite(seed: u64) -> Result<Vec<CriterionResult>> {
    let mut out = Vec::new();
    for name in ReductionName::all() {
        let mut rng = rng_for(seed, 10_000 + *name as u64);
        let mut total = 0u64;
        let mut failure: Option<String> = None;
        for i in 0..100 {
            match roundtrip_one(*name, &mut rng) {
                Ok(o) => total += o.checked,
                Err(e) => {
                    failure = Some(format!("instance {i}: {e}"));
                    break;
                }
            }
        }
        let id = format!("roundtrip:{}", name.as_str());
        out.push(match failure {
            None => CriterionResult::pass(&id, format!("{total} checks over 100 seeded instances")),
            Some(f) => CriterionResult::fail(&id, f),
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Criterion 11: fixed point
// ---------------------------------------------------------------------------

fn fixed_point_suite(seed: u64) -> Result<CriterionResult> {
    let id = "fixed-point";
    let mut rng = rng_for(seed, 11);
    let mut gammas: Vec<StreamSpec> = vec![StreamSpec::kernel(Kernel::Identity)];
    for _ in 0..10 {
        let tree = random_tree(&mut rng, 3, 2);
        gammas.push(StreamSpec::kernel(Kernel::ZipClosed { code: Arc::new(tree) }));
    }
    for (gi, gamma) in gammas.iter().enumerate() {
        let alpha = reductions::fixed_point(gamma);
        for bi in 0..100 {
            let beta = random_point(&mut rng, 2).to_stream();
            for d in [2u64, 5, 8] {
                let (lhs, rhs) = kernel::fixed_point_forbids(gamma, &alpha, &beta, d, 24)?;
                if lhs != rhs {
                    return Ok(CriterionResult::fail(
                        id,
                        format!("equivalence broke for family {gi}, point {bi}, depth {d}"),
                    ));
                }
            }
        }
    }
    Ok(CriterionResult::pass(
        id,
        "depth-matched forbids equivalence for eleven families on 100 seeded points each".into(),
    ))
}

// ---------------------------------------------------------------------------
// Criterion 12: boundedness
// ---------------------------------------------------------------------------

fn boundedness_suite(seed: u64) -> Result<CriterionResult> {
    let id = "boundedness";
    let mut rng = rng_for(seed, 12);
    for i in 0..20 {
        // Constant families over finite trees, and section codes over
        // well-founded pair trees.
        let wf = random_well_founded(&mut rng, 3, 2);
        let gamma = if i % 2 == 0 {
            StreamSpec::kernel(Kernel::ConstCode {
                value: Box::new(StreamSpec::TreeChar(Arc::new(wf.clone()))),
            })
        } else {
            StreamSpec::kernel(Kernel::ZipClosed { code: Arc::new(pair_tree(&wf, &wf)) })
        };
        let alpha = reductions::boundedness_stream(&gamma);
        for _ in 0..5 {
            let beta = random_point(&mut rng, 2).to_stream();
            // Admitted nodes of the applied member, exhaustively over the
            // finite source tree shape.
            let applied = Functional(gamma.clone()).apply(&beta);
            for node in enumerate_nodes(&wf, 3) {
                let admitted = (0..=node.len())
                    .map(|k| applied.node_value(&node[..k], 24).map(|v| v == 0))
                    .collect::<Result<Vec<bool>>>()?
                    .into_iter()
                    .all(|b| b);
                if !admitted {
                    continue;
                }
                let image = reductions::boundedness_embed(&beta, &node, 24)?;
                if alpha.node_value(&image, 24)? != 0 {
                    return Ok(CriterionResult::fail(
                        id,
                        format!("family {i}: admitted node {node:?} embeds to a forbidden node"),
                    ));
                }
                if image.len() != 2 * node.len() {
                    return Ok(CriterionResult::fail(id, "embedding length broke".into()));
                }
            }
        }
    }
    Ok(CriterionResult::pass(
        id,
        "interleaving embeds every admitted source node for 20 seeded families".into(),
    ))
}

// ---------------------------------------------------------------------------
// Criterion 13: range codes
// ---------------------------------------------------------------------------

fn range_code_suite(seed: u64) -> Result<CriterionResult> {
    let id = "range-code";
    let mut rng = rng_for(seed, 13);
    let identity = StreamSpec::kernel(Kernel::Identity);
    let r = build(ReductionName::InjectionRangeCode, Params::Stream(identity.clone()))?;
    for t in 0..10_000u64 {
        let expect_member = seqcode::is_binary(t);
        let v = r.forward.0.eval(t, 12)?;
        if (v == 0) != expect_member {
            return Ok(CriterionResult::fail(
                id,
                format!("identity range code wrong at {t}: value {v}"),
            ));
        }
    }
    for i in 0..100 {
        let mut pt = random_point(&mut rng, 1);
        pt.cycle = vec![rng.gen_range(0..2u64)];
        let eps = pt.to_stream();
        let recovered = kernel::range_code_preimage(&identity, &eps, 50, 12)?;
        if recovered != pt.values(50) {
            return Ok(CriterionResult::fail(
                id,
                format!("preimage extraction broke on seeded point {i}"),
            ));
        }
    }
    Ok(CriterionResult::pass(
        id,
        "identity range code exact below 1e4; 50-prefix preimage recovery on 100 seeded points".into(),
    ))
}
