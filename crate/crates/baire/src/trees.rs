//! Regular (finite-state) located closed subsets of Baire space.
//!
//! A [`RegularTree`] presents a closed located set by finitely many states.
//! Each state maps moves to successor states; branching beyond a bound may
//! repeat periodically (the `tail`), so states can have infinitely many
//! children. An absent root denotes the empty set.
//!
//! Pruned form is canonical: every reachable state lies on an infinite path,
//! so the node set of the presentation is exactly the set of codes containing
//! a member.

use crate::error::{Error, Result};
use crate::seqcode;
use crate::stream::StreamSpec;
use crate::stump::Stump;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::sync::Arc;

/// Edge targets: a state id or reject.
pub type Target = Option<usize>;

/// Periodic continuation of a state's edge table: moves `from, from+1, …`
/// hit `period[0], period[1], …` cyclically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tail {
    pub from: u64,
    pub period: Vec<Target>,
}

/// One automaton state. `explicit` gives the targets of the moves below the
/// tail bound (missing moves reject).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct State {
    #[serde(default)]
    pub explicit: BTreeMap<u64, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<Tail>,
}

impl State {
    pub fn target(&self, mv: u64) -> Target {
        if let Some(tail) = &self.tail {
            if mv >= tail.from {
                let idx = ((mv - tail.from) % tail.period.len() as u64) as usize;
                return tail.period[idx];
            }
        }
        self.explicit.get(&mv).copied()
    }

    /// Distinct (move, target) classes: each explicit move plus, when a tail
    /// is present, one representative move per period slot.
    pub fn edge_representatives(&self) -> Vec<(u64, usize)> {
        let mut out: Vec<(u64, usize)> = self
            .explicit
            .iter()
            .map(|(&m, &q)| (m, q))
            .collect();
        if let Some(tail) = &self.tail {
            for (k, t) in tail.period.iter().enumerate() {
                if let Some(q) = t {
                    out.push((tail.from + k as u64, *q));
                }
            }
        }
        out
    }

    fn has_live_edge(&self, live: &[bool]) -> bool {
        self.edge_representatives().iter().any(|&(_, q)| live[q])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegularTree {
    pub states: Vec<State>,
    pub root: Option<usize>,
}

/// Per-state path classification of a pruned tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathClass {
    Zero,
    One,
    Many,
}

impl RegularTree {
    /// The empty located set.
    pub fn empty() -> Self {
        RegularTree { states: vec![], root: None }
    }

    /// The full Baire tree: one state, every move loops.
    pub fn full_baire() -> Self {
        RegularTree {
            states: vec![State {
                explicit: BTreeMap::new(),
                tail: Some(Tail { from: 0, period: vec![Some(0)] }),
            }],
            root: Some(0),
        }
    }

    /// The Cantor tree: moves 0 and 1 loop, everything else rejects.
    pub fn cantor() -> Self {
        RegularTree {
            states: vec![State {
                explicit: BTreeMap::from([(0, 0), (1, 0)]),
                tail: None,
            }],
            root: Some(0),
        }
    }

    /// The tree of the single eventually periodic point `prefix cycle cycle …`.
    pub fn single_path(prefix: &[u64], cycle: &[u64]) -> Self {
        assert!(!cycle.is_empty(), "cycle must be non-empty");
        let total = prefix.len() + cycle.len();
        let mut states = Vec::with_capacity(total);
        for i in 0..total {
            let mv = if i < prefix.len() { prefix[i] } else { cycle[i - prefix.len()] };
            let next = if i + 1 < total { i + 1 } else { prefix.len() };
            states.push(State { explicit: BTreeMap::from([(mv, next)]), tail: None });
        }
        RegularTree { states, root: Some(0) }
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    fn check_ref(&self, q: usize) -> Result<()> {
        if q >= self.states.len() {
            return Err(Error::domain(format!("state id {q} out of range")));
        }
        Ok(())
    }

    /// Validates state references and tail shape.
    pub fn validate(&self) -> Result<()> {
        if let Some(r) = self.root {
            self.check_ref(r)?;
        }
        for st in &self.states {
            for (&mv, &q) in &st.explicit {
                self.check_ref(q)?;
                if let Some(tail) = &st.tail {
                    if mv >= tail.from {
                        return Err(Error::domain(format!(
                            "explicit move {mv} collides with tail starting at {}",
                            tail.from
                        )));
                    }
                }
            }
            if let Some(tail) = &st.tail {
                if tail.period.is_empty() {
                    return Err(Error::domain("tail period must be non-empty"));
                }
                for t in tail.period.iter().flatten() {
                    self.check_ref(*t)?;
                }
            }
        }
        Ok(())
    }

    /// States that lie on an infinite path (greatest fixpoint).
    fn live_states(&self) -> Vec<bool> {
        let mut live = vec![true; self.states.len()];
        loop {
            let mut changed = false;
            for (i, st) in self.states.iter().enumerate() {
                if live[i] && !st.has_live_edge(&live) {
                    live[i] = false;
                    changed = true;
                }
            }
            if !changed {
                return live;
            }
        }
    }

    /// Pruned, minimized, canonically numbered form with the same denotation.
    pub fn prune(&self) -> RegularTree {
        let live = self.live_states();
        let root = match self.root {
            Some(r) if live[r] => r,
            _ => return RegularTree::empty(),
        };
        // Restrict edges to live targets.
        let restricted: Vec<State> = self
            .states
            .iter()
            .map(|st| {
                let explicit: BTreeMap<u64, usize> = st
                    .explicit
                    .iter()
                    .filter(|(_, &q)| live[q])
                    .map(|(&m, &q)| (m, q))
                    .collect();
                let tail = st.tail.as_ref().and_then(|t| {
                    let period: Vec<Target> = t
                        .period
                        .iter()
                        .map(|x| x.filter(|&q| live[q]))
                        .collect();
                    if period.iter().all(|x| x.is_none()) {
                        None
                    } else {
                        Some(Tail { from: t.from, period })
                    }
                });
                State { explicit, tail }
            })
            .collect();
        let tree = RegularTree { states: restricted, root: Some(root) };
        tree.minimize()
    }

    /// Merges bisimilar states and renumbers them in BFS order.
    fn minimize(&self) -> RegularTree {
        let root = match self.root {
            Some(r) => r,
            None => return RegularTree::empty(),
        };
        let normal: Vec<State> = self.states.iter().map(normalize_state).collect();
        // Partition refinement on edge signatures.
        let n = normal.len();
        let mut class: Vec<usize> = vec![0; n];
        loop {
            let mut sig_map: HashMap<(Vec<(u64, usize)>, Option<(u64, Vec<Option<usize>>)>), usize> =
                HashMap::new();
            let mut next: Vec<usize> = Vec::with_capacity(n);
            for st in &normal {
                let expl: Vec<(u64, usize)> =
                    st.explicit.iter().map(|(&m, &q)| (m, class[q])).collect();
                let tail = st
                    .tail
                    .as_ref()
                    .map(|t| (t.from, t.period.iter().map(|x| x.map(|q| class[q])).collect()));
                let len = sig_map.len();
                let c = *sig_map.entry((expl, tail)).or_insert(len);
                next.push(c);
            }
            if next == class {
                break;
            }
            class = next;
        }
        // BFS renumbering of reachable classes from the root's class.
        let rep_of_class: HashMap<usize, usize> =
            (0..n).rev().map(|i| (class[i], i)).collect();
        let mut order: Vec<usize> = Vec::new();
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        seen.insert(class[root], 0);
        order.push(class[root]);
        queue.push_back(class[root]);
        while let Some(c) = queue.pop_front() {
            let st = &normal[rep_of_class[&c]];
            for (_, q) in st.edge_representatives() {
                let qc = class[q];
                if !seen.contains_key(&qc) {
                    seen.insert(qc, order.len());
                    order.push(qc);
                    queue.push_back(qc);
                }
            }
        }
        let states: Vec<State> = order
            .iter()
            .map(|&c| {
                let st = &normal[rep_of_class[&c]];
                let explicit = st
                    .explicit
                    .iter()
                    .map(|(&m, &q)| (m, seen[&class[q]]))
                    .collect();
                let tail = st.tail.as_ref().map(|t| Tail {
                    from: t.from,
                    period: t.period.iter().map(|x| x.map(|q| seen[&class[q]])).collect(),
                });
                State { explicit, tail }
            })
            .collect();
        RegularTree { states, root: Some(0) }
    }

    /// Whether the coded sequence is a node of the tree.
    pub fn node_member(&self, s: u64) -> bool {
        self.node_member_moves(&seqcode::decode(s))
    }

    pub fn node_member_moves(&self, moves: &[u64]) -> bool {
        let mut q = match self.root {
            Some(r) => r,
            None => return false,
        };
        for &mv in moves {
            match self.states[q].target(mv) {
                Some(next) => q = next,
                None => return false,
            }
        }
        true
    }

    /// State reached after consuming `moves`, if any.
    pub fn state_after(&self, moves: &[u64]) -> Option<usize> {
        let mut q = self.root?;
        for &mv in moves {
            q = self.states[q].target(mv)?;
        }
        Some(q)
    }

    /// Decides admission of an eventually periodic point by state-cycle
    /// simulation.
    pub fn point_member(&self, prefix: &[u64], cycle: &[u64]) -> bool {
        let mut q = match self.state_after(prefix) {
            Some(q) => q,
            None => return false,
        };
        let mut seen = HashSet::new();
        let mut phase = 0usize;
        loop {
            if !seen.insert((q, phase)) {
                return true;
            }
            match self.states[q].target(cycle[phase]) {
                Some(next) => q = next,
                None => return false,
            }
            phase = (phase + 1) % cycle.len();
        }
    }

    /// True when every reachable state has finitely many children. Expects
    /// pruned input (tails that reject everywhere are removed by pruning).
    pub fn is_fan(&self) -> bool {
        let root = match self.root {
            Some(r) => r,
            None => return true,
        };
        let mut seen = vec![false; self.states.len()];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(q) = stack.pop() {
            let st = &self.states[q];
            if st.tail.as_ref().is_some_and(|t| t.period.iter().any(|x| x.is_some())) {
                return false;
            }
            for (_, next) in st.edge_representatives() {
                if !seen[next] {
                    seen[next] = true;
                    stack.push(next);
                }
            }
        }
        true
    }

    /// Pruned product; denotes the intersection of the two sets.
    pub fn intersect(&self, other: &RegularTree) -> RegularTree {
        let (ra, rb) = match (self.root, other.root) {
            (Some(a), Some(b)) => (a, b),
            _ => return RegularTree::empty(),
        };
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut states: Vec<State> = Vec::new();
        let mut queue = VecDeque::new();
        index.insert((ra, rb), 0);
        states.push(State::default());
        queue.push_back((ra, rb));
        while let Some((a, b)) = queue.pop_front() {
            let id = index[&(a, b)];
            let sa = &self.states[a];
            let sb = &other.states[b];
            let mut resolve = |states: &mut Vec<State>,
                               queue: &mut VecDeque<(usize, usize)>,
                               qa: usize,
                               qb: usize| {
                *index.entry((qa, qb)).or_insert_with(|| {
                    states.push(State::default());
                    queue.push_back((qa, qb));
                    states.len() - 1
                })
            };
            // Explicit region: all moves below both tails' bounds.
            let bound_a = sa.tail.as_ref().map(|t| t.from).unwrap_or(0);
            let bound_b = sb.tail.as_ref().map(|t| t.from).unwrap_or(0);
            let explicit_bound = bound_a
                .max(bound_b)
                .max(sa.explicit.keys().next_back().map_or(0, |&m| m + 1))
                .max(sb.explicit.keys().next_back().map_or(0, |&m| m + 1));
            let mut explicit = BTreeMap::new();
            for mv in 0..explicit_bound {
                if let (Some(qa), Some(qb)) = (sa.target(mv), sb.target(mv)) {
                    let q = resolve(&mut states, &mut queue, qa, qb);
                    explicit.insert(mv, q);
                }
            }
            let tail = match (&sa.tail, &sb.tail) {
                (Some(ta), Some(tb)) => {
                    let m = lcm(ta.period.len(), tb.period.len());
                    let period: Vec<Target> = (0..m as u64)
                        .map(|k| {
                            let mv = explicit_bound + k;
                            match (sa.target(mv), sb.target(mv)) {
                                (Some(qa), Some(qb)) => {
                                    Some(resolve(&mut states, &mut queue, qa, qb))
                                }
                                _ => None,
                            }
                        })
                        .collect();
                    if period.iter().all(|x| x.is_none()) {
                        None
                    } else {
                        Some(Tail { from: explicit_bound, period })
                    }
                }
                _ => None,
            };
            states[id] = State { explicit, tail };
        }
        RegularTree { states, root: Some(0) }.prune()
    }

    /// Same denotation check: both prune to identical canonical forms.
    pub fn same_denotation(&self, other: &RegularTree) -> bool {
        self.prune() == other.prune()
    }

    /// Classifies each state of a pruned tree by how many infinite paths pass
    /// through it.
    pub fn path_count(&self) -> Vec<PathClass> {
        let n = self.states.len();
        let live = self.live_states();
        // A state is branching when two distinct live edges leave it.
        let branching: Vec<bool> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, st)| {
                live[i] && {
                    let live_edges = st
                        .edge_representatives()
                        .iter()
                        .filter(|&&(_, q)| live[q])
                        .count();
                    let infinite_live = st.tail.as_ref().is_some_and(|t| {
                        t.period.iter().any(|x| x.is_some_and(|q| live[q]))
                    });
                    live_edges >= 2 || infinite_live
                }
            })
            .collect();
        // Many = reaches a branching state through live edges.
        let mut many = branching.clone();
        loop {
            let mut changed = false;
            for (i, st) in self.states.iter().enumerate() {
                if live[i] && !many[i] {
                    let reach = st
                        .edge_representatives()
                        .iter()
                        .any(|&(_, q)| live[q] && many[q]);
                    if reach {
                        many[i] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        (0..n)
            .map(|i| {
                if !live[i] {
                    PathClass::Zero
                } else if many[i] {
                    PathClass::Many
                } else {
                    PathClass::One
                }
            })
            .collect()
    }

    /// Classical derived set: the pruned restriction to states through which
    /// many paths pass. A point survives exactly when every neighborhood of it
    /// contains a member apart from it.
    pub fn derived(&self) -> RegularTree {
        let root = match self.root {
            Some(r) => r,
            None => return RegularTree::empty(),
        };
        let classes = self.path_count();
        if classes[root] != PathClass::Many {
            return RegularTree::empty();
        }
        let keep = |q: usize| classes[q] == PathClass::Many;
        let states: Vec<State> = self
            .states
            .iter()
            .map(|st| {
                let explicit = st
                    .explicit
                    .iter()
                    .filter(|(_, &q)| keep(q))
                    .map(|(&m, &q)| (m, q))
                    .collect();
                let tail = st.tail.as_ref().and_then(|t| {
                    let period: Vec<Target> =
                        t.period.iter().map(|x| x.filter(|&q| keep(q))).collect();
                    if period.iter().all(|x| x.is_none()) {
                        None
                    } else {
                        Some(Tail { from: t.from, period })
                    }
                });
                State { explicit, tail }
            })
            .collect();
        RegularTree { states, root: Some(root) }.prune()
    }

    /// Iterated derivative along a stump: the empty stump keeps the set, a
    /// non-empty stump takes the derived set of the intersection of the child
    /// derivatives.
    pub fn der(&self, sigma: &Stump) -> RegularTree {
        let mut memo = HashMap::new();
        der_memo(sigma, &self.prune(), &mut memo)
    }

    /// Kernel of the perfect-subtree analysis: iterates `derived` to a
    /// fixpoint. Non-empty exactly when the set has a perfect subtree.
    pub fn perfect_kernel(&self) -> RegularTree {
        let mut cur = self.prune();
        loop {
            let next = cur.derived();
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    /// Every reachable state splits into two incompatible extensions.
    pub fn is_perfect(&self) -> bool {
        let t = self.prune();
        match t.root {
            None => false,
            Some(_) => t.path_count().iter().all(|&c| c != PathClass::One) && !t.is_empty(),
        }
    }

    /// Finds an eventually periodic member of a nonempty tree, together with
    /// the strictly KB-descending sequence of its prefixes.
    pub fn find_infinite_path(&self) -> Option<InfinitePath> {
        let t = self.prune();
        let root = t.root?;
        // Walk the least live move from each state until a state repeats.
        let mut moves: Vec<u64> = Vec::new();
        let mut visited: Vec<usize> = vec![root];
        let mut q = root;
        loop {
            let st = &t.states[q];
            let (mv, next) = st
                .edge_representatives()
                .into_iter()
                .min()
                .expect("pruned state has a live edge");
            if let Some(pos) = visited.iter().position(|&v| v == next) {
                moves.push(mv);
                let prefix = moves[..pos].to_vec();
                let cycle = moves[pos..].to_vec();
                return Some(InfinitePath { prefix, cycle });
            }
            moves.push(mv);
            visited.push(next);
            q = next;
        }
    }

    /// Nodes of the tree at exactly `depth`, as move vectors. Only meaningful
    /// on fans (finite at every depth).
    pub fn nodes_at_depth(&self, depth: u64) -> Vec<Vec<u64>> {
        let root = match self.root {
            Some(r) => r,
            None => return vec![],
        };
        let mut level: Vec<(Vec<u64>, usize)> = vec![(vec![], root)];
        for _ in 0..depth {
            let mut next = Vec::new();
            for (node, q) in level {
                for (mv, target) in self.states[q].edge_representatives() {
                    let mut n = node.clone();
                    n.push(mv);
                    next.push((n, target));
                }
            }
            level = next;
        }
        level.into_iter().map(|(n, _)| n).collect()
    }

    /// Finite-bar extraction on a fan: breadth-first search for the minimal
    /// nodes on which `bar` fires. Errors with fuel exhaustion when the
    /// frontier is not emptied within `depth_limit` levels.
    pub fn bar_extract(&self, bar: &StreamSpec, depth_limit: u64) -> Result<Vec<u64>> {
        let t = self.prune();
        if !t.is_fan() {
            return Err(Error::domain("bar extraction requires a fan"));
        }
        let root = match t.root {
            Some(r) => r,
            None => return Ok(vec![]),
        };
        let mut collected: Vec<u64> = Vec::new();
        let mut frontier: Vec<(Vec<u64>, usize)> = vec![(vec![], root)];
        let mut depth = 0u64;
        while !frontier.is_empty() {
            if depth > depth_limit {
                return Err(Error::fuel(
                    "bar extraction frontier not emptied; the predicate may not be a bar",
                    depth,
                ));
            }
            let mut next = Vec::new();
            for (node, q) in frontier {
                let code = seqcode::encode(&node)?;
                if bar.eval(code, depth_limit)? != 0 {
                    collected.push(code);
                } else {
                    for (mv, target) in t.states[q].edge_representatives() {
                        let mut n = node.clone();
                        n.push(mv);
                        next.push((n, target));
                    }
                }
            }
            frontier = next;
            depth += 1;
        }
        collected.sort_unstable();
        collected.dedup();
        // Exhaustive verification: thinness and exact cover at frontier depth.
        for (i, &a) in collected.iter().enumerate() {
            for &b in &collected[i + 1..] {
                if !seqcode::incompatible(a, b) {
                    return Err(Error::domain("extracted bar is not thin"));
                }
            }
        }
        let frontier_depth = depth.saturating_sub(1).max(
            collected
                .iter()
                .map(|&c| seqcode::length(c))
                .max()
                .unwrap_or(0),
        );
        for node in t.nodes_at_depth(frontier_depth) {
            let code = seqcode::encode(&node)?;
            let hits = collected
                .iter()
                .filter(|&&b| seqcode::is_prefix(b, code))
                .count();
            if hits != 1 {
                return Err(Error::domain(format!(
                    "node at frontier depth extends {hits} bar elements, expected exactly 1"
                )));
            }
        }
        Ok(collected)
    }
}

/// An eventually periodic member together with its prefix chain (which is
/// strictly KB-descending and admitted at every index).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfinitePath {
    pub prefix: Vec<u64>,
    pub cycle: Vec<u64>,
}

impl InfinitePath {
    pub fn value(&self, n: u64) -> u64 {
        let n = n as usize;
        if n < self.prefix.len() {
            self.prefix[n]
        } else {
            self.cycle[(n - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn values(&self, n: u64) -> Vec<u64> {
        (0..n).map(|i| self.value(i)).collect()
    }

    /// Code of the length-`n` prefix: the `n`-th entry of the KB-descending
    /// witness sequence.
    pub fn prefix_code(&self, n: u64) -> Result<u64> {
        seqcode::encode(&self.values(n))
    }

    pub fn to_stream(&self) -> StreamSpec {
        StreamSpec::ev_periodic(self.prefix.clone(), self.cycle.clone())
    }
}

fn normalize_state(st: &State) -> State {
    let mut explicit = st.explicit.clone();
    let tail = st.tail.as_ref().and_then(|t| {
        if t.period.iter().all(|x| x.is_none()) {
            return None;
        }
        // Minimal period.
        let mut period = t.period.clone();
        for d in 1..period.len() {
            if period.len() % d == 0 && (0..period.len()).all(|i| period[i] == period[i % d]) {
                period.truncate(d);
                break;
            }
        }
        let mut from = t.from;
        // Absorb explicit entries that agree with the rotated tail.
        while from > 0 && explicit.get(&(from - 1)).copied() == period[period.len() - 1] {
            explicit.remove(&(from - 1));
            period.rotate_right(1);
            from -= 1;
        }
        Some(Tail { from, period })
    });
    // Explicit moves shadowed by the tail are dropped.
    if let Some(t) = &tail {
        explicit.retain(|&m, _| m < t.from);
    }
    State { explicit, tail }
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    a / gcd(a, b) * b
}

fn der_memo(
    sigma: &Stump,
    tree: &RegularTree,
    memo: &mut HashMap<(Stump, RegularTree), RegularTree>,
) -> RegularTree {
    if sigma.is_empty() {
        return tree.clone();
    }
    if let Some(hit) = memo.get(&(sigma.clone(), tree.clone())) {
        return hit.clone();
    }
    // One representative per distinct canonical child; intersection is
    // idempotent and commutative, so duplicates are irrelevant.
    let mut reps: Vec<Stump> = sigma.child_representatives();
    reps.sort();
    reps.dedup();
    let mut acc: Option<RegularTree> = None;
    for child in &reps {
        let d = der_memo(child, tree, memo);
        acc = Some(match acc {
            None => d,
            Some(cur) => cur.intersect(&d),
        });
    }
    let inter = acc.unwrap_or_else(|| tree.clone());
    let result = inter.derived();
    memo.insert((sigma.clone(), tree.clone()), result.clone());
    result
}

/// Which Cantor-Bendixson generator to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CbFamily {
    Cb,
    CbStar,
    CbDagger,
}

/// A countable set given by an index-to-point generator with a companion
/// closure tree admitting every generated point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointEnumeration {
    pub family: CbFamily,
    pub stump: Stump,
}

impl PointEnumeration {
    /// Whether the generated set is empty (only CB of the empty stump).
    pub fn is_empty(&self) -> bool {
        self.family == CbFamily::Cb && self.stump.is_empty()
    }

    /// The `index`-th generated point, eventually periodic. Returns `None`
    /// only for the empty enumeration.
    pub fn point(&self, index: u64) -> Option<InfinitePath> {
        if self.is_empty() {
            return None;
        }
        Some(self.point_inner(index))
    }

    fn point_inner(&self, index: u64) -> InfinitePath {
        let zero = InfinitePath { prefix: vec![], cycle: vec![0] };
        match self.family {
            CbFamily::Cb => {
                if self.stump.is_empty() || index == 0 {
                    return zero;
                }
                let (n, j) = seqcode::unpair(index).expect("nonzero index");
                let sub = PointEnumeration {
                    family: self.family,
                    stump: self.stump.child(n),
                };
                if sub.is_empty() {
                    // An empty child set contributes no planted points; the
                    // index falls back to the base member 0̲.
                    zero
                } else {
                    plant(n, sub.point_inner(j))
                }
            }
            CbFamily::CbStar => {
                if self.stump.is_empty() || index == 0 {
                    return zero;
                }
                let (n, j) = seqcode::unpair(index).expect("nonzero index");
                let sub = PointEnumeration {
                    family: self.family,
                    stump: self.stump.child(n),
                };
                plant(n, sub.point_inner(j))
            }
            CbFamily::CbDagger => {
                if index == 0 {
                    return zero;
                }
                let (n, j) = seqcode::unpair(index).expect("nonzero index");
                if j == 0 {
                    return plant(n, zero);
                }
                if self.stump.is_empty() {
                    // Base case has no second level; spread the index over the
                    // first level instead.
                    return plant(n, zero);
                }
                let (p, k) = seqcode::unpair(j).expect("nonzero inner index");
                let reps = self.stump.child_representatives();
                let child = reps[(p % reps.len() as u64) as usize].clone();
                let sub = PointEnumeration { family: self.family, stump: child };
                plant(n, plant(p, sub.point_inner(k)))
            }
        }
    }

    /// The regular closure tree of the generated set.
    pub fn closure(&self) -> RegularTree {
        let mut builder = ClosureBuilder::default();
        let root = builder.state(self.family, &self.stump);
        let tree = RegularTree { states: builder.states, root };
        tree.prune()
    }
}

/// Prepends `n` zeros and a 1 to an eventually periodic point.
fn plant(n: u64, rest: InfinitePath) -> InfinitePath {
    let mut prefix = vec![0; n as usize];
    prefix.push(1);
    prefix.extend(rest.prefix);
    InfinitePath { prefix, cycle: rest.cycle }
}

#[derive(Default)]
struct ClosureBuilder {
    states: Vec<State>,
    /// (family, stump, spine phase or entry marker) -> state id
    index: HashMap<(CbFamily, Stump, usize), usize>,
}

impl ClosureBuilder {
    /// Root state of the closure of the family's set at `stump`; `None` when
    /// the set is empty.
    fn state(&mut self, family: CbFamily, stump: &Stump) -> Option<usize> {
        if family == CbFamily::Cb && stump.is_empty() {
            return None;
        }
        Some(self.spine(family, stump, 0))
    }

    /// Spine state: `phase` zeros of the leading 0-run have been read. The
    /// child sequence of a stump is eventually periodic (prefix then cycle),
    /// so phases advance to `prefix+cycle` and then wrap into the cycle
    /// region. For CB and CB* the 1-move enters the set of the phase's child;
    /// for CB-dagger the spine is uniform and the 1-move enters the second
    /// spine.
    fn spine(&mut self, family: CbFamily, stump: &Stump, phase: usize) -> usize {
        let (pl, cl) = match family {
            CbFamily::CbDagger => (0, 1),
            _ => stump.shape(),
        };
        let key = (family, stump.clone(), phase);
        if let Some(&q) = self.index.get(&key) {
            return q;
        }
        let id = self.states.len();
        self.states.push(State::default());
        self.index.insert(key, id);
        let next_phase = if phase + 1 < pl + cl { phase + 1 } else { pl };
        let next_spine = self.spine(family, stump, next_phase);
        let mut explicit = BTreeMap::from([(0u64, next_spine)]);
        let one_target: Option<usize> = match family {
            CbFamily::Cb => self.state(family, &stump.child(phase as u64)),
            CbFamily::CbStar => {
                if stump.is_empty() {
                    None
                } else {
                    Some(self.spine(family, &stump.child(phase as u64), 0))
                }
            }
            CbFamily::CbDagger => Some(self.second_spine(stump, 0)),
        };
        if let Some(q) = one_target {
            explicit.insert(1, q);
        }
        self.states[id] = State { explicit, tail: None };
        id
    }

    /// Second spine of the CB-dagger construction: after the first 1, `phase`
    /// zeros have been read; a further 1 enters the very special set of the
    /// child slot `phase mod (#representatives)`. The empty stump has no
    /// second level, so its second spine is the tail of the planted point.
    fn second_spine(&mut self, stump: &Stump, phase: usize) -> usize {
        if stump.is_empty() {
            let key = (CbFamily::CbDagger, Stump::empty(), usize::MAX);
            if let Some(&q) = self.index.get(&key) {
                return q;
            }
            let id = self.states.len();
            self.states.push(State::default());
            self.states[id].explicit.insert(0, id);
            self.index.insert(key, id);
            return id;
        }
        let reps = stump.child_representatives();
        let slots = reps.len();
        let phase = phase % slots;
        // Second-spine keys are offset past the first-spine phase range.
        let key = (CbFamily::CbDagger, stump.clone(), usize::MAX - 1 - phase);
        if let Some(&q) = self.index.get(&key) {
            return q;
        }
        let id = self.states.len();
        self.states.push(State::default());
        self.index.insert(key, id);
        let next = self.second_spine(stump, (phase + 1) % slots);
        let mut explicit = BTreeMap::from([(0u64, next)]);
        let child = &reps[phase];
        if let Some(q) = self.state(CbFamily::CbDagger, child) {
            explicit.insert(1, q);
        }
        self.states[id] = State { explicit, tail: None };
        id
    }
}

/// The canonical pairwise-incompatible binary bars: `bar01(n)` has `n+1`
/// elements and every binary sequence of length `n+1` extends exactly one.
pub fn bar01(n: u64) -> Result<Vec<u64>> {
    let mut cur: Vec<u64> = vec![seqcode::encode(&[])?];
    for _ in 0..n {
        let first = cur[0];
        let mut next = Vec::with_capacity(cur.len() + 1);
        next.push(seqcode::concat(first, seqcode::encode(&[0])?)?);
        next.push(seqcode::concat(first, seqcode::encode(&[1])?)?);
        next.extend(&cur[1..]);
        cur = next;
    }
    Ok(cur)
}

/// Stream form of a tree characteristic: useful for building bar predicates.
pub fn tree_char(tree: RegularTree) -> StreamSpec {
    StreamSpec::TreeChar(Arc::new(tree.prune()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stump::Stump;

    fn one_star() -> Stump {
        Stump::successor(&Stump::empty())
    }

    #[test]
    fn prune_keeps_self_loop() {
        let t = RegularTree::single_path(&[], &[0]);
        let p = t.prune();
        assert!(!p.is_empty());
        assert!(p.point_member(&[], &[0]));
        assert!(!p.point_member(&[1], &[0]));
    }

    #[test]
    fn prune_removes_dead_end() {
        // Root has a single edge into a state with no outgoing edges.
        let t = RegularTree {
            states: vec![
                State { explicit: BTreeMap::from([(0, 1)]), tail: None },
                State::default(),
            ],
            root: Some(0),
        };
        assert!(t.prune().is_empty());
    }

    #[test]
    fn cantor_membership() {
        let c = RegularTree::cantor();
        assert!(c.node_member(seqcode::encode(&[0, 1, 1]).unwrap()));
        assert!(!c.node_member(seqcode::encode(&[0, 2]).unwrap()));
        assert!(c.is_fan());
        assert!(!RegularTree::full_baire().is_fan());
    }

    #[test]
    fn intersect_examples() {
        let c = RegularTree::cantor();
        assert!(c.intersect(&c).same_denotation(&c));
        assert!(c.intersect(&RegularTree::full_baire()).same_denotation(&c));
        let p0 = RegularTree::single_path(&[], &[0]);
        let p1 = RegularTree::single_path(&[], &[1]);
        assert!(p0.intersect(&p1).is_empty());
    }

    #[test]
    fn path_classification() {
        let c = RegularTree::cantor().prune();
        assert_eq!(c.path_count()[c.root.unwrap()], PathClass::Many);
        let p = RegularTree::single_path(&[3, 1], &[2]).prune();
        assert!(p.path_count().iter().all(|&x| x == PathClass::One));
    }

    #[test]
    fn derived_examples() {
        let c = RegularTree::cantor();
        assert!(c.derived().same_denotation(&c));
        assert!(RegularTree::single_path(&[], &[0]).derived().is_empty());
        // Closure of CB*_{1*}: the zero point plus its isolated branches; only
        // the zero point survives one derivation.
        let e = PointEnumeration { family: CbFamily::CbStar, stump: one_star() };
        let closure = e.closure();
        let d = closure.derived();
        assert!(d.same_denotation(&RegularTree::single_path(&[], &[0])));
    }

    #[test]
    fn der_examples() {
        let c = RegularTree::cantor();
        assert!(c.der(&Stump::empty()).same_denotation(&c));
        let cb1 = PointEnumeration { family: CbFamily::Cb, stump: one_star() }.closure();
        assert!(cb1.der(&one_star()).is_empty());
        let s1 = Stump::successor(&one_star());
        let cbs1 = PointEnumeration { family: CbFamily::Cb, stump: s1 }.closure();
        let d = cbs1.der(&one_star());
        assert!(d.point_member(&[], &[0]));
    }

    #[test]
    fn cb_family_base_cases() {
        let cb = PointEnumeration { family: CbFamily::Cb, stump: Stump::empty() };
        assert!(cb.is_empty());
        assert!(cb.closure().is_empty());

        let cbstar = PointEnumeration { family: CbFamily::CbStar, stump: Stump::empty() };
        let p = cbstar.point(7).unwrap();
        assert_eq!(p.values(5), vec![0; 5]);
        assert!(cbstar.closure().same_denotation(&RegularTree::single_path(&[], &[0])));
    }

    #[test]
    fn cbstar_one_star_shape() {
        let e = PointEnumeration { family: CbFamily::CbStar, stump: one_star() };
        let closure = e.closure();
        assert!(closure.is_fan());
        // Members are 0̲ and 0̄n 1 0̲.
        assert!(closure.point_member(&[], &[0]));
        assert!(closure.point_member(&[0, 0, 1], &[0]));
        assert!(!closure.point_member(&[1, 1], &[0]));
        for i in 0..30 {
            let p = e.point(i).unwrap();
            assert!(closure.point_member(&p.prefix, &p.cycle), "index {i}");
        }
    }

    #[test]
    fn enumeration_points_admitted_by_closure() {
        let pool = [
            Stump::empty(),
            one_star(),
            Stump::successor(&one_star()),
            Stump::node(vec![one_star()], vec![Stump::empty()]),
        ];
        for family in [CbFamily::Cb, CbFamily::CbStar, CbFamily::CbDagger] {
            for stump in &pool {
                let e = PointEnumeration { family, stump: stump.clone() };
                let closure = e.closure();
                for i in 0..40 {
                    match e.point(i) {
                        Some(p) => assert!(
                            closure.point_member(&p.prefix, &p.cycle),
                            "{family:?} {stump:?} index {i}"
                        ),
                        None => assert!(closure.is_empty()),
                    }
                }
            }
        }
    }

    #[test]
    fn bar01_examples() {
        assert_eq!(bar01(0).unwrap(), vec![0]);
        assert_eq!(
            bar01(1).unwrap(),
            vec![seqcode::encode(&[0]).unwrap(), seqcode::encode(&[1]).unwrap()]
        );
        assert_eq!(
            bar01(2).unwrap(),
            vec![
                seqcode::encode(&[0, 0]).unwrap(),
                seqcode::encode(&[0, 1]).unwrap(),
                seqcode::encode(&[1]).unwrap()
            ]
        );
    }

    #[test]
    fn bar_extract_examples() {
        // Bar: length >= 3 on the Cantor fan.
        let bar = StreamSpec::length_at_least(3);
        let out = RegularTree::cantor().bar_extract(&bar, 10).unwrap();
        assert_eq!(out.len(), 8);
        // A bar containing the empty sequence extracts just the root.
        let always = StreamSpec::Const(1);
        assert_eq!(RegularTree::cantor().bar_extract(&always, 10).unwrap(), vec![0]);
    }

    #[test]
    fn find_path_examples() {
        let p = RegularTree::cantor().find_infinite_path().unwrap();
        assert_eq!(p.values(4), vec![0; 4]);
        assert!(RegularTree::empty().find_infinite_path().is_none());
        let e = PointEnumeration { family: CbFamily::CbStar, stump: one_star() };
        let path = e.closure().find_infinite_path().unwrap();
        assert_eq!(path.values(3), vec![0, 0, 0]);
    }
}
