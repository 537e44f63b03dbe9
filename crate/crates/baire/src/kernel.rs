//! Named finitely-parameterized streams.
//!
//! Each kernel is a total stream with a defining clause taken from one of the
//! catalog constructions (plus a few small plumbing streams used to build
//! witness points). Functional kernels double as neighborhood codes: besides
//! their literal value at a numeric index they can evaluate an applied
//! coordinate `(k|α)(t)` directly from the decoded coordinate, so membership
//! checks can walk nodes far deeper than any representable sequence code.

use crate::error::{Error, Result};
use crate::seqcode;
use crate::stream::StreamSpec;
use crate::trees::{bar01, RegularTree};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Shared cache; ignored by equality and serialization.
#[derive(Debug, Clone, Default)]
pub struct Cache<K, V>(Arc<Mutex<HashMap<K, V>>>);

impl<K, V> PartialEq for Cache<K, V> {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}
impl<K, V> Eq for Cache<K, V> {}

impl<K: std::hash::Hash + Eq + Clone, V: Clone> Cache<K, V> {
    fn get(&self, k: &K) -> Option<V> {
        self.0.lock().unwrap().get(k).cloned()
    }
    fn put(&self, k: K, v: V) {
        self.0.lock().unwrap().insert(k, v);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// Code of the identity on Baire space: coordinate n copies input n.
    Identity,
    /// Code of a constant function: every coordinate fires at the empty
    /// prefix with the value stream's entry there.
    ConstCode { value: Box<StreamSpec> },
    /// Code of the function prepending a fixed finite sequence to its input.
    PrependCode { prefix: Vec<u64> },
    /// Bar predicate: 1 exactly on sequences of length ≥ min.
    LengthAtLeast { min: u64 },
    /// Point: a finite prefix followed by another stream.
    Prepend { prefix: Vec<u64>, tail: Box<StreamSpec> },
    /// Point whose m-th subsequence is `parts[m]` (then `rest` beyond the
    /// list); position 0 fixed.
    SubseqBundle {
        parts: Vec<StreamSpec>,
        rest: Box<StreamSpec>,
        at_zero: u64,
    },
    /// Point shifted left: value at n is `a` at n + count.
    Drop { a: Box<StreamSpec>, count: u64 },
    /// Point: value at i is `2·code(path-prefix of length i+1) + offset`.
    /// Prefix codes outgrow u64 quickly; evaluation is checked.
    PrefixCodeLadder { prefix: Vec<u64>, cycle: Vec<u64>, offset: u64 },

    /// Functional: output value at node t is 0 exactly when the zip of the
    /// input with t (input on even, t on odd positions, length |t|) is a node
    /// of the pair tree. Serves both the closed reading (admitted nodes keep
    /// value 0) and the open one (leaving the tree fires).
    ZipClosed { code: Arc<RegularTree> },
    /// Functional: output admits exactly the binary nodes whose 0-run list is
    /// a value-0 index of the input.
    BlockPlant,
    /// Functional: output admits the coherent doubled-prefix-code chains of
    /// input-admitted nodes (with trailing zeros).
    UncPack,
    /// Functional: output pairs each move with a flag; flag 1 requires the
    /// even-position history extended by the move to be admitted by the
    /// input.
    SinkPairs,
    /// Functional to a point: value at n is 1 when some binary input-node of
    /// length n has a 1-child.
    FanWidth,
    /// Functional: output admits binary nodes whose 1-positions carry nonzero
    /// input values.
    SupportFan,
    /// Functional: output admits the zero point under move 0 and a shifted
    /// copy of the input under each move n+1.
    UniquePathShift,
    /// Functional: subsequence 0 becomes the zero point, the rest shift up.
    ShiftIntoUnique,
    /// Functional: subsequences 0 and 1 copied, the rest constant 1.
    PadTwo,
    /// Functional: output admits constant nodes m̲ whose subsequence m stays 0.
    ConstantRays,
    /// Functional: strongly injective surjection onto the sets with exactly
    /// one vanishing subsequence.
    UniqueZeroSurjection,
    /// Functional: output admits exactly the prefixes of the input point.
    SingletonTrack,
    /// Functional: move i then s reads the input at the planted node
    /// 0̄i 1 s.
    SumCollapse,
    /// Functional: planted node 0̄i 1 s reads the input at ⟨i⟩∗s (spine
    /// bounded by `width`).
    SumExpand { width: u64 },
    /// Functional from the binary tree into a perfect tree: the split map.
    PerfectSplit {
        tree: Arc<RegularTree>,
        #[serde(skip, default)]
        cache: Cache<Vec<u64>, Vec<u64>>,
    },
    /// Char stream: range code of a strongly injective function from the
    /// binary tree, with fan-derived moduli.
    RangeCode {
        gamma: Box<StreamSpec>,
        #[serde(skip, default)]
        moduli: Cache<u64, u64>,
    },
    /// Functional from the binary tree onto a fan, by bar blocks.
    FanBlocks { fan: Arc<RegularTree> },
    /// Functional: share-reduction through the fan surjection.
    FanShare { fan: Arc<RegularTree> },
    /// Point: enumeration of the nodes met by the range of a functional.
    RangeEnumeration { gamma: Box<StreamSpec> },
    /// Functional: surjection onto the closed set behind a node enumeration.
    EnumerationSurjection { delta: Box<StreamSpec> },
    /// Point: the n-th value is one plus the code of the n-th tree node in
    /// breadth-first order (0 once the nodes are exhausted or outgrow the
    /// code space). Dense node enumeration for finitely branching trees.
    TreeNodeEnum { tree: Arc<RegularTree> },
    /// Functional: disjunction of ranges (choice read from position 0).
    StrictDisjunction { codes: Vec<StreamSpec> },
    /// Functional: conjunction of ranges (subsequence m through code m).
    StrictConjunction { codes: Vec<StreamSpec> },
    /// Functional: first subsequence of the applied inner functional.
    StrictProjection { gamma: Box<StreamSpec> },
    /// Char stream: closed code whose admitted points are the bundles passing
    /// the chosen pair tree (union of analytic codes).
    AnalyticUnion { codes: Vec<Arc<RegularTree>> },
    /// Char stream: closed code for the intersection of analytic codes.
    AnalyticIntersection { codes: Vec<Arc<RegularTree>> },
    /// Open pair code for the intersection of co-analytic codes.
    CoanalyticIntersection { codes: Vec<Arc<RegularTree>> },
    /// Closed pair code produced by the union-over-branches operation applied
    /// to a system of analytic codes.
    SouslinCode { system: Vec<Arc<RegularTree>> },
    /// 0/1 stream whose forbidden points agree with those of the coded
    /// functional applied to it (self-referential record of firings).
    FixedPoint {
        gamma: Box<StreamSpec>,
        #[serde(skip, default)]
        own: Cache<u64, u64>,
    },
    /// Code whose value at each point exceeds the inner functional's
    /// diagonal value there by one.
    Diagonal { gamma: Box<StreamSpec> },
    /// 0/1 stream bounding the coded family: forbids the interleaved nodes
    /// whose even history fires on the odd history with value above one.
    Boundedness { gamma: Box<StreamSpec> },
}

impl Kernel {
    /// Literal stream value at index `n`.
    pub fn value(&self, n: u64, fuel: u64) -> Result<u64> {
        match self {
            // Point kernels read the index as a plain number.
            Kernel::Prepend { prefix, tail } => {
                let i = n as usize;
                if i < prefix.len() {
                    Ok(prefix[i])
                } else {
                    tail.eval(n - prefix.len() as u64, fuel)
                }
            }
            Kernel::Drop { a, count } => a.eval(
                n.checked_add(*count)
                    .ok_or_else(|| Error::domain("index overflow in shifted stream"))?,
                fuel,
            ),
            Kernel::PrefixCodeLadder { prefix, cycle, offset } => {
                let vals: Vec<u64> = (0..=n)
                    .map(|i| {
                        let i = i as usize;
                        if i < prefix.len() {
                            prefix[i]
                        } else {
                            cycle[(i - prefix.len()) % cycle.len()]
                        }
                    })
                    .collect();
                let code = seqcode::encode(&vals)?;
                code.checked_mul(2)
                    .and_then(|x| x.checked_add(*offset))
                    .ok_or_else(|| Error::domain("prefix-code ladder outgrew u64"))
            }
            Kernel::SubseqBundle { parts, rest, at_zero } => {
                if n == 0 {
                    return Ok(*at_zero);
                }
                let (m, k) = seqcode::unpair(n)?;
                match parts.get(m as usize) {
                    Some(p) => p.eval(k, fuel),
                    None => rest.eval(k, fuel),
                }
            }
            Kernel::RangeEnumeration { gamma } => {
                let (node, input) = seqcode::interleave_parts(n);
                let f = crate::stream::Functional((**gamma).clone());
                let out = f.finite_apply(input, fuel)?;
                if seqcode::is_proper_prefix(node, out) {
                    Ok(node + 1)
                } else {
                    Ok(0)
                }
            }
            Kernel::TreeNodeEnum { tree } => match bfs_node(tree, n) {
                Some(moves) => match seqcode::encode(&moves) {
                    Ok(code) => Ok(code + 1),
                    Err(_) => Ok(0),
                },
                None => Ok(0),
            },
            // Everything else works on the decoded index.
            _ => self.node_value(&seqcode::decode(n), fuel),
        }
    }

    /// Stream value at index `encode(moves)`.
    pub fn node_value(&self, moves: &[u64], fuel: u64) -> Result<u64> {
        match self {
            Kernel::Identity
            | Kernel::ConstCode { .. }
            | Kernel::PrependCode { .. }
            | Kernel::ZipClosed { .. }
            | Kernel::BlockPlant
            | Kernel::UncPack
            | Kernel::SinkPairs
            | Kernel::FanWidth
            | Kernel::SupportFan
            | Kernel::UniquePathShift
            | Kernel::ShiftIntoUnique
            | Kernel::PadTwo
            | Kernel::ConstantRays
            | Kernel::UniqueZeroSurjection
            | Kernel::SingletonTrack
            | Kernel::SumCollapse
            | Kernel::SumExpand { .. }
            | Kernel::PerfectSplit { .. }
            | Kernel::FanBlocks { .. }
            | Kernel::FanShare { .. }
            | Kernel::EnumerationSurjection { .. }
            | Kernel::StrictDisjunction { .. }
            | Kernel::StrictConjunction { .. }
            | Kernel::StrictProjection { .. } => {
                // Functional codes: the first move is the coordinate code, the
                // remaining moves are the visible input values.
                match moves.split_first() {
                    None => Ok(0),
                    Some((&t, visible)) => {
                        let coord = seqcode::decode(t);
                        let visible_arg = StreamSpec::ev_periodic(
                            visible.to_vec(),
                            vec![0],
                        );
                        match self.coord_value(&visible_arg, &coord, Some(visible.len() as u64), fuel) {
                            Ok(Some(v)) => Ok(v + 1),
                            Ok(None) => Ok(0),
                            Err(e) => Err(e),
                        }
                    }
                }
            }
            Kernel::LengthAtLeast { min } => Ok(u64::from(moves.len() as u64 >= *min)),
            Kernel::SubseqBundle { parts, rest, at_zero } => match moves.split_first() {
                None => Ok(*at_zero),
                Some((&m, tail)) => match parts.get(m as usize) {
                    Some(p) => p.node_value(tail, fuel),
                    None => rest.node_value(tail, fuel),
                },
            },
            Kernel::RangeCode { gamma, moduli } => range_code_value(gamma, moduli, moves, fuel),
            Kernel::AnalyticUnion { codes } => analytic_union_value(codes, moves),
            Kernel::AnalyticIntersection { codes } => analytic_intersection_value(codes, moves),
            Kernel::CoanalyticIntersection { codes } => {
                Ok(1 - analytic_union_value(codes, moves)?)
            }
            Kernel::SouslinCode { system } => souslin_value(system, moves),
            Kernel::FixedPoint { gamma, own } => fixed_point_value(gamma, own, moves, fuel),
            Kernel::Diagonal { gamma } => diagonal_value(gamma, moves, fuel),
            Kernel::Boundedness { gamma } => boundedness_value(gamma, moves, fuel),
            _ => {
                let n = seqcode::encode(moves)?;
                self.value(n, fuel)
            }
        }
    }

    /// `(k|arg)(coord)` for functional kernels: the applied coordinate value,
    /// reading the argument as deeply as the clause requires.
    pub fn apply_value(&self, arg: &StreamSpec, coord: &[u64], fuel: u64) -> Result<u64> {
        match self.coord_value(arg, coord, None, fuel)? {
            Some(v) => Ok(v),
            None => Err(Error::fuel(
                format!("coordinate {coord:?} undetermined within fuel"),
                fuel,
            )),
        }
    }

    /// Shared clause evaluator. `visible` limits how much of the argument may
    /// be read (the literal neighborhood-code semantics); `None` allows
    /// arbitrary queries (the semantic application). Returns `None` when the
    /// clause is not yet determined by the visible part.
    fn coord_value(
        &self,
        arg: &StreamSpec,
        coord: &[u64],
        visible: Option<u64>,
        fuel: u64,
    ) -> Result<Option<u64>> {
        // Reads the argument at a numeric index, respecting visibility.
        let arg_at = |i: u64| -> Result<Option<u64>> {
            match visible {
                Some(v) if i >= v => Ok(None),
                _ => arg.eval(i, fuel).map(Some),
            }
        };
        // Reads the argument at a node index given by decoded moves.
        let arg_at_node = |node: &[u64]| -> Result<Option<u64>> {
            match visible {
                Some(v) => match seqcode::encode(node) {
                    Ok(i) if i < v => arg.eval(i, fuel).map(Some),
                    _ => Ok(None),
                },
                None => arg.node_value(node, fuel).map(Some),
            }
        };

        match self {
            Kernel::Identity => {
                let n = seqcode::encode(coord)?;
                arg_at(n)
            }
            Kernel::ConstCode { value } => {
                let n = seqcode::encode(coord)?;
                value.eval(n, fuel).map(Some)
            }
            Kernel::PrependCode { prefix } => {
                let n = seqcode::encode(coord)?;
                if (n as usize) < prefix.len() {
                    Ok(Some(prefix[n as usize]))
                } else {
                    arg_at(n - prefix.len() as u64)
                }
            }
            Kernel::ZipClosed { code } => {
                let need = coord.len().div_ceil(2) as u64;
                let mut evens = Vec::with_capacity(need as usize);
                for i in 0..need {
                    match arg_at(i)? {
                        Some(v) => evens.push(v),
                        None => return Ok(None),
                    }
                }
                let z = zip_with(&evens, coord);
                Ok(Some(u64::from(!code.node_member_moves(&z))))
            }
            Kernel::BlockPlant => {
                if coord.iter().any(|&v| v > 1) {
                    return Ok(Some(1));
                }
                let blocks = zero_run_list(coord);
                match arg_at_node(&blocks)? {
                    Some(v) => Ok(Some(u64::from(v != 0))),
                    None => Ok(None),
                }
            }
            Kernel::UncPack => unc_pack_value(coord, &arg_at),
            Kernel::SinkPairs => sink_pairs_value(coord, &arg_at_node),
            Kernel::FanWidth => {
                let n = seqcode::encode(coord)?;
                fan_width_value(arg, n, visible, fuel)
            }
            Kernel::SupportFan => {
                if coord.iter().any(|&v| v > 1) {
                    return Ok(Some(1));
                }
                for (k, &v) in coord.iter().enumerate() {
                    if v == 1 {
                        match arg_at(k as u64)? {
                            Some(x) if x != 0 => {}
                            Some(_) => return Ok(Some(1)),
                            None => return Ok(None),
                        }
                    }
                }
                Ok(Some(0))
            }
            Kernel::UniquePathShift => match coord.split_first() {
                None => Ok(Some(0)),
                Some((0, rest)) => Ok(Some(u64::from(!rest.iter().all(|&v| v == 0)))),
                Some((_, rest)) => match arg_at_node(rest)? {
                    Some(v) => Ok(Some(v)),
                    None => Ok(None),
                },
            },
            Kernel::ShiftIntoUnique => {
                let n = seqcode::encode(coord)?;
                if n == 0 {
                    return arg_at(0);
                }
                let (m, k) = seqcode::unpair(n)?;
                if m == 0 {
                    Ok(Some(0))
                } else {
                    arg_at(seqcode::pair(m - 1, k)?)
                }
            }
            Kernel::PadTwo => {
                let n = seqcode::encode(coord)?;
                if n == 0 {
                    return arg_at(0);
                }
                let (m, k) = seqcode::unpair(n)?;
                if m <= 1 {
                    arg_at(seqcode::pair(m, k)?)
                } else {
                    Ok(Some(1))
                }
            }
            Kernel::ConstantRays => {
                if coord.is_empty() {
                    return Ok(Some(0));
                }
                let m = coord[0];
                if coord.iter().any(|&v| v != m) {
                    return Ok(Some(1));
                }
                for k in 0..coord.len() as u64 - 1 {
                    match arg_at(seqcode::pair(m, k)?)? {
                        Some(0) => {}
                        Some(_) => return Ok(Some(1)),
                        None => return Ok(None),
                    }
                }
                Ok(Some(0))
            }
            Kernel::UniqueZeroSurjection => unique_zero_surjection_value(coord, &arg_at),
            Kernel::SingletonTrack => {
                for (i, &c) in coord.iter().enumerate() {
                    match arg_at(i as u64)? {
                        Some(v) if v == c => {}
                        Some(_) => return Ok(Some(1)),
                        None => return Ok(None),
                    }
                }
                Ok(Some(0))
            }
            Kernel::SumCollapse => match coord.split_first() {
                None => arg_at(0),
                Some((&i, rest)) => {
                    if rest.is_empty() {
                        // Admitted once the whole leading spine up to i is.
                        for j in 0..=i {
                            let spine: Vec<u64> = vec![0; j as usize];
                            match arg_at_node(&spine)? {
                                Some(0) => {}
                                Some(_) => return Ok(Some(1)),
                                None => return Ok(None),
                            }
                        }
                        Ok(Some(0))
                    } else {
                        let mut node: Vec<u64> = vec![0; i as usize];
                        node.push(1);
                        node.extend_from_slice(rest);
                        match arg_at_node(&node)? {
                            Some(v) => Ok(Some(v)),
                            None => Ok(None),
                        }
                    }
                }
            },
            Kernel::SumExpand { width } => {
                // Node shapes: 0̄i (spine), 0̄i 1 s (planted), anything else
                // rejected.
                let zeros = coord.iter().take_while(|&&v| v == 0).count();
                if zeros == coord.len() {
                    return Ok(Some(u64::from(coord.len() as u64 >= *width)));
                }
                let i = zeros as u64;
                if coord[zeros] != 1 || i >= *width {
                    return Ok(Some(1));
                }
                let mut node = vec![i];
                node.extend_from_slice(&coord[zeros + 1..]);
                match arg_at_node(&node)? {
                    Some(v) => Ok(Some(v)),
                    None => Ok(None),
                }
            }
            Kernel::PerfectSplit { tree, cache } => {
                let n = seqcode::encode(coord)?;
                perfect_split_value(tree, cache, arg, n, visible, fuel)
            }
            Kernel::FanBlocks { fan } => {
                let n = seqcode::encode(coord)?;
                fan_blocks_value(fan, arg, n, visible, fuel)
            }
            Kernel::FanShare { fan } => fan_share_value(fan, coord, &arg_at_node),
            Kernel::EnumerationSurjection { delta } => {
                let n = seqcode::encode(coord)?;
                enumeration_surjection_value(delta, arg, n, visible, fuel)
            }
            // The range-combination codes only fire in their applied reading;
            // the literal neighborhood reading under-fires (stays 0), which
            // keeps them total without ever firing on undetermined data.
            Kernel::StrictDisjunction { codes } => {
                if visible.is_some() {
                    return Ok(None);
                }
                strict_disjunction_value(codes, arg, coord, fuel)
            }
            Kernel::StrictConjunction { codes } => {
                if visible.is_some() {
                    return Ok(None);
                }
                strict_conjunction_value(codes, arg, coord, fuel)
            }
            Kernel::StrictProjection { gamma } => {
                if visible.is_some() {
                    return Ok(None);
                }
                let mut inner = vec![0u64];
                inner.extend_from_slice(coord);
                crate::stream::apply_coord(gamma, arg, &inner, fuel).map(Some)
            }
            _ => Err(Error::domain(format!(
                "kernel {self:?} is not a functional code"
            ))),
        }
    }
}

/// zip(evens, odds-from-coordinate): length = |coord|, even slots from
/// `evens`, odd slots from `coord`'s entries.
fn zip_with(evens: &[u64], coord: &[u64]) -> Vec<u64> {
    let n = coord.len();
    (0..n)
        .map(|p| if p % 2 == 0 { evens[p / 2] } else { coord[p / 2] })
        .collect()
}

/// 0-run lengths before each 1 of a binary sequence (the block list).
fn zero_run_list(s: &[u64]) -> Vec<u64> {
    let mut blocks = Vec::new();
    let mut run = 0u64;
    for &v in s {
        if v == 1 {
            blocks.push(run);
            run = 0;
        } else {
            run += 1;
        }
    }
    blocks
}

fn analytic_union_value(codes: &[Arc<RegularTree>], moves: &[u64]) -> Result<u64> {
    // Determined positions of the coded bundle: position p has value moves[p].
    let get = |p: u64| -> Option<u64> {
        if (p as usize) < moves.len() {
            Some(moves[p as usize])
        } else {
            None
        }
    };
    // Branch choice = subsequence 1 at 0.
    let v = match get(seqcode::pair(1, 0).expect("small")) {
        Some(v) => v,
        None => return Ok(0),
    };
    let tree = &codes[(v % codes.len() as u64) as usize];
    // zip of subsequence 0 with the shifted subsequence 1.
    let mut z = Vec::new();
    for p in 0.. {
        let val = if p % 2 == 0 {
            get(seqcode::pair(0, p / 2)?)
        } else {
            get(seqcode::pair(1, p / 2 + 1)?)
        };
        match val {
            Some(x) => z.push(x),
            None => break,
        }
    }
    Ok(u64::from(!tree.node_member_moves(&z)))
}

fn analytic_intersection_value(codes: &[Arc<RegularTree>], moves: &[u64]) -> Result<u64> {
    let get = |p: u64| -> Option<u64> {
        if (p as usize) < moves.len() {
            Some(moves[p as usize])
        } else {
            None
        }
    };
    for (j, tree) in codes.iter().enumerate() {
        let j = j as u64;
        let mut z = Vec::new();
        for p in 0.. {
            let val = if p % 2 == 0 {
                get(seqcode::pair(0, p / 2)?)
            } else {
                get(seqcode::pair(1, seqcode::pair(j, p / 2)?)?)
            };
            match val {
                Some(x) => z.push(x),
                None => break,
            }
        }
        if !tree.node_member_moves(&z) {
            return Ok(1);
        }
    }
    Ok(0)
}

fn souslin_value(system: &[Arc<RegularTree>], moves: &[u64]) -> Result<u64> {
    // The point is an interleaved pair ⟨α, γ⟩: evens α, odds γ.
    let get = |p: usize| -> Option<u64> { moves.get(p).copied() };
    let alpha = |i: u64| get(2 * i as usize);
    let gamma = |i: u64| get(2 * i as usize + 1).map(Ok::<u64, Error>);
    let gamma_at = |i: u64| -> Result<Option<u64>> { gamma(i).transpose() };
    // γ⁰ values choose the branch codes.
    let mut branch: Vec<u64> = Vec::new();
    for k in 0.. {
        match gamma_at(seqcode::pair(0, k)?)? {
            Some(v) => branch.push(v),
            None => break,
        }
    }
    for n in 0..=branch.len() as u64 {
        let s = seqcode::encode(&branch[..n as usize])?;
        let tree = &system[(s % system.len() as u64) as usize];
        // zip of α with γ^{1,n}.
        let mut z = Vec::new();
        for p in 0u64.. {
            let val = if p % 2 == 0 {
                alpha(p / 2)
            } else {
                gamma_at(seqcode::pair(1, seqcode::pair(n, p / 2)?)?)?
            };
            match val {
                Some(x) => z.push(x),
                None => break,
            }
        }
        if !tree.node_member_moves(&z) {
            return Ok(1);
        }
    }
    Ok(0)
}

/// Chain-of-prefix-codes node value: entries are `2c+1` or `2c+2` with `c`
/// the code of a chain of sequences growing one entry per step, all but the
/// last carrying input value 0; zeros only as a tail.
fn unc_pack_value(
    coord: &[u64],
    arg_at: &dyn Fn(u64) -> Result<Option<u64>>,
) -> Result<Option<u64>> {
    let body_len = coord.iter().take_while(|&&v| v != 0).count();
    if coord[body_len..].iter().any(|&v| v != 0) {
        return Ok(Some(1));
    }
    let mut chain_prev: Option<Vec<u64>> = None;
    for (i, &v) in coord[..body_len].iter().enumerate() {
        let c = (v - 1) / 2;
        let t = seqcode::decode(c);
        if t.len() != i + 1 {
            return Ok(Some(1));
        }
        if let Some(prev) = &chain_prev {
            if t[..i] != prev[..] {
                return Ok(Some(1));
            }
        }
        // All chain elements except the last must carry value 0.
        if i + 1 < body_len {
            match arg_at(c)? {
                Some(0) => {}
                Some(_) => return Ok(Some(1)),
                None => return Ok(None),
            }
        }
        chain_prev = Some(t);
    }
    Ok(Some(0))
}

/// Pairs-of-moves node value for the sink construction: each appended pair
/// (i, j) needs i=j=0, or j=1 with the even history extended by i admitted by
/// the input.
fn sink_pairs_value(
    coord: &[u64],
    arg_at_node: &dyn Fn(&[u64]) -> Result<Option<u64>>,
) -> Result<Option<u64>> {
    let evens: Vec<u64> = coord.iter().step_by(2).copied().collect();
    for r in 0..coord.len() {
        if r % 2 == 1 {
            let i = coord[r - 1];
            let j = coord[r];
            if i == 0 && j == 0 {
                continue;
            }
            if j != 1 {
                return Ok(Some(1));
            }
            // Every prefix of evens[..r/2 + 1] must carry value 0.
            let hist = &evens[..r / 2 + 1];
            for k in 0..=hist.len() {
                match arg_at_node(&hist[..k])? {
                    Some(0) => {}
                    Some(_) => return Ok(Some(1)),
                    None => return Ok(None),
                }
            }
        } else {
            // A lone trailing even move i: fine if i=0 or the history is
            // admitted (some flag will have to follow).
            let i = coord[r];
            if i == 0 {
                continue;
            }
            let hist = &evens[..r / 2 + 1];
            for k in 0..=hist.len() {
                match arg_at_node(&hist[..k])? {
                    Some(0) => {}
                    Some(_) => return Ok(Some(1)),
                    None => return Ok(None),
                }
            }
        }
    }
    Ok(Some(0))
}

/// Point value of the fan-width functional: 1 when some binary node of
/// length n extended by 1 is admitted by the input tree code.
fn fan_width_value(
    arg: &StreamSpec,
    n: u64,
    visible: Option<u64>,
    fuel: u64,
) -> Result<Option<u64>> {
    let query = |node: &[u64]| -> Result<Option<u64>> {
        match visible {
            Some(v) => match seqcode::encode(node) {
                Ok(i) if i < v => arg.eval(i, fuel).map(Some),
                _ => Ok(None),
            },
            None => arg.node_value(node, fuel).map(Some),
        }
    };
    // DFS over input-admitted binary nodes.
    let mut stack: Vec<Vec<u64>> = vec![vec![]];
    let mut undetermined = false;
    while let Some(node) = stack.pop() {
        match query(&node)? {
            None => {
                undetermined = true;
                continue;
            }
            Some(v) if v != 0 => continue,
            Some(_) => {}
        }
        if node.len() as u64 == n {
            let mut probe = node.clone();
            probe.push(1);
            match query(&probe)? {
                None => undetermined = true,
                Some(0) => return Ok(Some(1)),
                Some(_) => {}
            }
            continue;
        }
        for b in [0u64, 1] {
            let mut next = node.clone();
            next.push(b);
            stack.push(next);
        }
    }
    if undetermined {
        Ok(None)
    } else {
        Ok(Some(0))
    }
}

/// The strongly injective surjection onto points with exactly one vanishing
/// subsequence.
fn unique_zero_surjection_value(
    coord: &[u64],
    arg_at: &dyn Fn(u64) -> Result<Option<u64>>,
) -> Result<Option<u64>> {
    let n = seqcode::encode(coord)?;
    if n == 0 {
        return arg_at(0);
    }
    let d = match arg_at(seqcode::pair(0, 0)?)? {
        Some(d) => d,
        None => return Ok(None),
    };
    let (m, k) = seqcode::unpair(n)?;
    if m == d {
        return Ok(Some(0));
    }
    let src = if m < d { m + 1 } else { m };
    // Prefix from the coded ladder at position src of subsequence 0.
    let code = match arg_at(seqcode::pair(0, src)?)? {
        Some(c) => c,
        None => return Ok(None),
    };
    let x = code + 1;
    let twos = x.trailing_zeros() as u64;
    let odd = x >> twos;
    let peak = odd / 2 + 1; // odd = 2n̂+1 ↦ n̂+1
    if k < twos {
        Ok(Some(0))
    } else if k == twos {
        Ok(Some(peak))
    } else {
        arg_at(seqcode::pair(src, k - twos - 1)?)
    }
}

/// The splitting map of a perfect tree: F(⟨⟩) = ⟨⟩ and F(s∗⟨b⟩) picks the
/// numerically least admitted incompatible pair extending F(s).
fn perfect_split(
    tree: &RegularTree,
    cache: &Cache<Vec<u64>, Vec<u64>>,
    s: &[u64],
) -> Result<Vec<u64>> {
    if s.is_empty() {
        return Ok(vec![]);
    }
    if let Some(hit) = cache.get(&s.to_vec()) {
        return Ok(hit);
    }
    let (parent, b) = (&s[..s.len() - 1], s[s.len() - 1]);
    if b > 1 {
        return Err(Error::domain("split map is defined on binary nodes"));
    }
    let base = perfect_split(tree, cache, parent)?;
    let (a0, a1) = least_split_pair(tree, &base)?;
    let out0 = a0.clone();
    let out1 = a1.clone();
    let mut with0 = parent.to_vec();
    with0.push(0);
    let mut with1 = parent.to_vec();
    with1.push(1);
    cache.put(with0, out0);
    cache.put(with1, out1);
    Ok(if b == 0 { a0 } else { a1 })
}

/// Numerically least pair code `⟨a, b⟩` of incompatible admitted extensions
/// of `base`. The pair order is compared through big integers since node
/// codes outgrow u64 quickly.
fn least_split_pair(tree: &RegularTree, base: &[u64]) -> Result<(Vec<u64>, Vec<u64>)> {
    let q = tree
        .state_after(base)
        .ok_or_else(|| Error::domain("split map walked off the tree"))?;
    // Follow the single-path segment to the first branching state.
    let mut path = base.to_vec();
    let mut state = q;
    loop {
        let mut edges = tree.states[state].edge_representatives();
        edges.sort_unstable();
        if edges.len() >= 2 || tree.states[state].tail.is_some() {
            if edges.len() < 2 {
                return Err(Error::domain("tree is not perfect: no split below a node"));
            }
            // Default candidate: the two least moves at the first branch.
            let mut cand0 = path.clone();
            cand0.push(edges[0].0);
            let mut cand1 = path.clone();
            cand1.push(edges[1].0);
            let bound = pair_code_big(&cand0, &cand1);
            // Exhaustive search below the bound.
            let nodes = nodes_with_code_below(tree, &bound);
            let mut best: Option<(BigUint, Vec<u64>, Vec<u64>)> = None;
            for a in &nodes {
                if !is_strict_extension(base, a) {
                    continue;
                }
                for b in &nodes {
                    if !is_strict_extension(base, b) || !incompatible_moves(a, b) {
                        continue;
                    }
                    let code = pair_code_big(a, b);
                    if best.as_ref().is_none_or(|(c, _, _)| code < *c) {
                        best = Some((code, a.clone(), b.clone()));
                    }
                }
            }
            let (_, a, b) = best.expect("the branch candidate is itself valid");
            return Ok((a, b));
        }
        let (mv, next) = edges[0];
        path.push(mv);
        state = next;
    }
}

fn is_strict_extension(base: &[u64], node: &[u64]) -> bool {
    node.len() > base.len() && node[..base.len()] == base[..]
}

fn incompatible_moves(a: &[u64], b: &[u64]) -> bool {
    let n = a.len().min(b.len());
    a[..n] != b[..n]
}

fn encode_big(moves: &[u64]) -> BigUint {
    let mut code = BigUint::from(0u32);
    for &a in moves.iter().rev() {
        let w = BigUint::from(a) + &code;
        code = &w * (&w + 1u32) / 2u32 + &code + 1u32;
    }
    code
}

fn pair_code_big(a: &[u64], b: &[u64]) -> BigUint {
    // pair(code(a), pair(code(b), 0)) in big integers.
    let ca = encode_big(a);
    let cb = encode_big(b);
    let inner = &cb * (&cb + 1u32) / 2u32 + &cb + 1u32;
    let w = &ca + &inner;
    &w * (&w + 1u32) / 2u32 + &inner + 1u32
}

/// All tree nodes whose big-integer code is at most `bound`. Node codes grow
/// strictly along both extension and move value, so the search prunes.
fn nodes_with_code_below(tree: &RegularTree, bound: &BigUint) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let root = match tree.root {
        Some(r) => r,
        None => return out,
    };
    let mut stack: Vec<(Vec<u64>, usize)> = vec![(vec![], root)];
    while let Some((node, q)) = stack.pop() {
        if encode_big(&node) > *bound {
            continue;
        }
        out.push(node.clone());
        let mut edges = tree.states[q].edge_representatives();
        edges.sort_unstable();
        for (mv, next) in edges {
            let mut n = node.clone();
            n.push(mv);
            // Moves within a tail repeat; larger moves only increase codes,
            // so one period of representatives suffices for minimality.
            if encode_big(&n) <= *bound {
                stack.push((n, next));
            }
        }
    }
    out
}

fn perfect_split_value(
    tree: &RegularTree,
    cache: &Cache<Vec<u64>, Vec<u64>>,
    arg: &StreamSpec,
    coord_n: u64,
    visible: Option<u64>,
    fuel: u64,
) -> Result<Option<u64>> {
    // Output value at position coord_n: determined once the split image of
    // the visible binary prefix is long enough.
    let limit = match visible {
        Some(v) => v,
        None => fuel.max(coord_n + 2),
    };
    let mut prefix = Vec::new();
    for i in 0..limit {
        if prefix.len() as u64 > coord_n {
            break;
        }
        let v = arg.eval(i, fuel)?;
        if v > 1 {
            // Not a binary point: the split map never fires.
            return Ok(None);
        }
        prefix.push(v);
        let image = perfect_split(tree, cache, &prefix)?;
        if image.len() as u64 > coord_n {
            return Ok(Some(image[coord_n as usize]));
        }
    }
    Ok(None)
}

/// Children of a fan state in move order.
fn fan_children(tree: &RegularTree, state: usize) -> Vec<(u64, usize)> {
    let mut edges = tree.states[state].edge_representatives();
    edges.sort_unstable();
    edges
}

/// Value at output position `coord_n` of the block surjection from the
/// binary tree onto the fan.
fn fan_blocks_value(
    fan: &RegularTree,
    arg: &StreamSpec,
    coord_n: u64,
    visible: Option<u64>,
    fuel: u64,
) -> Result<Option<u64>> {
    let root = fan
        .root
        .ok_or_else(|| Error::domain("fan surjection over an empty fan"))?;
    let limit = match visible {
        Some(v) => v,
        None => fuel.max(coord_n + 1).max(8) * 8,
    };
    let mut output: Vec<u64> = Vec::new();
    let mut state = root;
    let mut pos = 0u64;
    loop {
        if output.len() as u64 > coord_n {
            return Ok(Some(output[coord_n as usize]));
        }
        let children = fan_children(fan, state);
        match children.len() {
            0 => return Err(Error::domain("fan surjection reached a dead end")),
            1 => {
                output.push(children[0].0);
                state = children[0].1;
            }
            k => {
                let blocks: Vec<Vec<u64>> = bar01(k as u64 - 1)?
                    .into_iter()
                    .map(seqcode::decode)
                    .collect();
                // Read input until the consumed string equals one block.
                let mut consumed: Vec<u64> = Vec::new();
                let choice = loop {
                    if let Some(j) = blocks.iter().position(|b| b[..] == consumed[..]) {
                        break j;
                    }
                    if pos >= limit {
                        return Ok(None);
                    }
                    let v = arg.eval(pos, fuel)?;
                    pos += 1;
                    if v > 1 {
                        return Ok(None);
                    }
                    consumed.push(v);
                };
                output.push(children[choice].0);
                state = children[choice].1;
            }
        }
    }
}

/// Finitely applied block inversion: output moves fully determined by the
/// binary input node.
fn fan_blocks_finite(fan: &RegularTree, input: &[u64]) -> Result<Vec<u64>> {
    let root = match fan.root {
        Some(r) => r,
        None => return Err(Error::domain("fan surjection over an empty fan")),
    };
    let mut output = Vec::new();
    let mut state = root;
    let mut pos = 0usize;
    loop {
        // The finite application is bounded by the input length.
        if output.len() >= input.len() {
            return Ok(output);
        }
        let children = fan_children(fan, state);
        match children.len() {
            0 => return Err(Error::domain("fan surjection reached a dead end")),
            1 => {
                output.push(children[0].0);
                state = children[0].1;
            }
            k => {
                let blocks: Vec<Vec<u64>> = bar01(k as u64 - 1)?
                    .into_iter()
                    .map(seqcode::decode)
                    .collect();
                let mut consumed: Vec<u64> = Vec::new();
                let choice = loop {
                    if let Some(j) = blocks.iter().position(|b| b[..] == consumed[..]) {
                        break Some(j);
                    }
                    if pos >= input.len() || input[pos] > 1 {
                        break None;
                    }
                    consumed.push(input[pos]);
                    pos += 1;
                };
                match choice {
                    Some(j) => {
                        output.push(children[j].0);
                        state = children[j].1;
                    }
                    None => return Ok(output),
                }
            }
        }
    }
}

fn fan_share_value(
    fan: &RegularTree,
    coord: &[u64],
    arg_at_node: &dyn Fn(&[u64]) -> Result<Option<u64>>,
) -> Result<Option<u64>> {
    let determined = fan_blocks_finite(fan, coord)?;
    for k in 0..=determined.len() {
        match arg_at_node(&determined[..k])? {
            Some(0) => {}
            Some(_) => return Ok(Some(1)),
            None => return Ok(None),
        }
    }
    Ok(Some(0))
}

/// Surjection from Baire space onto the closed set behind a semi-located
/// node enumeration: walks immediate successors named by the input.
fn enumeration_surjection_value(
    delta: &StreamSpec,
    arg: &StreamSpec,
    coord_n: u64,
    visible: Option<u64>,
    fuel: u64,
) -> Result<Option<u64>> {
    let limit = match visible {
        Some(v) => v,
        None => coord_n + 1,
    };
    let mut node: Vec<u64> = Vec::new();
    for i in 0..limit {
        if node.len() as u64 > coord_n {
            break;
        }
        let v = arg.eval(i, fuel)?;
        let next = successor_for(delta, &node, v, fuel)?;
        node = next;
    }
    if node.len() as u64 > coord_n {
        Ok(Some(node[coord_n as usize]))
    } else {
        Ok(None)
    }
}

/// The table step: δ(v)−1 if that is an immediate successor of `node`, else
/// the first enumerated immediate successor.
fn successor_for(
    delta: &StreamSpec,
    node: &[u64],
    v: u64,
    fuel: u64,
) -> Result<Vec<u64>> {
    let is_successor = |code: u64| -> Option<Vec<u64>> {
        let items = seqcode::decode(code);
        if items.len() == node.len() + 1 && items[..node.len()] == node[..] {
            Some(items)
        } else {
            None
        }
    };
    let dv = delta.eval(v, fuel)?;
    if dv > 0 {
        if let Some(s) = is_successor(dv - 1) {
            return Ok(s);
        }
    }
    let bound = 1u64.checked_shl((2 * fuel).min(20) as u32).unwrap_or(u64::MAX);
    for p in 0..=bound {
        let dp = delta.eval(p, fuel)?;
        if dp > 0 {
            if let Some(s) = is_successor(dp - 1) {
                return Ok(s);
            }
        }
    }
    Err(Error::fuel(
        format!("no enumerated successor of node {node:?} within fuel"),
        fuel,
    ))
}

fn strict_disjunction_value(
    codes: &[StreamSpec],
    arg: &StreamSpec,
    coord: &[u64],
    fuel: u64,
) -> Result<Option<u64>> {
    let choice = (arg.eval(0, fuel)? % codes.len() as u64) as usize;
    let body = StreamSpec::kernel(Kernel::Drop { a: Box::new(arg.clone()), count: 1 });
    let n = seqcode::encode(coord)?;
    if n == 0 {
        return body.eval(0, fuel).map(Some);
    }
    let (m, k) = seqcode::unpair(n)?;
    if m == choice as u64 {
        let section = StreamSpec::subseq(body, m);
        crate::stream::apply_coord(&codes[choice], &section, &seqcode::decode(k), fuel).map(Some)
    } else {
        body.eval(n, fuel).map(Some)
    }
}

fn strict_conjunction_value(
    codes: &[StreamSpec],
    arg: &StreamSpec,
    coord: &[u64],
    fuel: u64,
) -> Result<Option<u64>> {
    let n = seqcode::encode(coord)?;
    if n == 0 {
        return arg.eval(0, fuel).map(Some);
    }
    let (m, k) = seqcode::unpair(n)?;
    let code = &codes[(m % codes.len() as u64) as usize];
    let section = StreamSpec::subseq(arg.clone(), m);
    crate::stream::apply_coord(code, &section, &seqcode::decode(k), fuel).map(Some)
}

/// Self-referential firing record: value 1 at a node exactly when some
/// coordinate drawn from the node's prefixes fires along this stream's own
/// values, with modulus within the node's length and decoded value nonzero.
fn fixed_point_value(
    gamma: &StreamSpec,
    own: &Cache<u64, u64>,
    moves: &[u64],
    fuel: u64,
) -> Result<u64> {
    let own_value = |i: u64, own: &Cache<u64, u64>| -> Result<u64> {
        if let Some(v) = own.get(&i) {
            return Ok(v);
        }
        let v = fixed_point_value(gamma, own, &seqcode::decode(i), fuel)?;
        own.put(i, v);
        Ok(v)
    };
    let len = moves.len();
    // Own prefix values ᾱm for m ≤ len: indices 0..len-1 are all < the
    // current index, so the recursion is well-founded.
    let mut own_prefix: Vec<u64> = Vec::with_capacity(len);
    for i in 0..len as u64 {
        own_prefix.push(own_value(i, own)?);
    }
    for t_len in 0..=len {
        let t = seqcode::encode(&moves[..t_len])?;
        // Least firing prefix of coordinate t along own values, within len.
        for m in 0..=len {
            let mut index = vec![t];
            index.extend_from_slice(&own_prefix[..m]);
            let raw = gamma.node_value(&index, fuel)?;
            if raw != 0 {
                if raw > 1 {
                    return Ok(1);
                }
                break;
            }
        }
    }
    Ok(0)
}

/// Whether the fixed-point stream for `gamma` forbids the node β̄d — by the
/// defining clause this holds exactly when some coordinate β̄i (i ≤ d) fires
/// along the stream with modulus ≤ d and decoded value nonzero.
pub fn fixed_point_forbids(
    gamma: &StreamSpec,
    alpha: &StreamSpec,
    beta: &StreamSpec,
    depth: u64,
    fuel: u64,
) -> Result<(bool, bool)> {
    // Left side: α forbids β̄d (some prefix of β gets a nonzero α-value).
    let mut lhs = false;
    for i in 0..=depth {
        let node = beta.values(i, fuel)?;
        if alpha.node_value(&node, fuel)? != 0 {
            lhs = true;
            break;
        }
    }
    // Right side: some coordinate β̄i of γ|α fires along α within depth with
    // value ≠ 0.
    let mut rhs = false;
    let alpha_vals = alpha.values(depth, fuel)?;
    'outer: for i in 0..=depth {
        let t = seqcode::encode(&beta.values(i, fuel)?)?;
        for m in 0..=depth as usize {
            if m > alpha_vals.len() {
                break;
            }
            let mut index = vec![t];
            index.extend_from_slice(&alpha_vals[..m]);
            let raw = gamma.node_value(&index, fuel)?;
            if raw != 0 {
                if raw > 1 {
                    rhs = true;
                    break 'outer;
                }
                break;
            }
        }
    }
    Ok((lhs, rhs))
}

/// Diagonal stream: fires at the least prefix of a point that resolves the
/// inner functional's own diagonal value, exceeding it by one.
fn diagonal_value(gamma: &StreamSpec, moves: &[u64], fuel: u64) -> Result<u64> {
    let here = diagonal_resolve(gamma, moves, fuel)?;
    match here {
        None => Ok(0),
        Some(q) => {
            if !moves.is_empty() {
                let before = diagonal_resolve(gamma, &moves[..moves.len() - 1], fuel)?;
                if before.is_some() {
                    return Ok(0);
                }
            }
            Ok(q + 2)
        }
    }
}

/// Resolves (γ|β)(β) from a finite prefix of β, if determined.
fn diagonal_resolve(gamma: &StreamSpec, prefix: &[u64], fuel: u64) -> Result<Option<u64>> {
    let len = prefix.len();
    // Values of the point γ|β at the indices β̄n, as far as visible.
    let coord_value = |n: usize| -> Result<Option<u64>> {
        let t = seqcode::encode(&prefix[..n])?;
        for k in 0..=len {
            let mut index = vec![t];
            index.extend_from_slice(&prefix[..k]);
            let raw = gamma.node_value(&index, fuel)?;
            if raw != 0 {
                return Ok(Some(raw - 1));
            }
        }
        Ok(None)
    };
    for n in 0..=len {
        match coord_value(n)? {
            None => return Ok(None),
            Some(0) => continue,
            Some(q) => return Ok(Some(q - 1)),
        }
    }
    Ok(None)
}

/// Boundedness stream: 1 at an interleaved node exactly when some even
/// history fires on some odd history with decoded value nonzero (raw above
/// one at its least firing prefix).
fn boundedness_value(gamma: &StreamSpec, moves: &[u64], fuel: u64) -> Result<u64> {
    let n = moves.len();
    let evens: Vec<u64> = moves.iter().step_by(2).copied().collect();
    let odds: Vec<u64> = moves.iter().skip(1).step_by(2).copied().collect();
    for i in 0..evens.len() {
        if 2 * i >= n {
            break;
        }
        let t = seqcode::encode(&evens[..=i])?;
        // Least firing prefix of coordinate t along the odd history.
        for p in 0..=odds.len() {
            let mut index = vec![t];
            index.extend_from_slice(&odds[..p]);
            let raw = gamma.node_value(&index, fuel)?;
            if raw != 0 {
                if raw > 1 {
                    return Ok(1);
                }
                break;
            }
        }
    }
    Ok(0)
}

/// The boundedness embedding: maps a node admitted by the applied family
/// member to the interleave of the node with the member's values.
pub fn boundedness_embed(
    beta: &StreamSpec,
    node: &[u64],
    fuel: u64,
) -> Result<Vec<u64>> {
    let vals = beta.values(node.len() as u64, fuel)?;
    let mut out = Vec::with_capacity(2 * node.len());
    for i in 0..node.len() {
        out.push(node[i]);
        out.push(vals[i]);
    }
    Ok(out)
}

/// Range code value at node t: 0 exactly when some binary input of the
/// modulus length for |t| maps onto an extension of t. The modulus search is
/// the computable content of the compactness argument and is fuel-bounded.
pub fn range_code_value(
    gamma: &StreamSpec,
    moduli: &Cache<u64, u64>,
    t: &[u64],
    fuel: u64,
) -> Result<u64> {
    let n = t.len() as u64;
    let p = range_code_modulus(gamma, moduli, n, fuel)?;
    let f = crate::stream::Functional(gamma.clone());
    for s in binary_nodes(p) {
        let image = f.finite_apply_moves(&s, fuel)?;
        if image.len() >= t.len() && image[..t.len()] == t[..] {
            return Ok(0);
        }
    }
    Ok(1)
}

/// δ(n): least p with every binary s of length p determining at least n
/// output values.
pub fn range_code_modulus(
    gamma: &StreamSpec,
    moduli: &Cache<u64, u64>,
    n: u64,
    fuel: u64,
) -> Result<u64> {
    if let Some(p) = moduli.get(&n) {
        return Ok(p);
    }
    let f = crate::stream::Functional(gamma.clone());
    for p in n..=fuel.max(n) {
        let mut all = true;
        for s in binary_nodes(p) {
            let image = f.finite_apply_moves(&s, fuel)?;
            if (image.len() as u64) < n {
                all = false;
                break;
            }
        }
        if all {
            moduli.put(n, p);
            return Ok(p);
        }
    }
    Err(Error::fuel(
        format!("no uniform modulus for output length {n} within fuel"),
        fuel,
    ))
}

/// η(n): least p such that every pair of binary inputs of length p differing
/// within n maps to incompatible outputs. Detects non-injectivity when two
/// incompatible inputs keep fully equal outputs at the final bound.
pub fn range_code_separation(
    gamma: &StreamSpec,
    n: u64,
    fuel: u64,
) -> Result<u64> {
    let f = crate::stream::Functional(gamma.clone());
    let mut last_equal: Option<(Vec<u64>, Vec<u64>)> = None;
    for p in n..=fuel.max(n) {
        let nodes = binary_nodes(p);
        let mut ok = true;
        last_equal = None;
        'pairs: for (i, s) in nodes.iter().enumerate() {
            for t in &nodes[i + 1..] {
                if s[..n as usize] == t[..n as usize] {
                    continue;
                }
                let is = f.finite_apply_moves(s, fuel)?;
                let it = f.finite_apply_moves(t, fuel)?;
                let m = is.len().min(it.len());
                if is[..m] == it[..m] {
                    ok = false;
                    if is == it {
                        last_equal = Some((s.clone(), t.clone()));
                    }
                    break 'pairs;
                }
            }
        }
        if ok {
            return Ok(p);
        }
    }
    if let Some((s, t)) = last_equal {
        return Err(Error::domain(format!(
            "function is not strongly injective: {s:?} and {t:?} keep equal images"
        )));
    }
    Err(Error::fuel(
        format!("no separation modulus for input length {n} within fuel"),
        fuel,
    ))
}

/// The preimage extractor of the range code: recovers the first `upto`
/// values of a binary preimage of `eps` by growing the unique viable binary
/// prefix, deepening the lookahead until one branch survives.
pub fn range_code_preimage(
    gamma: &StreamSpec,
    eps: &StreamSpec,
    upto: u64,
    fuel: u64,
) -> Result<Vec<u64>> {
    let f = crate::stream::Functional(gamma.clone());
    let compatible = |s: &[u64]| -> Result<bool> {
        let image = f.finite_apply_moves(s, fuel)?;
        for (j, v) in image.iter().enumerate() {
            if eps.eval(j as u64, fuel)? != *v {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let viable = |cand: &[u64], look: u64| -> Result<bool> {
        for suffix in binary_nodes(look) {
            let mut s = cand.to_vec();
            s.extend(suffix);
            if compatible(&s)? {
                return Ok(true);
            }
        }
        Ok(false)
    };
    let mut prefix: Vec<u64> = Vec::new();
    while (prefix.len() as u64) < upto {
        let mut chosen = None;
        for look in 0..=fuel.min(12) {
            let mut survivors = Vec::new();
            for b in [0u64, 1] {
                let mut cand = prefix.clone();
                cand.push(b);
                if viable(&cand, look)? {
                    survivors.push(b);
                }
            }
            match survivors.len() {
                0 => {
                    return Err(Error::domain(
                        "point is not in the range: every binary branch leaves its prefix",
                    ))
                }
                1 => {
                    chosen = Some(survivors[0]);
                    break;
                }
                _ => continue,
            }
        }
        match chosen {
            Some(b) => prefix.push(b),
            None => {
                return Err(Error::fuel(
                    "preimage branch stays ambiguous within the lookahead bound",
                    fuel,
                ))
            }
        }
    }
    Ok(prefix)
}

/// All binary sequences of length `p`.
pub fn binary_nodes(p: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..p {
        let mut next = Vec::with_capacity(out.len() * 2);
        for s in out {
            let mut a = s.clone();
            a.push(0);
            next.push(a);
            let mut b = s;
            b.push(1);
            next.push(b);
        }
        out = next;
    }
    out
}

impl Kernel {
    /// Range-code kernels evaluate through the modulus machinery.
    pub fn range_code(gamma: StreamSpec) -> Kernel {
        Kernel::RangeCode { gamma: Box::new(gamma), moduli: Cache::default() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_runs() {
        assert_eq!(zero_run_list(&[0, 0, 1, 0, 1]), vec![2, 1]);
        assert_eq!(zero_run_list(&[1, 1]), vec![0, 0]);
        assert_eq!(zero_run_list(&[0, 0]), Vec::<u64>::new());
    }

    #[test]
    fn identity_kernel_literal() {
        let k = Kernel::Identity;
        // Coordinate 1 with visible input [5, 6] fires with value 6.
        let n = seqcode::pair(1, seqcode::encode(&[5, 6]).unwrap()).unwrap();
        assert_eq!(k.value(n, 10).unwrap(), 7);
        // Coordinate 3 is not determined by two visible values.
        let n = seqcode::pair(3, seqcode::encode(&[5, 6]).unwrap()).unwrap();
        assert_eq!(k.value(n, 10).unwrap(), 0);
    }

    #[test]
    fn block_plant_values() {
        use crate::trees::RegularTree;
        let k = Kernel::BlockPlant;
        let tree = StreamSpec::tree_char(RegularTree::single_path(&[], &[0]));
        // Node 0̄2 1 0̄3: block list [2]; the zero path admits [2]? the tree
        // char at node [2] is 1 (only zeros admitted), so the value is 1.
        assert_eq!(
            k.apply_value(&tree, &[0, 0, 1, 0, 0, 0], 10).unwrap(),
            1
        );
        // Node 1 0̄3: block list [0]; node [0] is on the zero path → 0.
        assert_eq!(k.apply_value(&tree, &[1, 0, 0, 0], 10).unwrap(), 0);
        // Non-binary node → 1.
        assert_eq!(k.apply_value(&tree, &[2], 10).unwrap(), 1);
    }

    #[test]
    fn fan_blocks_on_cantor_is_identity() {
        let k = Kernel::FanBlocks { fan: Arc::new(RegularTree::cantor()) };
        let alpha = StreamSpec::ev_periodic(vec![0, 1, 1], vec![0]);
        for j in 0..6 {
            assert_eq!(
                k.apply_value(&alpha, &seqcode::decode(j), 30).unwrap(),
                alpha.eval(j, 30).unwrap(),
            );
        }
    }

    #[test]
    fn binary_node_count() {
        assert_eq!(binary_nodes(5).len(), 32);
    }
}

/// The `n`-th node of a finitely branching tree in breadth-first order.
fn bfs_node(tree: &RegularTree, n: u64) -> Option<Vec<u64>> {
    let root = tree.root?;
    let mut layer: Vec<(Vec<u64>, usize)> = vec![(vec![], root)];
    let mut count = 0u64;
    loop {
        if layer.is_empty() {
            return None;
        }
        let mut next = Vec::new();
        for (node, q) in layer {
            if count == n {
                return Some(node);
            }
            count += 1;
            let mut edges = tree.states[q].edge_representatives();
            edges.sort_unstable();
            for (mv, t) in edges {
                let mut ext = node.clone();
                ext.push(mv);
                next.push((ext, t));
            }
        }
        layer = next;
    }
}
