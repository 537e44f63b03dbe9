//! Executable catalog of continuous reductions.
//!
//! Each entry bundles a coded functional (its forward code), construction
//! parameters, and witness transformers in the directions where the
//! construction carries them. Applying an entry to a point is plain lazy
//! application of the forward code; transporting a witness rebuilds the
//! corresponding witness on the other side, fuel-bounded.
//!
//! Documented verification fuel per entry (used by the acceptance suite):
//! depth 12 for the zip-based entries, the share/sink/singleton family, the
//! sum isomorphism and the unique-path entries; depth 6 for the doubled
//! prefix-code packing (its witness values square per step); depth 8 for the
//! splitting map, the range code, the fan blocks and the enumeration
//! surjections; depth 12 for the range combinators and the diagonal,
//! boundedness and fixed-point streams.

use crate::check::resolve_ev;
use crate::error::{Error, Result};
use crate::kernel::{self, Cache, Kernel};
use crate::seqcode;
use crate::stream::{Functional, StreamSpec};
use crate::trees::{InfinitePath, RegularTree};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionName {
    Sigma11ToE11,
    Pi11ToA11,
    AnalyticUnion,
    AnalyticIntersection,
    CoanalyticIntersection,
    SouslinCode,
    E11ToShareInf,
    E11ToUnc,
    A11ToSinkFin,
    A11ToSinkAlmostFin,
    FinSink01Pair,
    A11ToE11Bang,
    E2BangChain,
    E2BangSurjection,
    StrongReduceToE11,
    ShareSingleton,
    ShareSumIso,
    PerfectToInjection,
    InjectionRangeCode,
    FanSurjection,
    FanShareReduction,
    RangeEnumeration,
    EnumerationToSurjection,
    StrictDisjunctionConjunction,
    StrictProjection,
    FixedPoint,
    Diagonal,
    Boundedness,
}

impl ReductionName {
    pub fn all() -> &'static [ReductionName] {
        use ReductionName::*;
        &[
            Sigma11ToE11,
            Pi11ToA11,
            AnalyticUnion,
            AnalyticIntersection,
            CoanalyticIntersection,
            SouslinCode,
            E11ToShareInf,
            E11ToUnc,
            A11ToSinkFin,
            A11ToSinkAlmostFin,
            FinSink01Pair,
            A11ToE11Bang,
            E2BangChain,
            E2BangSurjection,
            StrongReduceToE11,
            ShareSingleton,
            ShareSumIso,
            PerfectToInjection,
            InjectionRangeCode,
            FanSurjection,
            FanShareReduction,
            RangeEnumeration,
            EnumerationToSurjection,
            StrictDisjunctionConjunction,
            StrictProjection,
            FixedPoint,
            Diagonal,
            Boundedness,
        ]
    }

    pub fn as_str(&self) -> &'static str {
        use ReductionName::*;
        match self {
            Sigma11ToE11 => "sigma11_to_e11",
            Pi11ToA11 => "pi11_to_a11",
            AnalyticUnion => "analytic_union",
            AnalyticIntersection => "analytic_intersection",
            CoanalyticIntersection => "coanalytic_intersection",
            SouslinCode => "souslin_code",
            E11ToShareInf => "e11_to_share_inf",
            E11ToUnc => "e11_to_unc",
            A11ToSinkFin => "a11_to_sink_fin",
            A11ToSinkAlmostFin => "a11_to_sink_almostfin",
            FinSink01Pair => "fin_sink01_pair",
            A11ToE11Bang => "a11_to_e11bang",
            E2BangChain => "e2bang_chain",
            E2BangSurjection => "e2bang_surjection",
            StrongReduceToE11 => "strong_reduce_to_e11",
            ShareSingleton => "share_singleton",
            ShareSumIso => "share_sum_iso",
            PerfectToInjection => "perfect_to_injection",
            InjectionRangeCode => "injection_range_code",
            FanSurjection => "fan_surjection",
            FanShareReduction => "fan_share_reduction",
            RangeEnumeration => "range_enumeration",
            EnumerationToSurjection => "enumeration_to_surjection",
            StrictDisjunctionConjunction => "strict_disjunction_conjunction",
            StrictProjection => "strict_projection",
            FixedPoint => "fixed_point",
            Diagonal => "diagonal",
            Boundedness => "boundedness",
        }
    }

    pub fn parse(s: &str) -> Result<ReductionName> {
        ReductionName::all()
            .iter()
            .find(|n| n.as_str() == s)
            .copied()
            .ok_or_else(|| Error::domain(format!("unknown catalog entry '{s}'")))
    }
}

/// Construction-specific finite data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Params {
    None,
    Tree(RegularTree),
    Trees(Vec<RegularTree>),
    Stream(StreamSpec),
    Streams(Vec<StreamSpec>),
    Width(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    pub name: ReductionName,
    pub params: Params,
    /// The construction's coded functional (or constructed code, for the
    /// code-building entries).
    pub forward: Functional,
    /// Companion maps of multi-map entries, by role.
    pub companions: Vec<(String, Functional)>,
    /// What the construction does, in one sentence.
    pub summary: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

/// Witness data moved across a reduction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Point(StreamSpec),
    Indexed { index: u64, point: StreamSpec },
    Node(Vec<u64>),
}

fn tree_params(params: &Params, what: &str) -> Result<RegularTree> {
    match params {
        Params::Tree(t) => {
            t.validate()?;
            Ok(t.clone())
        }
        _ => Err(Error::domain(format!("{what} expects a tree parameter"))),
    }
}

fn trees_params(params: &Params, what: &str) -> Result<Vec<Arc<RegularTree>>> {
    match params {
        Params::Trees(ts) if !ts.is_empty() => {
            for t in ts {
                t.validate()?;
            }
            Ok(ts.iter().map(|t| Arc::new(t.prune())).collect())
        }
        _ => Err(Error::domain(format!(
            "{what} expects a non-empty list of tree parameters"
        ))),
    }
}

fn stream_params(params: &Params, what: &str) -> Result<StreamSpec> {
    match params {
        Params::Stream(s) => Ok(s.clone()),
        _ => Err(Error::domain(format!("{what} expects a stream parameter"))),
    }
}

/// Builds a catalog entry, validating its parameters.
pub fn build(name: ReductionName, params: Params) -> Result<Reduction> {
    use ReductionName::*;
    let entry = |forward: Kernel, companions: Vec<(&str, Kernel)>, summary: &str| Reduction {
        name,
        params: params.clone(),
        forward: Functional(StreamSpec::kernel(forward)),
        companions: companions
            .into_iter()
            .map(|(role, k)| (role.to_string(), Functional(StreamSpec::kernel(k))))
            .collect(),
        summary: summary.to_string(),
    };
    Ok(match name {
        Sigma11ToE11 => {
            let tree = Arc::new(tree_params(&params, "sigma11_to_e11")?.prune());
            entry(
                Kernel::ZipClosed { code: tree },
                vec![],
                "maps a point to the code of its section tree through a closed pair code, so projection witnesses become infinite paths",
            )
        }
        Pi11ToA11 => {
            let tree = Arc::new(tree_params(&params, "pi11_to_a11")?.prune());
            entry(
                Kernel::ZipClosed { code: tree },
                vec![],
                "maps a point to its section code; universal membership becomes totality of the section",
            )
        }
        StrongReduceToE11 => {
            let tree = Arc::new(tree_params(&params, "strong_reduce_to_e11")?.prune());
            entry(
                Kernel::ZipClosed { code: tree },
                vec![],
                "section form that also transports apartness-from-the-set to apartness-from-path-admitting codes",
            )
        }
        AnalyticUnion => {
            let trees = trees_params(&params, "analytic_union")?;
            entry(
                Kernel::AnalyticUnion { codes: trees },
                vec![],
                "closed pair code whose projection is the union of the given projections, with the branch read from the witness head",
            )
        }
        AnalyticIntersection => {
            let trees = trees_params(&params, "analytic_intersection")?;
            entry(
                Kernel::AnalyticIntersection { codes: trees },
                vec![],
                "closed pair code whose projection is the intersection, with per-branch witnesses packed into one point",
            )
        }
        CoanalyticIntersection => {
            let trees = trees_params(&params, "coanalytic_intersection")?;
            entry(
                Kernel::CoanalyticIntersection { codes: trees },
                vec![],
                "open pair code for the intersection of the universal projections",
            )
        }
        SouslinCode => {
            let trees = trees_params(&params, "souslin_code")?;
            entry(
                Kernel::SouslinCode { system: trees },
                vec![],
                "closed pair code for the union over branch points of the intersections along their prefixes",
            )
        }
        E11ToShareInf => entry(
            Kernel::BlockPlant,
            vec![],
            "plants admitted nodes as binary blocks so a path becomes a member with infinitely many ones",
        ),
        A11ToSinkAlmostFin => entry(
            Kernel::BlockPlant,
            vec![],
            "same block planting, read on the totality side: every member of the output meets zero cofinally",
        ),
        E11ToUnc => entry(
            Kernel::UncPack,
            vec![],
            "packs path prefixes into doubled prefix codes with a free ±1 bit, making a path yield a perfect subtree",
        ),
        A11ToSinkFin => entry(
            Kernel::SinkPairs,
            vec![],
            "pairs every move with a flag that may be 1 only while the move history stays admitted",
        ),
        FinSink01Pair => entry(
            Kernel::SupportFan,
            vec![("to_fin", Kernel::FanWidth)],
            "eventually-zero points and binary-subfan codes sinking into the eventually-zero set reduce to each other",
        ),
        A11ToE11Bang => entry(
            Kernel::UniquePathShift,
            vec![],
            "adds a guaranteed zero ray; totality of the input makes it the only path",
        ),
        E2BangChain => entry(
            Kernel::ShiftIntoUnique,
            vec![
                ("pad_two", Kernel::PadTwo),
                ("to_unique_path", Kernel::ConstantRays),
            ],
            "the chain into unique-vanishing form: shift in a zero section, pad a two-section point, turn sections into constant rays",
        ),
        E2BangSurjection => entry(
            Kernel::UniqueZeroSurjection,
            vec![],
            "strongly injective surjection onto the points with exactly one vanishing subsequence",
        ),
        ShareSingleton => entry(
            Kernel::SingletonTrack,
            vec![],
            "codes the singleton of the input point, reducing membership to sharing",
        ),
        ShareSumIso => {
            let width = match params {
                Params::Width(n) if n > 0 => n,
                _ => return Err(Error::domain("share_sum_iso expects a positive width")),
            };
            entry(
                Kernel::SumCollapse,
                vec![("expand", Kernel::SumExpand { width })],
                "re-roots between the branch sum and the planted spine sum of a finite family",
            )
        }
        PerfectToInjection => {
            let tree = tree_params(&params, "perfect_to_injection")?.prune();
            if !tree.is_perfect() {
                return Err(Error::domain(
                    "perfect_to_injection expects a non-empty perfect tree",
                ));
            }
            entry(
                Kernel::PerfectSplit { tree: Arc::new(tree), cache: Cache::default() },
                vec![],
                "strongly injective map from the binary tree into a perfect located set via least splitting pairs",
            )
        }
        InjectionRangeCode => {
            let gamma = stream_params(&params, "injection_range_code")?;
            entry(
                Kernel::range_code(gamma),
                vec![],
                "closed code of the range of a strongly injective function on the binary tree, via fan moduli",
            )
        }
        FanSurjection => {
            let tree = tree_params(&params, "fan_surjection")?.prune();
            if tree.is_empty() {
                return Err(Error::domain("fan_surjection expects a non-empty fan"));
            }
            if !tree.is_fan() {
                return Err(Error::domain("fan_surjection expects a fan"));
            }
            entry(
                Kernel::FanBlocks { fan: Arc::new(tree) },
                vec![],
                "maps the binary tree onto a fan by consuming one thin-bar block per branching node",
            )
        }
        FanShareReduction => {
            let tree = tree_params(&params, "fan_share_reduction")?.prune();
            if tree.is_empty() || !tree.is_fan() {
                return Err(Error::domain("fan_share_reduction expects a non-empty fan"));
            }
            entry(
                Kernel::FanShare { fan: Arc::new(tree) },
                vec![],
                "pulls sharing with a fan back to sharing with the binary tree through the block surjection",
            )
        }
        RangeEnumeration => {
            let gamma = stream_params(&params, "range_enumeration")?;
            entry(
                Kernel::RangeEnumeration { gamma: Box::new(gamma) },
                vec![],
                "enumerates the nodes met by the range of a coded function, making the range semi-located",
            )
        }
        EnumerationToSurjection => {
            let delta = stream_params(&params, "enumeration_to_surjection")?;
            entry(
                Kernel::EnumerationSurjection { delta: Box::new(delta) },
                vec![],
                "rebuilds a surjection onto the closed set behind a node enumeration by walking enumerated successors",
            )
        }
        StrictDisjunctionConjunction => {
            let codes = match &params {
                Params::Streams(ss) if !ss.is_empty() => ss.clone(),
                _ => {
                    return Err(Error::domain(
                        "strict_disjunction_conjunction expects a non-empty list of codes",
                    ))
                }
            };
            entry(
                Kernel::StrictDisjunction { codes: codes.clone() },
                vec![("conjunction", Kernel::StrictConjunction { codes })],
                "combines coded ranges: a head-selected disjunction and a sectionwise conjunction",
            )
        }
        StrictProjection => {
            let gamma = stream_params(&params, "strict_projection")?;
            entry(
                Kernel::StrictProjection { gamma: Box::new(gamma) },
                vec![],
                "the first section of a coded range, so projections of ranges are again ranges",
            )
        }
        FixedPoint => {
            let gamma = stream_params(&params, "fixed_point")?;
            entry(
                Kernel::FixedPoint { gamma: Box::new(gamma), own: Cache::default() },
                vec![],
                "the 0/1 record of the functional's firings along itself; it forbids exactly what its own image forbids",
            )
        }
        Diagonal => {
            let gamma = stream_params(&params, "diagonal")?;
            entry(
                Kernel::Diagonal { gamma: Box::new(gamma) },
                vec![],
                "a total code whose value everywhere exceeds the family's diagonal value by one",
            )
        }
        Boundedness => {
            let gamma = stream_params(&params, "boundedness")?;
            entry(
                Kernel::Boundedness { gamma: Box::new(gamma) },
                vec![],
                "a single total code into which every member of the coded family embeds by interleaving",
            )
        }
    })
}

/// γ|α for the entry's forward code.
pub fn apply_reduction(r: &Reduction, alpha: &StreamSpec) -> StreamSpec {
    r.forward.apply(alpha)
}

/// The fixed-point stream of a coded functional.
pub fn fixed_point(gamma: &StreamSpec) -> StreamSpec {
    StreamSpec::kernel(Kernel::FixedPoint {
        gamma: Box::new(gamma.clone()),
        own: Cache::default(),
    })
}

/// The bounding stream of a coded family.
pub fn boundedness_stream(gamma: &StreamSpec) -> StreamSpec {
    StreamSpec::kernel(Kernel::Boundedness { gamma: Box::new(gamma.clone()) })
}

/// The diagonal stream of a coded family.
pub fn diagonal_stream(gamma: &StreamSpec) -> StreamSpec {
    StreamSpec::kernel(Kernel::Diagonal { gamma: Box::new(gamma.clone()) })
}

/// The embedding attached to the boundedness stream: interleaves a node with
/// the member's values.
pub fn boundedness_embed(beta: &StreamSpec, node: &[u64], fuel: u64) -> Result<Vec<u64>> {
    kernel::boundedness_embed(beta, node, fuel)
}

/// The count of sections of `alpha` below `m` whose zero-history values up
/// to depth `n` all vanish.
pub fn disjunction_counter(alpha: &StreamSpec, m: u64, n: u64, fuel: u64) -> Result<u64> {
    let mut count = 0;
    for j in 0..m {
        let mut ok = true;
        for i in 0..n {
            let node = seqcode::zeros(i)?;
            let idx = seqcode::pair(j, node)?;
            if alpha.eval(idx, fuel)? != 0 {
                ok = false;
                break;
            }
        }
        if ok {
            count += 1;
        }
    }
    Ok(count)
}

// ---------------------------------------------------------------------------
// Witness transport
// ---------------------------------------------------------------------------

/// Expands a run-length point into the planted binary point 0̄r₀ 1 0̄r₁ 1 ….
fn plant_blocks(path: &InfinitePath) -> StreamSpec {
    let expand = |runs: &[u64]| -> Vec<u64> {
        let mut out = Vec::new();
        for &r in runs {
            out.extend(std::iter::repeat(0).take(r as usize));
            out.push(1);
        }
        out
    };
    StreamSpec::ev_periodic(expand(&path.prefix), expand(&path.cycle))
}

/// Extracts the run-length point of a binary point with cofinal ones.
fn unplant_blocks(prefix: &[u64], cycle: &[u64]) -> Result<InfinitePath> {
    if cycle.iter().any(|&v| v > 1) || prefix.iter().any(|&v| v > 1) {
        return Err(Error::domain("point is not binary"));
    }
    if !cycle.contains(&1) {
        return Err(Error::domain("point has no ones in its cycle"));
    }
    // Rotate the cycle to end on a 1, pushing the rotated-off head into the
    // prefix.
    let mut pre = prefix.to_vec();
    let mut cyc = cycle.to_vec();
    while *cyc.last().unwrap() != 1 {
        let head = cyc.remove(0);
        cyc.push(head);
        pre.push(head);
    }
    let runs = |s: &[u64]| -> Vec<u64> {
        let mut out = Vec::new();
        let mut run = 0u64;
        for &v in s {
            if v == 1 {
                out.push(run);
                run = 0;
            } else {
                run += 1;
            }
        }
        out
    };
    // The prefix may end inside a run; absorb one cycle round so both parts
    // split on block boundaries.
    let cruns = runs(&cyc);
    let mut all = pre.clone();
    all.extend(cyc.iter().copied());
    let allruns = runs(&all);
    let pruns = allruns[..allruns.len() - cruns.len()].to_vec();
    Ok(InfinitePath { prefix: pruns, cycle: cruns })
}

fn expect_point(w: &Witness) -> Result<StreamSpec> {
    match w {
        Witness::Point(p) => Ok(p.clone()),
        _ => Err(Error::domain("expected a point witness")),
    }
}

fn ev_of(point: &StreamSpec) -> Result<InfinitePath> {
    resolve_ev(point)
        .map(|(prefix, cycle)| InfinitePath { prefix, cycle })
        .ok_or_else(|| Error::domain("witness must be finitely presented as eventually periodic"))
}

/// Moves a witness across the reduction. The input point is the argument the
/// reduction was applied to; directions not carried by an entry report a
/// domain error.
pub fn transport_witness(
    r: &Reduction,
    dir: Direction,
    input: &StreamSpec,
    w: &Witness,
    fuel: u64,
) -> Result<Witness> {
    use ReductionName::*;
    match (r.name, dir) {
        // Section-style entries: the projection witness and the path witness
        // are the same stream, revalidated on each side.
        (Sigma11ToE11 | Pi11ToA11 | StrongReduceToE11, Direction::Forward) => {
            let beta = expect_point(w)?;
            let out = apply_reduction(r, input);
            for n in 0..=fuel {
                let node = beta.values(n, fuel)?;
                if out.node_value(&node, fuel)? != 0 {
                    return Err(Error::domain(format!(
                        "planted witness is not admitted at depth {n}"
                    )));
                }
            }
            Ok(w.clone())
        }
        (Sigma11ToE11 | Pi11ToA11 | StrongReduceToE11, Direction::Backward) => {
            let beta = expect_point(w)?;
            let tree = match &r.params {
                Params::Tree(t) => t.clone(),
                _ => unreachable!("validated at build"),
            };
            for n in 0..=fuel {
                let mut zipped = Vec::with_capacity(n as usize);
                for p in 0..n {
                    if p % 2 == 0 {
                        zipped.push(input.eval(p / 2, fuel)?);
                    } else {
                        zipped.push(beta.eval(p / 2, fuel)?);
                    }
                }
                if !tree.node_member_moves(&zipped) {
                    return Err(Error::domain(format!(
                        "backward witness leaves the pair tree at depth {n}"
                    )));
                }
            }
            Ok(w.clone())
        }
        (E11ToShareInf | A11ToSinkAlmostFin, Direction::Forward) => {
            let path = ev_of(&expect_point(w)?)?;
            Ok(Witness::Point(plant_blocks(&path)))
        }
        (E11ToShareInf | A11ToSinkAlmostFin, Direction::Backward) => {
            let (p, c) = resolve_ev(&expect_point(w)?)
                .ok_or_else(|| Error::domain("backward witness must be eventually periodic"))?;
            let path = unplant_blocks(&p, &c)?;
            Ok(Witness::Point(path.to_stream()))
        }
        (E11ToUnc, Direction::Forward) => {
            let path = ev_of(&expect_point(w)?)?;
            Ok(Witness::Point(StreamSpec::kernel(Kernel::PrefixCodeLadder {
                prefix: path.prefix,
                cycle: path.cycle,
                offset: 1,
            })))
        }
        (E11ToUnc, Direction::Backward) => {
            let delta = expect_point(w)?;
            let depth = fuel.min(6).max(1);
            let v = delta.eval(depth - 1, fuel)?;
            if v == 0 {
                return Err(Error::domain("witness stalls before the requested depth"));
            }
            let code = (v - 1) / 2;
            Ok(Witness::Node(seqcode::decode(code)))
        }
        (A11ToSinkFin, Direction::Forward) => {
            // A refuting path of the input becomes the non-vanishing member.
            let path = ev_of(&expect_point(w)?)?;
            let weave = |vals: &[u64]| -> Vec<u64> {
                vals.iter().flat_map(|&v| [v, 1]).collect()
            };
            Ok(Witness::Point(StreamSpec::ev_periodic(
                weave(&path.prefix),
                weave(&path.cycle),
            )))
        }
        (A11ToSinkFin, Direction::Backward) => {
            let (p, c) = resolve_ev(&expect_point(w)?)
                .ok_or_else(|| Error::domain("backward witness must be eventually periodic"))?;
            // Align to even length and read the move history.
            let mut pre = p.clone();
            let mut cyc = c.clone();
            if cyc.len() % 2 == 1 {
                let doubled: Vec<u64> = cyc.iter().chain(cyc.iter()).copied().collect();
                cyc = doubled;
            }
            if pre.len() % 2 == 1 {
                pre.push(cyc[0]);
                cyc.rotate_left(1);
            }
            let evens = |s: &[u64]| -> Vec<u64> { s.iter().step_by(2).copied().collect() };
            Ok(Witness::Point(StreamSpec::ev_periodic(evens(&pre), evens(&cyc))))
        }
        (A11ToE11Bang, Direction::Forward) => {
            let beta = expect_point(w)?;
            Ok(Witness::Point(StreamSpec::kernel(Kernel::Prepend {
                prefix: vec![1],
                tail: Box::new(beta),
            })))
        }
        (A11ToE11Bang, Direction::Backward) => {
            let (p, c) = resolve_ev(&expect_point(w)?)
                .ok_or_else(|| Error::domain("backward witness must be eventually periodic"))?;
            if p.is_empty() || p[0] == 0 {
                return Err(Error::domain(
                    "backward witness must enter a shifted branch (head move above 0)",
                ));
            }
            Ok(Witness::Point(StreamSpec::ev_periodic(p[1..].to_vec(), c)))
        }
        (ShareSingleton, Direction::Forward) => Ok(Witness::Point(input.clone())),
        (ShareSingleton, Direction::Backward) => {
            let cand = expect_point(w)?;
            if let Some(i) = cand.apart(input, fuel, fuel)? {
                return Err(Error::domain(format!(
                    "backward witness is apart from the tracked point at {i}"
                )));
            }
            Ok(Witness::Point(input.clone()))
        }
        (ShareSumIso, Direction::Forward) => {
            // Member 0̄i 1 x of the planted input ↦ member ⟨i⟩ x of the sum.
            let path = ev_of(&expect_point(w)?)?;
            let vals = path.values(fuel.max(4));
            let zeros = vals.iter().take_while(|&&v| v == 0).count();
            if zeros >= vals.len() || vals[zeros] != 1 {
                return Err(Error::domain("witness is not a planted member"));
            }
            let mut prefix = vec![zeros as u64];
            prefix.extend(&vals[zeros + 1..]);
            Ok(Witness::Point(StreamSpec::kernel(Kernel::Prepend {
                prefix,
                tail: Box::new(StreamSpec::kernel(Kernel::Drop {
                    a: Box::new(expect_point(w)?),
                    count: vals.len() as u64,
                })),
            })))
        }
        (ShareSumIso, Direction::Backward) => {
            let path = ev_of(&expect_point(w)?)?;
            let i = path.value(0);
            let mut prefix = vec![0u64; i as usize];
            prefix.push(1);
            Ok(Witness::Point(StreamSpec::kernel(Kernel::Prepend {
                prefix,
                tail: Box::new(StreamSpec::kernel(Kernel::Drop {
                    a: Box::new(expect_point(w)?),
                    count: 1,
                })),
            })))
        }
        (PerfectToInjection, Direction::Forward) => {
            let b = expect_point(w)?;
            Ok(Witness::Point(apply_reduction(r, &b)))
        }
        (InjectionRangeCode, Direction::Forward) => {
            let gamma = match &r.params {
                Params::Stream(g) => g,
                _ => unreachable!("validated at build"),
            };
            let b = expect_point(w)?;
            let f = Functional(gamma.clone());
            let image = f.finite_apply(b.prefix_code(fuel.min(8), fuel)?, fuel)?;
            Ok(Witness::Node(seqcode::decode(image)))
        }
        (InjectionRangeCode, Direction::Backward) => {
            let gamma = match &r.params {
                Params::Stream(g) => g,
                _ => unreachable!("validated at build"),
            };
            let eps = expect_point(w)?;
            let pre = kernel::range_code_preimage(gamma, &eps, fuel.min(6), fuel)?;
            Ok(Witness::Node(pre))
        }
        (FanSurjection, Direction::Forward) => {
            let b = expect_point(w)?;
            Ok(Witness::Point(apply_reduction(r, &b)))
        }
        (FanSurjection, Direction::Backward) => {
            let fan = match &r.params {
                Params::Tree(t) => t.prune(),
                _ => unreachable!("validated at build"),
            };
            let p = ev_of(&expect_point(w)?)?;
            Ok(Witness::Point(block_encode(&fan, &p)?))
        }
        (FanShareReduction, Direction::Forward) => {
            let fan = match &r.params {
                Params::Tree(t) => t.prune(),
                _ => unreachable!("validated at build"),
            };
            let p = ev_of(&expect_point(w)?)?;
            Ok(Witness::Point(block_encode(&fan, &p)?))
        }
        (FanShareReduction, Direction::Backward) => {
            let fan = match &r.params {
                Params::Tree(t) => t.prune(),
                _ => unreachable!("validated at build"),
            };
            let b = expect_point(w)?;
            let surj = Functional(StreamSpec::kernel(Kernel::FanBlocks { fan: Arc::new(fan) }));
            Ok(Witness::Point(surj.apply(&b)))
        }
        (RangeEnumeration, Direction::Forward) => {
            let gamma = match &r.params {
                Params::Stream(g) => g,
                _ => unreachable!("validated at build"),
            };
            // A range member given by its preimage: produce an enumeration
            // index for a proper prefix of its image.
            let x = expect_point(w)?;
            let f = Functional(gamma.clone());
            let m = fuel.min(8);
            let input_node = x.values(m, fuel)?;
            let image = f.finite_apply(seqcode::encode(&input_node)?, fuel)?;
            let image_moves = seqcode::decode(image);
            if image_moves.is_empty() {
                return Err(Error::domain(
                    "image prefix is empty; deepen the witness input",
                ));
            }
            let node = &image_moves[..image_moves.len() - 1];
            // Interleave parts of the index must give (node, input prefix).
            let mut merged = Vec::new();
            let max = input_node.len().max(node.len());
            for i in 0..max {
                if i < node.len() {
                    merged.push(node[i]);
                } else {
                    break;
                }
                if i < input_node.len() {
                    merged.push(input_node[i]);
                }
            }
            let index = seqcode::encode(&merged)?;
            Ok(Witness::Indexed { index, point: x })
        }
        (EnumerationToSurjection, Direction::Forward) => {
            let x = expect_point(w)?;
            Ok(Witness::Point(apply_reduction(r, &x)))
        }
        (StrictDisjunctionConjunction, Direction::Forward) => match w {
            Witness::Indexed { index, point } => {
                let input_point = StreamSpec::kernel(Kernel::Prepend {
                    prefix: vec![*index],
                    tail: Box::new(point.clone()),
                });
                Ok(Witness::Point(apply_reduction(r, &input_point)))
            }
            _ => Err(Error::domain("expected an indexed witness")),
        },
        (StrictDisjunctionConjunction, Direction::Backward) => {
            let x = expect_point(w)?;
            let index = x.eval(0, fuel)?;
            Ok(Witness::Indexed { index, point: apply_reduction(r, &x) })
        }
        (StrictProjection, Direction::Forward) => {
            let b = expect_point(w)?;
            Ok(Witness::Point(apply_reduction(r, &b)))
        }
        (AnalyticUnion, Direction::Forward) => match w {
            Witness::Indexed { index, point } => {
                // Pair path for branch `index` becomes a bundle whose head
                // subsequence is the left part and whose next subsequence is
                // the branch-prefixed right part.
                let left = StreamSpec::PartI(Box::new(point.clone()));
                let right = StreamSpec::kernel(Kernel::Prepend {
                    prefix: vec![*index],
                    tail: Box::new(StreamSpec::PartII(Box::new(point.clone()))),
                });
                Ok(Witness::Point(StreamSpec::kernel(Kernel::SubseqBundle {
                    parts: vec![left, right],
                    rest: Box::new(StreamSpec::zero()),
                    at_zero: 0,
                })))
            }
            _ => Err(Error::domain("expected an indexed witness")),
        },
        (AnalyticUnion, Direction::Backward) => {
            let mu = expect_point(w)?;
            let index = mu.eval(seqcode::pair(1, 0)?, fuel)?;
            let left = StreamSpec::subseq(mu.clone(), 0);
            let right = StreamSpec::kernel(Kernel::Drop {
                a: Box::new(StreamSpec::subseq(mu, 1)),
                count: 1,
            });
            Ok(Witness::Indexed { index, point: StreamSpec::interleave(left, right) })
        }
        (AnalyticIntersection | CoanalyticIntersection, Direction::Forward) => {
            // Witness: a bundle w with w⁰ the common left point and w^{j+1}
            // the right point for branch j.
            let bundle = expect_point(w)?;
            let left = StreamSpec::subseq(bundle.clone(), 0);
            let count = match &r.params {
                Params::Trees(ts) => ts.len() as u64,
                _ => unreachable!("validated at build"),
            };
            let rights: Vec<StreamSpec> = (0..count)
                .map(|j| StreamSpec::subseq(bundle.clone(), j + 1))
                .collect();
            let packed = StreamSpec::kernel(Kernel::SubseqBundle {
                parts: rights,
                rest: Box::new(StreamSpec::zero()),
                at_zero: 0,
            });
            Ok(Witness::Point(StreamSpec::kernel(Kernel::SubseqBundle {
                parts: vec![left, packed],
                rest: Box::new(StreamSpec::zero()),
                at_zero: 0,
            })))
        }
        (SouslinCode, Direction::Forward) => {
            // Witness: the branch-and-paths point; the output witness is the
            // interleaved pair with the input.
            let g = expect_point(w)?;
            Ok(Witness::Point(StreamSpec::interleave(input.clone(), g)))
        }
        (E2BangChain | E2BangSurjection, Direction::Forward) => {
            let x = expect_point(w)?;
            Ok(Witness::Point(apply_reduction(r, &x)))
        }
        (FinSink01Pair, Direction::Forward) => {
            let x = expect_point(w)?;
            Ok(Witness::Point(apply_reduction(r, &x)))
        }
        (FinSink01Pair, Direction::Backward) => {
            let x = expect_point(w)?;
            let companion = &r.companions[0].1;
            Ok(Witness::Point(companion.apply(&x)))
        }
        _ => Err(Error::domain(format!(
            "witness transport not defined for {} in direction {:?}",
            r.name.as_str(),
            dir
        ))),
    }
}

/// Encodes a fan member as its binary block preimage under the fan
/// surjection.
pub fn block_encode(fan: &RegularTree, path: &InfinitePath) -> Result<StreamSpec> {
    let root = fan
        .root
        .ok_or_else(|| Error::domain("cannot encode into an empty fan"))?;
    let total = path.prefix.len() + path.cycle.len();
    let norm = |i: usize| -> usize {
        if i < total {
            i
        } else {
            path.prefix.len() + (i - path.prefix.len()) % path.cycle.len()
        }
    };
    let mut seen: Vec<(usize, usize)> = Vec::new();
    let mut blocks: Vec<Vec<u64>> = Vec::new();
    let mut state = root;
    let mut pos = 0usize;
    loop {
        if let Some(at) = seen.iter().position(|&s| s == (state, norm(pos))) {
            let flat = |bs: &[Vec<u64>]| -> Vec<u64> { bs.iter().flatten().copied().collect() };
            let prefix = flat(&blocks[..at]);
            let mut cycle = flat(&blocks[at..]);
            if cycle.is_empty() {
                // Only no-choice nodes from here on; any binary tail works.
                cycle = vec![0];
            }
            return Ok(StreamSpec::ev_periodic(prefix, cycle));
        }
        seen.push((state, norm(pos)));
        let mv = path.value(pos as u64);
        let mut children = fan.states[state].edge_representatives();
        children.sort_unstable();
        let k = children.len();
        let j = children
            .iter()
            .position(|&(m, _)| m == mv)
            .ok_or_else(|| Error::domain("path leaves the fan"))?;
        if k >= 2 {
            blocks.push(seqcode::decode(crate::trees::bar01(k as u64 - 1)?[j]));
        } else {
            blocks.push(vec![]);
        }
        state = children[j].1;
        pos += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_builds_with_minimal_params() {
        for name in ReductionName::all() {
            let params = match name {
                ReductionName::Sigma11ToE11
                | ReductionName::Pi11ToA11
                | ReductionName::StrongReduceToE11
                | ReductionName::PerfectToInjection
                | ReductionName::FanSurjection
                | ReductionName::FanShareReduction => Params::Tree(RegularTree::cantor()),
                ReductionName::AnalyticUnion
                | ReductionName::AnalyticIntersection
                | ReductionName::CoanalyticIntersection
                | ReductionName::SouslinCode => Params::Trees(vec![RegularTree::cantor()]),
                ReductionName::InjectionRangeCode
                | ReductionName::RangeEnumeration
                | ReductionName::EnumerationToSurjection
                | ReductionName::StrictProjection
                | ReductionName::FixedPoint
                | ReductionName::Diagonal
                | ReductionName::Boundedness => {
                    Params::Stream(StreamSpec::kernel(Kernel::Identity))
                }
                ReductionName::StrictDisjunctionConjunction => {
                    Params::Streams(vec![StreamSpec::kernel(Kernel::Identity)])
                }
                ReductionName::ShareSumIso => Params::Width(3),
                _ => Params::None,
            };
            let r = build(*name, params).unwrap();
            assert_eq!(ReductionName::parse(name.as_str()).unwrap(), r.name);
        }
    }

    #[test]
    fn build_rejects_bad_params() {
        assert!(build(ReductionName::Sigma11ToE11, Params::None).is_err());
        assert!(build(ReductionName::ShareSumIso, Params::Width(0)).is_err());
        // A single path is not perfect.
        assert!(build(
            ReductionName::PerfectToInjection,
            Params::Tree(RegularTree::single_path(&[], &[0]))
        )
        .is_err());
        // The full Baire tree is not a fan.
        assert!(build(
            ReductionName::FanSurjection,
            Params::Tree(RegularTree::full_baire())
        )
        .is_err());
    }

    #[test]
    fn share_singleton_tracks_its_point() {
        let r = build(ReductionName::ShareSingleton, Params::None).unwrap();
        let alpha = StreamSpec::Const(1);
        let out = apply_reduction(&r, &alpha);
        for n in 0..6u64 {
            let ones = vec![1u64; n as usize];
            assert_eq!(out.node_value(&ones, 20).unwrap(), 0);
            let mut off = ones.clone();
            off.push(0);
            assert_eq!(out.node_value(&off, 20).unwrap(), 1);
        }
    }

    #[test]
    fn e2bang_surjection_sections() {
        let r = build(ReductionName::E2BangSurjection, Params::None).unwrap();
        let alpha = StreamSpec::zero();
        let out = apply_reduction(&r, &alpha);
        // α⁰(0) = 0, so section 0 vanishes and section 1 carries a peak.
        let s0 = StreamSpec::subseq(out.clone(), 0);
        for k in 0..5 {
            assert_eq!(s0.eval(k, 40).unwrap(), 0);
        }
        let s1 = StreamSpec::subseq(out, 1);
        let vals: Vec<u64> = (0..5).map(|k| s1.eval(k, 40).unwrap()).collect();
        assert!(vals.iter().any(|&v| v != 0), "{vals:?}");
    }

    #[test]
    fn unplant_round_trip() {
        let path = InfinitePath { prefix: vec![2, 0], cycle: vec![1, 3] };
        let planted = plant_blocks(&path);
        let (p, c) = resolve_ev(&planted).unwrap();
        let back = unplant_blocks(&p, &c).unwrap();
        for i in 0..12 {
            assert_eq!(back.value(i), path.value(i));
        }
    }

    #[test]
    fn counter_examples() {
        let zero = StreamSpec::zero();
        assert_eq!(disjunction_counter(&zero, 5, 4, 10).unwrap(), 5);
        let spike = StreamSpec::kernel(Kernel::SubseqBundle {
            parts: vec![StreamSpec::ev_periodic(vec![0, 1], vec![0])],
            rest: Box::new(StreamSpec::zero()),
            at_zero: 0,
        });
        assert_eq!(disjunction_counter(&spike, 1, 2, 10).unwrap(), 0);
        for n in 0..5 {
            let a = disjunction_counter(&spike, 3, n, 10).unwrap();
            let b = disjunction_counter(&spike, 3, n + 1, 10).unwrap();
            assert!(b <= a);
        }
    }

    #[test]
    fn fan_block_encode_round_trip() {
        let fan = RegularTree::cantor();
        let r = build(ReductionName::FanSurjection, Params::Tree(fan.clone())).unwrap();
        let member = InfinitePath { prefix: vec![1, 0], cycle: vec![1] };
        let pre = block_encode(&fan.prune(), &member).unwrap();
        let image = apply_reduction(&r, &pre);
        for n in 0..10 {
            assert_eq!(image.eval(n, 40).unwrap(), member.value(n));
        }
    }
}
