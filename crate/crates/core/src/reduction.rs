//! Numeric network transformations (arc reversal, node marginalization) and
//! the incremental tradeoff-resolution loop built on them.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, RefinementPolicy};
use crate::error::{Error, Result};
use crate::graph;
use crate::net::{BayesNet, Cpt, NodeId};
use crate::qpn::{arc_sign, propagate_signs, Frontier, PropagationTrace, Qpn, Sign};

/// Outcome of a single arc reversal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Reversal {
    /// Rows of the new `x` table whose conditioning event has probability
    /// zero; they were filled with a uniform distribution.
    pub degenerate_rows: usize,
}

/// Reverses `x -> y` in place. Both endpoints inherit each other's parents
/// and the joint distribution over all variables is unchanged.
pub fn reverse_arc(net: &mut BayesNet, x: NodeId, y: NodeId) -> Result<Reversal> {
    if !net.contains(y) || !net.has_arc(x, y) {
        return Err(Error::NoSuchArc(x, y));
    }
    if graph::has_indirect_path(&net.parent_map(), x, y) {
        return Err(Error::PathExists(x, y));
    }
    let cpt_x = net.cpt(x).clone();
    let cpt_y = net.cpt(y).clone();
    let (card_x, card_y) = (cpt_x.card(), cpt_y.card());

    // New parents of y: its own (minus x), then x's that are not already there.
    let mut shared: Vec<NodeId> = cpt_y.parents().iter().copied().filter(|&p| p != x).collect();
    for &p in cpt_x.parents() {
        if !shared.contains(&p) {
            shared.push(p);
        }
    }
    let shared_cards: Vec<usize> = shared.iter().map(|&p| net.card(p)).collect();
    let pos_in_shared = |p: &NodeId| shared.iter().position(|s| s == p).expect("parent in union");
    let x_slots: Vec<usize> = cpt_x.parents().iter().map(pos_in_shared).collect();
    // `None` marks the slot of x itself in y's old parent list.
    let y_slots: Vec<Option<usize>> = cpt_y
        .parents()
        .iter()
        .map(|p| (*p != x).then(|| pos_in_shared(p)))
        .collect();

    let rows: usize = shared_cards.iter().product();
    let mut new_y = Vec::with_capacity(rows * card_y);
    let mut new_x = Vec::with_capacity(rows * card_y * card_x);
    let mut degenerate_rows = 0;
    let mut u = vec![0usize; shared.len()];
    let mut x_states = vec![0usize; x_slots.len()];
    let mut y_states = vec![0usize; y_slots.len()];
    let mut joint = vec![0.0; card_x * card_y];
    for r in 0..rows {
        if r > 0 {
            for k in (0..u.len()).rev() {
                u[k] += 1;
                if u[k] < shared_cards[k] {
                    break;
                }
                u[k] = 0;
            }
        }
        for (s, &slot) in x_states.iter_mut().zip(&x_slots) {
            *s = u[slot];
        }
        let x_row = cpt_x.row(cpt_x.row_index(&x_states));
        for xs in 0..card_x {
            for (s, slot) in y_states.iter_mut().zip(&y_slots) {
                *s = slot.map_or(xs, |k| u[k]);
            }
            let y_row = cpt_y.row(cpt_y.row_index(&y_states));
            for ys in 0..card_y {
                joint[xs * card_y + ys] = y_row[ys] * x_row[xs];
            }
        }
        for ys in 0..card_y {
            let py: f64 = (0..card_x).map(|xs| joint[xs * card_y + ys]).sum();
            new_y.push(py);
            if py > 0.0 {
                new_x.extend((0..card_x).map(|xs| joint[xs * card_y + ys] / py));
            } else {
                degenerate_rows += 1;
                new_x.extend(std::iter::repeat_n(1.0 / card_x as f64, card_x));
            }
        }
    }

    let mut x_parents = shared.clone();
    x_parents.push(y);
    let mut x_parent_cards = shared_cards.clone();
    x_parent_cards.push(card_y);
    net.set_cpt(y, Cpt::new(shared, shared_cards, card_y, new_y))?;
    net.set_cpt(x, Cpt::new(x_parents, x_parent_cards, card_x, new_x))?;
    Ok(Reversal { degenerate_rows })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Marginalization {
    pub reversals: usize,
    /// Nodes whose tables were rewritten.
    pub changed: Vec<NodeId>,
}

/// Sums `x` out of the network: reverses each outgoing arc (children taken in
/// the current ancestral order, which rules out competing paths), then drops
/// the now barren node.
pub fn marginalize_node(net: &mut BayesNet, x: NodeId) -> Result<Marginalization> {
    net.try_variable(x)?;
    let mut out = Marginalization::default();
    loop {
        let children = net.children(x);
        if children.is_empty() {
            break;
        }
        let order = net.ancestral_order();
        let first = *order.iter().find(|n| children.contains(n)).expect("child in order");
        reverse_arc(net, x, first)?;
        out.reversals += 1;
        out.changed.push(first);
    }
    net.remove_node(x);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Priority {
    /// Reduce the first ambiguous node, falling back to its message source.
    XFirst,
    /// Reduce the message source first.
    YFirst,
}

impl FromStr for Priority {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x-first" => Ok(Priority::XFirst),
            "y-first" => Ok(Priority::YFirst),
            other => Err(Error::InvalidArgument(format!("unknown strategy {other:?}"))),
        }
    }
}

impl fmt::Display for Priority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Priority::XFirst => "x-first",
            Priority::YFirst => "y-first",
        })
    }
}

/// Node-selection strategy; `seed` drives the random fallback pick.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strategy {
    pub priority: Priority,
    pub seed: u64,
}

impl Strategy {
    pub fn x_first(seed: u64) -> Self {
        Strategy { priority: Priority::XFirst, seed }
    }

    pub fn y_first(seed: u64) -> Self {
        Strategy { priority: Priority::YFirst, seed }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Resolver {
    Marginalize,
    Issa,
}

impl FromStr for Resolver {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "marginalize" => Ok(Resolver::Marginalize),
            "issa" => Ok(Resolver::Issa),
            other => Err(Error::InvalidArgument(format!("unknown resolver {other:?}"))),
        }
    }
}

impl fmt::Display for Resolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Resolver::Marginalize => "marginalize",
            Resolver::Issa => "issa",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolvedAt {
    /// Decided by sign propagation before any numeric work.
    Qualitative,
    AfterReduction,
    /// Decided by abstraction bounds on the query itself.
    Bounds,
    /// Nothing left to reduce; the answer is `?`.
    Exhausted,
}

impl fmt::Display for ResolvedAt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResolvedAt::Qualitative => "qualitative",
            ResolvedAt::AfterReduction => "after_reduction",
            ResolvedAt::Bounds => "bounds",
            ResolvedAt::Exhausted => "exhausted",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionStats {
    pub nodes_reduced: usize,
    pub arc_reversals: usize,
    pub qualitative_passes: usize,
    pub refinement_steps: usize,
    pub resolved_at: ResolvedAt,
}

impl Default for ResolutionStats {
    fn default() -> Self {
        ResolutionStats {
            nodes_reduced: 0,
            arc_reversals: 0,
            qualitative_passes: 0,
            refinement_steps: 0,
            resolved_at: ResolvedAt::Qualitative,
        }
    }
}

/// A query-ready network: pruned to the ancestors of both query nodes, with
/// the decision turned into a root by reversing its incoming arcs.
#[derive(Clone, Debug)]
pub struct PreparedQuery {
    pub net: BayesNet,
    pub reversals: usize,
}

/// Prunes barren nodes and makes `decision` parentless. With the decision as
/// a root, every dependence between decision and target runs along directed
/// paths out of the decision, which is what sign propagation assumes.
pub fn prepare_query(net: &BayesNet, decision: NodeId, target: NodeId) -> Result<PreparedQuery> {
    if decision == target {
        return Err(Error::InvalidArgument("decision and target must differ".into()));
    }
    let mut work = net.prune_irrelevant(decision, target)?;
    let mut reversals = 0;
    while !work.parents(decision).is_empty() {
        let order = work.ancestral_order();
        let parents = work.parents(decision).to_vec();
        let last = *order.iter().rev().find(|n| parents.contains(n)).expect("parent in order");
        reverse_arc(&mut work, last, decision)?;
        reversals += 1;
    }
    if reversals > 0 {
        work = work.prune_irrelevant(decision, target)?;
    }
    Ok(PreparedQuery { net: work, reversals })
}

/// Picks the next node to marginalize from the ambiguity frontier.
pub fn select_node<R: Rng>(
    trace: &PropagationTrace,
    net: &BayesNet,
    decision: NodeId,
    target: NodeId,
    strategy: &Strategy,
    rng: &mut R,
) -> Option<NodeId> {
    let Frontier { x, y } = trace.frontier(target)?;
    let (first, second) = match strategy.priority {
        Priority::XFirst => (x, y),
        Priority::YFirst => (y, x),
    };
    for cand in [first, second] {
        if cand != decision && cand != target && net.contains(cand) {
            return Some(cand);
        }
    }
    if net.len() <= 2 {
        return None;
    }
    let mut pool: BTreeSet<NodeId> = BTreeSet::new();
    for end in [decision, target] {
        pool.extend(net.parents(end).iter().copied());
        pool.extend(net.children(end));
    }
    pool.remove(&decision);
    pool.remove(&target);
    if pool.is_empty() {
        pool = net.node_ids().filter(|&n| n != decision && n != target).collect();
    }
    let pool: Vec<NodeId> = pool.into_iter().collect();
    Some(pool[rng.gen_range(0..pool.len())])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ItorOptions {
    pub strategy: Strategy,
    pub resolver: Resolver,
    pub tol: f64,
    pub refinement: RefinementPolicy,
}

impl ItorOptions {
    pub fn new(strategy: Strategy, resolver: Resolver) -> Self {
        ItorOptions {
            strategy,
            resolver,
            tol: crate::net::DEFAULT_TOLERANCE,
            refinement: RefinementPolicy::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ItorOutcome {
    pub sign: Sign,
    pub stats: ResolutionStats,
    /// The network as it stood when the loop stopped.
    pub residual: BayesNet,
    /// Node count after pruning, before any reduction.
    pub pruned_nodes: usize,
    pub pruned_links: usize,
}

/// Incremental tradeoff resolution: prune, then alternate sign propagation
/// with single-node reductions until the decision's influence on the target
/// is no longer `?` or nothing is left to reduce.
pub fn itor(net: &BayesNet, decision: NodeId, target: NodeId, opts: &ItorOptions) -> Result<ItorOutcome> {
    net.validate(opts.tol).into_result()?;
    let PreparedQuery { net: mut work, reversals } = prepare_query(net, decision, target)?;
    let pruned_nodes = work.len();
    let pruned_links = work.arcs().len();
    let mut stats = ResolutionStats { arc_reversals: reversals, ..Default::default() };
    let mut qpn = Qpn::from_net(&work, opts.tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.strategy.seed);

    let finish = |sign: Sign, mut stats: ResolutionStats, at: ResolvedAt, work: BayesNet| {
        stats.resolved_at = at;
        ItorOutcome { sign, stats, residual: work, pruned_nodes, pruned_links }
    };

    loop {
        stats.qualitative_passes += 1;
        let trace = propagate_signs(&qpn, decision)?;
        let sign = trace.sign_of(target);
        if sign.is_resolved() {
            let at = if stats.nodes_reduced == 0 { ResolvedAt::Qualitative } else { ResolvedAt::AfterReduction };
            return Ok(finish(sign, stats, at, work));
        }
        let frontier = trace.frontier(target).expect("ambiguous target has a frontier");

        if opts.resolver == Resolver::Issa {
            match bounds_step(&mut work, decision, target, frontier.x, opts, &mut stats)? {
                BoundsStep::Answer(sign) => return Ok(finish(sign, stats, ResolvedAt::Bounds, work)),
                BoundsStep::Collapsed(changed) => {
                    qpn.refresh(&work, &changed, opts.tol)?;
                    continue;
                }
                BoundsStep::NoHelp => {}
            }
        }

        match select_node(&trace, &work, decision, target, &opts.strategy, &mut rng) {
            None => return Ok(finish(Sign::Ambiguous, stats, ResolvedAt::Exhausted, work)),
            Some(node) => {
                let m = marginalize_node(&mut work, node)?;
                stats.nodes_reduced += 1;
                stats.arc_reversals += m.reversals;
                qpn.refresh(&work, &m.changed, opts.tol)?;
            }
        }
    }
}

enum BoundsStep {
    /// The decision-target relationship itself was settled by bounds.
    Answer(Sign),
    /// A resolved decision-to-frontier subnetwork was replaced by a direct arc.
    Collapsed(Vec<NodeId>),
    /// Bounds were inapplicable or inconclusive; reduce a node instead.
    NoHelp,
}

fn bounds_step(
    work: &mut BayesNet,
    decision: NodeId,
    target: NodeId,
    frontier: NodeId,
    opts: &ItorOptions,
    stats: &mut ResolutionStats,
) -> Result<BoundsStep> {
    let run = match bounds::issa_resolve(work, decision, frontier, &opts.refinement, opts.tol) {
        Ok(run) => run,
        Err(Error::Ineligible(_)) => return Ok(BoundsStep::NoHelp),
        Err(e) => return Err(e),
    };
    stats.refinement_steps += run.refinement_steps;
    let Some(sign) = run.sign else {
        return Ok(BoundsStep::NoHelp);
    };
    if frontier == target {
        return Ok(BoundsStep::Answer(sign));
    }
    // An ambiguous decision-to-frontier relationship does not settle the
    // query; keep reducing.
    if sign == Sign::Ambiguous {
        return Ok(BoundsStep::NoHelp);
    }
    let Some(inner) = closed_subnetwork(work, decision, frontier) else {
        return Ok(BoundsStep::NoHelp);
    };
    let mut changed = Vec::new();
    for node in work.ancestral_order().into_iter().filter(|n| inner.contains(n)) {
        let m = marginalize_node(work, node)?;
        stats.nodes_reduced += 1;
        stats.arc_reversals += m.reversals;
        changed.extend(m.changed);
    }
    changed.sort();
    changed.dedup();
    Ok(BoundsStep::Collapsed(changed))
}

/// The proper ancestors of `x` other than the decision, provided none of them
/// has a child outside that set and `x`. Then the rest of the network is
/// independent of them given the decision and `x`, and they can be replaced
/// by a direct decision -> x table.
fn closed_subnetwork(net: &BayesNet, decision: NodeId, x: NodeId) -> Option<BTreeSet<NodeId>> {
    let mut inner = net.ancestors(x);
    inner.remove(&x);
    inner.remove(&decision);
    if inner.is_empty() {
        return None;
    }
    let closed = inner
        .iter()
        .all(|&n| net.children(n).iter().all(|c| *c == x || inner.contains(c)));
    closed.then_some(inner)
}

/// Exact numeric baseline: marginalizes every node but the query pair (in
/// ancestral order) and reads the sign off the remaining direct table.
pub fn full_numeric_reduce(net: &BayesNet, decision: NodeId, target: NodeId, tol: f64) -> Result<(Sign, ResolutionStats)> {
    let (sign, stats, _) = reduce_to_pair(net.clone(), decision, target, tol)?;
    Ok((sign, stats))
}

pub(crate) fn reduce_to_pair(mut work: BayesNet, decision: NodeId, target: NodeId, tol: f64) -> Result<(Sign, ResolutionStats, BayesNet)> {
    let mut stats = ResolutionStats { resolved_at: ResolvedAt::AfterReduction, ..Default::default() };
    while let Some(node) = work.ancestral_order().into_iter().find(|&n| n != decision && n != target) {
        let m = marginalize_node(&mut work, node)?;
        stats.nodes_reduced += 1;
        stats.arc_reversals += m.reversals;
    }
    if work.has_arc(target, decision) {
        reverse_arc(&mut work, target, decision)?;
        stats.arc_reversals += 1;
    }
    let sign = if work.has_arc(decision, target) {
        arc_sign(&work, decision, target, tol)?
    } else {
        Sign::Zero
    };
    Ok((sign, stats, work))
}
