//! CDF bounds from state-space abstraction.
//!
//! Selected nodes have their ordered states merged into contiguous
//! superstates. The merged node's table sums the merged probabilities; each
//! child's table takes, per superstate, the pointwise minimum (strengthen) or
//! maximum (weaken) of the original child CDFs. Choosing the directive per
//! child from the sign of its influence on the query node yields one network
//! whose query CDF is a guaranteed lower bound and one whose CDF is a
//! guaranteed upper bound. Refining superstates tightens both.
//!
//! Two structural patterns are recognised for the query `F(x | d)`:
//!
//! * **mediator**: node `a`, not an ancestor of `d`, whose children are all
//!   parents of `x`, have no parents besides `a` and `d`, and influence `x`
//!   with a decisive sign; `x` has no parents besides those children and
//!   `d`. Lower bound: strengthen positive children, weaken negative ones.
//! * **sole parent**: a parent `y` of `x`, not an ancestor of `d`, whose only
//!   child is `x`. Lower bound: strengthen `x`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cdf::CdfVector;
use crate::error::{Error, Result};
use crate::exact::exact_conditional_cdfs;
use crate::net::{BayesNet, Cpt, NodeId, Variable};
use crate::qpn::{arc_sign, Sign};

/// Contiguous, disjoint superstates covering a node's states in order.
/// Blocks are inclusive index ranges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StatePartition {
    pub node: NodeId,
    blocks: Vec<(usize, usize)>,
}

impl StatePartition {
    pub fn new(node: NodeId, card: usize, blocks: Vec<(usize, usize)>) -> Result<Self> {
        let mut next = 0;
        for &(i, j) in &blocks {
            if i != next || j < i {
                return Err(Error::InvalidPartition(format!("block [{i}, {j}] does not continue at state {next}")));
            }
            next = j + 1;
        }
        if next != card || blocks.is_empty() {
            return Err(Error::InvalidPartition(format!("blocks cover {next} of {card} states")));
        }
        Ok(StatePartition { node, blocks })
    }

    /// A single superstate.
    pub fn coarsest(node: NodeId, card: usize) -> Self {
        StatePartition { node, blocks: vec![(0, card - 1)] }
    }

    /// Every state on its own.
    pub fn finest(node: NodeId, card: usize) -> Self {
        StatePartition { node, blocks: (0..card).map(|s| (s, s)).collect() }
    }

    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn is_finest(&self) -> bool {
        self.blocks.iter().all(|(i, j)| i == j)
    }

    /// Widest block, lowest index on ties; `None` when fully refined.
    pub fn widest_block(&self) -> Option<usize> {
        let (idx, (i, j)) = self
            .blocks
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| (a.1 - a.0).cmp(&(b.1 - b.0)).then(ib.cmp(ia)))?;
        (j > i).then_some(idx)
    }

    /// Splits block `idx` at its midpoint.
    pub fn split(&mut self, idx: usize) -> bool {
        let (i, j) = self.blocks[idx];
        if j == i {
            return false;
        }
        let mid = (i + j) / 2;
        self.blocks[idx] = (i, mid);
        self.blocks.insert(idx + 1, (mid + 1, j));
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Directive {
    /// Pointwise minimum of the merged CDFs: the stochastically largest.
    Strengthen,
    /// Pointwise maximum: the stochastically smallest.
    Weaken,
}

impl Directive {
    pub fn flip(self) -> Directive {
        match self {
            Directive::Strengthen => Directive::Weaken,
            Directive::Weaken => Directive::Strengthen,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Lower,
    Upper,
}

/// Network with `a` merged into superstates. The children of `a` still
/// index `a` by its old states and must be passed through
/// [`transform_child_cpt`] before the network is usable.
#[derive(Clone, Debug)]
pub struct Aggregated {
    pub net: BayesNet,
    pub pending: Vec<NodeId>,
}

pub fn aggregate_node(net: &BayesNet, a: NodeId, partition: &StatePartition) -> Result<Aggregated> {
    let var = net.try_variable(a)?;
    if partition.node != a {
        return Err(Error::InvalidPartition(format!("partition is for {}, not {}", partition.node, a)));
    }
    StatePartition::new(a, var.card(), partition.blocks.clone())?;
    let labels = partition
        .blocks
        .iter()
        .map(|&(i, j)| if i == j { var.states[i].clone() } else { format!("{}..{}", var.states[i], var.states[j]) })
        .collect();
    let cpt = net.cpt(a);
    let mut table = Vec::with_capacity(cpt.num_rows() * partition.len());
    for row in cpt.rows() {
        table.extend(partition.blocks.iter().map(|&(i, j)| row[i..=j].iter().sum::<f64>()));
    }
    let mut out = net.clone();
    out.set_variable(a, Variable { name: var.name.clone(), states: labels });
    out.set_cpt(a, Cpt::new(cpt.parents().to_vec(), cpt.parent_cards().to_vec(), partition.len(), table))?;
    Ok(Aggregated { pending: net.children(a), net: out })
}

/// Re-indexes a child table by the superstates of parent `a`, taking the
/// pointwise min (strengthen) or max (weaken) of the child CDFs within each
/// superstate.
pub fn transform_child_cpt(cpt: &Cpt, a: NodeId, partition: &StatePartition, directive: Directive) -> Result<Cpt> {
    let pos = cpt
        .parent_position(a)
        .ok_or_else(|| Error::InvalidArgument(format!("{a} is not a parent of this table")))?;
    StatePartition::new(a, cpt.parent_cards()[pos], partition.blocks.clone())?;
    let mut new_cards = cpt.parent_cards().to_vec();
    new_cards[pos] = partition.len();
    let shell = Cpt::new(cpt.parents().to_vec(), new_cards, cpt.card(), Vec::new());
    let mut table = Vec::with_capacity(shell.num_rows() * cpt.card());
    for r in 0..shell.num_rows() {
        let mut ctx = shell.row_states(r);
        let (i, j) = partition.blocks[ctx[pos]];
        let mut acc: Option<Vec<f64>> = None;
        for l in i..=j {
            ctx[pos] = l;
            let cdf = cpt.cdf_row(cpt.row_index(&ctx));
            acc = Some(match acc {
                None => cdf.values().to_vec(),
                Some(mut v) => {
                    for (a, b) in v.iter_mut().zip(cdf.values()) {
                        *a = match directive {
                            Directive::Strengthen => a.min(*b),
                            Directive::Weaken => a.max(*b),
                        };
                    }
                    v
                }
            });
        }
        table.extend(CdfVector::new(acc.expect("nonempty block")).to_probs());
    }
    Ok(Cpt::new(shell.parents().to_vec(), shell.parent_cards().to_vec(), cpt.card(), table))
}

/// Why an abstraction pattern was recognised for a node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "rule")]
pub enum Rule {
    /// All influence of the node on the query passes through its children,
    /// each with the listed sign on the query.
    Mediator { children: Vec<(NodeId, Sign)> },
    /// The node's only child is the query node.
    SoleParent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    /// The decision is a descendant of the node.
    AncestorOfDecision,
    /// A parent of the query node that has further children.
    MultipleChildren,
    /// Some child is not a parent of the query node, or the node is itself one.
    NotMediating,
    /// The query node has parents other than the mediators and the decision.
    OtherParentsOfQuery,
    /// A mediator has parents other than the node and the decision.
    MediatorHasOtherParents(NodeId),
    /// A mediator's influence on the query node is `?`.
    AmbiguousSign(NodeId),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub node: NodeId,
    pub rule: Rule,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Eligibility {
    pub decision: NodeId,
    pub query: NodeId,
    pub candidates: Vec<Candidate>,
    pub rejected: Vec<(NodeId, Rejection)>,
}

impl Eligibility {
    pub fn is_eligible(&self) -> bool {
        !self.candidates.is_empty()
    }

    pub fn candidate(&self, node: NodeId) -> Option<&Candidate> {
        self.candidates.iter().find(|c| c.node == node)
    }

    pub fn rejection(&self, node: NodeId) -> Option<&Rejection> {
        self.rejected.iter().find(|(n, _)| *n == node).map(|(_, r)| r)
    }
}

/// Finds the nodes that may be abstracted when bounding `F(x | decision)`.
/// Only the ancestors of `x` and of the decision are considered; everything
/// else is barren for this query.
pub fn check_eligibility(net: &BayesNet, decision: NodeId, x: NodeId, tol: f64) -> Result<Eligibility> {
    let sub = net.prune_irrelevant(decision, x)?;
    let x_parents = sub.parents(x).to_vec();
    let mut out = Eligibility { decision, query: x, candidates: Vec::new(), rejected: Vec::new() };
    for node in sub.node_ids() {
        if node == decision || node == x {
            continue;
        }
        let verdict = classify(&sub, decision, x, &x_parents, node, tol)?;
        match verdict {
            Ok(rule) => out.candidates.push(Candidate { node, rule }),
            Err(why) => out.rejected.push((node, why)),
        }
    }
    Ok(out)
}

fn classify(
    sub: &BayesNet,
    decision: NodeId,
    x: NodeId,
    x_parents: &[NodeId],
    node: NodeId,
    tol: f64,
) -> Result<std::result::Result<Rule, Rejection>> {
    if sub.descendants(node).contains(&decision) {
        return Ok(Err(Rejection::AncestorOfDecision));
    }
    let children = sub.children(node);
    if children == [x] {
        return Ok(Ok(Rule::SoleParent));
    }
    if x_parents.contains(&node) {
        return Ok(Err(Rejection::MultipleChildren));
    }
    if children.is_empty() || !children.iter().all(|c| x_parents.contains(c)) {
        return Ok(Err(Rejection::NotMediating));
    }
    if !x_parents.iter().all(|p| *p == decision || children.contains(p)) {
        return Ok(Err(Rejection::OtherParentsOfQuery));
    }
    let mut signs = Vec::with_capacity(children.len());
    for &c in &children {
        if !sub.parents(c).iter().all(|p| *p == node || *p == decision) {
            return Ok(Err(Rejection::MediatorHasOtherParents(c)));
        }
        let s = arc_sign(sub, c, x, tol)?;
        if s == Sign::Ambiguous {
            return Ok(Err(Rejection::AmbiguousSign(c)));
        }
        signs.push((c, s));
    }
    Ok(Ok(Rule::Mediator { children: signs }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlanEntry {
    pub partition: StatePartition,
    pub rule: Rule,
}

impl PlanEntry {
    pub fn node(&self) -> NodeId {
        self.partition.node
    }

    /// How the table of `child` is transformed in the network computing `bound`.
    pub fn directive(&self, child: NodeId, bound: Bound) -> Directive {
        let lower = match &self.rule {
            Rule::SoleParent => Directive::Strengthen,
            Rule::Mediator { children } => {
                match children.iter().find(|(c, _)| *c == child).map(|(_, s)| *s) {
                    Some(Sign::Negative) => Directive::Weaken,
                    _ => Directive::Strengthen,
                }
            }
        };
        match bound {
            Bound::Lower => lower,
            Bound::Upper => lower.flip(),
        }
    }
}

/// Which nodes are abstracted, how coarsely, and with which directives. Each
/// plan configures two networks: one computing lower bounds of
/// `F(query | d)` for every decision state `d`, one computing upper bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbstractionPlan {
    pub decision: NodeId,
    pub query: NodeId,
    pub entries: Vec<PlanEntry>,
}

impl AbstractionPlan {
    /// Every eligible node at a single superstate.
    pub fn coarsest(net: &BayesNet, eligibility: &Eligibility) -> Result<Self> {
        if !eligibility.is_eligible() {
            return Err(Error::Ineligible(format!(
                "no abstractable node for the influence of {} on {}",
                eligibility.decision, eligibility.query
            )));
        }
        let entries = eligibility
            .candidates
            .iter()
            .map(|c| PlanEntry {
                partition: StatePartition::coarsest(c.node, net.card(c.node)),
                rule: c.rule.clone(),
            })
            .collect();
        Ok(AbstractionPlan { decision: eligibility.decision, query: eligibility.query, entries })
    }

    pub fn is_fully_refined(&self) -> bool {
        self.entries.iter().all(|e| e.partition.is_finest())
    }

    /// Sets every partition to singletons, leaving the network unabstracted.
    pub fn refine_fully(&mut self, net: &BayesNet) {
        for e in &mut self.entries {
            e.partition = StatePartition::finest(e.node(), net.card(e.node()));
        }
    }
}

/// Builds the abstract network computing `bound`.
pub fn abstract_network(net: &BayesNet, plan: &AbstractionPlan, bound: Bound) -> Result<BayesNet> {
    let order = net.ancestral_order();
    let mut entries: Vec<&PlanEntry> = plan.entries.iter().collect();
    entries.sort_by_key(|e| order.iter().position(|n| *n == e.node()));
    let mut work = net.clone();
    for entry in entries {
        let Aggregated { net: mut next, pending } = aggregate_node(&work, entry.node(), &entry.partition)?;
        for child in pending {
            let cpt = transform_child_cpt(work.cpt(child), entry.node(), &entry.partition, entry.directive(child, bound))?;
            next.set_cpt(child, cpt)?;
        }
        work = next;
    }
    Ok(work)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateBounds {
    pub lower: CdfVector,
    pub upper: CdfVector,
}

/// Lower and upper CDF of the query node for each decision state; `None`
/// where the decision state has probability zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CdfBounds {
    pub states: Vec<Option<StateBounds>>,
}

impl CdfBounds {
    /// Total width: sum over states and coordinates of `upper - lower`.
    pub fn width(&self) -> f64 {
        self.states
            .iter()
            .flatten()
            .map(|b| b.upper.values().iter().zip(b.lower.values()).map(|(u, l)| u - l).sum::<f64>())
            .sum()
    }
}

/// Evaluates the lower- and upper-bound networks of `plan` exactly.
pub fn bound_target_cdfs(net: &BayesNet, decision: NodeId, x: NodeId, plan: &AbstractionPlan) -> Result<CdfBounds> {
    if plan.decision != decision || plan.query != x {
        return Err(Error::Ineligible("plan was built for a different query".into()));
    }
    let sub = net.prune_irrelevant(decision, x)?;
    let lower = exact_conditional_cdfs(&abstract_network(&sub, plan, Bound::Lower)?, x, decision)?;
    let upper = exact_conditional_cdfs(&abstract_network(&sub, plan, Bound::Upper)?, x, decision)?;
    Ok(CdfBounds {
        states: lower
            .into_iter()
            .zip(upper)
            .map(|(l, u)| match (l, u) {
                (Some(lower), Some(upper)) => Some(StateBounds { lower, upper }),
                _ => None,
            })
            .collect(),
    })
}

/// Reads the decision's influence off CDF bounds, or `None` when the bounds
/// are too loose to tell.
///
/// Negative when every lower decision state's upper bound lies below every
/// higher state's lower bound; positive symmetrically. Ambiguous when the
/// bounds certify that the "negative" inequality fails for some pair of
/// decision states and the "positive" one fails for some pair; for a binary
/// decision that is exactly a certified crossing of the two CDFs.
pub fn sign_from_bounds(bounds: &CdfBounds, tol: f64) -> Option<Sign> {
    let defined: Vec<&StateBounds> = bounds.states.iter().flatten().collect();
    let (mut neg, mut pos) = (true, true);
    let (mut not_neg, mut not_pos) = (false, false);
    for i in 0..defined.len() {
        for j in i + 1..defined.len() {
            let (lo, hi) = (defined[i], defined[j]);
            for k in 0..lo.lower.len() {
                neg &= lo.upper[k] <= hi.lower[k] + tol;
                pos &= hi.upper[k] <= lo.lower[k] + tol;
                not_neg |= lo.lower[k] > hi.upper[k] + tol;
                not_pos |= hi.lower[k] > lo.upper[k] + tol;
            }
        }
    }
    match (pos, neg) {
        (true, true) => Some(Sign::Zero),
        (true, false) => Some(Sign::Positive),
        (false, true) => Some(Sign::Negative),
        _ if not_neg && not_pos => Some(Sign::Ambiguous),
        _ => None,
    }
}

/// Limits on the refinement loop. Each step splits the widest superstate of
/// the abstracted node whose last split tightened the bounds the most
/// (never-split nodes first, ties by node id) at its midpoint.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RefinementPolicy {
    /// Stop after this many splits even if unresolved.
    pub max_steps: Option<usize>,
}

/// Incremental bound computation for one `F(x | decision)` query.
#[derive(Clone, Debug)]
pub struct Refiner {
    net: BayesNet,
    decision: NodeId,
    x: NodeId,
    plan: AbstractionPlan,
    bounds: CdfBounds,
    last_gain: BTreeMap<NodeId, f64>,
    steps: usize,
}

impl Refiner {
    /// Starts from the coarsest eligible plan; fails with `Ineligible` when
    /// no node can be abstracted.
    pub fn new(net: &BayesNet, decision: NodeId, x: NodeId, tol: f64) -> Result<Self> {
        let net = net.prune_irrelevant(decision, x)?;
        let eligibility = check_eligibility(&net, decision, x, tol)?;
        let plan = AbstractionPlan::coarsest(&net, &eligibility)?;
        let bounds = bound_target_cdfs(&net, decision, x, &plan)?;
        Ok(Refiner { net, decision, x, plan, bounds, last_gain: BTreeMap::new(), steps: 0 })
    }

    pub fn bounds(&self) -> &CdfBounds {
        &self.bounds
    }

    pub fn plan(&self) -> &AbstractionPlan {
        &self.plan
    }

    /// The network actually evaluated (the query's relevant part).
    pub fn network(&self) -> &BayesNet {
        &self.net
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn is_fully_refined(&self) -> bool {
        self.plan.is_fully_refined()
    }

    /// Performs one split and recomputes the bounds. Returns `false` when
    /// everything is already at singleton states.
    pub fn refine(&mut self) -> Result<bool> {
        let pick = self
            .plan
            .entries
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.partition.widest_block().map(|b| (i, b)))
            .max_by(|&(a, _), &(b, _)| {
                let ga = self.gain_of(self.plan.entries[a].node());
                let gb = self.gain_of(self.plan.entries[b].node());
                ga.total_cmp(&gb).then(self.plan.entries[b].node().cmp(&self.plan.entries[a].node()))
            });
        let Some((entry, block)) = pick else {
            return Ok(false);
        };
        self.plan.entries[entry].partition.split(block);
        let next = bound_target_cdfs(&self.net, self.decision, self.x, &self.plan)?;
        let gain = self.bounds.width() - next.width();
        self.last_gain.insert(self.plan.entries[entry].node(), gain);
        self.bounds = next;
        self.steps += 1;
        Ok(true)
    }

    fn gain_of(&self, node: NodeId) -> f64 {
        self.last_gain.get(&node).copied().unwrap_or(f64::INFINITY)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IssaOutcome {
    /// `None` if the step budget ran out before the bounds were conclusive.
    pub sign: Option<Sign>,
    pub refinement_steps: usize,
    pub plan: AbstractionPlan,
    pub bounds: CdfBounds,
}

/// Bounds `F(x | decision)` from the coarsest abstraction upward, stopping as
/// soon as the bounds settle the sign. At full refinement the bounds are
/// exact, so an unlimited run always returns a sign.
pub fn issa_resolve(net: &BayesNet, decision: NodeId, x: NodeId, policy: &RefinementPolicy, tol: f64) -> Result<IssaOutcome> {
    let mut refiner = Refiner::new(net, decision, x, tol)?;
    loop {
        let sign = sign_from_bounds(refiner.bounds(), tol);
        let budget_spent = policy.max_steps.is_some_and(|m| refiner.steps() >= m);
        if sign.is_some() || budget_spent || !refiner.refine()? {
            let sign = sign.or_else(|| sign_from_bounds(refiner.bounds(), tol));
            return Ok(IssaOutcome {
                sign,
                refinement_steps: refiner.steps(),
                plan: refiner.plan.clone(),
                bounds: refiner.bounds.clone(),
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::DEFAULT_TOLERANCE;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn partition_validation() {
        assert!(StatePartition::new(NodeId(0), 3, vec![(0, 0), (1, 2)]).is_ok());
        assert!(StatePartition::new(NodeId(0), 3, vec![(0, 1)]).is_err());
        assert!(StatePartition::new(NodeId(0), 3, vec![(1, 2), (0, 0)]).is_err());
        let mut p = StatePartition::coarsest(NodeId(0), 5);
        assert_eq!(p.widest_block(), Some(0));
        assert!(p.split(0));
        assert_eq!(p.blocks(), &[(0, 2), (3, 4)]);
        assert_eq!(p.widest_block(), Some(0));
        assert_eq!(StatePartition::finest(NodeId(0), 3).widest_block(), None);
    }

    fn prior_net(probs: Vec<f64>) -> (BayesNet, NodeId) {
        let mut net = BayesNet::new();
        let a = net.add_variable(Variable::with_cardinality("A", probs.len()));
        net.set_rows(a, &[], vec![probs]).unwrap();
        (net, a)
    }

    #[test]
    fn aggregation_sums_ranges() {
        let (net, a) = prior_net(vec![0.2, 0.3, 0.5]);
        let p = StatePartition::new(a, 3, vec![(0, 0), (1, 2)]).unwrap();
        let agg = aggregate_node(&net, a, &p).unwrap();
        assert!(close(agg.net.cpt(a).table(), &[0.2, 0.8]));
        // Merging the upper two states (1-based states 1..2 are indices 0..1).
        let p = StatePartition::new(a, 3, vec![(0, 1), (2, 2)]).unwrap();
        assert!(close(aggregate_node(&net, a, &p).unwrap().net.cpt(a).table(), &[0.5, 0.5]));
        let id = StatePartition::finest(a, 3);
        assert_eq!(aggregate_node(&net, a, &id).unwrap().net.cpt(a), net.cpt(a));
        let all = StatePartition::coarsest(a, 3);
        assert!(close(aggregate_node(&net, a, &all).unwrap().net.cpt(a).table(), &[1.0]));
    }

    #[test]
    fn strengthen_and_weaken() {
        let a = NodeId(0);
        let cpt = Cpt::new(vec![a], vec![2], 2, vec![0.2, 0.8, 0.7, 0.3]);
        let all = StatePartition::coarsest(a, 2);
        let s = transform_child_cpt(&cpt, a, &all, Directive::Strengthen).unwrap();
        assert!(close(s.cdf_row(0).values(), &[0.2, 1.0]));
        let w = transform_child_cpt(&cpt, a, &all, Directive::Weaken).unwrap();
        assert!(close(w.cdf_row(0).values(), &[0.7, 1.0]));
        let id = StatePartition::finest(a, 2);
        for d in [Directive::Strengthen, Directive::Weaken] {
            assert!(close(transform_child_cpt(&cpt, a, &id, d).unwrap().table(), cpt.table()));
        }
    }

    fn sb(lower: &[f64], upper: &[f64]) -> Option<StateBounds> {
        Some(StateBounds { lower: CdfVector::new(lower.to_vec()), upper: CdfVector::new(upper.to_vec()) })
    }

    #[test]
    fn bounds_verdicts() {
        let tol = DEFAULT_TOLERANCE;
        let neg = CdfBounds { states: vec![sb(&[0.1, 1.0], &[0.3, 1.0]), sb(&[0.5, 1.0], &[0.6, 1.0])] };
        assert_eq!(sign_from_bounds(&neg, tol), Some(Sign::Negative));

        let pos = CdfBounds { states: vec![sb(&[0.5, 1.0], &[0.6, 1.0]), sb(&[0.1, 1.0], &[0.3, 1.0])] };
        assert_eq!(sign_from_bounds(&pos, tol), Some(Sign::Positive));

        // Crossing witness at r (index 0) and s (index 1).
        let cross = CdfBounds {
            states: vec![sb(&[0.25, 0.35, 1.0], &[0.3, 0.5, 1.0]), sb(&[0.4, 0.1, 1.0], &[0.45, 0.2, 1.0])],
        };
        assert_eq!(sign_from_bounds(&cross, tol), Some(Sign::Ambiguous));

        let loose = CdfBounds { states: vec![sb(&[0.1, 1.0], &[0.6, 1.0]), sb(&[0.2, 1.0], &[0.7, 1.0])] };
        assert_eq!(sign_from_bounds(&loose, tol), None);
    }
}
