//! Qualitative layer: arc signs read off conditional tables by stochastic
//! dominance, the four-valued sign algebra, and sign propagation from a
//! decision node.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cdf::dominates;
use crate::error::{Error, Result};
use crate::graph::{self, ParentMap};
use crate::net::{BayesNet, NodeId, Variable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "?")]
    Ambiguous,
}

pub const ALL_SIGNS: [Sign; 4] = [Sign::Positive, Sign::Negative, Sign::Zero, Sign::Ambiguous];

impl Sign {
    /// Combines "dominates upward" and "dominates downward" verdicts.
    pub fn from_dominance(pos: bool, neg: bool) -> Sign {
        match (pos, neg) {
            (true, true) => Sign::Zero,
            (true, false) => Sign::Positive,
            (false, true) => Sign::Negative,
            (false, false) => Sign::Ambiguous,
        }
    }

    /// `+` or `-`.
    pub fn is_decisive(self) -> bool {
        matches!(self, Sign::Positive | Sign::Negative)
    }

    /// Anything but `?`: the query has an answer.
    pub fn is_resolved(self) -> bool {
        self != Sign::Ambiguous
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
            s => s,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
            Sign::Zero => "0",
            Sign::Ambiguous => "?",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Sign> {
        match s.trim() {
            "+" => Ok(Sign::Positive),
            "-" => Ok(Sign::Negative),
            "0" => Ok(Sign::Zero),
            "?" => Ok(Sign::Ambiguous),
            other => Err(Error::Format(format!("unknown sign {other:?}"))),
        }
    }
}

/// Sign product (chaining influences along a path).
impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        use Sign::*;
        match (self, rhs) {
            (Zero, _) | (_, Zero) => Zero,
            (Ambiguous, _) | (_, Ambiguous) => Ambiguous,
            (a, b) if a == b => Positive,
            _ => Negative,
        }
    }
}

/// Sign sum (combining parallel influences).
impl Add for Sign {
    type Output = Sign;
    fn add(self, rhs: Sign) -> Sign {
        use Sign::*;
        match (self, rhs) {
            (Zero, s) | (s, Zero) => s,
            (a, b) if a == b => a,
            _ => Ambiguous,
        }
    }
}

/// Sign of the arc `parent -> child`, read from the child's table: positive
/// when, in every context of the other parents, a higher parent state yields
/// a child CDF that lies pointwise at or below the one for a lower state.
pub fn arc_sign(net: &BayesNet, parent: NodeId, child: NodeId, tol: f64) -> Result<Sign> {
    if !net.contains(child) || !net.has_arc(parent, child) {
        return Err(Error::NoSuchArc(parent, child));
    }
    let cpt = net.cpt(child);
    let pos_idx = cpt.parent_position(parent).expect("arc present");
    let cards = cpt.parent_cards();
    let mut pos = true;
    let mut neg = true;
    let mut cdfs: Vec<Vec<f64>> = Vec::with_capacity(cards[pos_idx]);
    for r in 0..cpt.num_rows() {
        let states = cpt.row_states(r);
        // Visit each context once, at its lowest parent state.
        if states[pos_idx] != 0 {
            continue;
        }
        cdfs.clear();
        let mut ctx = states;
        for s in 0..cards[pos_idx] {
            ctx[pos_idx] = s;
            cdfs.push(cpt.cdf_row(cpt.row_index(&ctx)).values().to_vec());
        }
        for i in 0..cdfs.len() {
            for j in i + 1..cdfs.len() {
                pos &= dominates(&cdfs[j], &cdfs[i], tol);
                neg &= dominates(&cdfs[i], &cdfs[j], tol);
            }
        }
        if !pos && !neg {
            return Ok(Sign::Ambiguous);
        }
    }
    Ok(Sign::from_dominance(pos, neg))
}

/// A qualitative probabilistic network: a DAG with one sign per arc.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Qpn {
    vars: BTreeMap<NodeId, Variable>,
    parents: ParentMap,
    signs: BTreeMap<(NodeId, NodeId), Sign>,
}

impl Qpn {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, id: NodeId, var: Variable) {
        self.vars.insert(id, var);
        self.parents.entry(id).or_default();
    }

    /// Adds `parent -> child`; both nodes must already exist.
    pub fn add_arc(&mut self, parent: NodeId, child: NodeId, sign: Sign) -> Result<()> {
        for id in [parent, child] {
            if !self.vars.contains_key(&id) {
                return Err(Error::UnknownNode(id.to_string()));
            }
        }
        let ps = self.parents.get_mut(&child).expect("registered");
        if !ps.contains(&parent) {
            ps.push(parent);
        }
        self.signs.insert((parent, child), sign);
        Ok(())
    }

    /// Labels every arc of a valid network with its [`arc_sign`].
    pub fn from_net(net: &BayesNet, tol: f64) -> Result<Qpn> {
        net.validate(tol).into_result()?;
        let mut qpn = Qpn::new();
        for id in net.node_ids() {
            qpn.add_node(id, net.variable(id).clone());
        }
        for id in net.node_ids() {
            qpn.relabel_family(net, id, tol)?;
        }
        Ok(qpn)
    }

    /// Brings the abstraction in line with `net` after the tables of
    /// `changed` were rewritten and some nodes possibly removed. Arcs into
    /// untouched nodes keep their signs.
    pub fn refresh(&mut self, net: &BayesNet, changed: &[NodeId], tol: f64) -> Result<()> {
        let gone: Vec<NodeId> = self.vars.keys().copied().filter(|id| !net.contains(*id)).collect();
        for id in gone {
            self.vars.remove(&id);
            self.parents.remove(&id);
            self.signs.retain(|&(p, c), _| p != id && c != id);
        }
        for ps in self.parents.values_mut() {
            ps.retain(|p| net.contains(*p));
        }
        for &id in changed {
            if net.contains(id) {
                self.vars.insert(id, net.variable(id).clone());
                self.relabel_family(net, id, tol)?;
            }
        }
        Ok(())
    }

    fn relabel_family(&mut self, net: &BayesNet, id: NodeId, tol: f64) -> Result<()> {
        self.signs.retain(|&(_, c), _| c != id);
        let ps = net.parents(id).to_vec();
        for &p in &ps {
            self.signs.insert((p, id), arc_sign(net, p, id, tol)?);
        }
        self.parents.insert(id, ps);
        Ok(())
    }

    pub fn node(&self, name: &str) -> Result<NodeId> {
        self.vars
            .iter()
            .find(|(_, v)| v.name == name)
            .map(|(&id, _)| id)
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.vars.contains_key(&id)
    }

    pub fn variable(&self, id: NodeId) -> &Variable {
        &self.vars[&id]
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.vars.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn parents(&self, id: NodeId) -> &[NodeId] {
        self.parents.get(&id).map_or(&[], Vec::as_slice)
    }

    pub fn sign(&self, parent: NodeId, child: NodeId) -> Option<Sign> {
        self.signs.get(&(parent, child)).copied()
    }

    pub fn arcs(&self) -> impl Iterator<Item = ((NodeId, NodeId), Sign)> + '_ {
        self.signs.iter().map(|(&k, &s)| (k, s))
    }

    pub fn parent_map(&self) -> &ParentMap {
        &self.parents
    }

    /// Panics on a cyclic graph.
    pub fn ancestral_order(&self) -> Vec<NodeId> {
        graph::ancestral_order(&self.parents).expect("qpn must be acyclic")
    }
}

/// A message that changed a node's accumulated sign to `?`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Message {
    pub source: NodeId,
    pub sign: Sign,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropagationTrace {
    pub decision: NodeId,
    /// Sign of each node's dependence on the decision.
    pub signs: BTreeMap<NodeId, Sign>,
    /// For `?` nodes: the incoming message that first made them `?`.
    pub messages: BTreeMap<NodeId, Message>,
    /// Visit order (ancestral, ties by id).
    pub order: Vec<NodeId>,
}

/// The first ambiguous node `x` and the neighbour `y` whose message made it so.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Frontier {
    pub x: NodeId,
    pub y: NodeId,
}

/// Pushes the decision's unit influence down the directed arcs. Assumes no
/// evidence and a decision without ancestors in the network, so the only
/// active trails are the directed paths out of the decision.
pub fn propagate_signs(qpn: &Qpn, decision: NodeId) -> Result<PropagationTrace> {
    if !qpn.contains(decision) {
        return Err(Error::UnknownNode(decision.to_string()));
    }
    let order = qpn.ancestral_order();
    let rank: BTreeMap<NodeId, usize> = order.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let reach: BTreeSet<NodeId> = graph::descendants(qpn.parent_map(), decision);
    let mut signs = BTreeMap::new();
    let mut messages = BTreeMap::new();
    for &n in &order {
        if n == decision {
            signs.insert(n, Sign::Positive);
            continue;
        }
        if !reach.contains(&n) {
            signs.insert(n, Sign::Zero);
            continue;
        }
        let mut parents = qpn.parents(n).to_vec();
        parents.sort_by_key(|p| rank[p]);
        let mut acc = Sign::Zero;
        for p in parents {
            let carried = signs[&p] * qpn.sign(p, n).unwrap_or(Sign::Ambiguous);
            let next = acc + carried;
            if next == Sign::Ambiguous && acc != Sign::Ambiguous {
                messages.insert(n, Message { source: p, sign: carried });
            }
            acc = next;
        }
        signs.insert(n, acc);
    }
    Ok(PropagationTrace { decision, signs, messages, order })
}

impl PropagationTrace {
    pub fn sign_of(&self, id: NodeId) -> Sign {
        self.signs.get(&id).copied().unwrap_or(Sign::Zero)
    }

    /// `None` when `target` already has a resolved sign.
    pub fn frontier(&self, target: NodeId) -> Option<Frontier> {
        if self.sign_of(target).is_resolved() {
            return None;
        }
        let x = *self.order.iter().find(|n| self.sign_of(**n) == Sign::Ambiguous)?;
        let y = self.messages.get(&x).map_or(self.decision, |m| m.source);
        Some(Frontier { x, y })
    }
}

pub fn ambiguity_frontier(trace: &PropagationTrace, decision: NodeId, target: NodeId) -> Option<Frontier> {
    debug_assert_eq!(trace.decision, decision);
    trace.frontier(target)
}
