//! Discrete Bayesian network model.
//!
//! Every variable has an ordered list of states; the order is the value order
//! used by stochastic dominance. Conditional tables are stored row-major, one
//! row per joint parent assignment, with the first parent as the most
//! significant digit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cdf::CdfVector;
use crate::error::{Error, Result};
use crate::graph::{self, ParentMap};

/// Default absolute tolerance for probability comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub states: Vec<String>,
}

impl Variable {
    pub fn new<S: Into<String>>(name: S, states: &[&str]) -> Self {
        Variable {
            name: name.into(),
            states: states.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Variable with states labelled `0..card`.
    pub fn with_cardinality<S: Into<String>>(name: S, card: usize) -> Self {
        Variable {
            name: name.into(),
            states: (0..card).map(|i| i.to_string()).collect(),
        }
    }

    pub fn card(&self) -> usize {
        self.states.len()
    }
}

/// Conditional probability table of one child given an ordered parent list.
#[derive(Clone, Debug, PartialEq)]
pub struct Cpt {
    parents: Vec<NodeId>,
    parent_cards: Vec<usize>,
    card: usize,
    table: Vec<f64>,
}

impl Cpt {
    pub fn new(parents: Vec<NodeId>, parent_cards: Vec<usize>, card: usize, table: Vec<f64>) -> Self {
        Cpt { parents, parent_cards, card, table }
    }

    pub fn prior(probs: Vec<f64>) -> Self {
        let card = probs.len();
        Cpt::new(Vec::new(), Vec::new(), card, probs)
    }

    pub fn from_rows(parents: Vec<NodeId>, parent_cards: Vec<usize>, rows: Vec<Vec<f64>>) -> Self {
        let card = rows.first().map_or(0, |r| r.len());
        let table = rows.into_iter().flatten().collect();
        Cpt::new(parents, parent_cards, card, table)
    }

    pub fn parents(&self) -> &[NodeId] {
        &self.parents
    }

    pub fn parent_cards(&self) -> &[usize] {
        &self.parent_cards
    }

    pub fn card(&self) -> usize {
        self.card
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn num_rows(&self) -> usize {
        self.parent_cards.iter().product()
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.table[r * self.card..(r + 1) * self.card]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.table[r * self.card..(r + 1) * self.card]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.table.chunks(self.card.max(1))
    }

    /// Row index of a parent assignment given in parent-list order.
    pub fn row_index(&self, parent_states: &[usize]) -> usize {
        parent_states
            .iter()
            .zip(&self.parent_cards)
            .fold(0, |acc, (&s, &c)| acc * c + s)
    }

    /// Parent assignment of row `r`, inverse of [`Cpt::row_index`].
    pub fn row_states(&self, mut r: usize) -> Vec<usize> {
        let mut states = vec![0; self.parent_cards.len()];
        for (slot, &c) in states.iter_mut().zip(&self.parent_cards).rev() {
            *slot = r % c;
            r /= c;
        }
        states
    }

    pub fn prob(&self, parent_states: &[usize], state: usize) -> f64 {
        self.table[self.row_index(parent_states) * self.card + state]
    }

    pub fn cdf_row(&self, r: usize) -> CdfVector {
        CdfVector::from_probs(self.row(r))
    }

    /// Index of `parent` in the parent list.
    pub fn parent_position(&self, parent: NodeId) -> Option<usize> {
        self.parents.iter().position(|&p| p == parent)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationKind {
    Cycle,
    NonNormalizedRow,
    MissingRow,
    ParentMismatch,
    InvalidVariable,
    InvalidEntry,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::Cycle => "CYCLE",
            ViolationKind::NonNormalizedRow => "NON_NORMALIZED_ROW",
            ViolationKind::MissingRow => "MISSING_ROW",
            ViolationKind::ParentMismatch => "PARENT_MISMATCH",
            ViolationKind::InvalidVariable => "INVALID_VARIABLE",
            ViolationKind::InvalidEntry => "INVALID_ENTRY",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub(crate) fn push(&mut self, kind: ViolationKind, detail: String) {
        self.violations.push(Violation { kind, detail });
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{}: {}", v.kind, v.detail)?;
        }
        Ok(())
    }
}

/// A Bayesian network. Arcs are implied by each table's parent list.
///
/// Node ids are stable: removing or transforming nodes never renumbers the
/// remaining ones.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BayesNet {
    vars: BTreeMap<NodeId, Variable>,
    cpts: BTreeMap<NodeId, Cpt>,
    next: usize,
}

impl BayesNet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, var: Variable) -> NodeId {
        let id = NodeId(self.next);
        self.next += 1;
        self.vars.insert(id, var);
        id
    }

    pub fn set_cpt(&mut self, id: NodeId, cpt: Cpt) -> Result<()> {
        if !self.vars.contains_key(&id) {
            return Err(Error::UnknownNode(id.to_string()));
        }
        self.cpts.insert(id, cpt);
        Ok(())
    }

    /// Convenience: sets a table from per-row probability vectors, taking the
    /// parent cardinalities from the network.
    pub fn set_rows(&mut self, id: NodeId, parents: &[NodeId], rows: Vec<Vec<f64>>) -> Result<()> {
        let cards = parents
            .iter()
            .map(|p| self.try_variable(*p).map(Variable::card))
            .collect::<Result<Vec<_>>>()?;
        self.set_cpt(id, Cpt::from_rows(parents.to_vec(), cards, rows))
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.vars.contains_key(&id)
    }

    pub fn node(&self, name: &str) -> Result<NodeId> {
        self.vars
            .iter()
            .find(|(_, v)| v.name == name)
            .map(|(&id, _)| id)
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn try_variable(&self, id: NodeId) -> Result<&Variable> {
        self.vars.get(&id).ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    /// Panics if `id` is not in the network.
    pub fn variable(&self, id: NodeId) -> &Variable {
        &self.vars[&id]
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.vars[&id].name
    }

    /// Panics if `id` has no table.
    pub fn cpt(&self, id: NodeId) -> &Cpt {
        &self.cpts[&id]
    }

    pub fn card(&self, id: NodeId) -> usize {
        self.vars[&id].card()
    }

    pub fn parents(&self, id: NodeId) -> &[NodeId] {
        self.cpts.get(&id).map_or(&[], |c| c.parents())
    }

    pub fn children(&self, id: NodeId) -> Vec<NodeId> {
        self.cpts
            .iter()
            .filter(|(_, c)| c.parents.contains(&id))
            .map(|(&c, _)| c)
            .collect()
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

    pub fn arcs(&self) -> Vec<(NodeId, NodeId)> {
        self.cpts
            .iter()
            .flat_map(|(&c, cpt)| cpt.parents.iter().map(move |&p| (p, c)))
            .collect()
    }

    pub fn has_arc(&self, parent: NodeId, child: NodeId) -> bool {
        self.parents(child).contains(&parent)
    }

    pub fn parent_map(&self) -> ParentMap {
        self.vars
            .keys()
            .map(|&id| (id, self.parents(id).to_vec()))
            .collect()
    }

    /// Product of all state-space sizes.
    pub fn joint_size(&self) -> u128 {
        self.vars.values().map(|v| v.card() as u128).product()
    }

    /// Checks every structural and numeric invariant; an empty report means
    /// the network is well formed.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let mut report = ValidationReport::default();
        let mut names = BTreeSet::new();
        for v in self.vars.values() {
            if !names.insert(v.name.as_str()) {
                report.push(ViolationKind::InvalidVariable, format!("duplicate variable name {}", v.name));
            }
            if v.states.len() < 2 {
                report.push(ViolationKind::InvalidVariable, format!("{} has fewer than two states", v.name));
            }
            let unique: BTreeSet<&String> = v.states.iter().collect();
            if unique.len() != v.states.len() {
                report.push(ViolationKind::InvalidVariable, format!("{} has duplicate state labels", v.name));
            }
        }
        for (&id, var) in &self.vars {
            let Some(cpt) = self.cpts.get(&id) else {
                report.push(ViolationKind::MissingRow, format!("{} has no conditional table", var.name));
                continue;
            };
            let mut shape_ok = true;
            let mut seen = BTreeSet::new();
            if cpt.parents.len() != cpt.parent_cards.len() {
                report.push(ViolationKind::ParentMismatch, format!("{}: parent cardinality list has wrong length", var.name));
                shape_ok = false;
            }
            for (k, p) in cpt.parents.iter().enumerate() {
                if !seen.insert(*p) {
                    report.push(ViolationKind::ParentMismatch, format!("{}: duplicate parent {}", var.name, p));
                }
                match self.vars.get(p) {
                    None => {
                        report.push(ViolationKind::ParentMismatch, format!("{}: unknown parent {}", var.name, p));
                        shape_ok = false;
                    }
                    Some(pv) if cpt.parent_cards.get(k) != Some(&pv.card()) => {
                        report.push(ViolationKind::ParentMismatch, format!("{}: parent {} cardinality mismatch", var.name, pv.name));
                        shape_ok = false;
                    }
                    _ => {}
                }
            }
            if cpt.card != var.card() {
                report.push(ViolationKind::MissingRow, format!("{}: rows have width {} but the variable has {} states", var.name, cpt.card, var.card()));
                shape_ok = false;
            }
            if shape_ok && cpt.table.len() != cpt.num_rows() * cpt.card {
                report.push(
                    ViolationKind::MissingRow,
                    format!("{}: expected {} rows, table holds {} entries", var.name, cpt.num_rows(), cpt.table.len()),
                );
                shape_ok = false;
            }
            if !shape_ok {
                continue;
            }
            for r in 0..cpt.num_rows() {
                let row = cpt.row(r);
                if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                    report.push(ViolationKind::InvalidEntry, format!("{}: row {} has an entry outside [0, 1]", var.name, r));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > tol {
                    report.push(ViolationKind::NonNormalizedRow, format!("{}: row {} sums to {}", var.name, r, sum));
                }
            }
        }
        if graph::ancestral_order(&self.parent_map()).is_none() {
            report.push(ViolationKind::Cycle, "arc set contains a directed cycle".to_string());
        }
        report
    }

    /// Ancestral (topological) order, ties broken by node id.
    ///
    /// Panics if the network has a cycle; validate first.
    pub fn ancestral_order(&self) -> Vec<NodeId> {
        graph::ancestral_order(&self.parent_map()).expect("network must be acyclic")
    }

    /// Ancestors of `id`, inclusive.
    pub fn ancestors(&self, id: NodeId) -> BTreeSet<NodeId> {
        graph::ancestors(&self.parent_map(), &[id])
    }

    /// Descendants of `id`, inclusive.
    pub fn descendants(&self, id: NodeId) -> BTreeSet<NodeId> {
        graph::descendants(&self.parent_map(), id)
    }

    /// Restricts the network to the nodes that matter for the unobserved
    /// query "how does `decision` influence `target`": the ancestors of both
    /// query nodes. Everything else is barren for the query.
    pub fn prune_irrelevant(&self, decision: NodeId, target: NodeId) -> Result<BayesNet> {
        for id in [decision, target] {
            self.try_variable(id)?;
        }
        let keep = graph::ancestors(&self.parent_map(), &[decision, target]);
        Ok(self.restrict(&keep))
    }

    /// Sub-network over an ancestrally closed node set.
    pub(crate) fn restrict(&self, keep: &BTreeSet<NodeId>) -> BayesNet {
        BayesNet {
            vars: self.vars.iter().filter(|(id, _)| keep.contains(id)).map(|(&id, v)| (id, v.clone())).collect(),
            cpts: self.cpts.iter().filter(|(id, _)| keep.contains(id)).map(|(&id, c)| (id, c.clone())).collect(),
            next: self.next,
        }
    }

    pub(crate) fn remove_node(&mut self, id: NodeId) {
        self.vars.remove(&id);
        self.cpts.remove(&id);
    }

    pub(crate) fn set_variable(&mut self, id: NodeId, var: Variable) {
        self.vars.insert(id, var);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_node() -> (BayesNet, NodeId, NodeId) {
        let mut net = BayesNet::new();
        let x = net.add_variable(Variable::new("X", &["f", "t"]));
        let y = net.add_variable(Variable::new("Y", &["f", "t"]));
        net.set_rows(x, &[], vec![vec![0.6, 0.4]]).unwrap();
        net.set_rows(y, &[x], vec![vec![0.8, 0.2], vec![0.1, 0.9]]).unwrap();
        (net, x, y)
    }

    #[test]
    fn well_formed_net_validates() {
        let (net, _, _) = two_node();
        assert!(net.validate(DEFAULT_TOLERANCE).is_empty());
    }

    #[test]
    fn cycle_reported() {
        let mut net = BayesNet::new();
        let a = net.add_variable(Variable::new("A", &["f", "t"]));
        let b = net.add_variable(Variable::new("B", &["f", "t"]));
        net.set_rows(a, &[b], vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        net.set_rows(b, &[a], vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!(net.validate(DEFAULT_TOLERANCE).contains(ViolationKind::Cycle));
    }

    #[test]
    fn non_normalized_row_reported() {
        let mut net = BayesNet::new();
        let a = net.add_variable(Variable::new("A", &["f", "t"]));
        net.set_rows(a, &[], vec![vec![0.5, 0.48]]).unwrap();
        assert!(net.validate(DEFAULT_TOLERANCE).contains(ViolationKind::NonNormalizedRow));
    }

    #[test]
    fn missing_row_reported() {
        let mut net = BayesNet::new();
        let a = net.add_variable(Variable::new("A", &["f", "t"]));
        let b = net.add_variable(Variable::new("B", &["f", "t"]));
        net.set_rows(a, &[], vec![vec![0.5, 0.5]]).unwrap();
        net.set_rows(b, &[a], vec![vec![0.5, 0.5]]).unwrap();
        assert!(net.validate(DEFAULT_TOLERANCE).contains(ViolationKind::MissingRow));
    }

    #[test]
    fn bad_variables_reported() {
        let mut net = BayesNet::new();
        let a = net.add_variable(Variable::new("A", &["only"]));
        net.set_rows(a, &[], vec![vec![1.0]]).unwrap();
        let b = net.add_variable(Variable::new("B", &["x", "x"]));
        net.set_rows(b, &[], vec![vec![0.5, 0.5]]).unwrap();
        let report = net.validate(DEFAULT_TOLERANCE);
        assert_eq!(report.violations.iter().filter(|v| v.kind == ViolationKind::InvalidVariable).count(), 2);
    }

    #[test]
    fn row_index_roundtrip() {
        let cpt = Cpt::new(vec![NodeId(0), NodeId(1)], vec![2, 3], 2, vec![0.5; 12]);
        for r in 0..cpt.num_rows() {
            assert_eq!(cpt.row_index(&cpt.row_states(r)), r);
        }
        assert_eq!(cpt.row_index(&[1, 2]), 5);
    }

    #[test]
    fn ancestral_order_chain_and_diamond() {
        let (net, x, y) = two_node();
        assert_eq!(net.ancestral_order(), vec![x, y]);

        let mut net = BayesNet::new();
        let d = net.add_variable(Variable::new("D", &["f", "t"]));
        let t = net.add_variable(Variable::new("T", &["f", "t"]));
        let a = net.add_variable(Variable::new("A", &["f", "t"]));
        let b = net.add_variable(Variable::new("B", &["f", "t"]));
        net.set_rows(d, &[], vec![vec![0.5, 0.5]]).unwrap();
        net.set_rows(a, &[d], vec![vec![0.5, 0.5]; 2]).unwrap();
        net.set_rows(b, &[d], vec![vec![0.5, 0.5]; 2]).unwrap();
        net.set_rows(t, &[a, b], vec![vec![0.5, 0.5]; 4]).unwrap();
        let order = net.ancestral_order();
        assert_eq!(order.first(), Some(&d));
        assert_eq!(order.last(), Some(&t));
    }

    #[test]
    fn single_node_order() {
        let mut net = BayesNet::new();
        let a = net.add_variable(Variable::new("A", &["f", "t"]));
        net.set_rows(a, &[], vec![vec![0.5, 0.5]]).unwrap();
        assert_eq!(net.ancestral_order(), vec![a]);
    }

    #[test]
    fn prune_drops_leaf_off_query() {
        let mut net = BayesNet::new();
        let d = net.add_variable(Variable::new("D", &["f", "t"]));
        let x = net.add_variable(Variable::new("X", &["f", "t"]));
        let t = net.add_variable(Variable::new("T", &["f", "t"]));
        let l = net.add_variable(Variable::new("L", &["f", "t"]));
        net.set_rows(d, &[], vec![vec![0.5, 0.5]]).unwrap();
        net.set_rows(x, &[d], vec![vec![0.5, 0.5]; 2]).unwrap();
        net.set_rows(t, &[x], vec![vec![0.5, 0.5]; 2]).unwrap();
        net.set_rows(l, &[x], vec![vec![0.5, 0.5]; 2]).unwrap();
        let pruned = net.prune_irrelevant(d, t).unwrap();
        assert!(!pruned.contains(l));
        assert_eq!(pruned.len(), 3);
        assert_eq!(pruned.prune_irrelevant(d, t).unwrap(), pruned);
    }

    #[test]
    fn prune_disconnected_query() {
        let mut net = BayesNet::new();
        let d = net.add_variable(Variable::new("D", &["f", "t"]));
        let t = net.add_variable(Variable::new("T", &["f", "t"]));
        net.set_rows(d, &[], vec![vec![0.5, 0.5]]).unwrap();
        net.set_rows(t, &[], vec![vec![0.5, 0.5]]).unwrap();
        let pruned = net.prune_irrelevant(d, t).unwrap();
        assert_eq!(pruned.len(), 2);
        assert!(!pruned.descendants(d).contains(&t));
    }

    #[test]
    fn prune_unknown_node() {
        let (net, x, _) = two_node();
        assert!(matches!(net.prune_irrelevant(x, NodeId(99)), Err(Error::UnknownNode(_))));
    }
}
