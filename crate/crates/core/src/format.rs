//! JSON documents for networks and QPNs.
//!
//! ```json
//! {
//!   "variables": [{"name": "D", "states": ["f", "t"]}, ...],
//!   "arcs": [["D", "T"], ...],
//!   "cpts": {"T": [{"given": {"D": "f"}, "dist": [0.7, 0.3]}, ...]}
//! }
//! ```
//!
//! A QPN document has `signs` (`"D→T": "+"`) in place of `cpts`; `->` is
//! accepted as the arrow when reading.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{BayesNet, Cpt, NodeId, ValidationReport, Variable, ViolationKind};
use crate::qpn::{Qpn, Sign};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariableDoc {
    pub name: String,
    pub states: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowDoc {
    #[serde(default)]
    pub given: BTreeMap<String, String>,
    pub dist: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkDoc {
    pub variables: Vec<VariableDoc>,
    #[serde(default)]
    pub arcs: Vec<(String, String)>,
    pub cpts: BTreeMap<String, Vec<RowDoc>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QpnDoc {
    pub variables: Vec<VariableDoc>,
    #[serde(default)]
    pub arcs: Vec<(String, String)>,
    pub signs: BTreeMap<String, Sign>,
}

fn variables_of(vars: impl Iterator<Item = Variable>) -> Vec<VariableDoc> {
    vars.map(|v| VariableDoc { name: v.name, states: v.states }).collect()
}

impl NetworkDoc {
    pub fn from_net(net: &BayesNet) -> Self {
        let variables = variables_of(net.node_ids().map(|id| net.variable(id).clone()));
        let mut arcs = Vec::new();
        let mut cpts = BTreeMap::new();
        for id in net.node_ids() {
            let cpt = net.cpt(id);
            let parents = cpt.parents();
            arcs.extend(parents.iter().map(|&p| (net.name(p).to_string(), net.name(id).to_string())));
            let rows = (0..cpt.num_rows())
                .map(|r| RowDoc {
                    given: parents
                        .iter()
                        .zip(cpt.row_states(r))
                        .map(|(&p, s)| (net.name(p).to_string(), net.variable(p).states[s].clone()))
                        .collect(),
                    dist: cpt.row(r).to_vec(),
                })
                .collect();
            cpts.insert(net.name(id).to_string(), rows);
        }
        NetworkDoc { variables, arcs, cpts }
    }

    /// Builds and validates the network. Every problem found is reported at
    /// once, in the validation vocabulary.
    pub fn to_net(&self, tol: f64) -> Result<BayesNet> {
        let mut report = ValidationReport::default();
        let (mut net, ids) = declare_variables(&self.variables, &mut report);
        let parents = collect_parents(&self.arcs, &ids, &mut report);
        for name in self.cpts.keys() {
            if !ids.contains_key(name) {
                report.push(ViolationKind::ParentMismatch, format!("table for unknown variable {name}"));
            }
        }
        for (name, &id) in &ids {
            let ps = parents.get(&id).cloned().unwrap_or_default();
            match self.cpts.get(name) {
                None => report.push(ViolationKind::MissingRow, format!("{name} has no conditional table")),
                Some(rows) => {
                    if let Some(cpt) = build_cpt(&net, name, id, &ps, rows, &mut report) {
                        net.set_cpt(id, cpt)?;
                    }
                }
            }
        }
        if !report.is_empty() {
            return Err(Error::Invalid(report));
        }
        net.validate(tol).into_result()?;
        Ok(net)
    }
}

fn declare_variables(vars: &[VariableDoc], report: &mut ValidationReport) -> (BayesNet, BTreeMap<String, NodeId>) {
    let mut net = BayesNet::new();
    let mut ids = BTreeMap::new();
    for v in vars {
        if ids.contains_key(&v.name) {
            report.push(ViolationKind::InvalidVariable, format!("duplicate variable name {}", v.name));
            continue;
        }
        let id = net.add_variable(Variable { name: v.name.clone(), states: v.states.clone() });
        ids.insert(v.name.clone(), id);
    }
    (net, ids)
}

fn collect_parents(
    arcs: &[(String, String)],
    ids: &BTreeMap<String, NodeId>,
    report: &mut ValidationReport,
) -> BTreeMap<NodeId, Vec<NodeId>> {
    let mut parents: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for (p, c) in arcs {
        match (ids.get(p), ids.get(c)) {
            (Some(&p), Some(&c)) => {
                let ps = parents.entry(c).or_default();
                if ps.contains(&p) {
                    report.push(ViolationKind::ParentMismatch, format!("duplicate arc {}→{}", p.0, c.0));
                } else {
                    ps.push(p);
                }
            }
            _ => report.push(ViolationKind::ParentMismatch, format!("arc {p}→{c} names an unknown variable")),
        }
    }
    parents
}

fn build_cpt(
    net: &BayesNet,
    name: &str,
    id: NodeId,
    parents: &[NodeId],
    rows: &[RowDoc],
    report: &mut ValidationReport,
) -> Option<Cpt> {
    let card = net.card(id);
    let cards: Vec<usize> = parents.iter().map(|&p| net.card(p)).collect();
    let expected: BTreeSet<&str> = parents.iter().map(|&p| net.name(p)).collect();
    let mut table: Vec<Option<Vec<f64>>> = vec![None; cards.iter().product()];
    let shell = Cpt::new(parents.to_vec(), cards.clone(), card, Vec::new());
    let before = report.violations.len();
    for row in rows {
        let given: BTreeSet<&str> = row.given.keys().map(String::as_str).collect();
        if given != expected {
            report.push(
                ViolationKind::ParentMismatch,
                format!("{name}: row conditions on {given:?} but the arcs give parents {expected:?}"),
            );
            continue;
        }
        let mut states = Vec::with_capacity(parents.len());
        for &p in parents {
            let label = &row.given[net.name(p)];
            match net.variable(p).states.iter().position(|s| s == label) {
                Some(s) => states.push(s),
                None => report.push(ViolationKind::ParentMismatch, format!("{name}: {} has no state {label}", net.name(p))),
            }
        }
        if states.len() != parents.len() {
            continue;
        }
        if row.dist.len() != card {
            report.push(
                ViolationKind::InvalidEntry,
                format!("{name}: distribution has {} entries for {card} states", row.dist.len()),
            );
            continue;
        }
        let slot = &mut table[shell.row_index(&states)];
        if slot.is_some() {
            report.push(ViolationKind::InvalidEntry, format!("{name}: row {:?} given twice", row.given));
        }
        *slot = Some(row.dist.clone());
    }
    let missing = table.iter().filter(|r| r.is_none()).count();
    if missing > 0 {
        report.push(ViolationKind::MissingRow, format!("{name}: {missing} parent configuration(s) have no row"));
    }
    if report.violations.len() > before {
        return None;
    }
    Some(Cpt::new(parents.to_vec(), cards, card, table.into_iter().flatten().flatten().collect()))
}

impl QpnDoc {
    pub fn from_qpn(qpn: &Qpn) -> Self {
        let name = |id: NodeId| qpn.variable(id).name.clone();
        let variables = variables_of(qpn.node_ids().map(|id| qpn.variable(id).clone()));
        let mut arcs = Vec::new();
        for id in qpn.node_ids() {
            arcs.extend(qpn.parents(id).iter().map(|&p| (name(p), name(id))));
        }
        let signs = qpn.arcs().map(|((p, c), s)| (format!("{}→{}", name(p), name(c)), s)).collect();
        QpnDoc { variables, arcs, signs }
    }

    pub fn to_qpn(&self) -> Result<Qpn> {
        let mut report = ValidationReport::default();
        let (net, ids) = declare_variables(&self.variables, &mut report);
        let parents = collect_parents(&self.arcs, &ids, &mut report);
        let mut qpn = Qpn::new();
        for id in net.node_ids() {
            qpn.add_node(id, net.variable(id).clone());
        }
        let mut signs = BTreeMap::new();
        for (key, &sign) in &self.signs {
            let pair = key.split_once('→').or_else(|| key.split_once("->"));
            match pair.and_then(|(p, c)| Some((*ids.get(p.trim())?, *ids.get(c.trim())?))) {
                Some(arc) => {
                    signs.insert(arc, sign);
                }
                None => report.push(ViolationKind::ParentMismatch, format!("sign key {key} does not name an arc")),
            }
        }
        for (&c, ps) in &parents {
            for &p in ps {
                match signs.remove(&(p, c)) {
                    Some(s) => qpn.add_arc(p, c, s)?,
                    None => report.push(ViolationKind::MissingRow, format!("arc {}→{} has no sign", p.0, c.0)),
                }
            }
        }
        for (p, c) in signs.keys() {
            report.push(ViolationKind::ParentMismatch, format!("sign for {}→{} without an arc", p.0, c.0));
        }
        if crate::graph::ancestral_order(qpn.parent_map()).is_none() {
            report.push(ViolationKind::Cycle, "arc set contains a directed cycle".into());
        }
        report.into_result()?;
        Ok(qpn)
    }
}

pub fn parse_network(text: &str, tol: f64) -> Result<BayesNet> {
    let doc: NetworkDoc = serde_json::from_str(text)?;
    doc.to_net(tol)
}

pub fn network_to_string(net: &BayesNet) -> String {
    serde_json::to_string_pretty(&NetworkDoc::from_net(net)).expect("plain data serializes")
}

pub fn read_network(path: &Path, tol: f64) -> Result<BayesNet> {
    parse_network(&std::fs::read_to_string(path)?, tol)
}

pub fn write_network(net: &BayesNet, path: &Path) -> Result<()> {
    std::fs::write(path, network_to_string(net) + "\n")?;
    Ok(())
}

pub fn parse_qpn(text: &str) -> Result<Qpn> {
    let doc: QpnDoc = serde_json::from_str(text)?;
    doc.to_qpn()
}

pub fn qpn_to_string(qpn: &Qpn) -> String {
    serde_json::to_string_pretty(&QpnDoc::from_qpn(qpn)).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::DEFAULT_TOLERANCE;

    const DOC: &str = r#"{
        "variables": [{"name": "D", "states": ["f", "t"]}, {"name": "T", "states": ["lo", "mid", "hi"]}],
        "arcs": [["D", "T"]],
        "cpts": {
            "D": [{"given": {}, "dist": [0.4, 0.6]}],
            "T": [{"given": {"D": "t"}, "dist": [0.1, 0.2, 0.7]}, {"given": {"D": "f"}, "dist": [0.5, 0.3, 0.2]}]
        }
    }"#;

    #[test]
    fn parse_and_roundtrip() {
        let net = parse_network(DOC, DEFAULT_TOLERANCE).unwrap();
        let t = net.node("T").unwrap();
        assert_eq!(net.cpt(t).row(1), &[0.1, 0.2, 0.7]);
        let again = parse_network(&network_to_string(&net), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(again, net);
    }

    fn violations(text: &str) -> ValidationReport {
        match parse_network(text, DEFAULT_TOLERANCE) {
            Err(Error::Invalid(r)) => r,
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn non_normalized_row() {
        let r = violations(&DOC.replace("[0.4, 0.6]", "[0.4, 0.5]"));
        assert!(r.contains(ViolationKind::NonNormalizedRow));
    }

    #[test]
    fn given_must_match_arcs() {
        let r = violations(&DOC.replace(r#""arcs": [["D", "T"]],"#, r#""arcs": [],"#));
        assert!(r.contains(ViolationKind::ParentMismatch));
    }

    #[test]
    fn missing_row() {
        let text = DOC.replace(r#", {"given": {"D": "f"}, "dist": [0.5, 0.3, 0.2]}"#, "");
        assert!(violations(&text).contains(ViolationKind::MissingRow));
    }

    #[test]
    fn cycle() {
        let text = r#"{
            "variables": [{"name": "A", "states": ["0", "1"]}, {"name": "B", "states": ["0", "1"]}],
            "arcs": [["A", "B"], ["B", "A"]],
            "cpts": {
                "A": [{"given": {"B": "0"}, "dist": [0.5, 0.5]}, {"given": {"B": "1"}, "dist": [0.5, 0.5]}],
                "B": [{"given": {"A": "0"}, "dist": [0.5, 0.5]}, {"given": {"A": "1"}, "dist": [0.5, 0.5]}]
            }
        }"#;
        assert!(violations(text).contains(ViolationKind::Cycle));
    }

    #[test]
    fn qpn_roundtrip_and_ascii_arrow() {
        let text = r#"{
            "variables": [{"name": "A", "states": ["0", "1"]}, {"name": "B", "states": ["0", "1"]}],
            "arcs": [["A", "B"]],
            "signs": {"A->B": "-"}
        }"#;
        let qpn = parse_qpn(text).unwrap();
        assert_eq!(qpn.sign(NodeId(0), NodeId(1)), Some(Sign::Negative));
        let out = qpn_to_string(&qpn);
        assert!(out.contains("A→B"));
        assert_eq!(parse_qpn(&out).unwrap(), qpn);
    }
}
