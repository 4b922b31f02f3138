//! Small DAG helpers shared by the numeric network and its qualitative
//! abstraction. Graphs are given as `child -> ordered parents` maps.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::cmp::Reverse;

use crate::net::NodeId;

pub type ParentMap = BTreeMap<NodeId, Vec<NodeId>>;

/// Topological order with ties broken by smallest node id (Kahn's algorithm
/// over a min-heap). Returns `None` when the graph has a cycle.
pub fn ancestral_order(parents: &ParentMap) -> Option<Vec<NodeId>> {
    let mut indegree: BTreeMap<NodeId, usize> = BTreeMap::new();
    let mut children: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for (&child, ps) in parents {
        indegree.entry(child).or_insert(0);
        for &p in ps {
            // Parents outside the map are ignored; validation reports them.
            if parents.contains_key(&p) {
                *indegree.entry(child).or_insert(0) += 1;
                children.entry(p).or_default().push(child);
            }
        }
    }
    let mut ready: BinaryHeap<Reverse<NodeId>> = indegree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&n, _)| Reverse(n))
        .collect();
    let mut order = Vec::with_capacity(indegree.len());
    while let Some(Reverse(n)) = ready.pop() {
        order.push(n);
        if let Some(cs) = children.get(&n) {
            for c in cs {
                let d = indegree.get_mut(c).expect("child registered");
                *d -= 1;
                if *d == 0 {
                    ready.push(Reverse(*c));
                }
            }
        }
    }
    (order.len() == indegree.len()).then_some(order)
}

pub fn children_of(parents: &ParentMap, node: NodeId) -> Vec<NodeId> {
    parents
        .iter()
        .filter(|(_, ps)| ps.contains(&node))
        .map(|(&c, _)| c)
        .collect()
}

/// Ancestors of every node in `seeds`, including the seeds themselves.
pub fn ancestors(parents: &ParentMap, seeds: &[NodeId]) -> BTreeSet<NodeId> {
    let mut seen: BTreeSet<NodeId> = BTreeSet::new();
    let mut stack: Vec<NodeId> = seeds.to_vec();
    while let Some(n) = stack.pop() {
        if !seen.insert(n) {
            continue;
        }
        if let Some(ps) = parents.get(&n) {
            stack.extend(ps.iter().copied());
        }
    }
    seen
}

/// Descendants of `node`, including `node`.
pub fn descendants(parents: &ParentMap, node: NodeId) -> BTreeSet<NodeId> {
    let mut children: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for (&c, ps) in parents {
        for &p in ps {
            children.entry(p).or_default().push(c);
        }
    }
    let mut seen = BTreeSet::new();
    let mut stack = vec![node];
    while let Some(n) = stack.pop() {
        if !seen.insert(n) {
            continue;
        }
        if let Some(cs) = children.get(&n) {
            stack.extend(cs.iter().copied());
        }
    }
    seen
}

/// Whether a directed path `from ~> to` exists that does not use the direct
/// arc `from -> to`.
pub fn has_indirect_path(parents: &ParentMap, from: NodeId, to: NodeId) -> bool {
    // Walk backwards from `to`, skipping the direct arc.
    let mut seen = BTreeSet::new();
    let mut stack: Vec<NodeId> = parents
        .get(&to)
        .map(|ps| ps.iter().copied().filter(|&p| p != from).collect())
        .unwrap_or_default();
    while let Some(n) = stack.pop() {
        if n == from {
            return true;
        }
        if !seen.insert(n) {
            continue;
        }
        if let Some(ps) = parents.get(&n) {
            stack.extend(ps.iter().copied());
        }
    }
    false
}

/// Weak connectivity of the node set `nodes` under `arcs`.
pub fn weakly_connected(nodes: usize, arcs: &[(usize, usize)]) -> bool {
    if nodes == 0 {
        return true;
    }
    let mut root: Vec<usize> = (0..nodes).collect();
    fn find(root: &mut [usize], mut x: usize) -> usize {
        while root[x] != x {
            root[x] = root[root[x]];
            x = root[x];
        }
        x
    }
    let mut components = nodes;
    for &(a, b) in arcs {
        let (ra, rb) = (find(&mut root, a), find(&mut root, b));
        if ra != rb {
            root[ra] = rb;
            components -= 1;
        }
    }
    components == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(edges: &[(usize, usize)], n: usize) -> ParentMap {
        let mut m: ParentMap = (0..n).map(|i| (NodeId(i), Vec::new())).collect();
        for &(p, c) in edges {
            m.get_mut(&NodeId(c)).unwrap().push(NodeId(p));
        }
        m
    }

    #[test]
    fn order_breaks_ties_by_id() {
        let g = pm(&[(0, 3), (2, 3), (1, 2)], 4);
        let order = ancestral_order(&g).unwrap();
        assert_eq!(order, vec![NodeId(0), NodeId(1), NodeId(2), NodeId(3)]);
    }

    #[test]
    fn cycle_detected() {
        let g = pm(&[(0, 1), (1, 0)], 2);
        assert!(ancestral_order(&g).is_none());
    }

    #[test]
    fn indirect_path_ignores_direct_arc() {
        let g = pm(&[(0, 1), (1, 2), (0, 2)], 3);
        assert!(has_indirect_path(&g, NodeId(0), NodeId(2)));
        assert!(!has_indirect_path(&g, NodeId(1), NodeId(2)));
    }

    #[test]
    fn connectivity() {
        assert!(weakly_connected(3, &[(0, 1), (2, 1)]));
        assert!(!weakly_connected(3, &[(0, 1)]));
    }
}
