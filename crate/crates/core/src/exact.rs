//! Brute-force exact inference by enumerating the full joint distribution.
//!
//! This is the ground truth the incremental methods are checked against, and
//! it is also what the bounding code uses to evaluate (small) abstract
//! networks.

use crate::cdf::{dominates, CdfVector};
use crate::error::{Error, Result};
use crate::net::{BayesNet, NodeId};
use crate::qpn::Sign;

pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

/// A joint distribution over `nodes`, stored row-major with the first node
/// as the most significant digit.
#[derive(Clone, Debug, PartialEq)]
pub struct Joint {
    nodes: Vec<NodeId>,
    cards: Vec<usize>,
    probs: Vec<f64>,
}

impl Joint {
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Sums out every node not in `keep`; the result follows `keep`'s order.
    pub fn marginal(&self, keep: &[NodeId]) -> Joint {
        let positions: Vec<usize> = keep
            .iter()
            .map(|k| self.nodes.iter().position(|n| n == k).expect("kept node must be in the joint"))
            .collect();
        let cards: Vec<usize> = positions.iter().map(|&p| self.cards[p]).collect();
        let mut probs = vec![0.0; cards.iter().product()];
        let mut states = vec![0usize; self.nodes.len()];
        for &p in &self.probs {
            let idx = positions.iter().zip(&cards).fold(0, |acc, (&pos, &c)| acc * c + states[pos]);
            probs[idx] += p;
            increment(&mut states, &self.cards);
        }
        Joint { nodes: keep.to_vec(), cards, probs }
    }
}

/// Advances a mixed-radix counter (last digit fastest). Returns the index of
/// the most significant digit that changed, or `None` on wrap-around.
fn increment(states: &mut [usize], cards: &[usize]) -> Option<usize> {
    for k in (0..states.len()).rev() {
        states[k] += 1;
        if states[k] < cards[k] {
            return Some(k);
        }
        states[k] = 0;
    }
    None
}

/// Full joint over every node of `net`, nodes in id order.
pub fn joint_distribution(net: &BayesNet, cap: u128) -> Result<Joint> {
    let cells = net.joint_size();
    if cells > cap {
        return Err(Error::TooLarge { cells, cap });
    }
    // Enumerate in ancestral order so prefix products can be reused.
    let order = net.ancestral_order();
    let cards: Vec<usize> = order.iter().map(|&n| net.card(n)).collect();
    let parent_pos: Vec<Vec<usize>> = order
        .iter()
        .map(|&n| {
            net.parents(n)
                .iter()
                .map(|p| order.iter().position(|o| o == p).expect("parent in network"))
                .collect()
        })
        .collect();

    let mut ids: Vec<NodeId> = net.node_ids().collect();
    ids.sort();
    let out_pos: Vec<usize> = ids.iter().map(|id| order.iter().position(|o| o == id).unwrap()).collect();
    let out_cards: Vec<usize> = ids.iter().map(|&id| net.card(id)).collect();

    let n = order.len();
    let mut probs = vec![0.0; cells as usize];
    let mut states = vec![0usize; n];
    // prefix[k] = product of the first k factors.
    let mut prefix = vec![1.0; n + 1];
    let mut from = 0;
    loop {
        for k in from..n {
            let cpt = net.cpt(order[k]);
            let row = parent_pos[k]
                .iter()
                .zip(cpt.parent_cards())
                .fold(0, |acc, (&p, &c)| acc * c + states[p]);
            prefix[k + 1] = prefix[k] * cpt.table()[row * cpt.card() + states[k]];
        }
        let idx = out_pos.iter().zip(&out_cards).fold(0, |acc, (&p, &c)| acc * c + states[p]);
        probs[idx] = prefix[n];
        match increment(&mut states, &cards) {
            Some(k) => from = k,
            None => break,
        }
    }
    Ok(Joint { nodes: ids, cards: out_cards, probs })
}

/// `F(target | decision = d)` for every decision state, by enumeration.
/// A decision state of probability zero maps to `None` (undefined condition).
pub fn exact_conditional_cdfs(net: &BayesNet, target: NodeId, decision: NodeId) -> Result<Vec<Option<CdfVector>>> {
    exact_conditional_cdfs_with_cap(net, target, decision, DEFAULT_ENUMERATION_CAP)
}

pub fn exact_conditional_cdfs_with_cap(
    net: &BayesNet,
    target: NodeId,
    decision: NodeId,
    cap: u128,
) -> Result<Vec<Option<CdfVector>>> {
    if target == decision {
        return Err(Error::InvalidArgument("decision and target must differ".into()));
    }
    // Barren nodes do not change the (decision, target) marginal.
    let relevant = net.prune_irrelevant(decision, target)?;
    let joint = joint_distribution(&relevant, cap)?.marginal(&[decision, target]);
    let (dc, tc) = (joint.cards[0], joint.cards[1]);
    Ok((0..dc)
        .map(|d| {
            let row = &joint.probs[d * tc..(d + 1) * tc];
            let mass: f64 = row.iter().sum();
            (mass > 0.0).then(|| {
                let probs: Vec<f64> = row.iter().map(|p| p / mass).collect();
                CdfVector::from_probs(&probs)
            })
        })
        .collect())
}

/// Query-level sign of the influence of `decision` on `target`: positive when
/// raising the decision state always yields a dominating target distribution.
pub fn exact_sign(net: &BayesNet, decision: NodeId, target: NodeId, tol: f64) -> Result<Sign> {
    let cdfs = exact_conditional_cdfs(net, target, decision)?;
    Ok(sign_of_conditionals(&cdfs, tol))
}

/// Sign of a family of CDFs indexed by an ordered conditioning variable.
/// Undefined members are skipped.
pub fn sign_of_conditionals(cdfs: &[Option<CdfVector>], tol: f64) -> Sign {
    let defined: Vec<&CdfVector> = cdfs.iter().flatten().collect();
    let mut pos = true;
    let mut neg = true;
    for i in 0..defined.len() {
        for j in i + 1..defined.len() {
            let (lo, hi) = (defined[i].values(), defined[j].values());
            pos &= dominates(hi, lo, tol);
            neg &= dominates(lo, hi, tol);
        }
    }
    Sign::from_dominance(pos, neg)
}
