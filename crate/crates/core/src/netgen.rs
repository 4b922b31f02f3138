//! Random sign-consistent Bayesian networks.
//!
//! A network is generated in three stages: a random weakly connected DAG
//! with a given arc count, a random decisive sign per arc, and conditional
//! tables sampled so that every arc reproduces its sign.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::weakly_connected;
use crate::net::{BayesNet, Cpt, NodeId, Variable, DEFAULT_TOLERANCE};
use crate::qpn::{arc_sign, Qpn, Sign};

const ROW_RETRIES: usize = 100;
const NUDGE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n: usize,
    pub l: usize,
    pub mc: usize,
    pub seed: u64,
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("n = {} but at least 2 nodes are needed", self.n)));
        }
        let max = self.n * (self.n - 1) / 2;
        if self.l + 1 < self.n || self.l > max {
            return Err(Error::InvalidArgument(format!(
                "l = {} outside [{}, {}] for n = {}",
                self.l,
                self.n - 1,
                max,
                self.n
            )));
        }
        if self.mc < 2 {
            return Err(Error::InvalidArgument(format!("mc = {} but at least 2 states are needed", self.mc)));
        }
        Ok(())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// A DAG over nodes `0..n` with every arc oriented from lower to higher index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Dag {
    pub n: usize,
    pub arcs: Vec<(usize, usize)>,
}

/// Starts from the complete DAG and removes arcs in descending order of a
/// random weight, skipping any removal that would disconnect the graph,
/// until `l` arcs remain.
pub fn random_connected_dag<R: Rng>(config: &GenConfig, rng: &mut R) -> Result<Dag> {
    config.validate()?;
    let n = config.n;
    let mut weighted: Vec<(f64, (usize, usize))> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|arc| (rng.gen::<f64>(), arc)).collect();
    let mut arcs: Vec<(usize, usize)> = weighted.iter().map(|w| w.1).collect();
    weighted.sort_by(|a, b| b.0.total_cmp(&a.0));
    for (_, arc) in weighted {
        if arcs.len() == config.l {
            break;
        }
        let trial: Vec<(usize, usize)> = arcs.iter().copied().filter(|a| *a != arc).collect();
        if weakly_connected(n, &trial) {
            arcs = trial;
        }
    }
    debug_assert_eq!(arcs.len(), config.l);
    arcs.sort();
    Ok(Dag { n, arcs })
}

pub fn node_name(index: usize) -> String {
    format!("node{}", index + 1)
}

/// Labels each arc positive or negative with probability 1/2. The QPN's
/// state spaces are binary placeholders; realization picks the real ones.
pub fn assign_random_signs<R: Rng>(dag: &Dag, rng: &mut R) -> Qpn {
    let mut qpn = Qpn::new();
    for i in 0..dag.n {
        qpn.add_node(NodeId(i), Variable::with_cardinality(node_name(i), 2));
    }
    for &(p, c) in &dag.arcs {
        let sign = if rng.gen_bool(0.5) { Sign::Positive } else { Sign::Negative };
        qpn.add_arc(NodeId(p), NodeId(c), sign).expect("nodes were added");
    }
    qpn
}

/// The partial order that arc signs impose on the rows of a child table,
/// together with a linear extension listing every row after all rows that
/// dominate it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominanceOrder {
    signs: Vec<Sign>,
    cards: Vec<usize>,
    /// Parent configurations in table row order.
    pub configs: Vec<Vec<usize>>,
    /// Row indices, most dominant first.
    pub order: Vec<usize>,
}

impl DominanceOrder {
    /// Row whose child distribution must dominate all others.
    pub fn maximal(&self) -> usize {
        self.order[0]
    }

    /// Whether configuration `p` must yield a distribution at least as large
    /// as configuration `q`.
    pub fn dominates(&self, p: usize, q: usize) -> bool {
        config_dominates(&self.configs[p], &self.configs[q], &self.signs)
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    /// Rows one step above `r` in a single parent: its immediate dominators.
    pub fn covers(&self, r: usize) -> Vec<usize> {
        let shell = Cpt::new(vec![NodeId(0); self.cards.len()], self.cards.clone(), 1, Vec::new());
        let config = &self.configs[r];
        let mut out = Vec::new();
        for (k, sign) in self.signs.iter().enumerate() {
            let next = match sign {
                Sign::Negative => config[k].checked_sub(1),
                _ => Some(config[k] + 1).filter(|&s| s < self.cards[k]),
            };
            if let Some(s) = next {
                let mut up = config.clone();
                up[k] = s;
                out.push(shell.row_index(&up));
            }
        }
        out
    }
}

fn config_dominates(p: &[usize], q: &[usize], signs: &[Sign]) -> bool {
    p.iter().zip(q).zip(signs).all(|((a, b), s)| match s {
        Sign::Negative => a <= b,
        _ => a >= b,
    })
}

/// Product order on parent configurations, with the comparison reversed for
/// negative parents. Signs must be decisive.
pub fn dominance_order(signs: &[Sign], cards: &[usize]) -> Result<DominanceOrder> {
    if signs.len() != cards.len() {
        return Err(Error::LengthMismatch(signs.len(), cards.len()));
    }
    if let Some(s) = signs.iter().find(|s| !s.is_decisive()) {
        return Err(Error::InvalidArgument(format!("parent sign {s} is not decisive")));
    }
    let shell = Cpt::new(vec![NodeId(0); cards.len()], cards.to_vec(), 1, Vec::new());
    let configs: Vec<Vec<usize>> = (0..shell.num_rows()).map(|r| shell.row_states(r)).collect();
    // Size of the down-set of each configuration in the signed product order.
    let dominated: Vec<usize> = configs
        .iter()
        .map(|p| {
            p.iter()
                .zip(cards)
                .zip(signs)
                .map(|((&s, &c), sign)| if *sign == Sign::Negative { c - s } else { s + 1 })
                .product()
        })
        .collect();
    let mut order: Vec<usize> = (0..configs.len()).collect();
    // Row index order is lexicographic configuration order.
    order.sort_by(|&a, &b| dominated[b].cmp(&dominated[a]).then(a.cmp(&b)));
    Ok(DominanceOrder { signs: signs.to_vec(), cards: cards.to_vec(), configs, order })
}

/// Uniform parameters, normalized.
fn sample_free_row<R: Rng>(card: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..card).map(|_| rng.gen::<f64>()).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

/// Samples a CDF pointwise at or above `floor`, coordinate by coordinate,
/// keeping a gap of [`NUDGE`] above the floor where there is room.
fn sample_constrained_cdf<R: Rng>(floor: &[f64], rng: &mut R) -> Vec<f64> {
    let card = floor.len();
    let mut cdf = Vec::with_capacity(card);
    let mut prev: f64 = 0.0;
    for (k, &f) in floor.iter().enumerate() {
        if k + 1 == card {
            cdf.push(1.0);
            break;
        }
        let lo = if f + NUDGE < 1.0 { prev.max(f + NUDGE) } else { prev.max(f) };
        let v = if lo < 1.0 { rng.gen_range(lo..1.0) } else { 1.0 };
        cdf.push(v);
        prev = v;
    }
    cdf
}

fn cdf_to_probs(cdf: &[f64]) -> Vec<f64> {
    let mut prev = 0.0;
    cdf.iter()
        .map(|&v| {
            let p = (v - prev).max(0.0);
            prev = v;
            p
        })
        .collect()
}

fn sample_table<R: Rng>(order: &DominanceOrder, card: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let rows = order.configs.len();
    let mut cdfs: Vec<Option<Vec<f64>>> = vec![None; rows];
    for (pos, &r) in order.order.iter().enumerate() {
        let cdf = if pos == 0 {
            let mut acc = 0.0;
            sample_free_row(card, rng)
                .into_iter()
                .map(|p| {
                    acc += p;
                    acc
                })
                .collect()
        } else {
            // Rows already sit above their own dominators, so the immediate
            // ones carry the whole constraint.
            let mut floor = vec![0.0f64; card];
            for q in order.covers(r) {
                let c = cdfs[q].as_ref().expect("dominators are assigned first");
                for (f, v) in floor.iter_mut().zip(c) {
                    *f = f.max(*v);
                }
            }
            sample_constrained_cdf(&floor, rng)
        };
        cdfs[r] = Some(cdf);
    }
    cdfs.into_iter().map(|c| cdf_to_probs(&c.expect("every row assigned"))).collect()
}

/// Samples cardinalities uniformly from `[2, mc]` and realizes the QPN.
pub fn realize_bayes_net<R: Rng>(qpn: &Qpn, mc: usize, rng: &mut R) -> Result<BayesNet> {
    if mc < 2 {
        return Err(Error::InvalidArgument(format!("mc = {mc} but at least 2 states are needed")));
    }
    let cards: BTreeMap<NodeId, usize> = qpn.node_ids().map(|id| (id, rng.gen_range(2..=mc))).collect();
    realize_with_cardinalities(qpn, &cards, rng)
}

/// Builds a Bayesian network over the QPN's graph whose every arc has the
/// QPN's sign. Node ids must be `0..len`. Rows are assigned in a linear
/// extension of the dominance order, each constrained by the rows already
/// assigned above it.
pub fn realize_with_cardinalities<R: Rng>(qpn: &Qpn, cards: &BTreeMap<NodeId, usize>, rng: &mut R) -> Result<BayesNet> {
    let mut net = BayesNet::new();
    for (i, id) in qpn.node_ids().enumerate() {
        if id != NodeId(i) {
            return Err(Error::InvalidArgument("qpn node ids must be contiguous from 0".into()));
        }
        let card = *cards.get(&id).ok_or_else(|| Error::InvalidArgument(format!("no cardinality for {id}")))?;
        if card < 2 {
            return Err(Error::InvalidArgument(format!("{id} needs at least 2 states")));
        }
        net.add_variable(Variable::with_cardinality(qpn.variable(id).name.clone(), card));
    }
    for id in qpn.ancestral_order() {
        let parents = qpn.parents(id).to_vec();
        let card = net.card(id);
        if parents.is_empty() {
            net.set_cpt(id, Cpt::prior(sample_free_row(card, rng)))?;
            continue;
        }
        let signs: Vec<Sign> = parents.iter().map(|&p| qpn.sign(p, id).expect("arc sign")).collect();
        let parent_cards: Vec<usize> = parents.iter().map(|&p| net.card(p)).collect();
        let order = dominance_order(&signs, &parent_cards)?;
        let mut ok = false;
        for _ in 0..ROW_RETRIES {
            let rows = sample_table(&order, card, rng);
            net.set_cpt(id, Cpt::from_rows(parents.clone(), parent_cards.clone(), rows))?;
            ok = parents
                .iter()
                .zip(&signs)
                .map(|(&p, &s)| arc_sign(&net, p, id, DEFAULT_TOLERANCE).map(|got| got == s))
                .collect::<Result<Vec<bool>>>()?
                .into_iter()
                .all(|b| b);
            if ok {
                break;
            }
        }
        if !ok {
            return Err(Error::GenerationFailure(format!(
                "no sign-consistent table for {} after {ROW_RETRIES} attempts",
                net.name(id)
            )));
        }
    }
    Ok(net)
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub dag: Dag,
    pub qpn: Qpn,
    pub net: BayesNet,
}

/// All three stages from one seeded stream.
pub fn generate_network(config: &GenConfig) -> Result<Generated> {
    let mut rng = config.rng();
    let dag = random_connected_dag(config, &mut rng)?;
    let qpn = assign_random_signs(&dag, &mut rng);
    let net = realize_bayes_net(&qpn, config.mc, &mut rng)?;
    Ok(Generated { dag, qpn, net })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn config_bounds() {
        assert!(GenConfig { n: 10, l: 9, mc: 2, seed: 0 }.validate().is_ok());
        assert!(GenConfig { n: 10, l: 45, mc: 2, seed: 0 }.validate().is_ok());
        assert!(GenConfig { n: 10, l: 8, mc: 2, seed: 0 }.validate().is_err());
        assert!(GenConfig { n: 10, l: 46, mc: 2, seed: 0 }.validate().is_err());
        assert!(GenConfig { n: 1, l: 0, mc: 2, seed: 0 }.validate().is_err());
        assert!(GenConfig { n: 3, l: 2, mc: 1, seed: 0 }.validate().is_err());
    }

    #[test]
    fn extremes_of_arc_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let full = random_connected_dag(&GenConfig { n: 6, l: 15, mc: 2, seed: 0 }, &mut rng).unwrap();
        assert_eq!(full.arcs.len(), 15);
        let tree = random_connected_dag(&GenConfig { n: 10, l: 9, mc: 2, seed: 0 }, &mut rng).unwrap();
        assert_eq!(tree.arcs.len(), 9);
        assert!(weakly_connected(10, &tree.arcs));
    }

    #[test]
    fn dominance_examples() {
        let o = dominance_order(&[Sign::Positive], &[2]).unwrap();
        assert!(o.dominates(1, 0) && !o.dominates(0, 1));
        assert_eq!(o.maximal(), 1);
        let o = dominance_order(&[Sign::Negative], &[2]).unwrap();
        assert!(o.dominates(0, 1) && !o.dominates(1, 0));
        assert_eq!(o.maximal(), 0);
        // Rows: (f,f)=0 (f,t)=1 (t,f)=2 (t,t)=3.
        let o = dominance_order(&[Sign::Positive, Sign::Positive], &[2, 2]).unwrap();
        assert_eq!(o.maximal(), 3);
        assert_eq!(*o.order.last().unwrap(), 0);
        assert!(!o.dominates(1, 2) && !o.dominates(2, 1));
        assert!(dominance_order(&[Sign::Zero], &[2]).is_err());
        assert_eq!(o.covers(0), vec![2, 1]);
        assert!(o.covers(3).is_empty());
    }

    #[test]
    fn binary_when_mc_is_two() {
        let g = generate_network(&GenConfig { n: 10, l: 20, mc: 2, seed: 3 }).unwrap();
        assert!(g.net.node_ids().all(|id| g.net.card(id) == 2));
        assert_eq!(g.net.name(NodeId(0)), "node1");
        assert_eq!(g.net.name(NodeId(9)), "node10");
    }

    #[test]
    fn single_positive_parent_rows_are_ordered() {
        let mut qpn = Qpn::new();
        qpn.add_node(NodeId(0), Variable::with_cardinality("a", 2));
        qpn.add_node(NodeId(1), Variable::with_cardinality("b", 2));
        qpn.add_arc(NodeId(0), NodeId(1), Sign::Positive).unwrap();
        let cards = BTreeMap::from([(NodeId(0), 3), (NodeId(1), 4)]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let net = realize_with_cardinalities(&qpn, &cards, &mut rng).unwrap();
            let cpt = net.cpt(NodeId(1));
            for i in 0..3 {
                for j in i + 1..3 {
                    let (lo, hi) = (cpt.cdf_row(i), cpt.cdf_row(j));
                    assert!(hi.values().iter().zip(lo.values()).all(|(h, l)| *h <= l + 1e-12));
                }
            }
        }
    }

    #[test]
    fn signs_are_balanced() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dag = Dag { n: 200, arcs: (0..200).flat_map(|i| (i + 1..200).map(move |j| (i, j))).take(10_000).collect() };
        let qpn = assign_random_signs(&dag, &mut rng);
        let pos = qpn.arcs().filter(|(_, s)| *s == Sign::Positive).count() as f64;
        let n = 10_000.0;
        // Chi-square with one degree of freedom; 10.83 is the 0.1% critical value.
        let chi2 = 2.0 * (pos - n / 2.0).powi(2) / (n / 2.0);
        assert!(chi2 < 10.83, "chi2 = {chi2}");
    }

    #[test]
    fn replay_is_identical() {
        let c = GenConfig { n: 10, l: 18, mc: 3, seed: 77 };
        assert_eq!(generate_network(&c).unwrap().net, generate_network(&c).unwrap().net);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn order_is_a_linear_extension(signs in proptest::collection::vec(any::<bool>(), 1..4), cards in proptest::collection::vec(2usize..4, 3)) {
            let signs: Vec<Sign> = signs.iter().map(|&b| if b { Sign::Positive } else { Sign::Negative }).collect();
            let cards = &cards[..signs.len()];
            let o = dominance_order(&signs, cards).unwrap();
            let pos: Vec<usize> = (0..o.order.len()).map(|r| o.order.iter().position(|&x| x == r).unwrap()).collect();
            for p in 0..o.configs.len() {
                let brute = (0..o.configs.len()).filter(|&q| o.dominates(p, q)).count();
                let closed: usize = o.configs[p].iter().zip(cards).zip(&signs)
                    .map(|((&s, &c), sg)| if *sg == Sign::Negative { c - s } else { s + 1 }).product();
                prop_assert_eq!(brute, closed);
                for q in 0..o.configs.len() {
                    if p != q && o.dominates(p, q) {
                        prop_assert!(pos[p] < pos[q]);
                    }
                }
                for c in o.covers(p) {
                    prop_assert!(o.dominates(c, p) && c != p);
                }
            }
        }

        #[test]
        fn dags_are_connected_with_exact_arc_count(n in 2usize..12, extra in 0usize..60, seed in any::<u64>()) {
            let l = (n - 1 + extra).min(n * (n - 1) / 2);
            let config = GenConfig { n, l, mc: 2, seed };
            let dag = random_connected_dag(&config, &mut config.rng()).unwrap();
            prop_assert_eq!(dag.arcs.len(), l);
            prop_assert!(weakly_connected(n, &dag.arcs));
            prop_assert!(dag.arcs.iter().all(|(a, b)| a < b));
        }

        #[test]
        fn realized_nets_reproduce_their_signs(n in 2usize..8, extra in 0usize..12, mc in 2usize..4, seed in any::<u64>()) {
            let l = (n - 1 + extra).min(n * (n - 1) / 2);
            let g = generate_network(&GenConfig { n, l, mc, seed }).unwrap();
            prop_assert!(g.net.validate(DEFAULT_TOLERANCE).is_empty());
            let back = Qpn::from_net(&g.net, DEFAULT_TOLERANCE).unwrap();
            for ((p, c), s) in g.qpn.arcs() {
                prop_assert_eq!(back.sign(p, c), Some(s));
            }
            prop_assert_eq!(back.arcs().count(), g.qpn.arcs().count());
        }
    }
}
