#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tradeoff::netgen::{generate_network, realize_with_cardinalities, GenConfig};
use tradeoff::{BayesNet, Cpt, NodeId, Qpn, Sign, Variable};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn binary(net: &mut BayesNet, name: &str) -> NodeId {
    net.add_variable(Variable::new(name, &["f", "t"]))
}

/// Two opposing paths from W to Z: W -> X -> Z is positive, W -> Z is
/// negative. Marginalizing X gives Pr(z|w) = .16 and Pr(z|~w) = .54.
pub struct Confounded {
    pub net: BayesNet,
    pub w: NodeId,
    pub x: NodeId,
    pub z: NodeId,
}

pub fn confounded() -> Confounded {
    let mut net = BayesNet::new();
    let w = binary(&mut net, "W");
    let x = binary(&mut net, "X");
    let z = binary(&mut net, "Z");
    net.set_rows(w, &[], vec![vec![0.5, 0.5]]).unwrap();
    net.set_rows(x, &[w], vec![vec![0.6, 0.4], vec![0.4, 0.6]]).unwrap();
    // Rows in (x, w) order: ff, ft, tf, tt.
    net.set_rows(z, &[x, w], vec![vec![0.5, 0.5], vec![0.9, 0.1], vec![0.4, 0.6], vec![0.8, 0.2]]).unwrap();
    Confounded { net, w, x, z }
}

pub const FLU_SHOT_QPN: &str = r#"{
    "variables": [
        {"name": "accept flu shot", "states": ["no", "yes"]},
        {"name": "get flu", "states": ["no", "yes"]},
        {"name": "feel pain", "states": ["no", "yes"]},
        {"name": "bodily well-being", "states": ["low", "high"]}
    ],
    "arcs": [
        ["accept flu shot", "get flu"],
        ["accept flu shot", "feel pain"],
        ["get flu", "bodily well-being"],
        ["feel pain", "bodily well-being"]
    ],
    "signs": {
        "accept flu shot→get flu": "-",
        "accept flu shot→feel pain": "+",
        "get flu→bodily well-being": "-",
        "feel pain→bodily well-being": "-"
    }
}"#;

/// D -> A -> {Y1, Y2} -> X -> T plus D -> T, with Y1 -> X positive and
/// Y2 -> X negative. A is the mediator; Y1 and Y2 are sole parents of X.
pub struct MediatorNet {
    pub net: BayesNet,
    pub d: NodeId,
    pub a: NodeId,
    pub y1: NodeId,
    pub y2: NodeId,
    pub x: NodeId,
    pub t: NodeId,
}

pub fn mediator_net(seed: u64, d_card: usize, a_card: usize, y_card: usize) -> MediatorNet {
    let mut r = rng(seed);
    let names = ["D", "A", "Y1", "Y2", "X", "T"];
    let mut qpn = Qpn::new();
    for (i, n) in names.iter().enumerate() {
        qpn.add_node(NodeId(i), Variable::with_cardinality(*n, 2));
    }
    let (d, a, y1, y2, x, t) = (NodeId(0), NodeId(1), NodeId(2), NodeId(3), NodeId(4), NodeId(5));
    let random_sign = |r: &mut ChaCha8Rng| if r.gen_bool(0.5) { Sign::Positive } else { Sign::Negative };
    for (p, c) in [(d, a), (a, y1), (a, y2), (x, t), (d, t)] {
        let s = random_sign(&mut r);
        qpn.add_arc(p, c, s).unwrap();
    }
    qpn.add_arc(y1, x, Sign::Positive).unwrap();
    qpn.add_arc(y2, x, Sign::Negative).unwrap();
    let cards = BTreeMap::from([(d, d_card), (a, a_card), (y1, y_card), (y2, y_card), (x, 3), (t, 2)]);
    let net = realize_with_cardinalities(&qpn, &cards, &mut r).unwrap();
    MediatorNet { net, d, a, y1, y2, x, t }
}

/// Random DAG over `n` nodes (arcs low -> high with probability `p`) and
/// independently random tables, so arc signs are often `?`.
pub fn random_net(r: &mut ChaCha8Rng, n: usize, max_card: usize, p: f64) -> BayesNet {
    let mut net = BayesNet::new();
    let ids: Vec<NodeId> = (0..n)
        .map(|i| net.add_variable(Variable::with_cardinality(format!("v{i}"), r.gen_range(2..=max_card))))
        .collect();
    for (j, &id) in ids.iter().enumerate() {
        let parents: Vec<NodeId> = ids[..j].iter().copied().filter(|_| r.gen_bool(p)).collect();
        let cards: Vec<usize> = parents.iter().map(|&q| net.card(q)).collect();
        let rows = cards.iter().product::<usize>();
        let card = net.card(id);
        let table = (0..rows)
            .flat_map(|_| {
                let w: Vec<f64> = (0..card).map(|_| r.gen::<f64>() + 1e-3).collect();
                let s: f64 = w.iter().sum();
                w.into_iter().map(move |x| x / s)
            })
            .collect();
        net.set_cpt(id, Cpt::new(parents, cards, card, table)).unwrap();
    }
    net
}

/// Sign-consistent random network from the generator with a random arc count.
pub fn random_signed_net(r: &mut ChaCha8Rng, n: usize, mc: usize) -> BayesNet {
    let l = r.gen_range(n - 1..=n * (n - 1) / 2);
    generate_network(&GenConfig { n, l, mc, seed: r.gen() }).unwrap().net
}

/// Random query pair of distinct nodes.
pub fn random_pair(r: &mut ChaCha8Rng, net: &BayesNet) -> (NodeId, NodeId) {
    let ids: Vec<NodeId> = net.node_ids().collect();
    let d = ids[r.gen_range(0..ids.len())];
    loop {
        let t = ids[r.gen_range(0..ids.len())];
        if t != d {
            return (d, t);
        }
    }
}

/// Whether a verdict is consistent with the exact sign: a decisive answer
/// may only be contradicted by nothing, and `0`/`?` must match exactly.
pub fn consistent(verdict: Sign, exact: Sign) -> bool {
    match verdict {
        Sign::Positive | Sign::Negative => exact == verdict || exact == Sign::Zero,
        Sign::Zero | Sign::Ambiguous => exact == verdict,
    }
}
