//! Experiment driver: single instances, ratio metrics and the batch table.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{NodeId, DEFAULT_TOLERANCE};
use crate::netgen::{generate_network, GenConfig};
use crate::qpn::Sign;
use crate::reduction::{
    full_numeric_reduce, itor, prepare_query, reduce_to_pair, ItorOptions, Priority, ResolutionStats, ResolvedAt,
    Resolver, Strategy,
};

/// Work ratios of an incremental run against exact evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Ratios {
    pub r_nodes: f64,
    pub r_reversals: f64,
}

/// `baseline_reversals` is the reversal count of the incremental run plus
/// what it would take to reduce its residual network completely.
pub fn compute_ratios(itor: &ResolutionStats, baseline_nodes: usize, baseline_reversals: usize) -> Ratios {
    let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
    if baseline_nodes == 0 {
        return Ratios { r_nodes: 1.0, r_reversals: 1.0 };
    }
    Ratios {
        r_nodes: ratio(itor.nodes_reduced, baseline_nodes),
        r_reversals: ratio(itor.arc_reversals, baseline_reversals),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentRecord {
    pub seed: u64,
    pub config: GenConfig,
    pub pruned_nodes: usize,
    pub pruned_links: usize,
    pub exact_sign: Sign,
    pub itor_sign: Sign,
    pub r_nodes: f64,
    pub r_reversals: f64,
    pub resolved_at: ResolvedAt,
    pub strategy: Priority,
    pub resolver: Resolver,
    /// Not serialized, so that saved results stay reproducible.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl ExperimentRecord {
    /// Only instances with a decisive exact answer enter the table.
    pub fn is_kept(&self) -> bool {
        self.exact_sign.is_decisive()
    }
}

/// Generates one network and compares incremental resolution of the
/// first-to-last node influence against exact evaluation.
pub fn run_instance(config: &GenConfig, priority: Priority, resolver: Resolver) -> Result<ExperimentRecord> {
    let start = Instant::now();
    let net = generate_network(config)?.net;
    let (decision, target) = (NodeId(0), NodeId(config.n - 1));
    let prepared = prepare_query(&net, decision, target)?;
    let (exact_sign, baseline) = full_numeric_reduce(&prepared.net, decision, target, DEFAULT_TOLERANCE)?;

    let strategy = Strategy { priority, seed: config.seed };
    let outcome = itor(&net, decision, target, &ItorOptions::new(strategy, resolver))?;
    let (_, completion, _) = reduce_to_pair(outcome.residual.clone(), decision, target, DEFAULT_TOLERANCE)?;
    let ratios = compute_ratios(
        &outcome.stats,
        baseline.nodes_reduced,
        outcome.stats.arc_reversals + completion.arc_reversals,
    );
    Ok(ExperimentRecord {
        seed: config.seed,
        config: *config,
        pruned_nodes: outcome.pruned_nodes,
        pruned_links: outcome.pruned_links,
        exact_sign,
        itor_sign: outcome.sign,
        r_nodes: ratios.r_nodes,
        r_reversals: ratios.r_reversals,
        resolved_at: outcome.stats.resolved_at,
        strategy: priority,
        resolver,
        wall_time: start.elapsed(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1Config {
    #[serde(default = "default_n")]
    pub n: usize,
    pub l_list: Vec<usize>,
    pub mc_list: Vec<usize>,
    /// Kept (decisive) instances per cell.
    pub instances: usize,
    #[serde(default = "default_priority")]
    pub strategy: Priority,
    #[serde(default = "default_resolver")]
    pub resolver: Resolver,
    pub seed: u64,
    /// Give up on a cell after `instances * max_attempts_factor` generated networks.
    #[serde(default = "default_attempts")]
    pub max_attempts_factor: usize,
    /// Whether instances that sign propagation settles without any reduction
    /// enter the means (with ratio 0). By default they are only counted, as
    /// they contain no tradeoff to resolve.
    #[serde(default)]
    pub count_qualitative: bool,
}

fn default_n() -> usize {
    10
}

fn default_priority() -> Priority {
    Priority::XFirst
}

fn default_resolver() -> Resolver {
    Resolver::Marginalize
}

fn default_attempts() -> usize {
    20
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table1Row {
    pub l: usize,
    pub mc: usize,
    pub nodes_avg: f64,
    pub links_avg: f64,
    pub r_nodes: f64,
    pub r_reversals: f64,
    pub instances_kept: usize,
    pub instances_discarded: usize,
    /// Decisive instances settled without reduction and left out of the means.
    pub instances_qualitative: usize,
    pub generation_failures: usize,
}

impl Table1Row {
    /// `1 - R` for both ratios.
    pub fn savings(&self) -> (f64, f64) {
        (1.0 - self.r_nodes, 1.0 - self.r_reversals)
    }
}

/// Seed of attempt `attempt` in cell `cell`.
pub fn instance_seed(base: u64, cell: usize, attempt: usize) -> u64 {
    base.wrapping_add((cell as u64) << 32).wrapping_add(attempt as u64)
}

const BATCH: usize = 64;

/// Runs one cell: generates networks until `instances` decisive ones are
/// collected. Batches run in parallel but are consumed in attempt order, so
/// the result does not depend on the thread count.
pub fn run_cell(config: &Table1Config, cell: usize, l: usize, mc: usize) -> Result<(Table1Row, Vec<ExperimentRecord>)> {
    let max_attempts = config.instances.saturating_mul(config.max_attempts_factor).max(config.instances);
    let mut kept = Vec::with_capacity(config.instances);
    let (mut discarded, mut qualitative, mut failures) = (0, 0, 0);
    let mut attempt = 0;
    while kept.len() < config.instances && attempt < max_attempts {
        let end = (attempt + BATCH).min(max_attempts);
        let results: Vec<Result<ExperimentRecord>> = (attempt..end)
            .into_par_iter()
            .map(|a| {
                let gen = GenConfig { n: config.n, l, mc, seed: instance_seed(config.seed, cell, a) };
                run_instance(&gen, config.strategy, config.resolver)
            })
            .collect();
        for r in results {
            if kept.len() == config.instances {
                break;
            }
            match r {
                Ok(rec) if !rec.is_kept() => discarded += 1,
                Ok(rec) if rec.resolved_at == ResolvedAt::Qualitative && !config.count_qualitative => qualitative += 1,
                Ok(rec) => kept.push(rec),
                Err(Error::GenerationFailure(msg)) => {
                    log::warn!("cell {cell}: {msg}; resampling");
                    failures += 1;
                }
                Err(e) => return Err(e),
            }
        }
        attempt = end;
    }
    if kept.len() < config.instances {
        log::warn!("cell {cell} (l={l}, mc={mc}): only {} of {} decisive instances", kept.len(), config.instances);
    }
    let mean = |f: &dyn Fn(&ExperimentRecord) -> f64| {
        if kept.is_empty() {
            f64::NAN
        } else {
            kept.iter().map(f).sum::<f64>() / kept.len() as f64
        }
    };
    let row = Table1Row {
        l,
        mc,
        nodes_avg: mean(&|r| r.pruned_nodes as f64),
        links_avg: mean(&|r| r.pruned_links as f64),
        r_nodes: mean(&|r| r.r_nodes),
        r_reversals: mean(&|r| r.r_reversals),
        instances_kept: kept.len(),
        instances_discarded: discarded,
        instances_qualitative: qualitative,
        generation_failures: failures,
    };
    Ok((row, kept))
}

/// One row per (l, mc), in the order `l_list` x `mc_list`.
pub fn run_table1(config: &Table1Config) -> Result<Vec<Table1Row>> {
    Ok(run_table1_detailed(config)?.into_iter().map(|(row, _)| row).collect())
}

/// Like [`run_table1`], also returning each cell's kept records.
pub fn run_table1_detailed(config: &Table1Config) -> Result<Vec<(Table1Row, Vec<ExperimentRecord>)>> {
    if config.n < 2 || config.instances == 0 {
        return Err(Error::InvalidArgument("table needs n >= 2 and at least one instance".into()));
    }
    let cells: Vec<(usize, usize)> =
        config.l_list.iter().flat_map(|&l| config.mc_list.iter().map(move |&mc| (l, mc))).collect();
    for &(l, mc) in &cells {
        GenConfig { n: config.n, l, mc, seed: 0 }.validate()?;
    }
    cells
        .iter()
        .enumerate()
        .map(|(i, &(l, mc))| run_cell(config, i, l, mc))
        .collect()
}

pub const CSV_HEADER: &str =
    "nodes_avg,links_avg,mc,r_nodes,r_reversals,instances_kept,instances_discarded,instances_qualitative";

#[derive(Serialize)]
struct CsvRow {
    nodes_avg: String,
    links_avg: String,
    mc: usize,
    r_nodes: String,
    r_reversals: String,
    instances_kept: usize,
    instances_discarded: usize,
    instances_qualitative: usize,
}

/// Fixed-precision CSV, one line per row.
pub fn table1_csv(rows: &[Table1Row]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(CsvRow {
            nodes_avg: format!("{:.2}", r.nodes_avg),
            links_avg: format!("{:.2}", r.links_avg),
            mc: r.mc,
            r_nodes: format!("{:.4}", r.r_nodes),
            r_reversals: format!("{:.4}", r.r_reversals),
            instances_kept: r.instances_kept,
            instances_discarded: r.instances_discarded,
            instances_qualitative: r.instances_qualitative,
        })
        .expect("in-memory write");
    }
    if rows.is_empty() {
        return format!("{CSV_HEADER}\n");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}
