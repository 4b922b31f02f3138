use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tradeoff::bounds::{check_eligibility, issa_resolve, RefinementPolicy};
use tradeoff::format::{read_network, write_network};
use tradeoff::harness::{run_table1_detailed, table1_csv, Table1Config};
use tradeoff::netgen::{generate_network, GenConfig};
use tradeoff::reduction::{itor, ItorOptions, Priority, Resolver, Strategy};
use tradeoff::{BayesNet, NodeId, Result, Sign, DEFAULT_TOLERANCE};

#[derive(Parser)]
#[command(name = "tradeoff", version, about = "Resolve qualitative tradeoffs in Bayesian networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a network file and report every violation.
    Validate { file: PathBuf },
    /// Sign of the influence of one node on another.
    Query {
        file: PathBuf,
        #[arg(long)]
        decision: String,
        #[arg(long)]
        target: String,
        #[arg(long, default_value = "x-first")]
        strategy: Priority,
        #[arg(long, default_value = "marginalize")]
        resolver: Resolver,
        /// Seed for the random fallback node choice.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Generate a random sign-consistent network.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        mc: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Batch experiment; writes one CSV row per (l, mc) cell.
    Table1 {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write every kept instance as a JSON line.
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Bound the decision's influence on a node by state-space abstraction.
    Issa {
        file: PathBuf,
        #[arg(long)]
        decision: String,
        #[arg(long)]
        target: String,
        #[arg(long)]
        max_steps: Option<usize>,
    },
}

fn lookup(net: &BayesNet, decision: &str, target: &str) -> Result<(NodeId, NodeId)> {
    Ok((net.node(decision)?, net.node(target)?))
}

fn exit_for(sign: Option<Sign>) -> ExitCode {
    match sign {
        Some(s) if s.is_resolved() => ExitCode::SUCCESS,
        _ => ExitCode::from(2),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate { file } => {
            let net = read_network(&file, DEFAULT_TOLERANCE)?;
            println!("valid: {} variables, {} arcs", net.len(), net.arcs().len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Query { file, decision, target, strategy, resolver, seed, max_steps } => {
            let net = read_network(&file, DEFAULT_TOLERANCE)?;
            let (d, t) = lookup(&net, &decision, &target)?;
            let mut opts = ItorOptions::new(Strategy { priority: strategy, seed }, resolver);
            opts.refinement = RefinementPolicy { max_steps };
            let out = itor(&net, d, t, &opts)?;
            let s = out.stats;
            println!("sign={}", out.sign);
            println!("nodes_reduced={}", s.nodes_reduced);
            println!("arc_reversals={}", s.arc_reversals);
            println!("qualitative_passes={}", s.qualitative_passes);
            println!("refinement_steps={}", s.refinement_steps);
            println!("resolved_at={}", s.resolved_at);
            println!("pruned_nodes={}", out.pruned_nodes);
            println!("pruned_links={}", out.pruned_links);
            Ok(exit_for(Some(out.sign)))
        }
        Command::Generate { n, l, mc, seed, out } => {
            let g = generate_network(&GenConfig { n, l, mc, seed })?;
            write_network(&g.net, &out)?;
            println!("wrote {} ({} nodes, {} arcs)", out.display(), g.net.len(), g.net.arcs().len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Table1 { config, out, records } => {
            let config: Table1Config = serde_json::from_str(&std::fs::read_to_string(&config)?)?;
            let cells = run_table1_detailed(&config)?;
            if let Some(path) = records {
                let mut lines = String::new();
                for rec in cells.iter().flat_map(|(_, recs)| recs) {
                    lines.push_str(&serde_json::to_string(rec)?);
                    lines.push('\n');
                }
                std::fs::write(path, lines)?;
            }
            let rows: Vec<_> = cells.into_iter().map(|(row, _)| row).collect();
            let csv = table1_csv(&rows);
            std::fs::write(&out, &csv)?;
            print!("{csv}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Issa { file, decision, target, max_steps } => {
            let net = read_network(&file, DEFAULT_TOLERANCE)?;
            let (d, x) = lookup(&net, &decision, &target)?;
            let elig = check_eligibility(&net, d, x, DEFAULT_TOLERANCE)?;
            for c in &elig.candidates {
                println!("eligible {} {:?}", net.name(c.node), c.rule);
            }
            for (n, why) in &elig.rejected {
                println!("rejected {} {:?}", net.name(*n), why);
            }
            let run = issa_resolve(&net, d, x, &RefinementPolicy { max_steps }, DEFAULT_TOLERANCE)?;
            match run.sign {
                Some(s) => println!("sign={s}"),
                None => println!("sign=unresolved"),
            }
            println!("refinement_steps={}", run.refinement_steps);
            for (state, b) in net.variable(d).states.iter().zip(&run.bounds.states) {
                match b {
                    Some(b) => println!("bounds[{state}] lower={:?} upper={:?}", b.lower.values(), b.upper.values()),
                    None => println!("bounds[{state}] undefined"),
                }
            }
            Ok(exit_for(run.sign))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
