//! Qualitative tradeoff resolution in discrete Bayesian networks.
//!
//! A qualitative probabilistic network (QPN) abstracts each arc of a
//! Bayesian network to a sign. Propagating signs is cheap but can end in
//! `?` when opposing influences meet. This crate resolves such tradeoffs
//! incrementally: it reduces the network one node at a time by arc reversal
//! and stops as soon as the abstracted QPN becomes decisive, or bounds the
//! contested CDF through state-space abstraction.

pub mod bounds;
pub mod cdf;
pub mod error;
pub mod exact;
pub mod format;
pub mod graph;
pub mod harness;
pub mod net;
pub mod netgen;
pub mod qpn;
pub mod reduction;

pub use cdf::{fsd, CdfVector};
pub use error::{Error, Result};
pub use exact::{exact_conditional_cdfs, exact_sign};
pub use net::{BayesNet, Cpt, NodeId, Variable, DEFAULT_TOLERANCE};
pub use qpn::{propagate_signs, Qpn, Sign};
pub use reduction::{itor, ItorOptions, ItorOutcome, Priority, Resolver, Strategy};
