//! Discrete Bayesian networks, Bayesian multinets, and similarity networks.
//!
//! All model types are immutable after construction and every operation is a
//! pure function of its inputs, so values may be shared and queried from any
//! number of threads without synchronization.

mod assignment;
mod dsep;
mod elimination;
mod error;
mod factor;
pub mod fixtures;
pub mod generate;
mod hypothesis;
pub mod io;
mod joint;
mod multinet;
mod network;
mod report;
mod reversal;
mod shape;
pub mod simnet;
mod table;
mod variable;

pub use assignment::Assignment;
pub use elimination::{marginal, marginal_counted, min_degree_order, posterior_chain};
pub use elimination::{EliminationOrder, Posterior};
pub use error::{Error, Result, Warning};
pub use factor::Factor;
pub use hypothesis::{HypothesisPoint, HypothesisSpace};
pub use io::{parse_document, parse_model, serialize_model, ModelDocument, QueryResult};
pub use joint::{JointTable, DEFAULT_ENUMERATION_CAP};
pub use multinet::{Multinet, UnionNetwork};
pub use network::{DiscreteNetwork, NetworkBuilder};
pub use report::{ValidationReport, Violation, ViolationKind};
pub use reversal::{repeated_reversal_to_root, reverse_arc, Reversal};
pub use simnet::{
    comprehensive_from_joint, conditional_factor, conditional_factor_via, convert_to_multinet,
    is_connected_cover, reconstruct_joint, recover_priors, redundancy_report, relevance_prune,
    Cover, OrdinaryLocalNetwork, RedundancyReport, SharedParameter, SimilarityNetwork,
    COHERENCE_TOLERANCE,
};
pub use table::{Cpt, NORMALIZATION_TOLERANCE};
pub use variable::{ids, VarId, Variable};
