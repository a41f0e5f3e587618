//! Energy-minimal virtual machine placement over an end-to-end cloud-fog
//! architecture.
//!
//! The model covers an IP-over-WDM core network (non-bypass), metro gateways,
//! PON access networks and three compute tiers (clouds at core nodes, metro
//! fogs, access fogs). Given a scenario (topology, equipment power ratings,
//! a VM catalog and per-PON user populations) the crate sizes the equipment
//! implied by a candidate placement and evaluates its total power draw.
//!
//! Two optimizers are provided:
//!
//! * [`oracle`] — exact exhaustive enumeration over integral serving
//!   assignments, tractable at desk scale and used as ground truth;
//! * [`heuristic`] — a two-phase placement heuristic (offline per-type
//!   recipe search, online type matching with consolidation) that scales to
//!   the full 25-node scenario.

pub mod catalog;
pub mod heuristic;
pub mod oracle;
pub mod placement;
pub mod power;
pub mod report;
pub mod routing;
pub mod scenario;
pub mod topology;

use thiserror::Error;

/// Node identifier in the core topology (1-based, as in scenario files).
pub type NodeId = u32;

/// VM identifier, unique within a catalog.
pub type VmId = u32;

/// Index of a PON within its core node (0-based).
pub type PonIndex = u32;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("no path between nodes {src} and {dst}")]
    NoPath { src: NodeId, dst: NodeId },

    #[error("placement is infeasible: {0} constraint violation(s); first: {1}")]
    Infeasible(usize, String),

    #[error("search space too large: {required} candidates exceed the bound of {bound}")]
    TooLarge { required: u128, bound: u64 },

    #[error("VM {0} does not match any offline type key and nearest-key matching is disabled")]
    UnclassifiedVm(VmId),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("scenario parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
