//! Exact polynomial-space solvers that branch on separator vertices: Max
//! 2-CSP, counting dominating sets of subcubic graphs, and counting set
//! covers, plus the measure bookkeeping used to audit them.

pub mod audit;
pub mod counts;
pub mod domset;
pub mod generators;
pub mod graph;
pub mod max2csp;
pub mod measure;
pub mod policy;
pub mod separator;
pub mod setcover;

pub use graph::{Graph, GraphError, MultiGraph, Vertex};
pub use separator::{Separation, Side};
