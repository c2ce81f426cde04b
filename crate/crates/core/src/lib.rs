//! Library for multiagent path finding under agent malfunctions.
//!
//! The crate models turn-based multiagent path finding (MAPF) on undirected
//! graphs, the delay-1 / malfunction-1 schedule rewrite with amortization,
//! and four runtime recovery protocols (no-communication, CBM, UCBM, CCBM)
//! executed by a deterministic turn engine. An adversary module produces
//! malfunction plans and exhaustive worst-case searches, and the generator
//! module builds the reference instances, random grids and the 3-SAT
//! hardness reduction with its assignment-driven repair.

pub mod adversary;
pub mod engine;
pub mod gen;
pub mod model;
pub mod solver;

pub use model::{
    AgentId, AgentSpec, DelayEvent, FeasibilityVerdict, FeasibilityViolation, Graph, Instance,
    InstanceViolation, ModelError, Schedule, VertexId,
};
