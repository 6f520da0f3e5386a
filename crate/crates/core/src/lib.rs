//! Solvers for capacitated survivable network design.
//!
//! Instances are graphs whose edges carry an integral capacity and a
//! rational cost; a subset of edges is feasible when every cut carries at
//! least the requirement it separates.

pub mod cutenum;
pub mod dsu;
pub mod error;
pub mod feasibility;
pub mod flow;
pub mod generators;
pub mod graph;
pub mod io;
pub mod kc;
pub mod labelcover;
pub mod lp;
pub mod multicopy;
pub mod oracle;
pub mod partition;
pub mod rational;
pub mod rounding;
mod scaled;
pub mod seeding;

pub use error::{Error, Result};
pub use feasibility::{check_feasible, FeasibilityReport, Witness};
pub use graph::{Cut, Demand, Edge, EdgeWeighting, Instance, Requirements, VertexSet};
pub use io::{parse_instance, serialize_instance};
pub use partition::KWayCut;
pub use rational::Rational;
