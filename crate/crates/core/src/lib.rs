//! Finite-time Lyapunov exponent (FTLE) fields on simplicial meshes, split
//! into an irregular neighbor-precomputation stage and a regular streaming
//! per-point core, plus an analytic model of how fast a pipelined hardware
//! version of that core can run against a given memory system.
//!
//! ```
//! use ftle_core::{fixtures, adjacency, neighbors, field};
//! use ftle_core::mesh::Dim;
//!
//! let mesh = fixtures::grid_mesh(Dim::Two, 25).unwrap();
//! let fm = fixtures::flow_map(&mesh, &fixtures::Flow::Linear(vec![2.0, 0.0, 0.0, 0.5]), 1.0, 0).unwrap();
//! let nl = neighbors::precompute_neighbors(&mesh, &adjacency::build_adjacency(&mesh)).unwrap();
//! let ftle = field::compute_ftle_decoupled(&mesh, &fm, &nl).unwrap();
//! assert!((ftle.values()[12] - std::f64::consts::LN_2).abs() < 1e-12);
//! ```

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod adjacency;
pub mod eigen;
pub mod error;
pub mod exec;
pub mod field;
pub mod fixtures;
pub mod format;
pub mod kernel;
pub mod mesh;
pub mod neighbors;
pub mod perf;
pub mod pipeline;
pub mod scalar;

pub use adjacency::{build_adjacency, AdjacencyList};
pub use error::{Error, Location, Result};
pub use exec::Execution;
pub use field::{compute_ftle_decoupled, compute_ftle_naive, FtleField};
pub use mesh::{Dim, FlowMap, SimplicialMesh};
pub use neighbors::{precompute_neighbors, validate_neighbor_list, NeighborList, Violation};
