//! Regular per-point neighbor-index lists.
//!
//! Each point gets exactly `2·dim` signed 32-bit entries in axis-major
//! order `[x−, x+, y−, y+, (z−, z+)]`. A missing neighbor is `-1`, so the
//! list keeps a fixed stride no matter how irregular the mesh is and the
//! FTLE pass can stream it sequentially.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::adjacency::AdjacencyList;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::mesh::{Dim, SimplicialMesh, MAX_POINTS};

/// Marks an absent neighbor.
pub const MISSING: i32 = -1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborList {
    dim: Dim,
    entries: Vec<i32>,
}

impl NeighborList {
    pub fn from_entries(dim: Dim, entries: Vec<i32>) -> Result<Self> {
        if entries.len() % dim.slots() != 0 {
            return Err(Error::ShapeMismatch(format!(
                "{} neighbor entries are not a multiple of {}",
                entries.len(),
                dim.slots()
            )));
        }
        if entries.len() / dim.slots() > MAX_POINTS {
            return Err(Error::TooManyPoints {
                count: (entries.len() / dim.slots()) as u64,
            });
        }
        Ok(NeighborList { dim, entries })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn n_points(&self) -> usize {
        self.entries.len() / self.dim.slots()
    }

    pub fn entries(&self) -> &[i32] {
        &self.entries
    }

    #[inline]
    pub fn of(&self, p: usize) -> &[i32] {
        let s = self.dim.slots();
        &self.entries[p * s..(p + 1) * s]
    }

    pub fn minus(&self, p: usize, axis: usize) -> i32 {
        self.of(p)[2 * axis]
    }

    pub fn plus(&self, p: usize, axis: usize) -> i32 {
        self.of(p)[2 * axis + 1]
    }

    /// Number of `-1` entries in each slot, in slot order.
    pub fn missing_per_slot(&self) -> Vec<usize> {
        let mut counts = vec![0; self.dim.slots()];
        for row in self.entries.chunks_exact(self.dim.slots()) {
            for (c, &e) in counts.iter_mut().zip(row) {
                if e == MISSING {
                    *c += 1;
                }
            }
        }
        counts
    }
}

/// Human-readable slot label, e.g. `x-` or `z+`.
pub fn slot_name(slot: usize) -> String {
    let axis = ["x", "y", "z"][slot / 2];
    let side = if slot % 2 == 0 { '-' } else { '+' };
    format!("{axis}{side}")
}

/// Which side of a point along an axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Minus,
    Plus,
}

/// Picks the neighbor of `p` on `side` of `axis` among `candidates`.
///
/// Only candidates strictly on that side qualify. The winner minimises the
/// axis distance, then the Euclidean distance to `p`, then the index.
pub fn select_neighbor<I>(mesh: &SimplicialMesh, p: usize, axis: usize, side: Side, candidates: I) -> i32
where
    I: IntoIterator<Item = u32>,
{
    let origin = mesh.point(p);
    let mut best: Option<(f64, f64, u32)> = None;
    for q in candidates {
        let other = mesh.point(q as usize);
        let delta = other[axis] - origin[axis];
        let on_side = match side {
            Side::Minus => delta < 0.0,
            Side::Plus => delta > 0.0,
        };
        if !on_side || q as usize == p {
            continue;
        }
        let key = (delta.abs(), squared_distance(origin, other), q);
        let better = match best {
            None => true,
            Some(b) => compare_keys(&key, &b) == Ordering::Less,
        };
        if better {
            best = Some(key);
        }
    }
    best.map_or(MISSING, |(_, _, q)| q as i32)
}

fn compare_keys(a: &(f64, f64, u32), b: &(f64, f64, u32)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2))
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn precompute_neighbors(mesh: &SimplicialMesh, adjacency: &AdjacencyList) -> Result<NeighborList> {
    precompute_neighbors_with(mesh, adjacency, Execution::default())
}

pub fn precompute_neighbors_with(
    mesh: &SimplicialMesh,
    adjacency: &AdjacencyList,
    exec: Execution,
) -> Result<NeighborList> {
    if adjacency.n_points() != mesh.n_points() {
        return Err(Error::ShapeMismatch(format!(
            "adjacency covers {} points, mesh has {}",
            adjacency.n_points(),
            mesh.n_points()
        )));
    }
    let dim = mesh.dim();
    let mut entries = vec![MISSING; mesh.n_points() * dim.slots()];
    exec::fill_chunks(&mut entries, dim.slots(), exec, |p, row| {
        let adj = adjacency.of(p);
        for axis in 0..dim.get() {
            row[2 * axis] = select_neighbor(mesh, p, axis, Side::Minus, adj.iter().copied());
            row[2 * axis + 1] = select_neighbor(mesh, p, axis, Side::Plus, adj.iter().copied());
        }
    });
    NeighborList::from_entries(dim, entries)
}

/// One broken neighbor-list invariant.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Shape {
        mesh_points: usize,
        list_points: usize,
        mesh_dim: usize,
        list_dim: usize,
    },
    OutOfRange {
        point: usize,
        slot: usize,
        value: i32,
    },
    SelfReference {
        point: usize,
        slot: usize,
    },
    WrongSide {
        point: usize,
        slot: usize,
        neighbor: i32,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape {
                mesh_points,
                list_points,
                mesh_dim,
                list_dim,
            } => write!(
                f,
                "list is {list_dim}D with {list_points} points, mesh is {mesh_dim}D with {mesh_points}"
            ),
            Violation::OutOfRange { point, slot, value } => {
                write!(f, "point {point} {}: index {value} out of range", slot_name(*slot))
            }
            Violation::SelfReference { point, slot } => {
                write!(f, "point {point} {}: refers to itself", slot_name(*slot))
            }
            Violation::WrongSide { point, slot, neighbor } => write!(
                f,
                "point {point} {}: neighbor {neighbor} is not strictly on that side",
                slot_name(*slot)
            ),
        }
    }
}

/// Lists every invariant violation; an empty result means the list is valid.
pub fn validate_neighbor_list(mesh: &SimplicialMesh, nl: &NeighborList) -> Vec<Violation> {
    if mesh.dim() != nl.dim() || mesh.n_points() != nl.n_points() {
        return vec![Violation::Shape {
            mesh_points: mesh.n_points(),
            list_points: nl.n_points(),
            mesh_dim: mesh.dim().get(),
            list_dim: nl.dim().get(),
        }];
    }
    let n = mesh.n_points();
    let mut out = Vec::new();
    for p in 0..n {
        for (slot, &e) in nl.of(p).iter().enumerate() {
            if e == MISSING {
                continue;
            }
            if e < 0 || e as usize >= n {
                out.push(Violation::OutOfRange {
                    point: p,
                    slot,
                    value: e,
                });
                continue;
            }
            if e as usize == p {
                out.push(Violation::SelfReference { point: p, slot });
                continue;
            }
            let axis = slot / 2;
            let delta = mesh.point(e as usize)[axis] - mesh.point(p)[axis];
            let ok = if slot % 2 == 0 { delta < 0.0 } else { delta > 0.0 };
            if !ok {
                out.push(Violation::WrongSide {
                    point: p,
                    slot,
                    neighbor: e,
                });
            }
        }
    }
    out
}
