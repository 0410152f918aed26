use crate::exec::{self, Execution};
use crate::mesh::SimplicialMesh;

/// For each point, the sorted set of points sharing at least one face with it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyList {
    sets: Vec<Vec<u32>>,
}

impl AdjacencyList {
    pub fn n_points(&self) -> usize {
        self.sets.len()
    }

    pub fn of(&self, p: usize) -> &[u32] {
        &self.sets[p]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.sets.iter().map(Vec::as_slice)
    }
}

pub fn build_adjacency(mesh: &SimplicialMesh) -> AdjacencyList {
    build_adjacency_with(mesh, Execution::default())
}

pub fn build_adjacency_with(mesh: &SimplicialMesh, exec: Execution) -> AdjacencyList {
    let mut sets = vec![Vec::new(); mesh.n_points()];
    for face in mesh.faces() {
        for &a in face {
            for &b in face {
                if a != b {
                    sets[a as usize].push(b);
                }
            }
        }
    }
    exec::for_each_mut(&mut sets, exec, |s| {
        s.sort_unstable();
        s.dedup();
    });
    AdjacencyList { sets }
}
