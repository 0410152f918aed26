//! Deterministic test meshes and flow maps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mesh::{Dim, FlowMap, SimplicialMesh};

/// Side length `s` with `s^dim == n`, if any.
pub fn grid_side(dim: Dim, n: usize) -> Option<usize> {
    let root = (n as f64).powf(1.0 / dim.get() as f64).round() as usize;
    (root.saturating_sub(1)..=root + 1).find(|&s| s.checked_pow(dim.get() as u32) == Some(n))
}

/// Regular grid on the unit square or cube with `n` points.
///
/// Squares split into two triangles and cubes into six tetrahedra along
/// the main diagonal, the same way in every cell.
pub fn grid_mesh(dim: Dim, n: usize) -> Result<SimplicialMesh> {
    let s = grid_side(dim, n).filter(|&s| s >= 1).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "a {}D grid needs a perfect power point count, got {n}",
            dim.get()
        ))
    })?;
    let h = if s > 1 { 1.0 / (s - 1) as f64 } else { 1.0 };
    match dim {
        Dim::Two => {
            let id = |i: usize, j: usize| (j * s + i) as u32;
            let mut coords = Vec::with_capacity(2 * n);
            for j in 0..s {
                for i in 0..s {
                    coords.extend([i as f64 * h, j as f64 * h]);
                }
            }
            let mut faces = Vec::new();
            for j in 0..s.saturating_sub(1) {
                for i in 0..s - 1 {
                    let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
                    faces.extend([a, b, c, b, d, c]);
                }
            }
            SimplicialMesh::new(dim, coords, faces)
        }
        Dim::Three => {
            let id = |v: [usize; 3]| ((v[2] * s + v[1]) * s + v[0]) as u32;
            let mut coords = Vec::with_capacity(3 * n);
            for k in 0..s {
                for j in 0..s {
                    for i in 0..s {
                        coords.extend([i as f64 * h, j as f64 * h, k as f64 * h]);
                    }
                }
            }
            const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            let mut faces = Vec::new();
            for k in 0..s.saturating_sub(1) {
                for j in 0..s - 1 {
                    for i in 0..s - 1 {
                        for perm in PERMS {
                            let mut v = [i, j, k];
                            faces.push(id(v));
                            for axis in perm {
                                v[axis] += 1;
                                faces.push(id(v));
                            }
                        }
                    }
                }
            }
            SimplicialMesh::new(dim, coords, faces)
        }
    }
}

/// `n` uniform random points in the unit box, connected by simplices of
/// consecutive points along a Morton (Z-order) curve.
pub fn random_mesh(dim: Dim, n: usize, seed: u64) -> Result<SimplicialMesh> {
    if n == 0 {
        return Err(Error::InvalidParameter("a mesh needs at least one point".into()));
    }
    let d = dim.get();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords: Vec<f64> = (0..n * d).map(|_| rng.gen::<f64>()).collect();

    let mut order: Vec<(u64, u32)> = coords
        .chunks_exact(d)
        .enumerate()
        .map(|(p, x)| (morton(x), p as u32))
        .collect();
    order.sort_unstable();
    let k = dim.face_len();
    let faces: Vec<u32> = order.windows(k).flat_map(|w| w.iter().map(|&(_, p)| p)).collect();
    SimplicialMesh::new(dim, coords, faces)
}

fn morton(x: &[f64]) -> u64 {
    const BITS: u32 = 16;
    let q: Vec<u64> = x
        .iter()
        .map(|v| ((v.clamp(0.0, 1.0) * f64::from(1u32 << BITS)) as u64).min((1 << BITS) - 1))
        .collect();
    let mut code = 0u64;
    for bit in (0..BITS).rev() {
        for qa in &q {
            code = (code << 1) | ((qa >> bit) & 1);
        }
    }
    code
}

#[derive(Clone, Debug, PartialEq)]
pub enum Flow {
    Identity,
    /// Row-major `dim × dim` matrix `A`, giving `φ(x) = A·x`.
    Linear(Vec<f64>),
    /// Independent uniform values in `[-1, 1)`.
    Random,
}

pub fn flow_map(mesh: &SimplicialMesh, flow: &Flow, t_horizon: f64, seed: u64) -> Result<FlowMap> {
    let d = mesh.dim().get();
    match flow {
        Flow::Identity => FlowMap::new(mesh.dim(), mesh.coords().to_vec(), t_horizon),
        Flow::Linear(a) => {
            if a.len() != d * d {
                return Err(Error::InvalidParameter(format!(
                    "a {d}D linear flow needs {} matrix entries, got {}",
                    d * d,
                    a.len()
                )));
            }
            FlowMap::from_fn(mesh, t_horizon, |x, out| {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = (0..d).map(|j| a[i * d + j] * x[j]).sum();
                }
            })
        }
        Flow::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(1);
            let values = (0..mesh.coords().len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            FlowMap::new(mesh.dim(), values, t_horizon)
        }
    }
}
