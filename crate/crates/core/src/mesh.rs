//! Point clouds with simplex connectivity, and the flow maps defined on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Location, Result};

/// Spatial dimensionality of a mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    pub const fn get(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    pub fn from_usize(dim: usize) -> Option<Self> {
        match dim {
            2 => Some(Dim::Two),
            3 => Some(Dim::Three),
            _ => None,
        }
    }

    /// Vertices per simplex: triangles in 2D, tetrahedra in 3D.
    pub const fn face_len(self) -> usize {
        self.get() + 1
    }

    /// Neighbor slots per point: one minus and one plus per axis.
    pub const fn slots(self) -> usize {
        2 * self.get()
    }
}

/// Largest point count addressable with signed 32-bit indexes.
pub const MAX_POINTS: usize = i32::MAX as usize;

/// Point coordinates plus triangle (2D) or tetrahedron (3D) connectivity.
///
/// Coordinates and faces are stored flat and row-major. A mesh is validated
/// on construction and immutable afterwards.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplicialMesh {
    dim: Dim,
    coords: Vec<f64>,
    faces: Vec<u32>,
}

impl SimplicialMesh {
    pub fn new(dim: Dim, coords: Vec<f64>, faces: Vec<u32>) -> Result<Self> {
        let d = dim.get();
        if coords.len() % d != 0 {
            return Err(Error::ShapeMismatch(format!(
                "{} coordinate values are not a multiple of dim {d}",
                coords.len()
            )));
        }
        let n_points = coords.len() / d;
        if n_points > MAX_POINTS {
            return Err(Error::TooManyPoints { count: n_points as u64 });
        }
        let k = dim.face_len();
        if faces.len() % k != 0 {
            return Err(Error::ShapeMismatch(format!(
                "{} face indexes are not a multiple of {k}",
                faces.len()
            )));
        }
        for (f, face) in faces.chunks_exact(k).enumerate() {
            check_face(f, face, n_points, None)?;
        }
        Ok(SimplicialMesh { dim, coords, faces })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn n_points(&self) -> usize {
        self.coords.len() / self.dim.get()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len() / self.dim.face_len()
    }

    #[inline]
    pub fn point(&self, p: usize) -> &[f64] {
        let d = self.dim.get();
        &self.coords[p * d..(p + 1) * d]
    }

    pub fn face(&self, f: usize) -> &[u32] {
        let k = self.dim.face_len();
        &self.faces[f * k..(f + 1) * k]
    }

    pub fn faces(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.faces.chunks_exact(self.dim.face_len())
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn face_indexes(&self) -> &[u32] {
        &self.faces
    }
}

/// Checks one face against the mesh invariants.
pub(crate) fn check_face(face_idx: usize, face: &[u32], n_points: usize, at: Option<Location>) -> Result<()> {
    for (i, &v) in face.iter().enumerate() {
        if v as usize >= n_points {
            return Err(Error::IndexOutOfRange {
                face: face_idx,
                index: i64::from(v),
                n_points,
                at,
            });
        }
        if face[..i].contains(&v) {
            return Err(Error::RepeatedVertex {
                face: face_idx,
                vertex: v,
                at,
            });
        }
    }
    Ok(())
}

/// Advected position of every mesh point after integrating for `t_horizon`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowMap {
    dim: Dim,
    values: Vec<f64>,
    t_horizon: f64,
}

impl FlowMap {
    pub fn new(dim: Dim, values: Vec<f64>, t_horizon: f64) -> Result<Self> {
        if values.len() % dim.get() != 0 {
            return Err(Error::ShapeMismatch(format!(
                "{} flow-map values are not a multiple of dim {}",
                values.len(),
                dim.get()
            )));
        }
        if t_horizon == 0.0 || !t_horizon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "integration horizon must be finite and nonzero, got {t_horizon}"
            )));
        }
        Ok(FlowMap { dim, values, t_horizon })
    }

    /// Builds a flow map by applying `f` to every mesh point.
    pub fn from_fn<F>(mesh: &SimplicialMesh, t_horizon: f64, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64], &mut [f64]),
    {
        let d = mesh.dim().get();
        let mut values = vec![0.0; mesh.coords().len()];
        for (p, out) in values.chunks_exact_mut(d).enumerate() {
            f(mesh.point(p), out);
        }
        FlowMap::new(mesh.dim(), values, t_horizon)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn n_points(&self) -> usize {
        self.values.len() / self.dim.get()
    }

    #[inline]
    pub fn at(&self, p: usize) -> &[f64] {
        let d = self.dim.get();
        &self.values[p * d..(p + 1) * d]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn t_horizon(&self) -> f64 {
        self.t_horizon
    }

    /// Fails unless this flow map has one vector per mesh point.
    pub fn check_matches(&self, mesh: &SimplicialMesh) -> Result<()> {
        if self.dim != mesh.dim() || self.n_points() != mesh.n_points() {
            return Err(Error::ShapeMismatch(format!(
                "flow map is {}D with {} points, mesh is {}D with {} points",
                self.dim.get(),
                self.n_points(),
                mesh.dim().get(),
                mesh.n_points()
            )));
        }
        Ok(())
    }
}
