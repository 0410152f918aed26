//! Whole-mesh FTLE passes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::kernel::{ftle_of_record, gather_record, record_from_row};
use crate::mesh::{FlowMap, SimplicialMesh};
use crate::neighbors::{NeighborList, MISSING};

/// Per-point FTLE values in 1/time units; NaN where undefined.
#[derive(Clone, Debug, PartialEq)]
pub struct FtleField {
    values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FieldStats {
    pub points: usize,
    pub finite: usize,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub mean: Option<f64>,
}

impl FtleField {
    pub fn new(values: Vec<f64>) -> Self {
        FtleField { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Min, max and mean over the finite values.
    pub fn stats(&self) -> FieldStats {
        let finite: Vec<f64> = self.values.iter().copied().filter(|v| v.is_finite()).collect();
        let n = finite.len();
        FieldStats {
            points: self.values.len(),
            finite: n,
            min: finite.iter().copied().reduce(f64::min),
            max: finite.iter().copied().reduce(f64::max),
            mean: (n > 0).then(|| finite.iter().sum::<f64>() / n as f64),
        }
    }
}

/// Streams the precomputed neighbor list through the per-point core.
pub fn compute_ftle_decoupled(mesh: &SimplicialMesh, fm: &FlowMap, nl: &NeighborList) -> Result<FtleField> {
    compute_ftle_decoupled_with(mesh, fm, nl, Execution::default())
}

pub fn compute_ftle_decoupled_with(
    mesh: &SimplicialMesh,
    fm: &FlowMap,
    nl: &NeighborList,
    exec: Execution,
) -> Result<FtleField> {
    fm.check_matches(mesh)?;
    if nl.dim() != mesh.dim() || nl.n_points() != mesh.n_points() {
        return Err(Error::ShapeMismatch(format!(
            "neighbor list is {}D with {} points, mesh is {}D with {} points",
            nl.dim().get(),
            nl.n_points(),
            mesh.dim().get(),
            mesh.n_points()
        )));
    }
    let n = mesh.n_points() as i64;
    if let Some(&bad) = nl
        .entries()
        .iter()
        .find(|&&e| e != MISSING && !(0..n).contains(&i64::from(e)))
    {
        return Err(Error::ShapeMismatch(format!(
            "neighbor index {bad} out of range for {n} points"
        )));
    }
    let t = fm.t_horizon();
    let values = exec::map_indexed(mesh.n_points(), exec, |p| {
        ftle_of_record(&gather_record(p, nl, mesh, fm), t)
    });
    Ok(FtleField::new(values))
}

/// Reference pass that finds each point's neighbors on the fly by
/// scanning every face, with no precomputed adjacency or neighbor list.
pub fn compute_ftle_naive(mesh: &SimplicialMesh, fm: &FlowMap) -> Result<FtleField> {
    compute_ftle_naive_with(mesh, fm, Execution::default())
}

pub fn compute_ftle_naive_with(mesh: &SimplicialMesh, fm: &FlowMap, exec: Execution) -> Result<FtleField> {
    fm.check_matches(mesh)?;
    let d = mesh.dim().get();
    let t = fm.t_horizon();
    let values = exec::map_indexed(mesh.n_points(), exec, |p| {
        let candidates = scan_face_neighbors(mesh, p);
        let mut row = [MISSING; 6];
        for axis in 0..d {
            row[2 * axis] = nearest_on_side(mesh, p, axis, false, &candidates);
            row[2 * axis + 1] = nearest_on_side(mesh, p, axis, true, &candidates);
        }
        ftle_of_record(&record_from_row(p, &row[..2 * d], mesh, fm), t)
    });
    Ok(FtleField::new(values))
}

fn scan_face_neighbors(mesh: &SimplicialMesh, p: usize) -> Vec<u32> {
    let mut out = Vec::new();
    for face in mesh.faces() {
        if face.contains(&(p as u32)) {
            out.extend(face.iter().copied().filter(|&q| q as usize != p));
        }
    }
    out
}

fn nearest_on_side(mesh: &SimplicialMesh, p: usize, axis: usize, plus: bool, candidates: &[u32]) -> i32 {
    let here = mesh.point(p);
    let mut ranked: Vec<(f64, f64, u32)> = candidates
        .iter()
        .filter_map(|&q| {
            let there = mesh.point(q as usize);
            let delta = there[axis] - here[axis];
            let keep = if plus { delta > 0.0 } else { delta < 0.0 };
            keep.then(|| {
                let dist2: f64 = here.iter().zip(there).map(|(a, b)| (a - b) * (a - b)).sum();
                (delta.abs(), dist2, q)
            })
        })
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
    ranked.first().map_or(MISSING, |r| r.2 as i32)
}
