//! The per-point floating-point core: record gather, flow-map gradient,
//! Cauchy–Green tensor, largest eigenvalue and FTLE value.
//!
//! Every stage is branch-light and total. Missing neighbors fall back to the
//! point itself and zero-width axes contribute an identity column, so the
//! same straight-line sequence runs for every point.

use crate::eigen::{max_eigen_sym2, max_eigen_sym3};
use crate::mesh::{Dim, FlowMap, SimplicialMesh};
use crate::neighbors::{NeighborList, MISSING};
use crate::scalar::Real;

/// Largest eigenvalues at or below this map to an undefined (NaN) FTLE.
pub const LAMBDA_FLOOR: f64 = 1e-300;

/// Everything the core needs for one point.
///
/// For axis `a`, `coord_minus[a]`/`coord_plus[a]` are the axis-`a`
/// coordinates of the two axis-`a` neighbors and `fm_minus[a]`/`fm_plus[a]`
/// their flow-map vectors. Slots beyond `dim` are zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointRecord<T = f64> {
    pub dim: Dim,
    pub coord_minus: [T; 3],
    pub coord_plus: [T; 3],
    pub fm_minus: [[T; 3]; 3],
    pub fm_plus: [[T; 3]; 3],
}

impl<T: Real> PointRecord<T> {
    /// Number of floating-point values the record carries.
    pub fn len(&self) -> usize {
        let d = self.dim.get();
        2 * d + 2 * d * d
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> PointRecord<U> {
        let v = |a: [T; 3]| [f(a[0]), f(a[1]), f(a[2])];
        PointRecord {
            dim: self.dim,
            coord_minus: v(self.coord_minus),
            coord_plus: v(self.coord_plus),
            fm_minus: [v(self.fm_minus[0]), v(self.fm_minus[1]), v(self.fm_minus[2])],
            fm_plus: [v(self.fm_plus[0]), v(self.fm_plus[1]), v(self.fm_plus[2])],
        }
    }
}

/// Flow-map gradient, `m[i][j] = ∂φ_i/∂x_j`. Slots beyond `dim` are zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jacobian<T = f64> {
    pub dim: Dim,
    pub m: [[T; 3]; 3],
}

/// Right Cauchy–Green tensor `JᵀJ`, stored full and exactly symmetric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CauchyGreen<T = f64> {
    pub dim: Dim,
    pub m: [[T; 3]; 3],
}

/// Builds the record for point `p` from its neighbor row.
///
/// The row is read once, then the coordinate and flow-map values it points
/// at. A `-1` entry reads the point's own values instead.
pub fn gather_record(p: usize, nl: &NeighborList, mesh: &SimplicialMesh, fm: &FlowMap) -> PointRecord {
    let mut row = [MISSING; 6];
    let slots = nl.dim().slots();
    row[..slots].copy_from_slice(nl.of(p));
    record_from_row(p, &row[..slots], mesh, fm)
}

/// Builds the record for point `p` given its `2·dim` neighbor indexes.
pub fn record_from_row(p: usize, row: &[i32], mesh: &SimplicialMesh, fm: &FlowMap) -> PointRecord {
    let dim = mesh.dim();
    let d = dim.get();
    let resolve = |e: i32| if e == MISSING { p } else { e as usize };
    let mut rec = PointRecord {
        dim,
        coord_minus: [0.0; 3],
        coord_plus: [0.0; 3],
        fm_minus: [[0.0; 3]; 3],
        fm_plus: [[0.0; 3]; 3],
    };
    for axis in 0..d {
        let lo = resolve(row[2 * axis]);
        let hi = resolve(row[2 * axis + 1]);
        rec.coord_minus[axis] = mesh.point(lo)[axis];
        rec.coord_plus[axis] = mesh.point(hi)[axis];
        rec.fm_minus[axis][..d].copy_from_slice(fm.at(lo));
        rec.fm_plus[axis][..d].copy_from_slice(fm.at(hi));
    }
    rec
}

/// Central (or one-sided) differences of the flow map along each axis.
#[inline]
pub fn gradient<T: Real>(rec: &PointRecord<T>) -> Jacobian<T> {
    let d = rec.dim.get();
    let zero = T::lit(0.0);
    let mut m = [[zero; 3]; 3];
    for j in 0..d {
        let width = rec.coord_plus[j] - rec.coord_minus[j];
        if width == zero {
            m[j][j] = T::lit(1.0);
            continue;
        }
        for (i, row) in m.iter_mut().enumerate().take(d) {
            row[j] = (rec.fm_plus[j][i] - rec.fm_minus[j][i]) / width;
        }
    }
    Jacobian { dim: rec.dim, m }
}

#[inline]
pub fn cauchy_green<T: Real>(j: &Jacobian<T>) -> CauchyGreen<T> {
    let d = j.dim.get();
    let mut m = [[T::lit(0.0); 3]; 3];
    for a in 0..d {
        for b in a..d {
            let mut s = j.m[0][a] * j.m[0][b];
            for k in 1..d {
                s = s + j.m[k][a] * j.m[k][b];
            }
            m[a][b] = s;
            m[b][a] = s;
        }
    }
    CauchyGreen { dim: j.dim, m }
}

/// Largest eigenvalue of a Cauchy–Green tensor.
#[inline]
pub fn max_eigenvalue<T: Real>(c: &CauchyGreen<T>) -> T {
    match c.dim {
        Dim::Two => max_eigen_sym2(&[[c.m[0][0], c.m[0][1]], [c.m[1][0], c.m[1][1]]]),
        Dim::Three => max_eigen_sym3(&c.m),
    }
}

/// `ln(λ) / (2|T|)`, or NaN when `λ` is not above [`LAMBDA_FLOOR`].
#[inline]
pub fn ftle_from_lambda<T: Real>(lambda_max: T, t_horizon: T) -> T {
    if lambda_max > T::lit(LAMBDA_FLOOR) {
        lambda_max.ln() / (T::lit(2.0) * t_horizon.abs())
    } else {
        T::lit(f64::NAN)
    }
}

/// Runs the whole per-point sequence on one record.
#[inline]
pub fn ftle_of_record<T: Real>(rec: &PointRecord<T>, t_horizon: T) -> T {
    let j = gradient(rec);
    let c = cauchy_green(&j);
    ftle_from_lambda(max_eigenvalue(&c), t_horizon)
}
