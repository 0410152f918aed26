//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the kernel or the eigen solvers under test.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ftle_core::mesh::{Dim, SimplicialMesh};

/// Largest root of the characteristic polynomial of a symmetric matrix
/// (2×2 or 3×3, full storage), found by bisection.
///
/// The bracket starts at the larger critical point of the polynomial (at or
/// left of the largest root by Rolle's theorem, where the polynomial is
/// non-positive) and ends at the Gershgorin bound (where it is positive).
pub fn largest_eigen_bisect(c: &[Vec<f64>]) -> f64 {
    let n = c.len();
    let (poly, lo): (Box<dyn Fn(f64) -> f64>, f64) = match n {
        2 => {
            let tr = c[0][0] + c[1][1];
            let det = c[0][0] * c[1][1] - c[0][1] * c[1][0];
            (Box::new(move |l| (l - tr) * l + det), tr / 2.0)
        }
        3 => {
            let tr = c[0][0] + c[1][1] + c[2][2];
            let minors = c[0][0] * c[1][1] - c[0][1] * c[1][0] + c[0][0] * c[2][2] - c[0][2] * c[2][0]
                + c[1][1] * c[2][2]
                - c[1][2] * c[2][1];
            let det = c[0][0] * (c[1][1] * c[2][2] - c[1][2] * c[2][1])
                - c[0][1] * (c[1][0] * c[2][2] - c[1][2] * c[2][0])
                + c[0][2] * (c[1][0] * c[2][1] - c[1][1] * c[2][0]);
            let crit = (tr + (tr * tr - 3.0 * minors).max(0.0).sqrt()) / 3.0;
            (Box::new(move |l| ((l - tr) * l + minors) * l - det), crit)
        }
        _ => panic!("only 2x2 and 3x3"),
    };
    let gersh = (0..n)
        .map(|i| c[i][i] + (0..n).filter(|&j| j != i).map(|j| c[i][j].abs()).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let mut lo = lo;
    let mut hi = gersh.max(lo) + 1e-12 * gersh.abs().max(1.0);
    if poly(lo) > 0.0 {
        return lo;
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if poly(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `AᵀA` for a row-major square matrix, in full storage.
pub fn gram(a: &[f64], d: usize) -> Vec<Vec<f64>> {
    let mut c = vec![vec![0.0; d]; d];
    for (i, row) in c.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..d).map(|k| a[k * d + i] * a[k * d + j]).sum();
        }
    }
    c
}

/// Random symmetric positive semidefinite matrix `BᵀB`.
pub fn random_psd(rng: &mut impl Rng, d: usize) -> Vec<Vec<f64>> {
    let b: Vec<f64> = (0..d * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    gram(&b, d)
}

/// Points sharing a face with `p`, straight from the face list.
pub fn face_neighbors(mesh: &SimplicialMesh, p: usize) -> Vec<u32> {
    let mut out: Vec<u32> = mesh
        .faces()
        .filter(|f| f.contains(&(p as u32)))
        .flat_map(|f| f.iter().copied())
        .filter(|&q| q as usize != p)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Checks that `chosen` is exactly what the selection rule demands for
/// point `p`, `axis` and side (`plus`), by comparing it against every
/// other candidate. Returns a description of the first problem found.
pub fn check_selection(mesh: &SimplicialMesh, p: usize, axis: usize, plus: bool, chosen: i32) -> Result<(), String> {
    let here = mesh.point(p);
    let key = |q: u32| {
        let there = mesh.point(q as usize);
        let delta = there[axis] - here[axis];
        let dist2: f64 = here.iter().zip(there).map(|(a, b)| (a - b).powi(2)).sum();
        (delta, delta.abs(), dist2, q)
    };
    let valid: Vec<_> = face_neighbors(mesh, p)
        .into_iter()
        .map(key)
        .filter(|k| if plus { k.0 > 0.0 } else { k.0 < 0.0 })
        .collect();
    if chosen == -1 {
        return if valid.is_empty() {
            Ok(())
        } else {
            Err(format!(
                "point {p} axis {axis} plus={plus}: -1 but {} candidates",
                valid.len()
            ))
        };
    }
    let mine = valid
        .iter()
        .find(|k| k.3 as i32 == chosen)
        .ok_or_else(|| format!("point {p} axis {axis} plus={plus}: {chosen} is not a valid candidate"))?;
    for other in &valid {
        let better = other.1 < mine.1
            || (other.1 == mine.1 && other.2 < mine.2)
            || (other.1 == mine.1 && other.2 == mine.2 && other.3 < mine.3);
        if better {
            return Err(format!(
                "point {p} axis {axis} plus={plus}: {} beats chosen {chosen}",
                other.3
            ));
        }
    }
    Ok(())
}

/// Mesh with `n` random points and `n_faces` faces of random distinct vertices.
/// Coordinates are multiples of 2⁻¹⁶ so shifts and power-of-two scalings are exact.
pub fn random_soup(dim: Dim, n: usize, n_faces: usize, seed: u64) -> SimplicialMesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = dim.get();
    let coords: Vec<f64> = (0..n * d)
        .map(|_| f64::from(rng.gen_range(0u32..1 << 16)) / f64::from(1u32 << 16))
        .collect();
    let k = dim.face_len();
    let mut faces = Vec::new();
    if n >= k {
        for _ in 0..n_faces {
            let picked = rand::seq::index::sample(&mut rng, n, k);
            faces.extend(picked.into_iter().map(|v| v as u32));
        }
    }
    SimplicialMesh::new(dim, coords, faces).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if a.is_nan() || b.is_nan() {
        return a.is_nan() && b.is_nan();
    }
    (a - b).abs() <= tol * a.abs().max(b.abs()) || a == b
}
