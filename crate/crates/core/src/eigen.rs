//! Closed-form largest eigenvalue of small symmetric matrices.

use crate::scalar::Real;

/// Largest eigenvalue of a symmetric 2×2 matrix. Only the upper triangle is read.
#[inline]
pub fn max_eigen_sym2<T: Real>(c: &[[T; 2]; 2]) -> T {
    let half_trace = (c[0][0] + c[1][1]) * T::lit(0.5);
    let det = c[0][0] * c[1][1] - c[0][1] * c[0][1];
    // Rounding can push the discriminant slightly below zero for repeated eigenvalues.
    let disc = (half_trace * half_trace - det).max(T::lit(0.0));
    half_trace + disc.sqrt()
}

/// Largest eigenvalue of a symmetric 3×3 matrix via the trigonometric
/// solution of the characteristic cubic. Only the upper triangle is read.
pub fn max_eigen_sym3<T: Real>(c: &[[T; 3]; 3]) -> T {
    let (a00, a01, a02) = (c[0][0], c[0][1], c[0][2]);
    let (a11, a12, a22) = (c[1][1], c[1][2], c[2][2]);

    let off = a01 * a01 + a02 * a02 + a12 * a12;
    if off == T::lit(0.0) {
        return a00.max(a11).max(a22);
    }

    let mean = (a00 + a11 + a22) * T::lit(1.0 / 3.0);
    let d0 = a00 - mean;
    let d1 = a11 - mean;
    let d2 = a22 - mean;
    let spread2 = d0 * d0 + d1 * d1 + d2 * d2 + T::lit(2.0) * off;
    let spread = (spread2 * T::lit(1.0 / 6.0)).sqrt();

    // B = (C - mean·I) / spread has eigenvalues 2cos(θ + 2πk/3).
    let inv = T::lit(1.0) / spread;
    let (b00, b11, b22) = (d0 * inv, d1 * inv, d2 * inv);
    let (b01, b02, b12) = (a01 * inv, a02 * inv, a12 * inv);
    let det_b = b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02) + b02 * (b01 * b12 - b11 * b02);

    let r = (det_b * T::lit(0.5)).max(T::lit(-1.0)).min(T::lit(1.0));
    let angle = r.acos() * T::lit(1.0 / 3.0);
    mean + T::lit(2.0) * spread * angle.cos()
}
