//! Ellipsoid overlap tests under periodic boundary conditions.
//!
//! Pairs are tested with the Perram-Wertheim contact function
//! `F(l) = l (1 - l) r^T [(1 - l) A^{-1} + l B^{-1}]^{-1} r`, whose maximum over
//! `l in [0, 1]` is below 1 iff the two solid ellipsoids overlap, equal to 1
//! when they touch. `F` is concave in `l`, so a golden-section search is exact
//! up to rounding.

use nalgebra::{Matrix3, Vector3};

use super::Inclusion;

const GOLDEN_ITERATIONS: usize = 80;

/// `R diag(a^2) R^T`: the inverse of the quadratic form of the ellipsoid.
pub fn inverse_shape_matrix(inc: &Inclusion) -> Matrix3<f64> {
    let r = inc.euler.matrix();
    let d = Matrix3::from_diagonal(&Vector3::from(inc.semi_axes.map(|a| a * a)));
    r * d * r.transpose()
}

/// Maximum of the Perram-Wertheim contact function for center offset `r`.
pub fn contact_function(a_inv: &Matrix3<f64>, b_inv: &Matrix3<f64>, r: &Vector3<f64>) -> f64 {
    let eval = |l: f64| -> f64 {
        let g = a_inv * (1.0 - l) + b_inv * l;
        match g.cholesky() {
            Some(ch) => l * (1.0 - l) * r.dot(&ch.solve(r)),
            None => 0.0,
        }
    };
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    for _ in 0..GOLDEN_ITERATIONS {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = eval(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = eval(x1);
        }
    }
    f1.max(f2)
}

/// Offset `d` mapped to the minimum image, components in `[-L/2, L/2)`.
pub fn minimum_image(d: [f64; 3], cell_edge: f64) -> Vector3<f64> {
    Vector3::from(d.map(|x| x - cell_edge * (x / cell_edge).round()))
}

/// All periodic offsets `r = c_b + k L - c_a` whose length is below `reach`.
pub fn image_offsets(a: [f64; 3], b: [f64; 3], cell_edge: f64, reach: f64) -> Vec<Vector3<f64>> {
    let d = minimum_image([b[0] - a[0], b[1] - a[1], b[2] - a[2]], cell_edge);
    let range = |dc: f64| {
        let lo = ((-reach - dc) / cell_edge).floor() as i64;
        let hi = ((reach - dc) / cell_edge).ceil() as i64;
        lo..=hi
    };
    let mut out = Vec::new();
    for kx in range(d.x) {
        for ky in range(d.y) {
            for kz in range(d.z) {
                let r = d + Vector3::new(kx as f64, ky as f64, kz as f64) * cell_edge;
                if r.norm() < reach {
                    out.push(r);
                }
            }
        }
    }
    out
}

/// Overlap of two solids whose centers are offset by `r` (from `a` to `b`).
/// Returns the contact-function maximum when it had to be evaluated.
fn pair_overlaps(a: &Inclusion, b: &Inclusion, a_inv: &Matrix3<f64>, b_inv: &Matrix3<f64>, r: &Vector3<f64>) -> bool {
    let dist = r.norm();
    if dist > a.bounding_radius() + b.bounding_radius() {
        return false;
    }
    if dist <= a.inscribed_radius() + b.inscribed_radius() {
        return true;
    }
    if a.is_sphere() && b.is_sphere() {
        return dist <= a.semi_axes[0] + b.semi_axes[0];
    }
    contact_function(a_inv, b_inv, r) <= 1.0
}

/// True iff the closed solids overlap for at least one periodic image of `b`.
pub fn intersects(a: &Inclusion, b: &Inclusion, cell_edge: f64) -> bool {
    let reach = a.bounding_radius() + b.bounding_radius();
    let a_inv = inverse_shape_matrix(a);
    let b_inv = inverse_shape_matrix(b);
    image_offsets(a.center, b.center, cell_edge, reach + 1e-12)
        .iter()
        .any(|r| pair_overlaps(a, b, &a_inv, &b_inv, r))
}

/// True iff an inclusion overlaps one of its own periodic images.
pub fn intersects_own_image(a: &Inclusion, cell_edge: f64) -> bool {
    let reach = 2.0 * a.bounding_radius();
    let kmax = (reach / cell_edge).ceil() as i64;
    // Parallel congruent ellipsoids offset by t overlap iff t^T M t <= 4.
    let m = inverse_shape_matrix(a).try_inverse().expect("positive semi-axes");
    for kx in -kmax..=kmax {
        for ky in -kmax..=kmax {
            for kz in -kmax..=kmax {
                if (kx, ky, kz) == (0, 0, 0) {
                    continue;
                }
                let t = Vector3::new(kx as f64, ky as f64, kz as f64) * cell_edge;
                if t.dot(&(m * t)) <= 4.0 {
                    return true;
                }
            }
        }
    }
    false
}

/// Overlapping contact between two inclusions for one periodic image.
#[derive(Clone, Copy, Debug)]
pub struct Contact {
    /// Unit vector from the center of `a` to the image of `b`.
    pub direction: Vector3<f64>,
    /// Center displacement along `direction` that brings the pair (scaled by
    /// `inflation`) to contact.
    pub depth: f64,
}

/// Contacts between `a` and all periodic images of `b`, both scaled by `inflation`.
pub fn contacts(a: &Inclusion, b: &Inclusion, cell_edge: f64, inflation: f64) -> Vec<Contact> {
    let reach = inflation * (a.bounding_radius() + b.bounding_radius());
    let a_inv = inverse_shape_matrix(a);
    let b_inv = inverse_shape_matrix(b);
    let mut out = Vec::new();
    for r in image_offsets(a.center, b.center, cell_edge, reach) {
        let dist = r.norm();
        let scaled_f = if a.is_sphere() && b.is_sphere() {
            (dist / (a.semi_axes[0] + b.semi_axes[0])).powi(2)
        } else {
            contact_function(&a_inv, &b_inv, &r)
        } / (inflation * inflation);
        if scaled_f >= 1.0 {
            continue;
        }
        if dist < 1e-12 {
            out.push(Contact { direction: Vector3::x(), depth: inflation * a.inscribed_radius() });
        } else {
            out.push(Contact { direction: r / dist, depth: dist * (1.0 / scaled_f.sqrt() - 1.0) });
        }
    }
    out
}
