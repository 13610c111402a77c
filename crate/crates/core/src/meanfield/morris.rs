//! Morris (Hill polarization) tensor of an ellipsoid embedded in an
//! arbitrary anisotropic reference medium.
//!
//! ```text
//! E_ijkl = 1/(4 pi) ∫_{|n|=1} sym[ K^{-1}(xi)_ik xi_j xi_l ] dS(n),
//! K_jp(xi) = C_ijpl xi_i xi_l,   xi_k = n_k / a_k
//! ```
//!
//! The integrand is homogeneous of degree zero in `xi`, so only the
//! direction of `xi` matters. The Eshelby tensor is `S = E : C`.

use nalgebra::Matrix3;

use super::quadrature::SphereQuadrature;
use crate::error::{Error, Result};
use crate::tensor::{Tensor4, PAIRS, WEIGHTS};

/// Default number of polar Gauss nodes (azimuth uses twice as many).
pub const DEFAULT_ORDER: usize = 64;

/// Relative determinant below which the acoustic tensor counts as singular.
const SINGULAR_ACOUSTIC: f64 = 1e-14;

/// Morris tensor of the ellipsoid with semi-axes `semi_axes` (local frame)
/// in the reference medium `reference` (also expressed in the local frame).
pub fn morris_tensor(reference: &Tensor4, semi_axes: [f64; 3], quad: &SphereQuadrature) -> Result<Tensor4> {
    for &a in &semi_axes {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidSpec(format!("semi-axes must be positive, got {semi_axes:?}")));
        }
    }
    let c = reference.to_components();
    let scale = c[0][0][0][0].abs().max(c[1][1][1][1].abs()).max(c[2][2][2][2].abs());
    // Normalize the axes so the scaled directions stay O(1).
    let amin = semi_axes.iter().cloned().fold(f64::INFINITY, f64::min);
    let inv_a = semi_axes.map(|a| amin / a);

    let mut acc = [[0.0f64; 6]; 6];
    for (n, w) in quad.nodes() {
        let mut xi = [n[0] * inv_a[0], n[1] * inv_a[1], n[2] * inv_a[2]];
        let len = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
        for x in &mut xi {
            *x /= len;
        }
        let mut k = Matrix3::zeros();
        for j in 0..3 {
            for p in 0..3 {
                let mut s = 0.0;
                for i in 0..3 {
                    for l in 0..3 {
                        s += c[i][j][p][l] * xi[i] * xi[l];
                    }
                }
                k[(j, p)] = s;
            }
        }
        let det = k.determinant();
        if !(det.abs() > SINGULAR_ACOUSTIC * scale.powi(3)) {
            return Err(Error::SingularAcousticTensor { direction: *n });
        }
        let kinv = k.try_inverse().ok_or(Error::SingularAcousticTensor { direction: *n })?;
        for (r, &(i, j)) in PAIRS.iter().enumerate() {
            for (col, &(kk, l)) in PAIRS.iter().enumerate() {
                let g = 0.25
                    * (kinv[(i, kk)] * xi[j] * xi[l]
                        + kinv[(j, kk)] * xi[i] * xi[l]
                        + kinv[(i, l)] * xi[j] * xi[kk]
                        + kinv[(j, l)] * xi[i] * xi[kk]);
                acc[r][col] += w * g;
            }
        }
    }
    let norm = 1.0 / (4.0 * std::f64::consts::PI);
    let mut m = [[0.0; 6]; 6];
    for r in 0..6 {
        for col in 0..6 {
            m[r][col] = norm * acc[r][col] * WEIGHTS[r] * WEIGHTS[col];
        }
    }
    Ok(Tensor4::from_mandel_array(&m))
}

/// Eshelby tensor `S = E : C` in the local frame.
pub fn eshelby_tensor(reference: &Tensor4, semi_axes: [f64; 3], quad: &SphereQuadrature) -> Result<Tensor4> {
    Ok(morris_tensor(reference, semi_axes, quad)?.contract(reference))
}
