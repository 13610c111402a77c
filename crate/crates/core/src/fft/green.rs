//! Periodic Green operator of an isotropic reference medium, applied to
//! polarization spectra in Mandel components.
//!
//! For a unit wave direction `n` and `v = tau n`:
//!
//! ```text
//! (Gamma tau)_kh = (n_h v_k + n_k v_h) / (2 mu0) - (lambda0 + mu0) / (mu0 (lambda0 + 2 mu0)) n_k n_h (n . v)
//! ```
//!
//! The zero frequency maps to zero. On even grids, frequencies with a Nyquist
//! component have no conjugate partner of opposite sign; there the operator is
//! replaced by the reference compliance, which zeroes the stress at that bin.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::fft3::frequency;
use crate::tensor::PAIRS;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Six Mandel component spectra of a symmetric-tensor field.
pub type Spectrum = [Vec<Complex64>; 6];

pub fn zero_spectrum(len: usize) -> Spectrum {
    std::array::from_fn(|_| vec![Complex64::default(); len])
}

/// Splits the six component vectors into matching z slabs of `slab` entries.
pub(crate) fn slabs_mut<T: Send>(field: &mut [Vec<T>; 6], slab: usize) -> Vec<[&mut [T]; 6]> {
    let count = field[0].len().div_ceil(slab);
    let mut iters: Vec<_> = field.iter_mut().map(|v| v.chunks_mut(slab)).collect();
    (0..count)
        .map(|_| std::array::from_fn(|c| iters[c].next().expect("equal component lengths")))
        .collect()
}

/// Isotropic reference medium by its Lamé constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reference {
    pub lambda: f64,
    pub mu: f64,
}

impl Reference {
    /// `c0 : e` for a Mandel vector.
    pub fn stress(&self, e: &[Complex64; 6]) -> [Complex64; 6] {
        let tr = e[0] + e[1] + e[2];
        std::array::from_fn(|i| e[i] * (2.0 * self.mu) + if i < 3 { tr * self.lambda } else { Complex64::default() })
    }

    /// `c0^{-1} : t` for a Mandel vector.
    pub fn compliance(&self, t: &[Complex64; 6]) -> [Complex64; 6] {
        let tr = t[0] + t[1] + t[2];
        let c = self.lambda / (2.0 * self.mu * (3.0 * self.lambda + 2.0 * self.mu));
        std::array::from_fn(|i| t[i] / (2.0 * self.mu) - if i < 3 { tr * c } else { Complex64::default() })
    }
}

/// Green operator applied to one Mandel vector for the wave direction `k` (not normalized).
pub fn green_at(k: [f64; 3], t: &[Complex64; 6], reference: &Reference) -> [Complex64; 6] {
    let len = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    let n = [k[0] / len, k[1] / len, k[2] / len];
    let mut tau = [[Complex64::default(); 3]; 3];
    for (m, &(i, j)) in PAIRS.iter().enumerate() {
        let w = if i == j { 1.0 } else { 1.0 / SQRT2 };
        tau[i][j] = t[m] * w;
        tau[j][i] = t[m] * w;
    }
    let v: [Complex64; 3] = std::array::from_fn(|i| tau[i][0] * n[0] + tau[i][1] * n[1] + tau[i][2] * n[2]);
    let nv = v[0] * n[0] + v[1] * n[1] + v[2] * n[2];
    let (l0, m0) = (reference.lambda, reference.mu);
    let a = (l0 + m0) / (m0 * (l0 + 2.0 * m0));
    std::array::from_fn(|m| {
        let (k, h) = PAIRS[m];
        let g = (v[k] * n[h] + v[h] * n[k]) / (2.0 * m0) - nv * (a * n[k] * n[h]);
        if k == h {
            g
        } else {
            g * SQRT2
        }
    })
}

/// Replaces `tau_hat` by `Gamma0 tau_hat` on the half spectrum of an `n^3` grid.
pub fn green_apply(tau_hat: &mut Spectrum, n: usize, reference: &Reference) {
    assert!(reference.mu > 0.0, "reference shear modulus must be positive");
    let nh = n / 2 + 1;
    let even = n.is_multiple_of(2);
    slabs_mut(tau_hat, nh * n).into_par_iter().enumerate().for_each(|(kz, slab)| {
        let fz = frequency(kz, n) as f64;
        for ky in 0..n {
            let fy = frequency(ky, n) as f64;
            for kx in 0..nh {
                let idx = kx + nh * ky;
                let t: [Complex64; 6] = std::array::from_fn(|c| slab[c][idx]);
                let out = if kx == 0 && ky == 0 && kz == 0 {
                    [Complex64::default(); 6]
                } else if even && (2 * kx == n || 2 * ky == n || 2 * kz == n) {
                    reference.compliance(&t)
                } else {
                    green_at([kx as f64, fy, fz], &t, reference)
                };
                for c in 0..6 {
                    slab[c][idx] = out[c];
                }
            }
        }
    });
}

/// `sqrt(sum_{k != 0} |k . sigma_hat(k)|^2) / |sigma_hat(0)|` over the full
/// spectrum (integer wave vectors), from a half spectrum.
pub fn equilibrium_residual(sigma_hat: &Spectrum, n: usize) -> f64 {
    let nh = n / 2 + 1;
    let even = n.is_multiple_of(2);
    let mut acc = 0.0;
    for kz in 0..n {
        let fz = frequency(kz, n) as f64;
        for ky in 0..n {
            let fy = frequency(ky, n) as f64;
            for kx in 0..nh {
                let idx = kx + nh * (ky + n * kz);
                let s: [Complex64; 6] = std::array::from_fn(|c| sigma_hat[c][idx]);
                let fx = if even && 2 * kx == n { -(kx as f64) } else { kx as f64 };
                let k = [fx, fy, fz];
                let mut tensor = [[Complex64::default(); 3]; 3];
                for (m, &(i, j)) in PAIRS.iter().enumerate() {
                    let w = if i == j { 1.0 } else { 1.0 / SQRT2 };
                    tensor[i][j] = s[m] * w;
                    tensor[j][i] = s[m] * w;
                }
                let mut d2 = 0.0;
                for row in &tensor {
                    d2 += (row[0] * k[0] + row[1] * k[1] + row[2] * k[2]).norm_sqr();
                }
                // Bins strictly inside the half spectrum stand for a conjugate pair.
                let weight = if kx == 0 || (even && 2 * kx == n) { 1.0 } else { 2.0 };
                acc += weight * d2;
            }
        }
    }
    let mean: f64 = (0..6).map(|c| sigma_hat[c][0].norm_sqr()).sum::<f64>().sqrt();
    acc.sqrt() / mean
}
