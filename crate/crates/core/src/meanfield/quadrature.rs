//! Quadrature rules for orientation integrals over the unit sphere.

use std::f64::consts::{PI, TAU};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let (p, pm1) = if n == 0 { (1.0, 0.0) } else { (p1, p0) };
    let d = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, d)
}

/// Product rule on the unit sphere for integrands even under `n -> -n`.
///
/// The polar axis is local axis 1 (the long axis of a prolate inclusion).
/// Only the upper hemisphere `n_1 >= 0` is sampled; the polar coordinate is
/// `n_1 = 1 - v^2` with Gauss-Legendre in `v in [0, 1]`, and the azimuth uses
/// the trapezoid rule, which is spectrally accurate for periodic integrands.
/// The substitution moves the near-pole singularity of elongated inclusions
/// away from the real axis, so slender shapes converge with modest orders.
#[derive(Clone, Debug)]
pub struct SphereQuadrature {
    order: usize,
    nodes: Vec<([f64; 3], f64)>,
}

impl SphereQuadrature {
    /// `order` Gauss nodes in the polar variable and `2 * order` azimuthal nodes.
    pub fn new(order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let n_phi = 2 * order;
        let d_phi = TAU / n_phi as f64;
        let mut nodes = Vec::with_capacity(order * n_phi);
        for (&xi, &wi) in x.iter().zip(&w) {
            let v = 0.5 * (xi + 1.0);
            let wv = 0.5 * wi;
            let t = 1.0 - v * v;
            let s = v * (2.0 - v * v).sqrt();
            // dt = 2 v dv; the factor 2 folds in the lower hemisphere.
            let weight = 2.0 * 2.0 * v * wv * d_phi;
            for j in 0..n_phi {
                let (sp, cp) = (j as f64 * d_phi).sin_cos();
                nodes.push(([t, s * cp, s * sp], weight));
            }
        }
        Self { order, nodes }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Unit directions with weights summing to `4 pi`.
    pub fn nodes(&self) -> &[([f64; 3], f64)] {
        &self.nodes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(5);
        // Exact up to degree 9.
        for deg in 0..=9u32 {
            let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "degree {deg}: {q} vs {exact}");
        }
    }

    #[test]
    fn gauss_legendre_odd_count_has_center_node() {
        let (x, w) = gauss_legendre(3);
        assert!(x[1].abs() < 1e-16);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-15);
        assert!((x[2] - (0.6f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sphere_rule_moments() {
        let q = SphereQuadrature::new(16);
        let area: f64 = q.nodes().iter().map(|(_, w)| w).sum();
        assert!((area - 4.0 * PI).abs() < 1e-12);
        // Second moments: integral of n_i n_j = 4 pi / 3 delta_ij.
        for i in 0..3 {
            for j in 0..3 {
                let m: f64 = q.nodes().iter().map(|(n, w)| w * n[i] * n[j]).sum();
                let exact = if i == j { 4.0 * PI / 3.0 } else { 0.0 };
                assert!((m - exact).abs() < 1e-12);
            }
        }
        // Fourth moment of n_2: 4 pi / 5.
        let m4: f64 = q.nodes().iter().map(|(n, w)| w * n[1].powi(4)).sum();
        assert!((m4 - 4.0 * PI / 5.0).abs() < 1e-12);
        for (n, _) in q.nodes() {
            assert!((n[0] * n[0] + n[1] * n[1] + n[2] * n[2] - 1.0).abs() < 1e-14);
        }
    }
}
