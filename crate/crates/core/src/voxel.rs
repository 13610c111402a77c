//! Periodic voxel phase maps of a realization.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rve::{RveRealization, Shape};

pub const MATRIX_PHASE: u8 = 0;
pub const SPHERE_PHASE: u8 = 1;
pub const ELLIPSOID_PHASE: u8 = 2;

pub const MIN_RESOLUTION: usize = 8;

pub fn phase_of(shape: Shape) -> u8 {
    match shape {
        Shape::Sphere => SPHERE_PHASE,
        Shape::Ellipsoid => ELLIPSOID_PHASE,
    }
}

/// `n^3` phase ids stored x-fastest: index `x + n (y + n z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VoxelGrid {
    pub n: usize,
    pub cell_edge: f64,
    pub phases: Vec<u8>,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    n: usize,
    cell_edge: f64,
    phase_table: BTreeMap<u8, String>,
}

impl VoxelGrid {
    pub fn uniform(n: usize, cell_edge: f64, phase: u8) -> Self {
        Self { n, cell_edge, phases: vec![phase; n * n * n] }
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.n * (y + self.n * z)
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> u8 {
        self.phases[self.index(x, y, z)]
    }

    pub fn count(&self, phase: u8) -> usize {
        self.phases.iter().filter(|&&p| p == phase).count()
    }

    pub fn fraction(&self, phase: u8) -> f64 {
        self.count(phase) as f64 / self.len() as f64
    }

    /// Fraction of voxels not in the matrix.
    pub fn inclusion_fraction(&self) -> f64 {
        1.0 - self.fraction(MATRIX_PHASE)
    }

    /// Voxel counts per phase id.
    pub fn histogram(&self) -> BTreeMap<u8, usize> {
        let mut out = BTreeMap::new();
        for &p in &self.phases {
            *out.entry(p).or_insert(0) += 1;
        }
        out
    }

    pub fn phase_ids(&self) -> Vec<u8> {
        self.histogram().into_keys().collect()
    }

    /// Writes the raw phase bytes and a JSON sidecar `{n, cell_edge, phase_table}`.
    pub fn write_raw(&self, raw: &Path, sidecar: &Path) -> Result<()> {
        std::fs::write(raw, &self.phases)?;
        let mut phase_table = BTreeMap::new();
        phase_table.insert(MATRIX_PHASE, "matrix".to_string());
        phase_table.insert(SPHERE_PHASE, "sphere".to_string());
        phase_table.insert(ELLIPSOID_PHASE, "ellipsoid".to_string());
        let doc = Sidecar { n: self.n, cell_edge: self.cell_edge, phase_table };
        std::fs::write(sidecar, serde_json::to_string_pretty(&doc)?)?;
        Ok(())
    }

    pub fn read_raw(raw: &Path, sidecar: &Path) -> Result<Self> {
        let doc: Sidecar = serde_json::from_str(&std::fs::read_to_string(sidecar)?)?;
        let phases = std::fs::read(raw)?;
        if phases.len() != doc.n.pow(3) {
            return Err(Error::InvalidConfig(format!(
                "raw grid holds {} voxels, sidecar says n = {}",
                phases.len(),
                doc.n
            )));
        }
        Ok(Self { n: doc.n, cell_edge: doc.cell_edge, phases })
    }
}

/// Voxel-center sampling: a voxel takes the phase of an inclusion when its
/// center lies inside some periodic image of it. Later inclusions win.
pub fn voxelize(r: &RveRealization, n: usize) -> Result<VoxelGrid> {
    if n < MIN_RESOLUTION {
        return Err(Error::InvalidConfig(format!("voxel resolution must be at least {MIN_RESOLUTION}, got {n}")));
    }
    let l = r.cell_edge;
    let h = l / n as f64;
    let ni = n as i64;
    struct Prepared {
        phase: u8,
        center: [f64; 3],
        /// Rows of `diag(1/a) R^T`: local scaled coordinates from a global offset.
        q: [[f64; 3]; 3],
        lo: [i64; 3],
        hi: [i64; 3],
    }
    let prepared: Vec<Prepared> = r
        .inclusions
        .iter()
        .map(|inc| {
            let m = inc.euler.matrix();
            let mut q = [[0.0; 3]; 3];
            for (k, row) in q.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = m[(j, k)] / inc.semi_axes[k];
                }
            }
            let reach = inc.bounding_radius();
            let lo = inc.center.map(|c| ((c - reach) / h - 0.5).floor() as i64);
            let hi = inc.center.map(|c| ((c + reach) / h - 0.5).ceil() as i64);
            Prepared { phase: phase_of(inc.shape), center: inc.center, q, lo, hi }
        })
        .collect();

    let mut grid = VoxelGrid::uniform(n, l, MATRIX_PHASE);
    grid.phases.par_chunks_mut(n * n).enumerate().for_each(|(z, slab)| {
        for p in &prepared {
            for kz in p.lo[2]..=p.hi[2] {
                if kz.rem_euclid(ni) as usize != z {
                    continue;
                }
                let dz = (kz as f64 + 0.5) * h - p.center[2];
                for ky in p.lo[1]..=p.hi[1] {
                    let dy = (ky as f64 + 0.5) * h - p.center[1];
                    let row = ky.rem_euclid(ni) as usize * n;
                    for kx in p.lo[0]..=p.hi[0] {
                        let dx = (kx as f64 + 0.5) * h - p.center[0];
                        let mut s = 0.0;
                        for q in &p.q {
                            let t = q[0] * dx + q[1] * dy + q[2] * dz;
                            s += t * t;
                        }
                        if s <= 1.0 {
                            slab[row + kx.rem_euclid(ni) as usize] = p.phase;
                        }
                    }
                }
            }
        }
    });
    Ok(grid)
}
