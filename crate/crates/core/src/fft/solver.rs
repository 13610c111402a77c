//! Fixed-point solution of the periodic Lippmann-Schwinger equation on a voxel grid.
//!
//! Basic scheme: `eps <- E - Gamma0 * ((c - c0) : eps)`.
//! Accelerated scheme (Eyre-Milton): with `e = E - Gamma0 * ((c - c0) : eps)`,
//! `eps <- eps + 2 (c + c0)^{-1} c0 : (e - eps)`.
//!
//! Both converge to the same discrete solution; only the iteration count differs.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft3::Fft3;
use super::green::{equilibrium_residual, green_apply, slabs_mut, zero_spectrum, Reference, Spectrum};
use crate::error::{Error, Result};
use crate::material::IsotropicMaterial;
use crate::tensor::Tensor4;
use crate::voxel::VoxelGrid;

/// Six Mandel component grids of a symmetric-tensor field, each x-fastest.
pub type Field = [Vec<f64>; 6];

/// Phase id to material.
pub type PhaseMaterials = BTreeMap<u8, IsotropicMaterial>;

/// Iterations treated as the initial transient when monitoring the residual.
const TRANSIENT: usize = 10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    Basic,
    EyreMilton,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    /// Equilibrium residual at which iteration stops.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Reference medium; derived from the phase moduli when absent.
    pub reference_material: Option<IsotropicMaterial>,
    pub scheme: Scheme,
    /// Directory for per-load-case `iteration,residual` CSV logs.
    #[serde(skip)]
    pub log_dir: Option<PathBuf>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { tolerance: 1e-6, max_iterations: 5000, reference_material: None, scheme: Scheme::Basic, log_dir: None }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig(format!("solver tolerance must be positive, got {}", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct LoadCaseResult {
    pub strain: Field,
    pub stress: Field,
    /// Fixed-point updates performed.
    pub iterations: usize,
    pub residual: f64,
    /// Residual before every update and at exit.
    pub history: Vec<f64>,
    /// Volume-averaged stress, Mandel components.
    pub mean_stress: [f64; 6],
    /// Largest `|<eps> - E|` seen over all iterates.
    pub max_mean_strain_error: f64,
    /// Residual increases after the initial transient.
    pub residual_increases: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LoadCaseSummary {
    pub iterations: usize,
    pub residual: f64,
    pub max_mean_strain_error: f64,
    pub residual_increases: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct FftHomogenization {
    /// Columns are the mean stresses of the six unit Mandel strains.
    pub stiffness: Tensor4,
    /// `|C - C^T| / |C|` of the assembled Mandel matrix.
    pub asymmetry: f64,
    pub reference: Reference,
    pub load_cases: Vec<LoadCaseSummary>,
}

/// Largest admissible major asymmetry of the assembled stiffness.
pub const MAX_ASYMMETRY: f64 = 1e-4;

struct PhaseTable {
    /// Mandel matrices indexed by phase id.
    stiffness: Vec<Option<[[f64; 6]; 6]>>,
}

impl PhaseTable {
    fn new(grid: &VoxelGrid, materials: &PhaseMaterials, f: impl Fn(&IsotropicMaterial) -> Result<Tensor4>) -> Result<Self> {
        let mut stiffness = vec![None; 256];
        for id in grid.phase_ids() {
            let m = materials.get(&id).ok_or(Error::UnknownPhase(id))?;
            stiffness[id as usize] = Some(f(m)?.to_mandel_array());
        }
        Ok(Self { stiffness })
    }
}

/// Reference medium used when none is given: arithmetic mean of the extreme
/// Lamé constants (basic) or geometric mean of the extreme bulk and shear
/// moduli (accelerated).
pub fn default_reference(grid: &VoxelGrid, materials: &PhaseMaterials, scheme: Scheme) -> Result<Reference> {
    let mut mats = Vec::new();
    for id in grid.phase_ids() {
        mats.push(*materials.get(&id).ok_or(Error::UnknownPhase(id))?);
    }
    let extremes = |f: &dyn Fn(&IsotropicMaterial) -> f64| {
        mats.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    Ok(match scheme {
        Scheme::Basic => {
            let (l_lo, l_hi) = extremes(&|m| m.lambda());
            let (m_lo, m_hi) = extremes(&|m| m.shear());
            Reference { lambda: 0.5 * (l_lo + l_hi), mu: 0.5 * (m_lo + m_hi) }
        }
        Scheme::EyreMilton => {
            let (k_lo, k_hi) = extremes(&|m| m.bulk());
            let (m_lo, m_hi) = extremes(&|m| m.shear());
            let (k0, mu0) = ((k_lo * k_hi).sqrt(), (m_lo * m_hi).sqrt());
            Reference { lambda: k0 - 2.0 * mu0 / 3.0, mu: mu0 }
        }
    })
}

fn reference_for(grid: &VoxelGrid, materials: &PhaseMaterials, settings: &SolverSettings) -> Result<Reference> {
    match settings.reference_material {
        Some(m) => Ok(Reference { lambda: m.lambda(), mu: m.shear() }),
        None => default_reference(grid, materials, settings.scheme),
    }
}

fn zero_field(len: usize) -> Field {
    std::array::from_fn(|_| vec![0.0; len])
}

/// `out = M[phase] : input` voxel by voxel.
fn apply_phase(out: &mut Field, input: &Field, phases: &[u8], table: &PhaseTable, slab: usize) {
    slabs_mut(out, slab).into_par_iter().enumerate().for_each(|(s, o)| {
        let start = s * slab;
        for i in 0..o[0].len() {
            let g = start + i;
            let m = table.stiffness[phases[g] as usize].as_ref().expect("phase checked");
            let e: [f64; 6] = std::array::from_fn(|c| input[c][g]);
            for r in 0..6 {
                let row = &m[r];
                o[r][i] = row[0] * e[0] + row[1] * e[1] + row[2] * e[2] + row[3] * e[3] + row[4] * e[4] + row[5] * e[5];
            }
        }
    });
}

/// `eps += B[phase] : (target - eps)` voxel by voxel.
fn relax_towards(eps: &mut Field, target: &Field, phases: &[u8], table: &PhaseTable, slab: usize) {
    slabs_mut(eps, slab).into_par_iter().enumerate().for_each(|(s, o)| {
        let start = s * slab;
        for i in 0..o[0].len() {
            let g = start + i;
            let m = table.stiffness[phases[g] as usize].as_ref().expect("phase checked");
            let d: [f64; 6] = std::array::from_fn(|c| target[c][g] - o[c][i]);
            for r in 0..6 {
                let row = &m[r];
                o[r][i] += row[0] * d[0] + row[1] * d[1] + row[2] * d[2] + row[3] * d[3] + row[4] * d[4] + row[5] * d[5];
            }
        }
    });
}

fn field_mean(f: &Field) -> [f64; 6] {
    std::array::from_fn(|c| f[c].par_iter().sum::<f64>() / f[c].len() as f64)
}

fn mean_error(f: &Field, e: &[f64; 6]) -> f64 {
    let m = field_mean(f);
    (0..6).map(|c| (m[c] - e[c]).abs()).fold(0.0, f64::max)
}

/// `spec <- -Gamma0 spec`, zero frequency set to `E` (unnormalized transform).
fn strain_update(spec: &mut Spectrum, n: usize, reference: &Reference, e_macro: &[f64; 6]) {
    green_apply(spec, n, reference);
    let volume = (n * n * n) as f64;
    for c in 0..6 {
        spec[c].par_iter_mut().for_each(|v| *v = -*v);
        spec[c][0] = Complex64::new(e_macro[c] * volume, 0.0);
    }
}

/// Solves one macroscopic strain `e_macro` (Mandel components).
pub fn solve_load_case(
    grid: &VoxelGrid,
    materials: &PhaseMaterials,
    e_macro: [f64; 6],
    settings: &SolverSettings,
) -> Result<LoadCaseResult> {
    settings.validate()?;
    let reference = reference_for(grid, materials, settings)?;
    solve_with_reference(grid, materials, e_macro, settings, &reference, &Fft3::new(grid.n))
}

fn solve_with_reference(
    grid: &VoxelGrid,
    materials: &PhaseMaterials,
    e_macro: [f64; 6],
    settings: &SolverSettings,
    reference: &Reference,
    plan: &Fft3,
) -> Result<LoadCaseResult> {
    let n = grid.n;
    let len = n * n * n;
    let slab = n * n;
    let c0 = Tensor4::isotropic(reference.lambda + 2.0 * reference.mu / 3.0, reference.mu);
    let stiffness = PhaseTable::new(grid, materials, |m| Ok(m.stiffness()))?;
    let polarization = PhaseTable::new(grid, materials, |m| Ok(m.stiffness() - c0))?;

    let mut eps: Field = std::array::from_fn(|c| vec![e_macro[c]; len]);
    let mut work = zero_field(len);
    let mut spec = zero_spectrum(plan.spectral_len());
    let mut history = Vec::new();
    let mut max_mean_error: f64 = 0.0;
    let mut increases = 0;

    let finish = |strain: Field, history: Vec<f64>, max_mean_error: f64, increases: usize| {
        let mut stress = zero_field(len);
        apply_phase(&mut stress, &strain, &grid.phases, &stiffness, slab);
        let mean_stress = field_mean(&stress);
        let residual = *history.last().expect("at least one residual");
        LoadCaseResult {
            strain,
            stress,
            iterations: history.len() - 1,
            residual,
            history,
            mean_stress,
            max_mean_strain_error: max_mean_error,
            residual_increases: increases,
        }
    };
    let mut record = |history: &mut Vec<f64>, r: f64| {
        if history.len() > TRANSIENT && r > *history.last().unwrap() {
            increases += 1;
        }
        history.push(r);
    };

    match settings.scheme {
        Scheme::Basic => {
            // Spectrum of the current (compatible) strain iterate.
            let mut eps_hat = zero_spectrum(plan.spectral_len());
            for c in 0..6 {
                eps_hat[c][0] = Complex64::new(e_macro[c] * len as f64, 0.0);
            }
            for it in 0..=settings.max_iterations {
                max_mean_error = max_mean_error.max(mean_error(&eps, &e_macro));
                apply_phase(&mut work, &eps, &grid.phases, &polarization, slab);
                for c in 0..6 {
                    plan.forward(&mut work[c], &mut spec[c]);
                }
                let r = residual_of_sum(&spec, &eps_hat, reference, n);
                record(&mut history, r);
                if r <= settings.tolerance {
                    return Ok(finish(eps, history, max_mean_error, increases));
                }
                if it == settings.max_iterations {
                    break;
                }
                strain_update(&mut spec, n, reference, &e_macro);
                for c in 0..6 {
                    eps_hat[c].copy_from_slice(&spec[c]);
                    plan.inverse(&mut spec[c], &mut eps[c]);
                }
            }
        }
        Scheme::EyreMilton => {
            let relax = PhaseTable::new(grid, materials, |m| Ok(((m.stiffness() + c0).inverse()?.contract(&c0)) * 2.0))?;
            let mut compatible = zero_field(len);
            for it in 0..=settings.max_iterations {
                apply_phase(&mut work, &eps, &grid.phases, &polarization, slab);
                for c in 0..6 {
                    plan.forward(&mut work[c], &mut spec[c]);
                }
                strain_update(&mut spec, n, reference, &e_macro);
                for c in 0..6 {
                    plan.inverse(&mut spec[c], &mut compatible[c]);
                }
                max_mean_error = max_mean_error.max(mean_error(&compatible, &e_macro));
                apply_phase(&mut work, &compatible, &grid.phases, &stiffness, slab);
                for c in 0..6 {
                    plan.forward(&mut work[c], &mut spec[c]);
                }
                let r = equilibrium_residual(&spec, n);
                record(&mut history, r);
                if r <= settings.tolerance {
                    return Ok(finish(compatible, history, max_mean_error, increases));
                }
                if it == settings.max_iterations {
                    break;
                }
                relax_towards(&mut eps, &compatible, &grid.phases, &relax, slab);
            }
        }
    }
    let residual = *history.last().unwrap_or(&f64::NAN);
    Err(Error::SolverNonConvergence { load_case: None, iterations: settings.max_iterations, residual, history })
}

/// Equilibrium residual of `sigma_hat = tau_hat + c0 : eps_hat`.
fn residual_of_sum(tau_hat: &Spectrum, eps_hat: &Spectrum, reference: &Reference, n: usize) -> f64 {
    let mut sigma = zero_spectrum(tau_hat[0].len());
    slabs_mut(&mut sigma, tau_hat[0].len()).into_iter().for_each(|s| {
        for i in 0..s[0].len() {
            let e: [Complex64; 6] = std::array::from_fn(|c| eps_hat[c][i]);
            let ce = reference.stress(&e);
            for c in 0..6 {
                s[c][i] = tau_hat[c][i] + ce[c];
            }
        }
    });
    equilibrium_residual(&sigma, n)
}

/// Homogenized stiffness from the six unit Mandel strains.
pub fn homogenized_stiffness_fft(
    grid: &VoxelGrid,
    materials: &PhaseMaterials,
    settings: &SolverSettings,
) -> Result<FftHomogenization> {
    settings.validate()?;
    let reference = reference_for(grid, materials, settings)?;
    let plan = Fft3::new(grid.n);
    let mut columns = [[0.0; 6]; 6];
    let mut load_cases = Vec::with_capacity(6);
    for j in 0..6 {
        let mut e = [0.0; 6];
        e[j] = 1.0;
        let start = Instant::now();
        let result = solve_with_reference(grid, materials, e, settings, &reference, &plan);
        let result = match result {
            Err(Error::SolverNonConvergence { iterations, residual, history, .. }) => {
                write_log(settings, j, &history)?;
                return Err(Error::SolverNonConvergence { load_case: Some(j), iterations, residual, history });
            }
            other => other?,
        };
        write_log(settings, j, &result.history)?;
        let seconds = start.elapsed().as_secs_f64();
        log::info!(
            "load case {j}: {} iterations, residual {:.3e}, {:.2} s",
            result.iterations,
            result.residual,
            seconds
        );
        if result.residual_increases > 0 {
            log::warn!("load case {j}: residual increased {} times after the transient", result.residual_increases);
        }
        columns[j] = result.mean_stress;
        load_cases.push(LoadCaseSummary {
            iterations: result.iterations,
            residual: result.residual,
            max_mean_strain_error: result.max_mean_strain_error,
            residual_increases: result.residual_increases,
            seconds,
        });
    }
    let mut m = [[0.0; 6]; 6];
    for (j, col) in columns.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            m[i][j] = *v;
        }
    }
    let stiffness = Tensor4::from_mandel_array(&m);
    let asymmetry = stiffness.major_asymmetry();
    if asymmetry > MAX_ASYMMETRY {
        log::warn!("homogenized stiffness major asymmetry {asymmetry:.3e} exceeds {MAX_ASYMMETRY:e}");
    }
    Ok(FftHomogenization { stiffness, asymmetry, reference, load_cases })
}

fn write_log(settings: &SolverSettings, load_case: usize, history: &[f64]) -> Result<()> {
    let Some(dir) = &settings.log_dir else { return Ok(()) };
    std::fs::create_dir_all(dir)?;
    let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join(format!("load_case_{load_case}.csv")))?);
    writeln!(f, "iteration,residual")?;
    for (i, r) in history.iter().enumerate() {
        writeln!(f, "{i},{r:.6e}")?;
    }
    Ok(())
}
