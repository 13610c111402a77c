//! Study configuration and the end-to-end pipelines behind the command line:
//! contrast sweeps comparing mean-field estimates with the FFT baseline, and
//! the analytic-oracle validation suite.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{homogenized_stiffness_fft, PhaseMaterials, Scheme, SolverSettings};
use crate::material::IsotropicMaterial;
use crate::meanfield::{
    eshelby_tensor, families_from_realization, homogenize, homogenize_mt, InclusionFamily, MeanFieldSettings,
    Model, SphereQuadrature,
};
use crate::moduli::{effective_moduli, ComparisonRow, EffectiveModuli};
use crate::rve::{generate, preset, RveRealization, RveSpec};
use crate::voxel::{voxelize, VoxelGrid, ELLIPSOID_PHASE, MATRIX_PHASE, MIN_RESOLUTION, SPHERE_PHASE};

pub const DEFAULT_CONTRASTS: [f64; 7] = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0];
pub const EXTENDED_CONTRASTS: [f64; 2] = [200.0, 400.0];

/// JSON schema of [`StudyConfig`].
pub const CONFIG_SCHEMA: &str = include_str!("../schema/study-config.schema.json");

/// Homogenization route.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fft,
    Mt,
    Lielens,
    Nsc,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Fft, Method::Mt, Method::Lielens, Method::Nsc];

    pub fn mean_field(self) -> Option<Model> {
        match self {
            Method::Fft => None,
            Method::Mt => Some(Model::MoriTanaka),
            Method::Lielens => Some(Model::Lielens),
            Method::Nsc => Some(Model::NormalizedSelfConsistent),
        }
    }

    pub fn label(self) -> &'static str {
        match self.mean_field() {
            None => crate::moduli::BASELINE_MODEL,
            Some(m) => m.label(),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fft" => Ok(Method::Fft),
            other => Ok(match Model::from_str(other)? {
                Model::MoriTanaka => Method::Mt,
                Model::Lielens => Method::Lielens,
                Model::NormalizedSelfConsistent => Method::Nsc,
            }),
        }
    }
}

/// Where the microstructure comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RveSource {
    Preset(String),
    Spec(RveSpec),
    /// Path to a realization JSON file.
    Realization(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub rve: RveSource,
    /// Label used in reports; derived from the source when absent.
    pub rve_id: Option<String>,
    pub seed: u64,
    /// Voxels per cell edge.
    pub resolution: usize,
    /// Inclusion-to-matrix Young's modulus ratios.
    pub contrasts: Vec<f64>,
    pub matrix: IsotropicMaterial,
    pub models: Vec<Method>,
    pub solver: SolverSettings,
    pub mean_field: MeanFieldSettings,
    pub out: PathBuf,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            rve: RveSource::Preset("rve1".into()),
            rve_id: None,
            seed: 0,
            resolution: 64,
            contrasts: DEFAULT_CONTRASTS.to_vec(),
            matrix: IsotropicMaterial::new(1.0, 1.0 / 3.0).expect("valid default matrix"),
            models: Method::ALL.to_vec(),
            solver: SolverSettings::default(),
            mean_field: MeanFieldSettings::default(),
            out: PathBuf::from("out"),
        }
    }
}

impl StudyConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("study config: {e}")))?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.contrasts.is_empty() {
            return Err(Error::InvalidConfig("contrast list is empty".into()));
        }
        if let Some(c) = self.contrasts.iter().find(|c| !(c.is_finite() && **c >= 1.0)) {
            return Err(Error::InvalidConfig(format!("contrast {c} is not a finite value >= 1")));
        }
        if self.models.is_empty() {
            return Err(Error::InvalidConfig("no model requested".into()));
        }
        if self.resolution < MIN_RESOLUTION {
            return Err(Error::InvalidConfig(format!(
                "resolution {} is below the minimum {MIN_RESOLUTION}",
                self.resolution
            )));
        }
        if let RveSource::Preset(name) = &self.rve {
            if preset(name).is_none() {
                return Err(Error::InvalidConfig(format!("unknown preset '{name}'")));
            }
        }
        self.solver.validate()
    }

    pub fn rve_label(&self) -> String {
        if let Some(id) = &self.rve_id {
            return id.clone();
        }
        match &self.rve {
            RveSource::Preset(name) => name.to_ascii_lowercase(),
            RveSource::Spec(_) => "custom".into(),
            RveSource::Realization(path) => {
                path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "custom".into())
            }
        }
    }

    pub fn spec(&self) -> Result<Option<RveSpec>> {
        Ok(match &self.rve {
            RveSource::Preset(name) => {
                Some(preset(name).ok_or_else(|| Error::InvalidConfig(format!("unknown preset '{name}'")))?)
            }
            RveSource::Spec(spec) => Some(spec.clone()),
            RveSource::Realization(_) => None,
        })
    }

    /// Generates (or loads) the realization.
    pub fn realize(&self) -> Result<RveRealization> {
        match &self.rve {
            RveSource::Realization(path) => RveRealization::from_json(&std::fs::read_to_string(path)?),
            _ => generate(&self.spec()?.expect("generated source"), self.seed),
        }
    }

    pub fn inclusion_material(&self, contrast: f64) -> Result<IsotropicMaterial> {
        self.matrix.scaled(contrast)
    }

    pub fn phase_materials(&self, contrast: f64) -> Result<PhaseMaterials> {
        let inclusion = self.inclusion_material(contrast)?;
        Ok(BTreeMap::from([(MATRIX_PHASE, self.matrix), (SPHERE_PHASE, inclusion), (ELLIPSOID_PHASE, inclusion)]))
    }
}

/// Mean-field stiffness of a realization at one contrast.
pub fn mean_field_moduli(
    config: &StudyConfig,
    realization: &RveRealization,
    model: Model,
    contrast: f64,
) -> Result<EffectiveModuli> {
    let families = families_from_realization(realization, &config.inclusion_material(contrast)?);
    let estimate = homogenize(model, &families, &config.matrix, &config.mean_field)?;
    effective_moduli(&estimate.stiffness, &config.matrix)
}

pub fn fft_moduli(config: &StudyConfig, grid: &VoxelGrid, contrast: f64) -> Result<EffectiveModuli> {
    let hom = homogenized_stiffness_fft(grid, &config.phase_materials(contrast)?, &config.solver)?;
    effective_moduli(&hom.stiffness, &config.matrix)
}

#[derive(Clone, Debug, Serialize)]
pub struct StageTiming {
    pub contrast: f64,
    pub model: String,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    /// Ordered by contrast, then FFT, MT, Lielens, NSC.
    pub rows: Vec<ComparisonRow>,
    pub timings: Vec<StageTiming>,
    pub fft_attempts: usize,
    pub fft_failures: usize,
}

impl SweepReport {
    /// True when the FFT baseline was requested and failed at every contrast.
    pub fn all_fft_failed(&self) -> bool {
        self.fft_attempts > 0 && self.fft_failures == self.fft_attempts
    }
}

/// Runs every requested method at every contrast on one realization.
/// Failures are recorded as FAILED rows instead of aborting the sweep.
pub fn sweep(config: &StudyConfig, realization: &RveRealization) -> Result<SweepReport> {
    config.validate()?;
    let rve_id = config.rve_label();
    let mut methods = config.models.clone();
    methods.sort();
    methods.dedup();
    let mut contrasts = config.contrasts.clone();
    contrasts.sort_by(f64::total_cmp);
    contrasts.dedup();

    let grid = if methods.contains(&Method::Fft) {
        let start = Instant::now();
        let g = voxelize(realization, config.resolution)?;
        log::info!("voxelized {rve_id} at {}^3 in {:.2} s", config.resolution, start.elapsed().as_secs_f64());
        Some(g)
    } else {
        None
    };

    let mut report = SweepReport { rows: Vec::new(), timings: Vec::new(), fft_attempts: 0, fft_failures: 0 };
    for &contrast in &contrasts {
        let mut baseline = None;
        for &method in &methods {
            let start = Instant::now();
            let result = match method.mean_field() {
                None => {
                    report.fft_attempts += 1;
                    fft_moduli(config, grid.as_ref().expect("grid for FFT"), contrast)
                }
                Some(model) => mean_field_moduli(config, realization, model, contrast),
            };
            let seconds = start.elapsed().as_secs_f64();
            log::info!("{rve_id} contrast {contrast}: {method} in {seconds:.2} s");
            report.timings.push(StageTiming { contrast, model: method.label().into(), seconds });
            let row = match result {
                Ok(moduli) if method == Method::Fft => {
                    baseline = Some(moduli);
                    ComparisonRow::baseline(&rve_id, contrast, moduli)
                }
                Ok(moduli) => ComparisonRow::compared(&rve_id, method.label(), contrast, moduli, baseline.as_ref())?,
                Err(e @ (Error::SolverNonConvergence { .. } | Error::MeanFieldNonConvergence { .. })) => {
                    log::warn!("{rve_id} contrast {contrast}: {method} failed: {e}");
                    if method == Method::Fft {
                        report.fft_failures += 1;
                    }
                    ComparisonRow::failed(&rve_id, method.label(), contrast)
                }
                Err(e) => return Err(e),
            };
            report.rows.push(row);
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleOutcome {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleOutcome {
    fn new(name: &str, max_deviation: f64, tolerance: f64) -> Self {
        Self { name: name.into(), max_deviation, tolerance, passed: max_deviation <= tolerance }
    }
}

impl fmt::Display for OracleOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<28} max deviation {:.3e} (tolerance {:.0e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.max_deviation,
            self.tolerance
        )
    }
}

/// Hashin-Shtrikman bound `(K, mu)` with phase 1 as the reference (lower bound when phase 1 is softer).
pub fn hashin_shtrikman(phase1: &IsotropicMaterial, phase2: &IsotropicMaterial, f2: f64) -> (f64, f64) {
    let (k1, g1) = (phase1.bulk(), phase1.shear());
    let (k2, g2) = (phase2.bulk(), phase2.shear());
    let f1 = 1.0 - f2;
    let k = k1 + f2 / (1.0 / (k2 - k1) + 3.0 * f1 / (3.0 * k1 + 4.0 * g1));
    let g = g1 + f2 / (1.0 / (g2 - g1) + 6.0 * f1 * (k1 + 2.0 * g1) / (5.0 * g1 * (3.0 * k1 + 4.0 * g1)));
    (k, g)
}

/// Analytic checks of the whole pipeline. `quadrature_order` sets the
/// orientation quadrature of every mean-field evaluation.
pub fn validate_suite(quadrature_order: usize) -> Result<Vec<OracleOutcome>> {
    let matrix = IsotropicMaterial::new(1.0, 1.0 / 3.0)?;
    let mf = MeanFieldSettings { quadrature_order, ..Default::default() };
    let mut out = Vec::new();

    let s = eshelby_tensor(&matrix.stiffness(), [1.0; 3], &SphereQuadrature::new(quadrature_order))?;
    let dev = [
        (s.component(0, 0, 0, 0) - 8.0 / 15.0).abs(),
        (s.component(0, 0, 1, 1) - 1.0 / 15.0).abs(),
        (s.component(0, 1, 0, 1) - 7.0 / 30.0).abs(),
    ];
    out.push(OracleOutcome::new("sphere Eshelby tensor", dev.into_iter().fold(0.0, f64::max), 1e-6));

    let mut hs_dev: f64 = 0.0;
    for f in [0.05, 0.30, 0.50] {
        for contrast in [10.0, 100.0] {
            let inclusion = matrix.scaled(contrast)?;
            let est = homogenize_mt(&[InclusionFamily::sphere(f, inclusion)], &matrix, &mf)?;
            let (k, g) = est.stiffness.isotropic_projection();
            let (k_hs, g_hs) = hashin_shtrikman(&matrix, &inclusion, f);
            hs_dev = hs_dev.max(((k - k_hs) / k_hs).abs()).max(((g - g_hs) / g_hs).abs());
        }
    }
    out.push(OracleOutcome::new("Mori-Tanaka = HS lower bound", hs_dev, 1e-6));

    out.push(OracleOutcome::new("FFT laminate", laminate_deviation(&matrix)?, 1e-6));

    let config = StudyConfig { mean_field: mf, resolution: 16, ..Default::default() };
    let realization = generate(&preset("rve1").expect("preset"), 1)?;
    let grid = voxelize(&realization, config.resolution)?;
    let mut id_dev: f64 = 0.0;
    let mut moduli = vec![fft_moduli(&config, &grid, 1.0)?];
    for model in Model::ALL {
        moduli.push(mean_field_moduli(&config, &realization, model, 1.0)?);
    }
    for m in moduli {
        for v in [m.k_norm, m.mu_norm, m.e1_norm] {
            id_dev = id_dev.max((v - 1.0).abs());
        }
    }
    out.push(OracleOutcome::new("contrast-1 identity", id_dev, 1e-6));
    Ok(out)
}

/// Largest relative error of the FFT stiffness of a two-phase laminate
/// against the exact layer formulas.
fn laminate_deviation(matrix: &IsotropicMaterial) -> Result<f64> {
    let n = 16;
    let stiff = matrix.scaled(10.0)?;
    let mut grid = VoxelGrid::uniform(n, 1.0, MATRIX_PHASE);
    for z in 0..n {
        for y in 0..n {
            for x in 0..n / 4 {
                let i = grid.index(x, y, z);
                grid.phases[i] = SPHERE_PHASE;
            }
        }
    }
    let mats = BTreeMap::from([(MATRIX_PHASE, *matrix), (SPHERE_PHASE, stiff)]);
    let settings = SolverSettings { tolerance: 1e-10, scheme: Scheme::EyreMilton, ..Default::default() };
    let c = homogenized_stiffness_fft(&grid, &mats, &settings)?.stiffness;
    let layers = [(0.25, stiff), (0.75, *matrix)];
    let avg = |f: &dyn Fn(&IsotropicMaterial) -> f64| layers.iter().map(|(w, m)| w * f(m)).sum::<f64>();
    let p = |m: &IsotropicMaterial| m.lambda() + 2.0 * m.shear();
    let m_inv = avg(&|m| 1.0 / p(m));
    let l_over_p = avg(&|m| m.lambda() / p(m));
    let expected = [
        ((0, 0), 1.0 / m_inv),
        ((0, 1), l_over_p / m_inv),
        ((1, 1), avg(&|m| p(m) - m.lambda() * m.lambda() / p(m)) + l_over_p * l_over_p / m_inv),
        ((1, 2), avg(&|m| m.lambda() - m.lambda() * m.lambda() / p(m)) + l_over_p * l_over_p / m_inv),
        ((3, 3), 2.0 * avg(&|m| m.shear())),
        ((5, 5), 2.0 / avg(&|m| 1.0 / m.shear())),
    ];
    let mandel = c.mandel();
    Ok(expected.iter().map(|&(idx, want)| ((mandel[idx] - want) / want).abs()).fold(0.0, f64::max))
}
