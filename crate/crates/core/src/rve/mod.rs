//! Periodic random packings of spheres and spheroids.

pub mod geometry;
mod md;
pub mod presets;
mod rsa;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rotation::EulerAngles;

pub use geometry::{intersects, intersects_own_image};
pub use presets::{preset, PRESET_NAMES};
pub use md::{md_generate, DEFAULT_MAX_SWEEPS, md_generate_with_report, RelaxationReport, MAX_MD_FRACTION};
pub use rsa::{rsa_generate, rsa_generate_with_budget, MAX_REJECTIONS, MAX_RSA_FRACTION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Sphere,
    Ellipsoid,
}

impl Shape {
    pub fn name(&self) -> &'static str {
        match self {
            Shape::Sphere => "sphere",
            Shape::Ellipsoid => "ellipsoid",
        }
    }
}

/// A sphere or spheroid with semi-axes `a1 >= a2 = a3` in its own frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inclusion {
    pub shape: Shape,
    pub center: [f64; 3],
    pub semi_axes: [f64; 3],
    pub euler: EulerAngles,
}

impl Inclusion {
    pub fn sphere(center: [f64; 3], radius: f64) -> Self {
        Self { shape: Shape::Sphere, center, semi_axes: [radius; 3], euler: EulerAngles::ZERO }
    }

    pub fn ellipsoid(center: [f64; 3], semi_axes: [f64; 3], euler: EulerAngles) -> Self {
        Self { shape: Shape::Ellipsoid, center, semi_axes, euler }
    }

    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * PI * self.semi_axes.iter().product::<f64>()
    }

    pub fn bounding_radius(&self) -> f64 {
        self.semi_axes.iter().cloned().fold(0.0, f64::max)
    }

    pub fn inscribed_radius(&self) -> f64 {
        self.semi_axes.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn is_sphere(&self) -> bool {
        self.semi_axes[0] == self.semi_axes[1] && self.semi_axes[1] == self.semi_axes[2]
    }

    pub fn aspect_ratio(&self) -> f64 {
        self.semi_axes[0] / self.semi_axes[1]
    }

    pub fn validate(&self) -> Result<()> {
        let [a1, a2, a3] = self.semi_axes;
        if !(a3 > 0.0 && a2 == a3 && a1 >= a2 && a1.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "semi-axes must satisfy a1 >= a2 = a3 > 0, got {:?}",
                self.semi_axes
            )));
        }
        if (self.shape == Shape::Sphere) != self.is_sphere() {
            return Err(Error::InvalidSpec(format!(
                "{} with semi-axes {:?}",
                self.shape.name(),
                self.semi_axes
            )));
        }
        Ok(())
    }
}

/// Generated microstructure in "vector form": the serialized document is
/// `{cell_edge, seed, inclusions: [{shape, center, semi_axes, euler}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RveRealization {
    pub cell_edge: f64,
    pub seed: u64,
    pub inclusions: Vec<Inclusion>,
    #[serde(skip)]
    pub target_fractions: BTreeMap<Shape, f64>,
}

impl RveRealization {
    pub fn empty(cell_edge: f64, seed: u64) -> Self {
        Self { cell_edge, seed, inclusions: Vec::new(), target_fractions: BTreeMap::new() }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: RveRealization = serde_json::from_str(s)?;
        if !(r.cell_edge > 0.0) {
            return Err(Error::InvalidSpec("cell_edge must be positive".into()));
        }
        for inc in &r.inclusions {
            inc.validate()?;
        }
        Ok(r)
    }

    pub fn total_fraction(&self) -> f64 {
        volume_fraction(self).values().sum()
    }

    /// Pairs `(i, j)`, `i <= j`, that overlap under periodic wrap; `i == j`
    /// flags an inclusion touching its own image.
    pub fn overlapping_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, a) in self.inclusions.iter().enumerate() {
            if intersects_own_image(a, self.cell_edge) {
                out.push((i, i));
            }
            for (j, b) in self.inclusions.iter().enumerate().skip(i + 1) {
                if intersects(a, b, self.cell_edge) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Analytic volume fraction per shape; every inclusion counts once.
pub fn volume_fraction(r: &RveRealization) -> BTreeMap<Shape, f64> {
    let cell = r.cell_edge.powi(3);
    let mut out = BTreeMap::new();
    for inc in &r.inclusions {
        *out.entry(inc.shape).or_insert(0.0) += inc.volume() / cell;
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrientationPolicy {
    #[default]
    Random,
    /// Orientations assigned in order, cycling if fewer than the count.
    Fixed(Vec<EulerAngles>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSpec {
    pub shape: Shape,
    pub count: usize,
    pub fraction: f64,
    #[serde(default = "one")]
    pub aspect_ratio: f64,
    #[serde(default)]
    pub orientation: OrientationPolicy,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    #[default]
    Rsa,
    Md,
}

/// Target microstructure: per-shape counts, fractions and aspect ratios.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RveSpec {
    #[serde(default = "one")]
    pub cell_edge: f64,
    #[serde(default)]
    pub phases: Vec<PhaseSpec>,
    #[serde(default)]
    pub generator: GeneratorKind,
}

impl RveSpec {
    pub fn new(phases: Vec<PhaseSpec>, generator: GeneratorKind) -> Self {
        Self { cell_edge: 1.0, phases, generator }
    }

    pub fn total_fraction(&self) -> f64 {
        self.phases.iter().map(|p| p.fraction).sum()
    }

    pub fn target_fractions(&self) -> BTreeMap<Shape, f64> {
        let mut out = BTreeMap::new();
        for p in &self.phases {
            *out.entry(p.shape).or_insert(0.0) += p.fraction;
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cell_edge > 0.0 && self.cell_edge.is_finite()) {
            return Err(Error::InvalidSpec("cell_edge must be positive".into()));
        }
        for p in &self.phases {
            if !(p.fraction >= 0.0) {
                return Err(Error::InvalidSpec(format!("negative fraction {}", p.fraction)));
            }
            if p.fraction > 0.0 && p.count == 0 {
                return Err(Error::InvalidSpec("positive fraction with zero inclusions".into()));
            }
            if !(p.aspect_ratio >= 1.0 && p.aspect_ratio.is_finite()) {
                return Err(Error::InvalidSpec(format!("aspect ratio must be >= 1, got {}", p.aspect_ratio)));
            }
            if p.shape == Shape::Sphere && p.aspect_ratio != 1.0 {
                return Err(Error::InvalidSpec("spheres have aspect ratio 1".into()));
            }
            if p.shape == Shape::Ellipsoid && p.aspect_ratio == 1.0 && p.count > 0 {
                return Err(Error::InvalidSpec("ellipsoids need aspect ratio > 1".into()));
            }
            if let OrientationPolicy::Fixed(list) = &p.orientation {
                if list.is_empty() && p.count > 0 {
                    return Err(Error::InvalidSpec("fixed orientation list is empty".into()));
                }
            }
        }
        if !(self.total_fraction() < 1.0) {
            return Err(Error::InvalidSpec(format!("fractions sum to {} >= 1", self.total_fraction())));
        }
        Ok(())
    }
}

/// Semi-axes `(a1, a2, a2)` of each of `count` equal inclusions filling `fraction`.
pub fn semi_axes_for(fraction: f64, count: usize, aspect_ratio: f64, cell_edge: f64) -> [f64; 3] {
    let volume = fraction * cell_edge.powi(3) / count as f64;
    let a2 = (3.0 * volume / (4.0 * PI * aspect_ratio)).cbrt();
    [aspect_ratio * a2, a2, a2]
}

/// Maximum orientation redraws for an inclusion that would overlap its own image.
const ORIENTATION_REDRAWS: usize = 10_000;

/// Unplaced inclusions (center at the origin) in spec order, with orientations drawn.
pub(crate) fn templates<R: Rng + ?Sized>(spec: &RveSpec, rng: &mut R) -> Result<Vec<Inclusion>> {
    let mut out = Vec::new();
    for p in &spec.phases {
        if p.count == 0 || p.fraction == 0.0 {
            continue;
        }
        let axes = semi_axes_for(p.fraction, p.count, p.aspect_ratio, spec.cell_edge);
        for k in 0..p.count {
            let inc = match p.shape {
                Shape::Sphere => Inclusion::sphere([0.0; 3], axes[0]),
                Shape::Ellipsoid => {
                    let draw = |rng: &mut R| match &p.orientation {
                        OrientationPolicy::Random => EulerAngles::random(rng),
                        OrientationPolicy::Fixed(list) => list[k % list.len()],
                    };
                    let mut inc = Inclusion::ellipsoid([0.0; 3], axes, draw(rng));
                    let mut redraws = 0;
                    while intersects_own_image(&inc, spec.cell_edge) {
                        if matches!(p.orientation, OrientationPolicy::Fixed(_)) || redraws == ORIENTATION_REDRAWS {
                            return Err(Error::InvalidSpec(format!(
                                "ellipsoid with semi-axes {axes:?} overlaps its own periodic image"
                            )));
                        }
                        inc.euler = draw(rng);
                        redraws += 1;
                    }
                    inc
                }
            };
            if intersects_own_image(&inc, spec.cell_edge) {
                return Err(Error::InvalidSpec(format!(
                    "inclusion with semi-axes {axes:?} does not fit in the cell"
                )));
            }
            out.push(inc);
        }
    }
    Ok(out)
}

/// Dispatches to the generator selected by `spec.generator`.
pub fn generate(spec: &RveSpec, seed: u64) -> Result<RveRealization> {
    match spec.generator {
        GeneratorKind::Rsa => rsa_generate(spec, seed),
        GeneratorKind::Md => md_generate(spec, seed),
    }
}

pub(crate) fn wrap(x: f64, l: f64) -> f64 {
    let w = x.rem_euclid(l);
    if w >= l {
        0.0
    } else {
        w
    }
}
