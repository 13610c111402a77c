use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use homog::fft::homogenized_stiffness_fft;
use homog::moduli::{effective_moduli, write_csv, ComparisonRow};
use homog::rve::{volume_fraction, RveRealization};
use homog::study::{mean_field_moduli, sweep, validate_suite, Method, RveSource, StudyConfig};
use homog::voxel::voxelize;
use homog::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_JAMMING: u8 = 4;

#[derive(Parser)]
#[command(name = "homog", version, about = "Elastic homogenization of periodic particle composites")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Study configuration (JSON); flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Named microstructure (rve1..rve5, ellipsoids-P, empty).
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Existing realization JSON instead of generating one.
    #[arg(long, global = true)]
    realization: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Voxels per cell edge.
    #[arg(long, global = true)]
    resolution: Option<usize>,
    /// Comma-separated subset of fft,mt,lielens,nsc.
    #[arg(long, global = true, value_delimiter = ',')]
    models: Option<Vec<Method>>,
    /// Comma-separated Young's modulus ratios.
    #[arg(long, global = true, value_delimiter = ',')]
    contrasts: Option<Vec<f64>>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Repeat for more log output; also writes solver residual logs.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a realization and write it as JSON.
    Generate,
    /// Rasterize a realization into a phase-id grid.
    Voxelize,
    /// FFT homogenized stiffness at each contrast.
    Fft,
    /// Mean-field estimates at each contrast.
    Meanfield,
    /// Compare the requested models with the FFT baseline over the contrasts.
    Sweep,
    /// Run the analytic oracle suite.
    Validate {
        /// Orientation quadrature order for the mean-field checks.
        #[arg(long, default_value_t = homog::meanfield::morris::DEFAULT_ORDER)]
        quadrature_order: usize,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidConfig(_)
        | Error::InvalidSpec(_)
        | Error::InvalidMaterial { .. }
        | Error::UnknownPhase(_)
        | Error::Json(_) => EXIT_CONFIG,
        Error::Jamming { .. } | Error::RelaxationNonConvergence { .. } => EXIT_JAMMING,
        Error::SolverNonConvergence { .. } => EXIT_SOLVER,
        _ => EXIT_FAILURE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.common.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn build_config(common: &Common) -> homog::Result<StudyConfig> {
    let mut config = match &common.config {
        Some(path) => StudyConfig::load(path)?,
        None => StudyConfig::default(),
    };
    if let Some(name) = &common.preset {
        config.rve = RveSource::Preset(name.clone());
    }
    if let Some(path) = &common.realization {
        config.rve = RveSource::Realization(path.clone());
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(n) = common.resolution {
        config.resolution = n;
    }
    if let Some(models) = &common.models {
        config.models = models.clone();
    }
    if let Some(contrasts) = &common.contrasts {
        config.contrasts = contrasts.clone();
    }
    if let Some(out) = &common.out {
        config.out = out.clone();
    }
    if common.verbose > 0 {
        config.solver.log_dir = Some(config.out.join("logs"));
    }
    config.validate()?;
    Ok(config)
}

fn realize(config: &StudyConfig) -> homog::Result<RveRealization> {
    let r = config.realize()?;
    if let Some(spec) = config.spec()? {
        let achieved = volume_fraction(&r);
        for (shape, target) in spec.target_fractions() {
            log::info!(
                "{}: target fraction {target:.4}, achieved {:.4}",
                shape.name(),
                achieved.get(&shape).copied().unwrap_or(0.0)
            );
        }
    }
    Ok(r)
}

fn run(cli: Cli) -> homog::Result<u8> {
    let config = build_config(&cli.common)?;
    let id = config.rve_label();
    match cli.command {
        Command::Generate => {
            let r = realize(&config)?;
            fs::create_dir_all(&config.out)?;
            let path = config.out.join(format!("{id}.json"));
            fs::write(&path, r.to_json()?)?;
            let achieved = volume_fraction(&r);
            let targets = config.spec()?.map(|s| s.target_fractions()).unwrap_or_default();
            println!("wrote {} ({} inclusions)", path.display(), r.inclusions.len());
            for (shape, f) in &achieved {
                let target = targets.get(shape).map(|t| format!(" (target {t:.4})")).unwrap_or_default();
                println!("{:<10} fraction {f:.4}{target}", shape.name());
            }
            println!("{:<10} fraction {:.4}", "total", r.total_fraction());
        }
        Command::Voxelize => {
            let r = realize(&config)?;
            let grid = voxelize(&r, config.resolution)?;
            fs::create_dir_all(&config.out)?;
            let raw = config.out.join(format!("{id}_{}.raw", config.resolution));
            let sidecar = raw.with_extension("json");
            grid.write_raw(&raw, &sidecar)?;
            println!("wrote {} and {}", raw.display(), sidecar.display());
            for (phase, count) in grid.histogram() {
                println!("phase {phase}: {count} voxels ({:.4})", count as f64 / grid.len() as f64);
            }
        }
        Command::Fft => return fft(&config, &id),
        Command::Meanfield => {
            let r = realize(&config)?;
            let mut rows = Vec::new();
            for &contrast in &config.contrasts {
                for method in &config.models {
                    let Some(model) = method.mean_field() else { continue };
                    let m = mean_field_moduli(&config, &r, model, contrast)?;
                    rows.push(ComparisonRow::compared(&id, model.label(), contrast, m, None)?);
                }
            }
            if rows.is_empty() {
                return Err(Error::InvalidConfig("no mean-field model requested".into()));
            }
            write_rows(&config.out.join(format!("{id}_meanfield.csv")), &rows)?;
        }
        Command::Sweep => {
            let r = realize(&config)?;
            let report = sweep(&config, &r)?;
            write_rows(&config.out.join(format!("{id}_sweep.csv")), &report.rows)?;
            let timings = config.out.join(format!("{id}_timings.json"));
            fs::write(&timings, serde_json::to_string_pretty(&report.timings)?)?;
            if report.all_fft_failed() {
                eprintln!("error: the FFT solver failed at every contrast");
                return Ok(EXIT_SOLVER);
            }
        }
        Command::Validate { quadrature_order } => {
            let outcomes = validate_suite(quadrature_order)?;
            for o in &outcomes {
                println!("{o}");
            }
            if outcomes.iter().any(|o| !o.passed) {
                return Ok(EXIT_FAILURE);
            }
        }
    }
    Ok(0)
}

fn fft(config: &StudyConfig, id: &str) -> homog::Result<u8> {
    let r = realize(config)?;
    let grid = voxelize(&r, config.resolution)?;
    let mut results = Vec::new();
    let mut failures = 0;
    for &contrast in &config.contrasts {
        match homogenized_stiffness_fft(&grid, &config.phase_materials(contrast)?, &config.solver) {
            Ok(hom) => {
                let m = effective_moduli(&hom.stiffness, &config.matrix)?;
                println!(
                    "contrast {contrast}: K/Km {:.6} mu/mum {:.6} E1/Em {:.6} ({} iterations)",
                    m.k_norm,
                    m.mu_norm,
                    m.e1_norm,
                    hom.load_cases.iter().map(|l| l.iterations).sum::<usize>()
                );
                results.push(serde_json::json!({
                    "contrast": contrast,
                    "mandel": hom.stiffness.to_mandel_array(),
                    "asymmetry": hom.asymmetry,
                    "moduli": m,
                    "load_cases": hom.load_cases,
                }));
            }
            Err(e @ Error::SolverNonConvergence { .. }) => {
                eprintln!("contrast {contrast}: {e}");
                failures += 1;
                results.push(serde_json::json!({ "contrast": contrast, "failed": e.to_string() }));
            }
            Err(e) => return Err(e),
        }
    }
    fs::create_dir_all(&config.out)?;
    let path = config.out.join(format!("{id}_fft.json"));
    fs::write(&path, serde_json::to_string_pretty(&results)?)?;
    println!("wrote {}", path.display());
    Ok(if failures == config.contrasts.len() { EXIT_SOLVER } else { 0 })
}

fn write_rows(path: &Path, rows: &[ComparisonRow]) -> homog::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut text = Vec::new();
    write_csv(&mut text, rows)?;
    fs::write(path, &text)?;
    print!("{}", String::from_utf8_lossy(&text));
    println!("wrote {}", path.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_kind() {
        let jam = Error::Jamming { placed: 3, requested: 10, rejections: 100_000, achieved_fraction: 0.1 };
        assert_eq!(exit_code(&jam), EXIT_JAMMING);
        assert_eq!(exit_code(&Error::RelaxationNonConvergence { sweeps: 10, overlaps: 2 }), EXIT_JAMMING);
        assert_eq!(exit_code(&Error::InvalidConfig("x".into())), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::InvalidSpec("x".into())), EXIT_CONFIG);
        let solver = Error::SolverNonConvergence { load_case: Some(2), iterations: 5, residual: 1.0, history: vec![] };
        assert_eq!(exit_code(&solver), EXIT_SOLVER);
    }
}
