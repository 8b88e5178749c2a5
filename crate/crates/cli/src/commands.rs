//! The four commands. Each writes its primary output to the given writer
//! so tests can capture it; file destinations are opened here.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use mgp_core::density::{density_oracle, log_density};
use mgp_core::diagnostics::{distribution_checks, face_report};
use mgp_core::simulate::{Sampler, SimulationConfig};
use mgp_core::stdf::mixture_stdf;
use mgp_core::{EvalError, MixtureModel};

use crate::model_file::ModelFile;
use crate::parallel::sample_batch_parallel;
use crate::points_io::{read_points, write_samples};
use crate::{format_float, CliError, LINE_ENDING};

pub struct ValidateOpts {
    pub echo: bool,
    pub stdf_at: Vec<Vec<f64>>,
    pub mvn_tol: Option<f64>,
}

pub struct SimulateOpts {
    pub n: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub transform: Option<f64>,
    pub workers: usize,
    pub max_rejections: u64,
    pub mvn_tol: Option<f64>,
}

pub struct DensityOpts {
    pub points: PathBuf,
    pub out: Option<PathBuf>,
    pub oracle: bool,
    pub mvn_tol: Option<f64>,
}

pub struct ReportOpts {
    pub n: u64,
    pub seed: u64,
    pub workers: usize,
    pub mvn_tol: Option<f64>,
}

/// Loads and validates a model file, routing duplicate-signature warnings
/// to `err`.
pub fn load_model(
    path: &Path,
    mvn_tol: Option<f64>,
    err: &mut dyn Write,
) -> Result<MixtureModel, CliError> {
    let file = ModelFile::load(path)?;
    let model = file.build(mvn_tol)?;
    for w in model.warnings() {
        writeln!(err, "warning: {w}")?;
    }
    Ok(model)
}

pub fn cmd_validate(
    path: &Path,
    opts: &ValidateOpts,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let model = load_model(path, opts.mvn_tol, err)?;
    if opts.echo {
        write!(out, "{}", ModelFile::canonical(&model).to_toml())?;
        return Ok(());
    }
    writeln!(out, "d = {}", model.d())?;
    writeln!(out, "r = {}", model.r())?;
    let sigs: Vec<String> = model.signatures().iter().map(|s| s.to_string()).collect();
    writeln!(out, "signatures: {}", sigs.join(" "))?;
    let dirs: Vec<String> = model.extreme_directions().iter().map(|s| s.to_string()).collect();
    writeln!(out, "extreme directions: {}", dirs.join(" "))?;
    writeln!(out, "ell(1) = {}", format_float(model.ell_one()))?;
    let w: Vec<String> = model
        .face_weights()
        .as_slice()
        .iter()
        .map(|&x| format!("{x:.6}"))
        .collect();
    writeln!(out, "face weights: {}", w.join(" "))?;
    for y in &opts.stdf_at {
        if y.len() != model.d() {
            return Err(CliError::Parse(format!(
                "--stdf-at expects {} coordinates, found {}",
                model.d(),
                y.len()
            )));
        }
        let v = mixture_stdf(&model, y)?;
        let ys: Vec<String> = y.iter().map(|&x| format_float(x)).collect();
        writeln!(out, "stdf({}) = {}", ys.join(","), format_float(v))?;
    }
    Ok(())
}

pub fn cmd_simulate(
    path: &Path,
    opts: &SimulateOpts,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let model = load_model(path, opts.mvn_tol, err)?;
    let sampler = Sampler::new(&model).map_err(EvalError::from)?;
    let config = SimulationConfig {
        n: opts.n,
        seed: opts.seed,
        max_rejections: opts.max_rejections,
        workers: opts.workers,
    };
    let batch = sample_batch_parallel(&sampler, &config)?;
    match &opts.out {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            write_samples(&mut file, model.d(), &batch.points, opts.transform)?;
            file.flush()?;
        }
        None => write_samples(out, model.d(), &batch.points, opts.transform)?,
    }
    Ok(())
}

pub fn cmd_density(
    path: &Path,
    opts: &DensityOpts,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let model = load_model(path, opts.mvn_tol, err)?;
    let points = read_points(BufReader::new(File::open(&opts.points)?))?;
    let mut rows: Vec<String> = Vec::with_capacity(points.len() + 1);
    rows.push(
        if opts.oracle {
            "log_density,oracle_density,rel_discrepancy"
        } else {
            "log_density"
        }
        .to_string(),
    );
    for p in &points {
        if p.dim() != model.d() {
            return Err(CliError::Parse(format!(
                "point dimension {} does not match model dimension {}",
                p.dim(),
                model.d()
            )));
        }
        let ld = log_density(&model, p)?;
        if opts.oracle {
            let dens = ld.exp();
            // second pass pins the absolute tolerance to the magnitude
            let first = density_oracle(&model, p, 1e-12)?;
            let tol = (first.abs() * 1e-9).max(1e-300);
            let oracle = density_oracle(&model, p, tol)?;
            let rel = if dens == 0.0 && oracle == 0.0 {
                0.0
            } else {
                (dens - oracle).abs() / dens.abs().max(oracle.abs())
            };
            rows.push(format!(
                "{},{},{}",
                format_float(ld),
                format_float(oracle),
                format_float(rel)
            ));
        } else {
            rows.push(format_float(ld));
        }
    }
    let body = rows.join(LINE_ENDING) + LINE_ENDING;
    match &opts.out {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            file.write_all(body.as_bytes())?;
            file.flush()?;
        }
        None => out.write_all(body.as_bytes())?,
    }
    Ok(())
}

pub fn cmd_report(
    path: &Path,
    opts: &ReportOpts,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let model = load_model(path, opts.mvn_tol, err)?;
    let sampler = Sampler::new(&model).map_err(EvalError::from)?;
    let config = SimulationConfig {
        n: opts.n,
        seed: opts.seed,
        max_rejections: 1_000_000,
        workers: opts.workers,
    };
    let batch = sample_batch_parallel(&sampler, &config)?;
    let report = face_report(&model, &batch);
    write!(out, "{report}")?;
    writeln!(out)?;
    let checks = distribution_checks(&model, &batch)
        .map_err(|e| CliError::Parse(format!("report needs a larger batch: {e}")))?;
    write!(out, "{checks}")?;
    let failed = checks.results.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(CliError::ChecksFailed { failed, total: checks.results.len() });
    }
    Ok(())
}
