//! Commands that produce campaign records.

use std::path::{Path, PathBuf};

use serde_json::json;

use bellmzi_core::coherent::DisplacementSequence;
use bellmzi_core::optimize::{
    optimize_tmsv, violation_curve, Family, OptimizationRun, OptimizerConfig, ProgressEvent, StateParams,
};
use bellmzi_core::regression::{fit_saturation, SaturationModel};
use bellmzi_core::spectral::analyze;
use bellmzi_core::store::{self, record_path, results_root, CampaignKind, CampaignRecord, StoredEigenpair};

use crate::{creation_time, CliError, CliResult};

fn progress(event: ProgressEvent) {
    match event {
        ProgressEvent::StageStarted {
            family, n, restarts, ..
        } => eprintln!("{} n={n}: searching ({restarts} restarts)", family.name()),
        ProgressEvent::StageFinished {
            family, n, violation, ..
        } => eprintln!("{} n={n}: violation {violation:.6}", family.name()),
        ProgressEvent::Failed { family, n, message } => {
            eprintln!("{} n={n}: failed: {message}", family.name())
        }
    }
}

pub(crate) fn kind_of(family: Family) -> CampaignKind {
    match family {
        Family::General => CampaignKind::General,
        Family::Ecs => CampaignKind::Ecs,
        Family::Tmsv => CampaignKind::Tmsv,
    }
}

/// Saves `record` (stamping `created_at`) and prints its path and a summary line.
fn publish(mut record: CampaignRecord, path: PathBuf, mut summary: serde_json::Value) -> CliResult<CampaignRecord> {
    record.created_at = creation_time();
    store::save(&record, &path)?;
    summary["path"] = json!(path.display().to_string());
    summary["checksum"] = json!(record.checksum()?);
    println!("{}", path.display());
    println!("{summary}");
    Ok(record)
}

/// Top eigenpair of `S` at the run's displacements, coherent basis included.
pub fn eigenpair_for(run: &OptimizationRun) -> bellmzi_core::Result<StoredEigenpair> {
    let (betas, gammas) = (run.beta_amplitudes(), run.gamma_amplitudes());
    if betas.iter().chain(&gammas).all(|z| z.im == 0.0) {
        let x = DisplacementSequence::new(betas.iter().map(|z| z.re).collect())?;
        let y = DisplacementSequence::new(gammas.iter().map(|z| z.re).collect())?;
        Ok(StoredEigenpair::new(&analyze(&x, &y)?, &betas, &gammas))
    } else {
        let x = DisplacementSequence::new(betas.clone())?;
        let y = DisplacementSequence::new(gammas.clone())?;
        Ok(StoredEigenpair::new(&analyze(&x, &y)?, &betas, &gammas))
    }
}

/// Eigenpairs for every run of the general family; failures (e.g. a
/// degenerate top eigenvalue) are reported and skipped.
fn eigenpairs(runs: &[OptimizationRun]) -> Vec<StoredEigenpair> {
    runs.iter()
        .filter(|r| r.state == StateParams::Optimal)
        .filter_map(|r| match eigenpair_for(r) {
            Ok(e) => Some(e),
            Err(e) => {
                eprintln!("n={}: no eigenvector: {e}", r.n);
                None
            }
        })
        .collect()
}

pub fn run_campaign(family: Family, n_range: [usize; 2], config: &OptimizerConfig) -> CampaignRecord {
    let mut record = CampaignRecord::new(kind_of(family), n_range, config.clone());
    for (n, run) in violation_curve(family, n_range, config, &progress) {
        match run {
            Ok(run) => record.runs.push(run),
            Err(e) => record.failures.push((n, e.to_string())),
        }
    }
    record.eigen = eigenpairs(&record.runs);
    record
}

fn violations(record: &CampaignRecord) -> Vec<(usize, f64)> {
    record.runs.iter().map(|r| (r.n, r.violation)).collect()
}

pub fn optimize(family: Family, n_range: [usize; 2], config: &OptimizerConfig, out: Option<PathBuf>) -> CliResult<()> {
    let record = run_campaign(family, n_range, config);
    let path = out.unwrap_or_else(|| record_path(&results_root(), record.kind, n_range, config.seed));
    let summary = json!({
        "command": "optimize",
        "family": family.name(),
        "violations": violations(&record),
        "failures": record.failures,
    });
    let record = publish(record, path, summary)?;
    if record.runs.is_empty() {
        return Err(CliError::Validation("every chain length failed".into()));
    }
    Ok(())
}

/// `steps` equally spaced points of `[lo, hi]`, both ends included.
pub fn grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps)
        .map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64)
        .collect()
}

pub fn scan_tmsv_r(
    n_range: [usize; 2],
    r_min: f64,
    r_max: f64,
    steps: usize,
    config: &OptimizerConfig,
    out: Option<PathBuf>,
) -> CliResult<()> {
    if !(r_min.is_finite() && r_max.is_finite() && 0.0 <= r_min && r_min <= r_max) {
        return Err(CliError::Usage(format!("need 0 <= r-min <= r-max, got {r_min}, {r_max}")));
    }
    if r_max > bellmzi_core::families::MAX_SQUEEZING {
        return Err(CliError::Usage(format!(
            "r-max {r_max} exceeds {}",
            bellmzi_core::families::MAX_SQUEEZING
        )));
    }
    if steps == 0 {
        return Err(CliError::Usage("steps must be positive".into()));
    }
    let mut record = CampaignRecord::new(CampaignKind::TmsvRScan, n_range, config.clone());
    for n in n_range[0]..=n_range[1] {
        for r in grid(r_min, r_max, steps) {
            match optimize_tmsv(n, config, Some(r)) {
                Ok(run) => {
                    eprintln!("tmsv n={n} r={r:.4}: violation {:.6}", run.violation);
                    record.runs.push(run)
                }
                Err(e) => {
                    eprintln!("tmsv n={n} r={r:.4}: failed: {e}");
                    record.failures.push((n, format!("r = {r}: {e}")))
                }
            }
        }
    }
    let path = out.unwrap_or_else(|| record_path(&results_root(), record.kind, n_range, config.seed));
    let points: Vec<_> = record
        .runs
        .iter()
        .map(|run| match run.state {
            StateParams::Tmsv { r } => json!([run.n, r, run.violation]),
            _ => json!([run.n, null, run.violation]),
        })
        .collect();
    let summary = json!({"command": "scan", "points": points, "failures": record.failures});
    publish(record, path, summary)?;
    Ok(())
}

/// Row-major coherent-basis coefficients as nested `[re, im]` rows.
fn coherent_rows(e: &StoredEigenpair) -> Option<Vec<Vec<[f64; 2]>>> {
    let v = e.vector_coherent.as_ref()?;
    Some(v.chunks(e.n).map(|row| row.to_vec()).collect())
}

pub fn analyze_eigvec(input: &Path, n: Option<usize>, out: Option<PathBuf>) -> CliResult<()> {
    let source = store::load(input)?;
    let runs: Vec<OptimizationRun> = source
        .runs
        .iter()
        .filter(|r| r.state == StateParams::Optimal && n.is_none_or(|n| r.n == n))
        .cloned()
        .collect();
    if runs.is_empty() {
        return Err(CliError::Usage(match n {
            Some(n) => format!("{} has no general-family optimum for n = {n}", input.display()),
            None => format!("{} has no general-family optima", input.display()),
        }));
    }
    let n_range = match n {
        Some(n) => [n, n],
        None => source.n_range,
    };
    let mut record = CampaignRecord::new(CampaignKind::Eigvec, n_range, source.config.clone());
    record.eigen = eigenpairs(&runs);
    record.runs = runs;
    let path = out.unwrap_or_else(|| record_path(&results_root(), CampaignKind::Eigvec, n_range, source.config.seed));
    let eigen: Vec<_> = record
        .eigen
        .iter()
        .map(|e| {
            json!({
                "n": e.n,
                "value": e.value,
                "violation": e.violation,
                "schmidt": e.schmidt,
                "coherent_matrix": coherent_rows(e),
            })
        })
        .collect();
    let summary = json!({"command": "analyze eigvec", "eigen": eigen});
    publish(record, path, summary)?;
    Ok(())
}

pub fn fit(input: &Path, model: SaturationModel, out: Option<PathBuf>) -> CliResult<()> {
    let source = store::load(input)?;
    if source.runs.is_empty() {
        return Err(CliError::Usage(format!("{} holds no runs to fit", input.display())));
    }
    if source.kind == CampaignKind::TmsvRScan {
        return Err(CliError::Usage("fits need a violation curve, not an r-scan".into()));
    }
    let data: Vec<(f64, f64)> = source.runs.iter().map(|r| (r.n as f64, r.violation)).collect();
    let result = fit_saturation(&data, model).map_err(bellmzi_core::Error::from)?;
    for (name, value) in &result.parameters {
        eprintln!("{name} = {value:.6}");
    }
    for (name, value, se) in &result.derived {
        eprintln!("{name} = {value:.6} +- {se:.6}");
    }
    let mut record = CampaignRecord::new(CampaignKind::Fit, source.n_range, source.config.clone());
    record.runs = source.runs;
    record.fit = Some(result.clone());
    let model_name = match model {
        SaturationModel::Anchored => "anchored",
        SaturationModel::ThreeParam => "three",
    };
    let path = out.unwrap_or_else(|| {
        let base = record_path(&results_root(), CampaignKind::Fit, source.n_range, source.config.seed);
        base.with_file_name(format!(
            "{}_{model_name}.json",
            base.file_stem().unwrap_or_default().to_string_lossy()
        ))
    });
    let summary = json!({
        "command": "fit",
        "model": model_name,
        "parameters": result.parameters,
        "derived": result.derived,
        "covariance": result.covariance,
        "residual_norm": result.residual_norm,
    });
    publish(record, path, summary)?;
    Ok(())
}
