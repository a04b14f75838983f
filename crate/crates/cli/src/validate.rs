//! Oracle cross-checks.

use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use bellmzi_core::coherent::{gram, overlap, DisplacementSequence};
use bellmzi_core::families::{ecs_expectation, ecs_state_fock, tmsv_expectation, tmsv_state_fock, EcsParams, TmsvParams};
use bellmzi_core::fock::{
    bccb_expectation_brute, coherent_coefficients, coherent_fock, dephased_bccb_expectation, dephased_projector,
    truncation_for, truncation_for_squeezing,
};
use bellmzi_core::optimize::{staged_general, OptimizationRun, OptimizerConfig, StateParams};
use bellmzi_core::{classical_bound, store, Amplitude, FockState};

use crate::campaign::eigenpair_for;
use crate::{CliError, CliResult};

/// Largest accepted |closed form - Fock brute force| for state expectations.
pub const EXPECTATION_TOLERANCE: f64 = 1e-7;
/// Largest accepted error of overlaps and Gram entries.
pub const OVERLAP_TOLERANCE: f64 = 1e-10;
/// Slack allowed above the classical bound after dephasing.
pub const DEPHASED_SLACK: f64 = 1e-6;
/// Phase-quadrature points used to check the averaged projector.
pub const QUADRATURE_POINTS: usize = 4096;
pub const PROJECTOR_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Default, Serialize)]
pub struct ClosedFormReport {
    pub samples: usize,
    pub max_ecs_error: f64,
    pub max_tmsv_error: f64,
    pub max_overlap_error: f64,
    pub max_gram_error: f64,
}

impl ClosedFormReport {
    pub fn passed(&self) -> bool {
        self.max_ecs_error < EXPECTATION_TOLERANCE
            && self.max_tmsv_error < EXPECTATION_TOLERANCE
            && self.max_overlap_error < OVERLAP_TOLERANCE
            && self.max_gram_error < OVERLAP_TOLERANCE
    }
}

fn amplitude(rng: &mut ChaCha8Rng, scale: f64) -> Amplitude {
    Amplitude::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
}

/// Fock-space inner product `<x|y>`.
fn fock_overlap(x: Amplitude, y: Amplitude, n_trunc: usize) -> bellmzi_core::Result<Amplitude> {
    let u = coherent_fock(x, n_trunc)?;
    let w = coherent_fock(y, n_trunc)?;
    Ok(u.coefficients.dotc(&w.coefficients))
}

/// Random states and settings; every closed form is compared with the Fock
/// evaluation of the same quantity.
pub fn closed_form_report(samples: usize, seed: u64) -> bellmzi_core::Result<ClosedFormReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ClosedFormReport {
        samples,
        ..ClosedFormReport::default()
    };
    let mut sample = 0;
    while sample < samples {
        let n = rng.random_range(2..=5);
        let betas: Vec<Amplitude> = (0..n).map(|_| amplitude(&mut rng, 2.0)).collect();
        let gammas: Vec<Amplitude> = (0..n).map(|_| amplitude(&mut rng, 2.0)).collect();
        let (Ok(xs), Ok(ys)) = (
            DisplacementSequence::new(betas.clone()),
            DisplacementSequence::new(gammas.clone()),
        ) else {
            continue;
        };
        let alpha = rng.random_range(0.2..2.5);
        let Ok(ecs) = EcsParams::new(alpha, amplitude(&mut rng, 1.5)) else {
            continue;
        };
        let tmsv = TmsvParams::new(rng.random_range(0.05..1.5))?;
        sample += 1;

        let mut amps = betas.clone();
        amps.extend(&gammas);
        amps.push(Amplitude::new(alpha, 0.0));
        let n_trunc = truncation_for(&amps);
        let state = ecs_state_fock(&ecs, n_trunc)?;
        let closed = ecs_expectation(&ecs, &betas, &gammas)?;
        let brute = bccb_expectation_brute(&state, &betas, &gammas);
        report.max_ecs_error = report.max_ecs_error.max((closed - brute).abs());

        let n_trunc = truncation_for_squeezing(tmsv.r, 1e-13).max(truncation_for(&amps));
        let state = tmsv_state_fock(&tmsv, n_trunc)?;
        let closed = tmsv_expectation(&tmsv, &betas, &gammas)?;
        let brute = bccb_expectation_brute(&state, &betas, &gammas);
        report.max_tmsv_error = report.max_tmsv_error.max((closed - brute).abs());

        let n_trunc = truncation_for(&amps);
        let err = (overlap(betas[0], gammas[0]) - fock_overlap(betas[0], gammas[0], n_trunc)?).norm();
        report.max_overlap_error = report.max_overlap_error.max(err);
        for (seq, values) in [(&xs, &betas), (&ys, &gammas)] {
            let g = gram(seq);
            for i in 0..n {
                for j in 0..n {
                    let err = (g.entries[(i, j)] - fock_overlap(values[i], values[j], n_trunc)?).norm();
                    report.max_gram_error = report.max_gram_error.max(err);
                }
            }
        }
    }
    Ok(report)
}

pub fn closed_forms(samples: usize, seed: u64) -> CliResult<()> {
    if samples == 0 {
        return Err(CliError::Usage("samples must be positive".into()));
    }
    let report = closed_form_report(samples, seed)?;
    eprintln!(
        "ecs {:.2e}, tmsv {:.2e}, overlap {:.2e}, gram {:.2e}",
        report.max_ecs_error, report.max_tmsv_error, report.max_overlap_error, report.max_gram_error
    );
    println!("{}", json!({"command": "validate closed-forms", "passed": report.passed(), "report": report}));
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "closed forms disagree with the Fock oracle (tolerances {EXPECTATION_TOLERANCE:e} / {OVERLAP_TOLERANCE:e})"
        )))
    }
}

/// Average of `|e^{i phi} z><e^{i phi} z|` over `points` equally spaced phases.
pub fn quadrature_projector(z: Amplitude, n_trunc: usize, points: usize) -> DMatrix<Amplitude> {
    let mut acc = DMatrix::zeros(n_trunc, n_trunc);
    for k in 0..points {
        let phi = std::f64::consts::TAU * k as f64 / points as f64;
        let v = coherent_coefficients(z * Amplitude::from_polar(1.0, phi), n_trunc);
        acc += &v * v.adjoint();
    }
    acc / Amplitude::new(points as f64, 0.0)
}

/// Largest entry of `quadrature - diag(dephased)`.
pub fn projector_error(z: Amplitude, n_trunc: usize) -> f64 {
    let averaged = quadrature_projector(z, n_trunc, QUADRATURE_POINTS);
    let diagonal = dephased_projector(z, n_trunc).diagonal;
    let mut worst: f64 = 0.0;
    for i in 0..n_trunc {
        for j in 0..n_trunc {
            let expected = if i == j { diagonal[i] } else { 0.0 };
            worst = worst.max((averaged[(i, j)] - Amplitude::new(expected, 0.0)).norm());
        }
    }
    worst
}

#[derive(Debug, Clone, Serialize)]
pub struct DephasedReport {
    pub n: usize,
    pub classical_bound: f64,
    /// Top eigenvalue of the chained operator.
    pub eigenvalue: f64,
    /// The same state and settings evaluated in the Fock basis.
    pub synchronized: f64,
    pub dephased: f64,
    pub max_projector_error: f64,
}

impl DephasedReport {
    pub fn passed(&self) -> bool {
        self.synchronized > self.classical_bound
            && self.dephased <= self.classical_bound + DEPHASED_SLACK
            && self.max_projector_error < PROJECTOR_TOLERANCE
    }
}

/// Evaluates the run's maximally violating state with synchronized and with
/// phase-averaged projectors.
pub fn dephased_report(run: &OptimizationRun) -> bellmzi_core::Result<DephasedReport> {
    let eigen = eigenpair_for(run)?;
    let coefficients = eigen
        .vector_coherent
        .as_ref()
        .expect("analysis fills the coherent basis");
    let n = run.n;
    let c = DMatrix::from_row_iterator(n, n, coefficients.iter().map(|[re, im]| Amplitude::new(*re, *im)));
    let (betas, gammas) = (run.beta_amplitudes(), run.gamma_amplitudes());
    let mut amps = betas.clone();
    amps.extend(&gammas);
    let n_trunc = truncation_for(&amps);
    let state = FockState::from_coherent_expansion(&c, &betas, &gammas, n_trunc);
    let max_projector_error = amps
        .iter()
        .map(|&z| projector_error(z, n_trunc))
        .fold(0.0, f64::max);
    Ok(DephasedReport {
        n,
        classical_bound: classical_bound(n),
        eigenvalue: eigen.value,
        synchronized: bccb_expectation_brute(&state, &betas, &gammas),
        dephased: dephased_bccb_expectation(&state, &betas, &gammas),
        max_projector_error,
    })
}

pub fn dephased(n: usize, input: Option<&Path>, config: &OptimizerConfig) -> CliResult<()> {
    let run = match input {
        Some(path) => store::load(path)?
            .runs
            .into_iter()
            .find(|r| r.n == n && r.state == StateParams::Optimal)
            .ok_or_else(|| CliError::Usage(format!("{} has no general-family optimum for n = {n}", path.display())))?,
        None => {
            eprintln!("general n={n}: searching ({} restarts)", config.restarts);
            staged_general(n, config).map_err(|e| match e {
                bellmzi_core::Error::InvalidParameter(m) => CliError::Usage(m),
                e => e.into(),
            })?
        }
    };
    let report = dephased_report(&run)?;
    eprintln!(
        "n={n}: synchronized {:.6}, dephased {:.6}, bound {}",
        report.synchronized, report.dephased, report.classical_bound
    );
    println!("{}", json!({"command": "validate dephased", "passed": report.passed(), "report": report}));
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "n = {n}: synchronized {} / dephased {} against bound {}",
            report.synchronized, report.dephased, report.classical_bound
        )))
    }
}
