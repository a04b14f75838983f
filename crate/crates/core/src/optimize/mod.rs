//! Multi-start maximization of chained-Bell violations.
//!
//! Every search runs in two stages: many cheap restarts in a reduced
//! parametrization, then one refinement of the best restart in the full real
//! parametrization. All functions are deterministic in `(seed, n, family)`;
//! restarts draw from independent ChaCha streams and may run in parallel.

pub mod param;
pub mod powell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coherent::{bccb_operator, DisplacementSequence};
use crate::families::{ecs_expectation, tmsv_expectation, EcsParams, TmsvParams, MAX_SQUEEZING};
use crate::{classical_bound, Amplitude, Complex, Error, Result};

pub use param::{Decoded, Family, Parametrization, StateParams};
pub use powell::{minimize_scalar, LocalConfig, LocalMinimum, Termination};

/// Largest chain length accepted by the optimizers.
pub const MAX_SETTINGS: usize = 20;

/// Objective value assigned to settings the model cannot evaluate
/// (coincident displacements, failed factorization, invalid state parameters).
pub fn penalty(n: usize) -> f64 {
    10.0 * n as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Stage-1 restarts.
    pub restarts: usize,
    pub seed: u64,
    /// Objective evaluations allowed per local search.
    pub max_evaluations: usize,
    pub x_tolerance: f64,
    pub f_tolerance: f64,
    /// Sampling box `[lo, hi]` for stage-1 starts; `None` uses the
    /// per-parametrization default (see [`default_box`]).
    pub initial_box: Option<Vec<[f64; 2]>>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let local = LocalConfig::default();
        Self {
            restarts: 300,
            seed: 0,
            max_evaluations: local.max_evaluations,
            x_tolerance: local.x_tolerance,
            f_tolerance: local.f_tolerance,
            initial_box: None,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidParameter("restarts must be at least 1".into()));
        }
        if !(self.x_tolerance > 0.0 && self.f_tolerance > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if self.max_evaluations == 0 {
            return Err(Error::InvalidParameter("max_evaluations must be positive".into()));
        }
        if let Some(b) = &self.initial_box {
            if b.iter().any(|[lo, hi]| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
                return Err(Error::InvalidParameter("initial box needs finite lo <= hi".into()));
            }
        }
        Ok(())
    }

    fn local(&self) -> LocalConfig {
        LocalConfig {
            x_tolerance: self.x_tolerance,
            f_tolerance: self.f_tolerance,
            max_evaluations: self.max_evaluations,
        }
    }
}

/// Default stage-1 sampling box.
pub fn default_box(p: &Parametrization, n: usize) -> Vec<[f64; 2]> {
    let dim = p.dimension(n);
    match p {
        Parametrization::GeneralTwoStep => vec![[1e-3, 3.0]; 2],
        Parametrization::GeneralReal | Parametrization::GeneralComplex => vec![[-2.0, 2.0]; dim],
        // alpha grows with n at the optimum; the level offsets stay small
        Parametrization::EcsStaircase => {
            let (level, step) = ([-0.3, 0.3], [-0.5, 4.0]);
            vec![[1.0, 4.0], [-1.5, 3.0], step, step, level, [-4.0, 0.5], step, level]
        }
        Parametrization::EcsReduced | Parametrization::EcsDetailed | Parametrization::EcsFull => {
            let mut b = vec![[0.2, 2.5], [-1.5, 1.5]];
            b.resize(dim, [-2.0, 2.0]);
            b
        }
        Parametrization::TmsvFull => {
            let mut b = vec![[0.05, 2.0]];
            b.resize(dim, [-1.5, 1.5]);
            b
        }
        Parametrization::TmsvFixed { .. } => vec![[-1.5, 1.5]; dim],
    }
}

/// Expectation of the chained operator at decoded settings, maximized over
/// the state for [`StateParams::Optimal`].
pub fn expectation(decoded: &Decoded) -> Result<f64> {
    let n = decoded.betas.len();
    match decoded.state {
        StateParams::Optimal => {
            if decoded.is_real() {
                let x = DisplacementSequence::new(decoded.real_betas())?;
                let y = DisplacementSequence::new(decoded.real_gammas())?;
                Ok(bccb_operator(&x, &y)?.max_eigenvalue())
            } else {
                let x = DisplacementSequence::new(decoded.betas.clone())?;
                let y = DisplacementSequence::new(decoded.gammas.clone())?;
                Ok(bccb_operator(&x, &y)?.max_eigenvalue())
            }
        }
        StateParams::Ecs { alpha, a } => {
            let p = EcsParams::new(alpha, Complex::new(a, 0.0))?;
            ecs_expectation(&p, &decoded.betas, &decoded.gammas)
        }
        StateParams::Tmsv { r } => {
            let p = TmsvParams::new(r)?;
            tmsv_expectation(&p, &decoded.betas, &decoded.gammas)
        }
    }
    .and_then(|v: f64| {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::InvalidParameter(format!("non-finite expectation at n = {n}")))
        }
    })
}

/// Minimization objective: `-expectation`, or [`penalty`] where the settings
/// cannot be evaluated.
pub fn objective(p: &Parametrization, n: usize, x: &[f64]) -> f64 {
    match p.decode(n, x).and_then(|d| expectation(&d)) {
        Ok(v) => -v,
        Err(_) => penalty(n),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    First,
    Second,
    Single,
}

/// Result of one optimization stage for one chain length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationRun {
    pub family: Family,
    pub n: usize,
    pub parametrization: Parametrization,
    pub stage: Stage,
    pub seed: u64,
    /// Maximal expectation of the chained operator found.
    pub best_value: f64,
    pub best_point: Vec<f64>,
    /// `best_value - (2n - 2)`.
    pub violation: f64,
    /// Final expectation of every restart, in restart order.
    pub restart_histogram: Vec<f64>,
    pub betas: Vec<[f64; 2]>,
    pub gammas: Vec<[f64; 2]>,
    pub state: StateParams,
    pub evaluations: usize,
    /// At least one local search hit its evaluation budget.
    pub budget_exhausted: bool,
    /// The stage this run refined, if any.
    pub previous: Option<Box<OptimizationRun>>,
}

impl OptimizationRun {
    pub fn decoded(&self) -> Result<Decoded> {
        self.parametrization.decode(self.n, &self.best_point)
    }

    pub fn beta_amplitudes(&self) -> Vec<Amplitude> {
        self.betas.iter().map(|[re, im]| Amplitude::new(*re, *im)).collect()
    }

    pub fn gamma_amplitudes(&self) -> Vec<Amplitude> {
        self.gammas.iter().map(|[re, im]| Amplitude::new(*re, *im)).collect()
    }

    /// The first-stage run of a staged search (`self` for single-stage runs).
    pub fn first_stage(&self) -> &OptimizationRun {
        self.previous.as_deref().map_or(self, |p| p.first_stage())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProgressEvent {
    StageStarted {
        family: Family,
        n: usize,
        stage: Stage,
        restarts: usize,
    },
    StageFinished {
        family: Family,
        n: usize,
        stage: Stage,
        violation: f64,
    },
    Failed {
        family: Family,
        n: usize,
        message: String,
    },
}

pub trait ProgressSink: Sync {
    fn event(&self, event: ProgressEvent);
}

/// Discards every event.
pub struct NoProgress;

impl ProgressSink for NoProgress {
    fn event(&self, _: ProgressEvent) {}
}

impl<F: Fn(ProgressEvent) + Sync> ProgressSink for F {
    fn event(&self, event: ProgressEvent) {
        self(event)
    }
}

fn check_n(n: usize) -> Result<()> {
    if (2..=MAX_SETTINGS).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "chain length must lie in [2, {MAX_SETTINGS}], got {n}"
        )))
    }
}

/// Generator for one restart. Streams are keyed by parametrization, chain length and
/// restart index, so results do not depend on scheduling.
fn restart_rng(seed: u64, p: &Parametrization, n: usize, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((p.stream_tag() << 56) | ((n as u64) << 40) | restart as u64);
    rng
}

fn finish_run(
    p: Parametrization,
    n: usize,
    stage: Stage,
    seed: u64,
    best: LocalMinimum,
    histogram: Vec<f64>,
    evaluations: usize,
    budget_exhausted: bool,
) -> Result<OptimizationRun> {
    let decoded = p.decode(n, &best.point)?;
    let best_value = -best.value;
    let pair = |z: &Amplitude| [z.re, z.im];
    Ok(OptimizationRun {
        family: p.family(),
        n,
        parametrization: p,
        stage,
        seed,
        best_value,
        violation: best_value - classical_bound::<f64>(n),
        best_point: best.point,
        restart_histogram: histogram,
        betas: decoded.betas.iter().map(pair).collect(),
        gammas: decoded.gammas.iter().map(pair).collect(),
        state: decoded.state,
        evaluations,
        budget_exhausted,
        previous: None,
    })
}

/// Local searches from `config.restarts` random starts, in restart order.
fn local_searches(p: &Parametrization, n: usize, config: &OptimizerConfig) -> Result<Vec<LocalMinimum>> {
    check_n(n)?;
    config.validate()?;
    let dim = p.dimension(n);
    let bounds = match &config.initial_box {
        Some(b) if b.len() == dim => b.clone(),
        Some(b) => {
            return Err(Error::InvalidParameter(format!(
                "initial box has {} intervals, {} needs {dim}",
                b.len(),
                p.name()
            )))
        }
        None => default_box(p, n),
    };
    p.decode(n, &vec![0.0; dim])?;
    let local = config.local();
    let outcomes: Vec<LocalMinimum> = (0..config.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = restart_rng(config.seed, p, n, restart);
            let start: Vec<f64> = bounds
                .iter()
                .map(|&[lo, hi]| if lo < hi { rng.random_range(lo..hi) } else { lo })
                .collect();
            minimize_scalar(|x| objective(p, n, x), &start, &local)
        })
        .collect();
    Ok(outcomes)
}

/// Lowest-index minimum among `outcomes`.
fn best_of(outcomes: impl IntoIterator<Item = LocalMinimum>) -> Option<LocalMinimum> {
    outcomes
        .into_iter()
        .enumerate()
        .fold(None::<(usize, LocalMinimum)>, |acc, (i, m)| match acc {
            Some((j, b)) if b.value <= m.value => Some((j, b)),
            _ => Some((i, m)),
        })
        .map(|(_, m)| m)
}

/// Runs `config.restarts` local searches from random starts in the sampling
/// box and keeps the best (ties go to the lowest restart index).
pub fn multistart(p: Parametrization, n: usize, config: &OptimizerConfig) -> Result<OptimizationRun> {
    let outcomes = local_searches(&p, n, config)?;

    let histogram = outcomes.iter().map(|m| -m.value).collect();
    let evaluations = outcomes.iter().map(|m| m.evaluations).sum();
    let exhausted = outcomes
        .iter()
        .any(|m| m.termination == Termination::BudgetExhausted);
    let best = best_of(outcomes).expect("at least one restart");
    finish_run(p, n, Stage::First, config.seed, best, histogram, evaluations, exhausted)
}

/// One local search in `full` started from the best point of `first`.
pub fn refine(first: OptimizationRun, full: Parametrization, config: &OptimizerConfig) -> Result<OptimizationRun> {
    let decoded = first.decoded()?;
    let start = full.encode(&decoded)?;
    let n = first.n;
    let out = minimize_scalar(|x| objective(&full, n, x), &start, &config.local());
    // The start point has the first stage's value, and the local search never
    // accepts an increase; keep the first-stage optimum if the penalty path
    // made the start look worse than it is.
    let (evaluations, exhausted) = (out.evaluations, out.termination == Termination::BudgetExhausted);
    let out = if -out.value >= first.best_value {
        out
    } else {
        LocalMinimum {
            value: -first.best_value,
            point: start,
            ..out
        }
    };
    let mut run = finish_run(
        full,
        n,
        Stage::Second,
        config.seed,
        out.clone(),
        vec![-out.value],
        evaluations,
        exhausted,
    )?;
    run.previous = Some(Box::new(first));
    Ok(run)
}

/// Two-parameter multi-start followed by one `2n - 2`-parameter refinement.
pub fn staged_general(n: usize, config: &OptimizerConfig) -> Result<OptimizationRun> {
    let first = multistart(Parametrization::GeneralTwoStep, n, config)?;
    refine(first, Parametrization::GeneralReal, config)
}

/// First-stage parametrization used for entangled coherent states.
pub fn ecs_first_stage(n: usize) -> Parametrization {
    match n {
        2 => Parametrization::EcsFull,
        6 => Parametrization::EcsDetailed,
        _ => Parametrization::EcsReduced,
    }
}

/// Number of first-stage optima followed by [`ecs_continuation`].
pub const CONTINUATION_BRANCHES: usize = 16;

/// Staircase optimum at chain length `n`, found by continuation from `n = 3`.
///
/// Staircase coordinates mean the same thing at every chain length and the
/// violating regions move slowly with `n`, while random starts at large `n`
/// almost always fall onto one of the classical plateaus (product states).
/// At every chain length up to `n` the best [`CONTINUATION_BRANCHES`] optima
/// (carried over from the previous length or found by a fresh multi-start
/// there) are followed by one local search each.
pub fn ecs_continuation(n: usize, config: &OptimizerConfig) -> Result<OptimizationRun> {
    let p = Parametrization::EcsStaircase;
    let first = p.min_settings();
    check_n(n)?;
    if n < first {
        return Err(Error::InvalidParameter(format!(
            "{} needs at least {first} settings, got {n}",
            p.name()
        )));
    }
    let local = config.local();
    let mut branches: Vec<LocalMinimum> = Vec::new();
    let (mut evaluations, mut exhausted) = (0, false);
    for m in first..=n {
        let mut next: Vec<LocalMinimum> = branches
            .into_par_iter()
            .map(|b| minimize_scalar(|x| objective(&p, m, x), &b.point, &local))
            .collect();
        next.extend(local_searches(&p, m, config)?);
        evaluations += next.iter().map(|b| b.evaluations).sum::<usize>();
        exhausted |= next.iter().any(|b| b.termination == Termination::BudgetExhausted);
        // stable: carried branches win ties against fresh restarts
        next.sort_by(|a, b| a.value.total_cmp(&b.value));
        next.truncate(CONTINUATION_BRANCHES);
        branches = next;
    }
    let histogram = branches.iter().map(|b| -b.value).collect();
    let best = best_of(branches).expect("at least one restart");
    finish_run(p, n, Stage::First, config.seed, best, histogram, evaluations, exhausted)
}

/// Multi-start over `(alpha, a, displacements)`, then a refinement in all
/// `2n + 2` real parameters.
///
/// The reduced first stage alone can miss every violating region, so for
/// `n >= 3` the staircase pattern (by [`ecs_continuation`]) and the full space
/// are searched as well, each multi-start with the same restart count; the
/// best candidate (earliest on ties) seeds the refinement.
pub fn optimize_ecs(n: usize, config: &OptimizerConfig) -> Result<OptimizationRun> {
    let mut candidates = vec![multistart(ecs_first_stage(n), n, config)?];
    if n >= Parametrization::EcsStaircase.min_settings() {
        candidates.push(ecs_continuation(n, config)?);
        candidates.push(multistart(Parametrization::EcsFull, n, config)?);
    }
    let first = candidates
        .into_iter()
        .reduce(|best, run| if run.best_value > best.best_value { run } else { best })
        .expect("at least one candidate");
    refine(first, Parametrization::EcsFull, config)
}

/// Multi-start over squeezing and all displacements, or displacements only
/// when `fixed_r` is given.
pub fn optimize_tmsv(n: usize, config: &OptimizerConfig, fixed_r: Option<f64>) -> Result<OptimizationRun> {
    let p = match fixed_r {
        Some(r) if (0.0..=MAX_SQUEEZING).contains(&r) => Parametrization::TmsvFixed { r },
        Some(r) => {
            return Err(Error::InvalidParameter(format!(
                "squeezing {r} outside [0, {MAX_SQUEEZING}]"
            )))
        }
        None => Parametrization::TmsvFull,
    };
    let mut run = multistart(p, n, config)?;
    run.stage = Stage::Single;
    Ok(run)
}

/// Optimal run for one chain length of the given family.
pub fn optimize(family: Family, n: usize, config: &OptimizerConfig) -> Result<OptimizationRun> {
    match family {
        Family::General => staged_general(n, config),
        Family::Ecs => optimize_ecs(n, config),
        Family::Tmsv => optimize_tmsv(n, config, None),
    }
}

/// One run per chain length in `n_range` (inclusive). Failures are reported to
/// `progress` and returned in place; the curve continues.
pub fn violation_curve(
    family: Family,
    n_range: [usize; 2],
    config: &OptimizerConfig,
    progress: &dyn ProgressSink,
) -> Vec<(usize, Result<OptimizationRun>)> {
    (n_range[0]..=n_range[1])
        .map(|n| {
            progress.event(ProgressEvent::StageStarted {
                family,
                n,
                stage: Stage::First,
                restarts: config.restarts,
            });
            let run = optimize(family, n, config);
            match &run {
                Ok(r) => progress.event(ProgressEvent::StageFinished {
                    family,
                    n,
                    stage: r.stage,
                    violation: r.violation,
                }),
                Err(e) => progress.event(ProgressEvent::Failed {
                    family,
                    n,
                    message: e.to_string(),
                }),
            }
            (n, run)
        })
        .collect()
}
